//! Contextually defined symbols: qualified identity, qualified definiteness,
//! degrees of definiteness, and the subformula relation built on them.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::base::Signature;
use crate::syntax::{fresh_name, Description, Formula, IotaPred, Pred, QSet, Sign, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefError {
    #[error("qualified identity over the empty set of respects is undefined")]
    EmptyQSet,
    #[error("predicate `{0}` in the set of respects is not declared in the base")]
    UnknownPredicate(String),
}

/// `o1 =±_Q o2` unfolded into its definiens: for each `φ ∈ Q` (name order) the
/// universally closed conjunction of position-wise biconditionals. A unary
/// `φ` contributes the single biconditional `φo1 ↔ φo2`.
pub fn expand_qident(sign: Sign, o1: &Term, o2: &Term, q: &QSet) -> Result<Formula, DefError> {
    if q.is_empty() {
        return Err(DefError::EmptyQSet);
    }
    let parts = q.iter().map(|p| respect_clause(sign, o1, o2, p)).collect();
    Ok(Formula::conj(parts).expect("nonempty"))
}

/// `P^n_φ(o1, o2)` (or `N^n_φ` for negative sign).
pub fn respect_clause(sign: Sign, o1: &Term, o2: &Term, p: &Pred) -> Formula {
    if p.arity == 1 {
        return Formula::iff(
            Formula::predication(sign, p, vec![o1.clone()]),
            Formula::predication(sign, p, vec![o2.clone()]),
        );
    }
    let avoid: BTreeSet<String> = [o1.name().to_string(), o2.name().to_string()].into();
    let zs: Vec<String> = (1..)
        .map(|i| format!("z{i}"))
        .filter(|z| !avoid.contains(z))
        .take(p.arity)
        .collect();
    let conjuncts = (0..p.arity)
        .map(|j| {
            let with = |o: &Term| {
                let args = zs
                    .iter()
                    .enumerate()
                    .map(|(k, z)| if k == j { o.clone() } else { Term::Var(z.clone()) })
                    .collect();
                Formula::predication(sign, p, args)
            };
            Formula::iff(with(o1), with(o2))
        })
        .collect();
    let body = Formula::conj(conjuncts).expect("arity >= 1");
    zs.into_iter().rev().fold(body, |acc, z| Formula::forall(z, acc))
}

/// The three clauses of a description predication, for the description `desc`
/// occurring in `ip`: existence, qualified uniqueness, predication.
/// Bound variables `u`, `v`, `w` are renamed away from every name in `ip`.
pub fn iota_clauses(ip: &IotaPred, desc: &Description) -> [Formula; 3] {
    let names = Formula::Iota(ip.clone()).names();
    let mut avoid = names.clone();
    let mut pick = |base: &str| {
        let n = fresh_name(base, &avoid);
        avoid.insert(n.clone());
        n
    };
    let (u, v, w) = (pick("u"), pick("v"), pick("w"));
    let (tu, tv, tw) = (Term::Var(u.clone()), Term::Var(v.clone()), Term::Var(w.clone()));
    let existence = Formula::Exists(desc.var.clone(), Box::new(desc.body.clone()));
    let uniqueness = Formula::forall(
        u,
        Formula::forall(
            v,
            Formula::implies(
                Formula::and(desc.instance(&tu), desc.instance(&tv)),
                Formula::qident(desc.inner_sign(), tu.clone(), tv.clone(), desc.q.clone()),
            ),
        ),
    );
    let predication = Formula::forall(w, Formula::implies(desc.instance(&tw), ip.fill(desc, &tw)));
    [existence, uniqueness, predication]
}

/// One elaboration step of the leftmost description: `E & (QU & P)`.
pub fn elaborate_iota_step(ip: &IotaPred) -> Formula {
    let desc = ip.first_desc().expect("a description predication has a description");
    let [e, u, p] = iota_clauses(ip, desc);
    Formula::and(e, Formula::and(u, p))
}

/// Eliminate every description, innermost contexts included. Qualified
/// identity atoms are kept; see [`expand_all`] for the fully unfolded form.
pub fn elaborate(f: &Formula) -> Formula {
    match f {
        Formula::Iota(ip) => elaborate(&elaborate_iota_step(ip)),
        Formula::And(a, b) => Formula::and(elaborate(a), elaborate(b)),
        Formula::Or(a, b) => Formula::or(elaborate(a), elaborate(b)),
        Formula::Implies(a, b) => Formula::implies(elaborate(a), elaborate(b)),
        Formula::Forall(x, a) => Formula::forall(x.clone(), elaborate(a)),
        Formula::Exists(x, a) => Formula::exists(x.clone(), elaborate(a)),
        other => other.clone(),
    }
}

/// Eliminate descriptions and unfold qualified identities.
pub fn expand_all(f: &Formula) -> Result<Formula, DefError> {
    Ok(match f {
        Formula::Iota(_) => expand_all(&elaborate(f))?,
        Formula::QIdent { sign, left, right, q } => expand_qident(*sign, left, right, q)?,
        Formula::And(a, b) => Formula::and(expand_all(a)?, expand_all(b)?),
        Formula::Or(a, b) => Formula::or(expand_all(a)?, expand_all(b)?),
        Formula::Implies(a, b) => Formula::implies(expand_all(a)?, expand_all(b)?),
        Formula::Forall(x, a) => Formula::forall(x.clone(), expand_all(a)?),
        Formula::Exists(x, a) => Formula::exists(x.clone(), expand_all(a)?),
        other => other.clone(),
    })
}

/// Every description occurring in `f`, outermost first and left to right,
/// including those nested in description bodies.
pub fn descriptions_in(f: &Formula) -> Vec<&Description> {
    let mut out = Vec::new();
    collect_descriptions(f, &mut out);
    out
}

fn collect_descriptions<'a>(f: &'a Formula, out: &mut Vec<&'a Description>) {
    match f {
        Formula::Iota(ip) => {
            for d in ip.descriptions() {
                out.push(d);
                collect_descriptions(&d.body, out);
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_descriptions(a, out);
            collect_descriptions(b, out);
        }
        Formula::Forall(_, a) | Formula::Exists(_, a) => collect_descriptions(a, out),
        _ => {}
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degree {
    Maximal,
    Restricted,
    MinimalSingleton,
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Degree::Maximal => "maximal",
            Degree::Restricted => "restricted",
            Degree::MinimalSingleton => "minimal-singleton",
        })
    }
}

/// Degree of definiteness of a description relative to the base's `P`.
pub fn definiteness_degree(desc: &Description, sig: &Signature) -> Result<Degree, DefError> {
    for p in desc.q.iter() {
        if sig.predicate(&p.name) != Some(p) {
            return Err(DefError::UnknownPredicate(p.name.clone()));
        }
    }
    if desc.q == sig.all_predicates() {
        return Ok(Degree::Maximal);
    }
    match (desc.q.iter().next(), desc.atomic_pred()) {
        (Some(only), Some(own)) if desc.q.len() == 1 && only == own => Ok(Degree::MinimalSingleton),
        _ => Ok(Degree::Restricted),
    }
}

/// Subformula closure of `f`, as alpha-canonical representatives.
///
/// Quantified formulas contribute their open matrix and its instance at every
/// term in `terms`. Qualified identities and description predications
/// contribute the subformulas of their definientia.
pub fn subformulas(f: &Formula, terms: &BTreeSet<Term>) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect(f, terms, &mut out);
    out
}

fn collect(f: &Formula, terms: &BTreeSet<Term>, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.canonical()) {
        return;
    }
    match f {
        Formula::Atom(..) | Formula::NegPred(..) | Formula::Bottom => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect(a, terms, out);
            collect(b, terms, out);
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            collect(a, terms, out);
            for t in terms {
                collect(&a.subst_avoiding(x, t), terms, out);
            }
        }
        Formula::QIdent { sign, left, right, q } => {
            if let Ok(e) = expand_qident(*sign, left, right, q) {
                collect(&e, terms, out);
            }
        }
        Formula::Iota(ip) => collect(&elaborate_iota_step(ip), terms, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn sig() -> Signature {
        Signature::new(
            vec!["a".into(), "b".into(), "France".into()],
            vec![
                Pred::new("P", 1),
                Pred::new("B", 1),
                Pred::new("R", 2),
                Pred::new("King-of", 2),
                Pred::new("Real", 1),
            ],
        )
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    fn q(names: &[&str]) -> QSet {
        let s = sig();
        QSet::new(names.iter().map(|n| s.predicate(n).unwrap().clone()))
    }

    #[test]
    fn unary_identity_is_a_single_biconditional() {
        let a = Term::constant("a");
        let b = Term::constant("b");
        let got = expand_qident(Sign::Pos, &a, &b, &q(&["P"])).unwrap();
        assert_eq!(got, f("(P(a) -> P(b)) & (P(b) -> P(a))"));
        let neg = expand_qident(Sign::Neg, &a, &b, &q(&["P"])).unwrap();
        assert_eq!(neg, f("-P(a) <-> -P(b)"));
    }

    #[test]
    fn binary_identity_template() {
        let a = Term::constant("a");
        let b = Term::constant("b");
        let got = expand_qident(Sign::Pos, &a, &b, &q(&["R"])).unwrap();
        let want = f("forall z1. forall z2. (R(a, z2) <-> R(b, z2)) & (R(z1, a) <-> R(z1, b))");
        assert_eq!(got, want);
    }

    #[test]
    fn identity_expansion_avoids_argument_names() {
        let z = Term::var("z1");
        let b = Term::constant("b");
        let got = expand_qident(Sign::Pos, &z, &b, &q(&["R"])).unwrap();
        assert!(got.to_string().starts_with("forall z2. forall z3."), "{got}");
    }

    #[test]
    fn empty_qset_rejected() {
        let a = Term::constant("a");
        assert_eq!(expand_qident(Sign::Pos, &a, &a, &QSet::new([])), Err(DefError::EmptyQSet));
    }

    #[test]
    fn reflexive_expansion_has_identical_sides() {
        let a = Term::constant("a");
        let e = expand_qident(Sign::Pos, &a, &a, &q(&["P", "R"])).unwrap();
        fn check(f: &Formula) {
            match f {
                Formula::And(l, r) => {
                    if let (Formula::Implies(x, y), Formula::Implies(y2, x2)) = (&**l, &**r) {
                        assert_eq!(x, y);
                        assert_eq!(x2, y2);
                    } else {
                        check(l);
                        check(r);
                    }
                }
                Formula::Forall(_, b) => check(b),
                other => panic!("unexpected {other}"),
            }
        }
        check(&e);
    }

    #[test]
    fn elaborate_positive_description() {
        let got = elaborate(&f("B(iota[P] x. P(x))"));
        let want = f("(exists x. P(x)) & (forall u. forall v. P(u) & P(v) -> u =+[P] v) & (forall w. P(w) -> B(w))");
        assert_eq!(got, want);
    }

    #[test]
    fn elaborate_negative_description() {
        let got = elaborate(&f("B(iota[P] x. -P(x))"));
        let want = f("(exists x. -P(x)) & (forall u. forall v. -P(u) & -P(v) -> u =-[P] v) & (forall w. -P(w) -> B(w))");
        assert_eq!(got, want);
    }

    #[test]
    fn elaborate_king_of_france() {
        let got = elaborate(&f("-Real(iota[*] x. King-of(x, France))"));
        let Formula::And(_, rest) = &got else { panic!() };
        let Formula::And(_, pred) = &**rest else { panic!() };
        assert_eq!(**pred, f("forall w. King-of(w, France) -> -Real(w)"));
    }

    #[test]
    fn elaboration_renames_reserved_names() {
        let got = elaborate(&f("R(w, iota[P] u. P(u))"));
        let s = got.to_string();
        assert!(s.contains("forall v. forall v1.") || s.contains("forall u1. forall v."), "{s}");
        assert!(s.contains("R(w, w1)"), "{s}");
    }

    #[test]
    fn degrees() {
        let s = sig();
        let desc = |src: &str| match f(src) {
            Formula::Iota(ip) => ip.first_desc().unwrap().clone(),
            _ => panic!(),
        };
        assert_eq!(definiteness_degree(&desc("B(iota[*] x. P(x))"), &s), Ok(Degree::Maximal));
        assert_eq!(definiteness_degree(&desc("B(iota[P,B] x. P(x))"), &s), Ok(Degree::Restricted));
        assert_eq!(definiteness_degree(&desc("B(iota[P] x. P(x))"), &s), Ok(Degree::MinimalSingleton));
        assert_eq!(definiteness_degree(&desc("B(iota[B] x. P(x))"), &s), Ok(Degree::Restricted));
    }

    #[test]
    fn subformula_examples() {
        let terms: BTreeSet<Term> = [Term::constant("a"), Term::constant("b")].into();
        let ab = f("P(a) & B(a)");
        let s = subformulas(&ab, &terms);
        for g in ["P(a) & B(a)", "P(a)", "B(a)"] {
            assert!(s.contains(&f(g).canonical()));
        }
        let all = subformulas(&f("forall x. P(x)"), &terms);
        assert!(all.contains(&f("P(a)")) && all.contains(&f("P(b)")));
        assert_eq!(subformulas(&f("P(a)"), &terms).len(), 1);
        // transitivity on the closed binder-free members
        let big = subformulas(&f("B(iota[P] x. P(x))"), &terms);
        for g in big.iter().filter(|g| g.free_vars().is_empty() && !g.to_string().contains('%')) {
            let sub = subformulas(g, &terms);
            assert!(sub.is_subset(&big), "{g}: {:?}", sub.difference(&big).map(|x| x.to_string()).collect::<Vec<_>>());
        }
        assert!(big.contains(&f("a =+[P] b")));
        assert!(big.contains(&f("P(b) -> P(a)")));
    }
}
