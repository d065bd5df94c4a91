//! Bounded derivation search.
//!
//! The search space is goal-directed: introductions on the goal's shape
//! (as-rules included), assumption leaves, elimination chains whose main
//! branch starts at an assumption (`&E`, `⊃E`, `∀E` at the base constants,
//! `ιE`), and `⊥i` on such a chain. Disjunction, existential and identity
//! eliminations are not searched. Every result is checked by the kernel, so
//! the search may miss derivations but never returns an invalid one.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::base::SubatomicBase;
use crate::build;
use crate::defs::iota_clauses;
use crate::derivation::{Derivation, PairSpec, Unit};
use crate::kernel::{check_derivation, pair_atoms, required_pairs, Mode};
use crate::syntax::{fresh_name, Formula, Term};

pub const DEFAULT_CAP: usize = 256;

#[derive(Clone, Debug)]
struct Hyp {
    formula: Formula,
    label: Option<String>,
}

struct Search<'a> {
    base: &'a SubatomicBase,
    mode: Mode,
    cap: usize,
    truncated: bool,
    names: BTreeSet<String>,
    labels: usize,
}

impl Search<'_> {
    fn label(&mut self) -> String {
        self.labels += 1;
        format!("s{}", self.labels)
    }

    fn var(&mut self) -> Term {
        let n = fresh_name("y", &self.names);
        self.names.insert(n.clone());
        Term::Var(n)
    }

    fn limit(&mut self, mut v: Vec<Derivation>) -> Vec<Derivation> {
        if v.len() > self.cap {
            v.truncate(self.cap);
            self.truncated = true;
        }
        v
    }

    /// Candidate derivations of `goal` of depth at most `depth`.
    fn derive(&mut self, goal: &Formula, ctx: &[Hyp], depth: usize) -> Vec<Derivation> {
        let mut out = self.intros(goal, ctx, depth);
        out.extend(self.non_intros(goal, ctx, depth));
        self.limit(out)
    }

    fn non_intros(&mut self, goal: &Formula, ctx: &[Hyp], depth: usize) -> Vec<Derivation> {
        let chains = self.elims(ctx, depth);
        let mut out: Vec<Derivation> = chains
            .iter()
            .filter(|d| d.conclusion_formula().is_some_and(|c| c.alpha_eq(goal)))
            .cloned()
            .collect();
        if self.mode == Mode::I0 && *goal != Formula::Bottom && depth > 0 {
            out.extend(
                self.elims(ctx, depth - 1)
                    .into_iter()
                    .filter(|d| d.conclusion_formula() == Some(Formula::Bottom))
                    .map(|d| build::bot_i(d, goal.clone())),
            );
        }
        out
    }

    fn leaves(ctx: &[Hyp]) -> Vec<Derivation> {
        ctx.iter().map(|h| Derivation::Assume { formula: h.formula.clone(), label: h.label.clone() }).collect()
    }

    /// Elimination chains of depth at most `depth` from the assumptions.
    fn elims(&mut self, ctx: &[Hyp], depth: usize) -> Vec<Derivation> {
        let mut out = Self::leaves(ctx);
        if depth == 0 {
            return out;
        }
        for e in self.elims(ctx, depth - 1) {
            let Some(f) = e.conclusion_formula() else { continue };
            match &f {
                Formula::And(..) => {
                    out.push(build::and_e(1, e.clone()));
                    out.push(build::and_e(2, e));
                }
                Formula::Implies(a, _) => {
                    for minor in self.derive(a, ctx, depth - 1) {
                        out.push(build::imp_e(e.clone(), minor));
                    }
                }
                Formula::Forall(..) => {
                    for c in self.base.constants() {
                        out.push(build::forall_e(e.clone(), Term::constant(c.clone())));
                    }
                }
                Formula::Iota(ip) if ip.simple().is_some() => {
                    for k in 1..=3 {
                        out.push(build::iota_e(k, e.clone()));
                    }
                }
                _ => {}
            }
        }
        self.limit(out)
    }

    /// Derivations of the term-assumption unit `τΓ`.
    fn units(&mut self, symbol: &str, ctx: &[Hyp], depth: usize) -> Vec<Derivation> {
        let mut out = vec![Derivation::term(symbol)];
        if depth == 0 {
            return out;
        }
        for e in self.elims(ctx, depth - 1) {
            let Some(Formula::Atom(p, args) | Formula::NegPred(p, args)) = e.conclusion_formula() else { continue };
            let names = std::iter::once(p.name.clone()).chain(args.iter().map(|a| a.name().to_string()));
            for (i, n) in names.enumerate() {
                if n == symbol {
                    out.push(build::as_e(i, e.clone()));
                }
            }
        }
        out
    }

    fn intros(&mut self, goal: &Formula, ctx: &[Hyp], depth: usize) -> Vec<Derivation> {
        if depth == 0 {
            return Vec::new();
        }
        let d = depth - 1;
        let mut out = Vec::new();
        match goal {
            Formula::Atom(p, args) | Formula::NegPred(p, args) => {
                if args.iter().all(Term::is_const) {
                    let mut slots = vec![self.units(&p.name, ctx, d)];
                    for a in args {
                        slots.push(self.units(a.name(), ctx, d));
                    }
                    for premises in self.product(slots) {
                        out.push(build::as_i(goal.clone(), premises));
                    }
                }
            }
            Formula::Bottom => {}
            Formula::And(a, b) => {
                let slots = vec![self.derive(a, ctx, d), self.derive(b, ctx, d)];
                for ps in self.product(slots) {
                    let [x, y]: [Derivation; 2] = ps.try_into().expect("two premises");
                    out.push(build::and_i(x, y));
                }
            }
            Formula::Or(a, b) => {
                for x in self.derive(a, ctx, d) {
                    out.push(build::or_i(1, x, (**b).clone()));
                }
                for y in self.derive(b, ctx, d) {
                    out.push(build::or_i(2, y, (**a).clone()));
                }
            }
            Formula::Implies(a, b) => {
                let l = self.label();
                let mut inner = ctx.to_vec();
                inner.push(Hyp { formula: (**a).clone(), label: Some(l.clone()) });
                for body in self.derive(b, &inner, d) {
                    out.push(build::imp_i(Some(&l), (**a).clone(), body));
                }
            }
            Formula::Forall(x, a) => {
                let slots: Vec<Vec<Derivation>> = self
                    .base
                    .constants()
                    .to_vec()
                    .iter()
                    .map(|c| self.derive(&a.subst_avoiding(x, &Term::constant(c.clone())), ctx, d))
                    .collect();
                for ps in self.product(slots) {
                    out.push(build::forall_iii(x, (**a).clone(), ps));
                }
                let y = self.var();
                for body in self.derive(&a.subst_avoiding(x, &y), ctx, d) {
                    out.push(build::forall_i(x, (**a).clone(), y.clone(), body));
                }
            }
            Formula::Exists(x, a) => {
                for c in self.base.constants().to_vec() {
                    let t = Term::constant(c);
                    for body in self.derive(&a.subst_avoiding(x, &t), ctx, d) {
                        out.push(build::exists_i(x, (**a).clone(), t.clone(), body));
                    }
                }
            }
            Formula::QIdent { sign, left, right, q } => {
                let Ok(required) = required_pairs(self.base, q) else { return out };
                let mut specs = Vec::new();
                let mut slots = Vec::new();
                for (pred, position) in required {
                    let arity = self.base.signature().predicate(&pred).map_or(1, |p| p.arity);
                    let companions = (1..arity).map(|_| self.var()).collect();
                    let spec = PairSpec { pred, position, companions, labels: [self.label(), self.label()] };
                    let Ok((f1, f2)) = pair_atoms(self.base, *sign, left, right, &spec) else { return out };
                    for (assumed, concluded, label) in [(&f1, &f2, &spec.labels[0]), (&f2, &f1, &spec.labels[1])] {
                        let mut inner = ctx.to_vec();
                        inner.push(Hyp { formula: assumed.clone(), label: Some(label.clone()) });
                        slots.push(self.derive(concluded, &inner, d));
                    }
                    specs.push(spec);
                }
                for ps in self.product(slots) {
                    let mut it = ps.into_iter();
                    let pairs = specs
                        .iter()
                        .map(|s| (s.clone(), it.next().expect("forward"), it.next().expect("backward")))
                        .collect();
                    out.push(build::qident_i(*sign, left.clone(), right.clone(), q.clone(), pairs));
                }
            }
            Formula::Iota(ip) => {
                let Some(s) = ip.simple() else { return out };
                let clauses = iota_clauses(ip, s.desc);
                let slots = clauses.iter().map(|c| self.derive(c, ctx, d)).collect();
                for ps in self.product(slots) {
                    let [e, u, p]: [Derivation; 3] = ps.try_into().expect("three premises");
                    out.push(build::iota_i(goal.clone(), e, u, p));
                }
            }
        }
        self.limit(out)
    }

    fn product(&mut self, slots: Vec<Vec<Derivation>>) -> Vec<Vec<Derivation>> {
        let mut acc: Vec<Vec<Derivation>> = vec![Vec::new()];
        for slot in slots {
            let mut next = Vec::new();
            'outer: for prefix in &acc {
                for d in &slot {
                    if next.len() >= self.cap {
                        self.truncated = true;
                        break 'outer;
                    }
                    let mut v = prefix.clone();
                    v.push(d.clone());
                    next.push(v);
                }
            }
            acc = next;
        }
        acc
    }
}

/// A bounded sample of the canonical derivations of a formula.
#[derive(Clone, Debug, Serialize)]
pub struct MeaningSample {
    pub formula: String,
    pub depth_bound: usize,
    /// Whether the per-goal cap cut the enumeration short.
    pub truncated: bool,
    #[serde(skip)]
    pub derivations: Vec<Derivation>,
}

fn search<'a>(base: &'a SubatomicBase, f: &Formula, assumptions: &[Formula], mode: Mode, cap: usize) -> Search<'a> {
    let mut names: BTreeSet<String> = f.names();
    names.extend(assumptions.iter().flat_map(Formula::names));
    names.extend(base.constants().iter().cloned());
    Search { base, mode, cap, truncated: false, names, labels: 0 }
}

fn finish(base: &SubatomicBase, mode: Mode, depth: usize, found: Vec<Derivation>) -> Vec<Derivation> {
    let mut seen = BTreeSet::new();
    found
        .into_iter()
        .map(|d| d.canonicalize_labels())
        .filter(|d| d.depth() <= depth && check_derivation(base, d, mode).valid)
        .filter(|d| seen.insert(format!("{d:?}")))
        .collect()
}

/// Canonical derivations (last step an introduction) of `f` from `assumptions`
/// with depth at most `depth_bound`, within the search space above.
pub fn meaning_sample(
    base: &SubatomicBase,
    f: &Formula,
    assumptions: &[Formula],
    depth_bound: usize,
    mode: Mode,
) -> MeaningSample {
    let mut s = search(base, f, assumptions, mode, DEFAULT_CAP);
    let ctx: Vec<Hyp> = assumptions.iter().map(|a| Hyp { formula: a.clone(), label: None }).collect();
    let found = s.intros(f, &ctx, depth_bound);
    let derivations = finish(base, mode, depth_bound, found)
        .into_iter()
        .filter(|d| d.rule().is_some_and(|r| r.is_intro()) && matches!(d.conclusion(), Unit::Formula(_)))
        .collect();
    MeaningSample { formula: f.to_string(), depth_bound, truncated: s.truncated, derivations }
}

/// Some derivation of `goal` from `assumptions` with depth at most `depth`.
pub fn prove(base: &SubatomicBase, goal: &Formula, assumptions: &[Formula], depth: usize, mode: Mode) -> Option<Derivation> {
    let mut s = search(base, goal, assumptions, mode, DEFAULT_CAP);
    let ctx: Vec<Hyp> = assumptions.iter().map(|a| Hyp { formula: a.clone(), label: None }).collect();
    for bound in 0..=depth {
        let found = s.derive(goal, &ctx, bound);
        if let Some(d) = finish(base, mode, bound, found).into_iter().next() {
            return Some(d);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{bases, example_base};
    use crate::derivation::Rule;
    use crate::parse::parse_formula;

    fn f(base: &SubatomicBase, s: &str) -> Formula {
        parse_formula(s, base.signature()).unwrap()
    }

    #[test]
    fn contained_atom_by_as_introduction() {
        let base = example_base();
        let s = meaning_sample(&base, &f(&base, "Phi1(alpha)"), &[], 1, Mode::I0);
        assert_eq!(s.derivations, vec![build::as_i_leaves(f(&base, "Phi1(alpha)"))]);
    }

    #[test]
    fn absurdity_has_no_canonical_derivations() {
        for (_, _, base) in bases() {
            for bound in 0..=4 {
                assert!(meaning_sample(&base, &Formula::Bottom, &[], bound, Mode::I0).derivations.is_empty());
            }
        }
    }

    #[test]
    fn conjunction_of_an_assumption() {
        let base = example_base();
        let a = f(&base, "Phi1(alpha)");
        let s = meaning_sample(&base, &Formula::and(a.clone(), a.clone()), std::slice::from_ref(&a), 2, Mode::I0);
        assert!(s.derivations.contains(&build::and_i(Derivation::assume(a.clone()), Derivation::assume(a))));
        assert!(s.derivations.iter().all(|d| d.rule() == Some(&Rule::AndI)));
    }

    #[test]
    fn prover_finds_implications_and_identities() {
        let base = example_base();
        let g = f(&base, "Phi1(alpha) & Phi2(beta) -> Phi2(beta)");
        let d = prove(&base, &g, &[], 3, Mode::I0).unwrap();
        assert_eq!(d.conclusion_formula(), Some(g));
        let id = f(&base, "alpha =+[Phi1] beta");
        assert!(prove(&base, &id, &[], 4, Mode::I0).is_some());
        assert!(prove(&base, &Formula::Bottom, &[], 4, Mode::I0).is_none());
    }
}
