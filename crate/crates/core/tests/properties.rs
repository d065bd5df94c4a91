use std::collections::BTreeSet;

use proptest::prelude::*;
use qdef::base::Signature;
use qdef::defs::{elaborate_iota_step, expand_qident, subformulas};
use qdef::parse::parse_formula;
use qdef::syntax::{mirror, Arg, Description, Formula, IotaPred, Pred, QSet, Sign, Term};

fn signature() -> Signature {
    Signature::new(
        vec!["alpha".into(), "beta".into()],
        vec![Pred::new("P", 1), Pred::new("Q", 1), Pred::new("R", 2)],
    )
}

fn preds() -> Vec<Pred> {
    signature().predicates().to_vec()
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(Term::constant("alpha")),
        Just(Term::constant("beta")),
        Just(Term::var("x")),
        Just(Term::var("y")),
        Just(Term::var("z")),
    ]
}

fn constant() -> impl Strategy<Value = Term> {
    prop_oneof![Just(Term::constant("alpha")), Just(Term::constant("beta")), Just(Term::constant("gamma"))]
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Pos), Just(Sign::Neg)]
}

fn var() -> impl Strategy<Value = String> {
    prop_oneof![Just("x".to_string()), Just("y".to_string()), Just("z".to_string())]
}

fn qset() -> impl Strategy<Value = QSet> {
    proptest::sample::subsequence(preds(), 1..=3).prop_map(QSet::new)
}

fn predication() -> impl Strategy<Value = Formula> {
    (sign(), 0..3usize, term(), term()).prop_map(|(s, i, a, b)| {
        let p = &preds()[i];
        let args = if p.arity == 1 { vec![a] } else { vec![a, b] };
        Formula::predication(s, p, args)
    })
}

/// A description predication whose description has `body` as matrix.
fn iota_over(body: impl Strategy<Value = Formula>) -> impl Strategy<Value = Formula> {
    (sign(), qset(), var(), body, 0..3usize, term(), any::<bool>()).prop_map(|(s, q, x, body, i, t, first)| {
        let p = &preds()[i];
        // A description body must mention its bound variable.
        let body = if body.is_free(&x) { body } else { Formula::and(Formula::atom(&preds()[0], vec![Term::var(x.clone())]), body) };
        let desc = Arg::Desc(Box::new(Description { q, var: x, body }));
        let args = match (p.arity, first) {
            (1, _) => vec![desc],
            (_, true) => vec![desc, Arg::Term(t)],
            (_, false) => vec![Arg::Term(t), desc],
        };
        Formula::Iota(IotaPred { sign: s, pred: p.clone(), args })
    })
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        4 => predication(),
        1 => Just(Formula::Bottom),
        1 => (sign(), term(), term(), qset()).prop_map(|(s, a, b, q)| Formula::qident(s, a, b, q)),
        1 => iota_over(predication()),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (var(), inner.clone()).prop_map(|(x, a)| Formula::forall(x, a)),
            (var(), inner.clone()).prop_map(|(x, a)| Formula::exists(x, a)),
            iota_over(inner),
        ]
    })
}

fn unary_or_binary_atom(t1: Term, t2: Term) -> impl Strategy<Value = Formula> {
    let pool = vec![t1, t2, Term::constant("gamma")];
    (sign(), 0..3usize, proptest::sample::select(pool.clone()), proptest::sample::select(pool)).prop_map(
        |(s, i, a, b)| {
            let p = &preds()[i];
            let args = if p.arity == 1 { vec![a] } else { vec![a, b] };
            Formula::predication(s, p, args)
        },
    )
}

fn is_uniqueness(f: &Formula) -> bool {
    let Formula::Forall(_, inner) = f else { return false };
    let Formula::Forall(_, body) = &**inner else { return false };
    let Formula::Implies(_, c) = &**body else { return false };
    matches!(&**c, Formula::QIdent { .. })
}

fn swap(f: &Formula, t1: &Term, t2: &Term) -> Formula {
    f.swap_terms(t1, t2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        let text = f.to_string();
        let back = parse_formula(&text, &signature());
        prop_assert_eq!(back, Ok(f), "{}", text);
    }

    #[test]
    fn mirror_is_symmetric(
        (t1, t2, a1, other, exact) in (constant(), constant()).prop_flat_map(|(t1, t2)| {
            let atoms = || unary_or_binary_atom(t1.clone(), t2.clone());
            (Just(t1.clone()), Just(t2.clone()), atoms(), atoms(), any::<bool>())
        }),
    ) {
        // Half the time compare against the true mirror image.
        let a2 = if exact { swap(&a1, &t1, &t2) } else { other };
        let m = mirror(&a1, &a2, &t1, &t2);
        prop_assert_eq!(m, mirror(&a2, &a1, &t1, &t2));
        prop_assert_eq!(m, mirror(&a1, &a2, &t2, &t1));
        if exact {
            prop_assert!(m);
        }
    }

    #[test]
    fn reflexive_identity_expands_to_trivial_biconditionals(s in sign(), o in term(), q in qset()) {
        let e = expand_qident(s, &o, &o, &q).unwrap();
        fn check(f: &Formula) -> bool {
            match f {
                Formula::Forall(_, a) => check(a),
                Formula::And(l, r) => match (&**l, &**r) {
                    (Formula::Implies(a, b), Formula::Implies(b2, a2)) if a == a2 && b == b2 => a == b,
                    _ => check(l) && check(r),
                },
                _ => false,
            }
        }
        prop_assert!(check(&e), "{}", e);
    }

    #[test]
    fn elaboration_has_three_right_associated_clauses(f in iota_over(predication())) {
        let Formula::Iota(ip) = &f else { unreachable!() };
        let e = elaborate_iota_step(ip);
        let Formula::And(existence, rest) = &e else { panic!("{e}") };
        let Formula::And(uniqueness, predication) = &**rest else { panic!("{e}") };
        prop_assert!(matches!(&**existence, Formula::Exists(..)));
        prop_assert!(is_uniqueness(uniqueness));
        prop_assert!(matches!(&**predication, Formula::Forall(_, body) if matches!(&**body, Formula::Implies(..))));
    }

    #[test]
    fn subformula_closure_is_reflexive_and_transitive(f in formula()) {
        let terms: BTreeSet<Term> = [Term::constant("alpha"), Term::constant("beta")].into();
        let all = subformulas(&f, &terms);
        prop_assert!(all.contains(&f.canonical()));
        // Members are canonical representatives whose binders use internal
        // `%k` names, which are not user variables; feeding one back would let
        // an open matrix's free `%k` clash with a binder. So the recursion is
        // taken from closed, binder-free members, and compared on closed ones.
        for g in all.iter().filter(|g| g.free_vars().is_empty() && !g.to_string().contains('%')).take(40) {
            let sub: BTreeSet<Formula> = subformulas(g, &terms).into_iter().filter(|h| h.free_vars().is_empty()).collect();
            prop_assert!(sub.is_subset(&all), "{} within {}: {:?}", g, f, sub.difference(&all).map(|x| x.to_string()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn predication_failure_never_wraps_compounds(f in formula()) {
        if !f.is_atomic_predication() {
            let text = format!("-({f})");
            prop_assert!(parse_formula(&text, &signature()).is_err(), "{}", text);
        }
    }
}
