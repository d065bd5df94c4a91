use qdef::build::*;
use qdef::corpus::{self, example_base};
use qdef::derivation::Derivation;
use qdef::kernel::{is_valid, Mode};
use qdef::normalize::{expand_identity, find_redexes, normalize, NormalizeError, RedexKind, DEFAULT_FUEL};
use qdef::parse::parse_formula;
use qdef::syntax::Formula;

fn f(s: &str) -> Formula {
    parse_formula(s, example_base().signature()).unwrap()
}

fn d4() -> Derivation {
    corpus::definite_description().entries[3].derivation.clone()
}

#[test]
fn description_detour_is_one_redex() {
    let base = example_base();
    let r = find_redexes(&base, &iota_e(2, d4()));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].kind, RedexKind::DetourIota);
    assert!(r[0].path.is_empty());
}

#[test]
fn conjunction_detour_is_one_redex() {
    let base = example_base();
    let d = and_e(1, and_i(Derivation::assume(f("Phi1(alpha)")), Derivation::assume(f("Phi2(beta)"))));
    let r = find_redexes(&base, &d);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].kind, RedexKind::DetourAnd);
}

#[test]
fn description_conversions_return_the_clause_derivations() {
    let base = example_base();
    let script = corpus::definite_description();
    for k in 1..=3u8 {
        let trace = normalize(&base, &iota_e(k, d4()), DEFAULT_FUEL).unwrap();
        let expected = &script.entries[usize::from(k) - 1].derivation;
        assert_eq!(trace.result.canonicalize_labels(), expected.canonicalize_labels(), "clause {k}");
    }
}

#[test]
fn normal_derivation_takes_no_steps() {
    let base = example_base();
    let d1 = corpus::definite_description().entries[0].derivation.clone();
    let trace = normalize(&base, &d1, DEFAULT_FUEL).unwrap();
    assert!(trace.steps.is_empty());
    assert_eq!(trace.result, d1);
}

#[test]
fn nested_double_detour() {
    let base = example_base();
    let a = f("Phi1(alpha)");
    let minor = as_i_leaves(a.clone());
    let inner = and_e(1, and_i(Derivation::hyp(a.clone(), "1"), Derivation::assume(f("Phi2(beta)"))));
    let d = imp_e(imp_i(Some("1"), a, inner), minor.clone());
    assert!(is_valid(&base, &d, Mode::I0));
    let trace = normalize(&base, &d, DEFAULT_FUEL).unwrap();
    let kinds: Vec<RedexKind> = trace.steps.iter().map(|s| s.redex.kind).collect();
    // Innermost first: the conjunction detour sits above the implication detour.
    assert_eq!(kinds, vec![RedexKind::DetourAnd, RedexKind::DetourImplies]);
    // By hand: &E1(&I([A]1, B)) reduces to [A]1, then the minor replaces it.
    assert_eq!(trace.result, minor);
    assert!(find_redexes(&base, &trace.result).is_empty());
}

#[test]
fn identity_expansion() {
    let base = example_base();
    let ident = corpus::example_identity(&base);
    let expanded = expand_identity(&base, &ident, &[]).unwrap();
    assert!(is_valid(&base, &expanded, Mode::I0));
    assert!(expanded.size() > ident.size());
    let back = normalize(&base, &expanded, DEFAULT_FUEL).unwrap().result;
    assert_eq!(back.conclusion(), ident.conclusion());
    assert!(matches!(
        expand_identity(&base, &corpus::existence(&corpus::pred(&base, "Phi1"), "alpha"), &[]),
        Err(NormalizeError::NotIdentityConclusion(_))
    ));
}
