use std::collections::BTreeSet;

use qdef::audit::{audit_subexpression, audit_subformula};
use qdef::kernel::{check_derivation, Mode};
use qdef::normalize::{apply_conversion, find_redexes, normalize, open_assumptions, DEFAULT_FUEL};
use qdef::random::sample;

fn support(d: &qdef::derivation::Derivation) -> BTreeSet<qdef::syntax::Formula> {
    open_assumptions(d).iter().map(|f| f.canonical()).collect()
}

#[test]
fn random_derivations_normalize_step_by_step() {
    for (i, (base, d)) in sample(2024, 500, 8).into_iter().enumerate() {
        let trace = normalize(&base, &d, DEFAULT_FUEL).unwrap_or_else(|e| panic!("sample {i}: {e}"));
        let mut current = d.clone();
        for step in &trace.steps {
            let next = apply_conversion(&base, &current, &step.redex).unwrap();
            let r = check_derivation(&base, &next, Mode::I0);
            assert!(r.valid, "sample {i} after {:?}: {:?}\nbefore: {current:?}\nafter: {next:?}", step.redex, r.errors);
            assert!(next.conclusion().alpha_eq(&d.conclusion()), "sample {i}");
            assert!(support(&next).is_subset(&support(&current)), "sample {i} after {:?}", step.redex);
            current = next;
        }
        assert_eq!(current, trace.result);
        assert!(find_redexes(&base, &trace.result).is_empty());
        let sf = audit_subformula(&base, &trace.result, Mode::I0).unwrap();
        assert!(sf.passed, "sample {i}: {:?}\n{:?}", sf.violations().collect::<Vec<_>>(), trace.result);
        let se = audit_subexpression(&base, &trace.result, Mode::I0).unwrap();
        assert!(se.passed, "sample {i}: {:?}", se.violations().collect::<Vec<_>>());
    }
}
