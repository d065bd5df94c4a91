//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use qdef::audit::{audit_subexpression, audit_subformula};
use qdef::base::{GroundAtom, SubatomicBase, Symbol};
use qdef::build::{iota_e, qident_i};
use qdef::corpus;
use qdef::defs::{definiteness_degree, descriptions_in, expand_qident, Degree};
use qdef::derivation::{Derivation, PairSpec};
use qdef::kernel::{check_derivation, Mode};
use qdef::normalize::{apply_conversion, find_redexes, normalize, open_assumptions, ConversionTrace, DEFAULT_FUEL};
use qdef::parse::parse_formula;
use qdef::random::sample;
use qdef::search::{meaning_sample, prove};
use qdef::syntax::{Description, Formula, Pred, QSet, Sign, Term};

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Verdict + 'a>);

/// Random derivations and their normalization traces, shared by 3 to 5.
struct Random {
    runs: Vec<(SubatomicBase, Derivation, Result<ConversionTrace, String>)>,
}

fn random() -> Random {
    let runs = sample(2024, 500, 8)
        .into_iter()
        .map(|(base, d)| {
            let trace = normalize(&base, &d, DEFAULT_FUEL).map_err(|e| e.to_string());
            (base, d, trace)
        })
        .collect();
    Random { runs }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_validity() -> Verdict {
    let scripts = corpus::worked_scripts();
    let start = Instant::now();
    let mut n = 0;
    for s in &scripts {
        for e in &s.entries {
            let r = check_derivation(&s.base, &e.derivation, Mode::I0);
            ensure(r.valid, || format!("{} is invalid: {:?}", e.name, r.error_kinds()))?;
            n += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("checking took {elapsed:?}"))?;
    Ok(format!("{n} derivations valid in {:.1} ms", elapsed.as_secs_f64() * 1000.0))
}

fn iota_goldens() -> Verdict {
    let script = corpus::definite_description();
    let d4 = &script.entries[3].derivation;
    for k in 1..=3u8 {
        let trace = normalize(&script.base, &iota_e(k, d4.clone()), DEFAULT_FUEL).map_err(|e| e.to_string())?;
        let expected = script.entries[usize::from(k) - 1].derivation.canonicalize_labels();
        ensure(trace.result.canonicalize_labels() == expected, || format!("iota elimination {k} does not reduce to d{k}"))?;
    }
    Ok("iota eliminations 1, 2, 3 of d4 reduce to d1, d2, d3".into())
}

fn normalization(random: &Random) -> Verdict {
    let mut steps = 0;
    for (i, (base, _, trace)) in random.runs.iter().enumerate() {
        let trace = trace.as_ref().map_err(|e| format!("sample {i}: {e}"))?;
        let r = check_derivation(base, &trace.result, Mode::I0);
        ensure(r.valid, || format!("sample {i}: normal form invalid: {:?}", r.error_kinds()))?;
        ensure(find_redexes(base, &trace.result).is_empty(), || format!("sample {i}: redexes remain"))?;
        steps += trace.steps.len();
    }
    Ok(format!("{} derivations normalized in {steps} steps", random.runs.len()))
}

/// Normal forms of the worked corpus, the conversion fixtures and the iota goldens.
fn corpus_normal_forms() -> Result<Vec<(SubatomicBase, Derivation)>, String> {
    let mut inputs: Vec<(SubatomicBase, Derivation)> = Vec::new();
    for s in corpus::worked_scripts().into_iter().chain([corpus::conversions()]) {
        inputs.extend(s.entries.into_iter().map(|e| (s.base.clone(), e.derivation)));
    }
    let ex = corpus::definite_description();
    for k in 1..=3 {
        inputs.push((ex.base.clone(), iota_e(k, ex.entries[3].derivation.clone())));
    }
    inputs
        .into_iter()
        .map(|(base, d)| {
            let result = normalize(&base, &d, DEFAULT_FUEL).map_err(|e| e.to_string())?.result;
            Ok((base, result))
        })
        .collect()
}

fn audits(random: &Random) -> Verdict {
    let mut normal = corpus_normal_forms()?;
    for (base, _, trace) in &random.runs {
        let trace = trace.as_ref().map_err(Clone::clone)?;
        normal.push((base.clone(), trace.result.clone()));
    }
    let (mut formulas, mut units) = (0, 0);
    for (i, (base, d)) in normal.iter().enumerate() {
        let sf = audit_subformula(base, d, Mode::I0).map_err(|e| format!("derivation {i}: {e}"))?;
        ensure(sf.passed, || format!("derivation {i}: subformula violations {:?}", sf.violations().collect::<Vec<_>>()))?;
        let se = audit_subexpression(base, d, Mode::I0).map_err(|e| format!("derivation {i}: {e}"))?;
        ensure(se.passed, || format!("derivation {i}: subexpression violations {:?}", se.violations().collect::<Vec<_>>()))?;
        formulas += sf.entries.len();
        units += se.entries.len();
    }
    Ok(format!("{} normal derivations; {formulas} formula and {units} unit occurrences, 0 violations", normal.len()))
}

fn occurrences(d: &Derivation) -> BTreeMap<Formula, usize> {
    let mut m = BTreeMap::new();
    for f in open_assumptions(d) {
        *m.entry(f.canonical()).or_insert(0) += 1;
    }
    m
}

fn preservation(random: &Random) -> Verdict {
    let (mut steps, mut grew) = (0, 0);
    for (i, (base, d, trace)) in random.runs.iter().enumerate() {
        let trace = trace.as_ref().map_err(|e| format!("sample {i}: {e}"))?;
        let mut current = d.clone();
        for step in &trace.steps {
            let next = apply_conversion(base, &current, &step.redex).map_err(|e| format!("sample {i}: {e}"))?;
            ensure(next.conclusion().alpha_eq(&d.conclusion()), || format!("sample {i}: conclusion changed at {:?}", step.redex))?;
            let (before, after) = (occurrences(&current), occurrences(&next));
            ensure(after.keys().all(|f| before.contains_key(f)), || format!("sample {i}: new open assumption at {:?}", step.redex))?;
            if after.iter().any(|(f, n)| before.get(f).is_some_and(|m| n > m)) {
                grew += 1;
            }
            steps += 1;
            current = next;
        }
    }
    Ok(format!(
        "{steps} conversion steps, 0 violations; open-assumption leaf occurrences grew in {grew} steps (copied minor premises)"
    ))
}

// Identity coherence over unary toy bases.
//
// Without open assumptions, a unary atom φ(c) is derivable exactly when it is
// contained in the base (asI), and φ(c) follows from [φ(d)] exactly when c = d
// or φ(c) is contained. The oracle below reads these facts off the valuation.

fn contained(base: &SubatomicBase, p: &str, c: &str) -> bool {
    let atom = GroundAtom { pred: p.into(), args: vec![c.into()] };
    [Symbol::Pred(p.into()), Symbol::Const(c.into())]
        .iter()
        .all(|s| base.term_assumptions(s).map(|set| set.contains(&atom)).unwrap_or(false))
}

fn transfers(base: &SubatomicBase, p: &str, from: &str, to: &str) -> bool {
    from == to || contained(base, p, to)
}

fn oracle_identity(base: &SubatomicBase, a: &str, b: &str, q: &QSet) -> bool {
    q.iter().all(|p| transfers(base, &p.name, a, b) && transfers(base, &p.name, b, a))
}

/// Closed instances of the conjuncts of a definiens.
fn conjunct_instances(f: &Formula, constants: &[String], out: &mut Vec<Formula>) {
    match f {
        Formula::And(l, r) => {
            conjunct_instances(l, constants, out);
            conjunct_instances(r, constants, out);
        }
        Formula::Forall(x, body) => {
            for c in constants {
                conjunct_instances(&body.subst_avoiding(x, &Term::constant(c.clone())), constants, out);
            }
        }
        other => out.push(other.clone()),
    }
}

/// The oracle's verdict on `φ(from) -> φ(to)`.
fn oracle_conditional(base: &SubatomicBase, f: &Formula) -> Option<bool> {
    let Formula::Implies(ante, cons) = f else { return None };
    let (Formula::Atom(p, from), Formula::Atom(q, to)) = (&**ante, &**cons) else { return None };
    if p != q || from.len() != 1 || to.len() != 1 {
        return None;
    }
    Some(transfers(base, &p.name, from[0].name(), to[0].name()))
}

fn label_assumptions(d: &mut Derivation, f: &Formula, label: &str) {
    match d {
        Derivation::Assume { formula, label: l @ None } if formula == f => *l = Some(label.into()),
        Derivation::Node { premises, .. } => premises.iter_mut().for_each(|p| label_assumptions(p, f, label)),
        _ => {}
    }
}

fn toy_bases() -> Vec<SubatomicBase> {
    // Each atom is contained, assigned to its predicate only, or absent.
    fn all(constants: &[&str], preds: &[&str]) -> Vec<SubatomicBase> {
        let atoms: Vec<GroundAtom> = preds
            .iter()
            .flat_map(|p| constants.iter().map(move |c| GroundAtom { pred: p.to_string(), args: vec![c.to_string()] }))
            .collect();
        let sig = qdef::base::Signature::new(
            constants.iter().map(|c| c.to_string()).collect(),
            preds.iter().map(|p| Pred::new(*p, 1)).collect(),
        );
        let mut out = Vec::new();
        for code in 0..3usize.pow(atoms.len() as u32) {
            let mut base = SubatomicBase::new(sig.clone());
            let mut rest = code;
            for atom in &atoms {
                match rest % 3 {
                    0 => base.assign_everywhere(atom.clone()),
                    1 => base.assign(Symbol::Pred(atom.pred.clone()), atom.clone()),
                    _ => {}
                }
                rest /= 3;
            }
            out.push(base);
        }
        out
    }
    let mut bases = all(&["a", "b"], &["P", "Q"]);
    bases.extend(all(&["a", "b", "c"], &["P"]));
    bases
}

fn nonempty_subsets(preds: &[Pred]) -> Vec<QSet> {
    (1..1usize << preds.len())
        .map(|mask| QSet::new(preds.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone())))
        .collect()
}

fn coherence() -> Verdict {
    let bases = toy_bases();
    let (mut identities, mut derivable, mut instances, mut rule_uses) = (0, 0, 0, 0);
    for (n, base) in bases.iter().enumerate() {
        let constants = base.constants().to_vec();
        let preds = base.signature().predicates().to_vec();
        for q in nonempty_subsets(&preds) {
            for a in &constants {
                for b in &constants {
                    let (ta, tb) = (Term::constant(a.clone()), Term::constant(b.clone()));
                    let ident = Formula::qident(Sign::Pos, ta.clone(), tb.clone(), q.clone());
                    let found = prove(base, &ident, &[], 5, Mode::I0).is_some();
                    let expected = oracle_identity(base, a, b, &q);
                    identities += 1;
                    ensure(found == expected, || format!("base {n}: {ident} search {found}, oracle {expected}"))?;

                    if found {
                        derivable += 1;
                        let definiens = expand_qident(Sign::Pos, &ta, &tb, &q).map_err(|e| e.to_string())?;
                        let mut parts = Vec::new();
                        conjunct_instances(&definiens, &constants, &mut parts);
                        for part in parts {
                            let oracle = oracle_conditional(base, &part).ok_or_else(|| format!("unexpected conjunct {part}"))?;
                            let searched = prove(base, &part, &[], 5, Mode::I0).is_some();
                            ensure(oracle && searched, || format!("base {n}: {ident} derivable but {part} is not"))?;
                            instances += 1;
                        }
                    }

                    // Converse: derivable mirror pairs make =I applicable.
                    let mut pairs = Vec::new();
                    for p in base.signature().canonical_order(&q) {
                        let (fa, fb) = (Formula::atom(p, vec![ta.clone()]), Formula::atom(p, vec![tb.clone()]));
                        let (Some(mut there), Some(mut back)) =
                            (prove(base, &fb, std::slice::from_ref(&fa), 5, Mode::I0), prove(base, &fa, std::slice::from_ref(&fb), 5, Mode::I0))
                        else {
                            break;
                        };
                        label_assumptions(&mut there, &fa, "k1");
                        label_assumptions(&mut back, &fb, "k2");
                        let spec = PairSpec { pred: p.name.clone(), position: 1, companions: vec![], labels: ["k1".into(), "k2".into()] };
                        pairs.push((spec, there, back));
                    }
                    if pairs.len() == q.len() {
                        let d = qident_i(Sign::Pos, ta.clone(), tb.clone(), q.clone(), pairs);
                        let r = check_derivation(base, &d, Mode::I0);
                        ensure(r.valid, || format!("base {n}: =I rejected for {ident}: {:?}", r.error_kinds()))?;
                        ensure(expected, || format!("base {n}: pairs derivable but oracle rejects {ident}"))?;
                        rule_uses += 1;
                    } else {
                        ensure(!expected, || format!("base {n}: oracle accepts {ident} but a pair is not derivable"))?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{} toy bases, {identities} identities ({derivable} derivable), {instances} definiens instances, {rule_uses} =I applications, 0 mismatches",
        bases.len()
    ))
}

fn consistency() -> Verdict {
    let mut names = Vec::new();
    let mut bases: Vec<(String, SubatomicBase)> = corpus::bases().into_iter().map(|(n, _, b)| (n.to_string(), b)).collect();
    for name in ["france", "outlook"] {
        bases.push((name.into(), corpus::elaboration_base(name).expect("elaboration base")));
    }
    for (name, base) in &bases {
        let s = meaning_sample(base, &Formula::Bottom, &[], 4, Mode::I0);
        ensure(s.derivations.is_empty(), || format!("{name}: {} closed derivations of bot", s.derivations.len()))?;
        names.push(name.as_str());
    }
    Ok(format!("no closed derivation of bot up to depth 4 on {}", names.join(", ")))
}

fn mutations() -> Verdict {
    let mut n = 0;
    for s in corpus::mutations() {
        for e in &s.entries {
            let kind = e.expect_error.as_deref().ok_or_else(|| format!("{} has no expected kind", e.name))?;
            let r = check_derivation(&s.base, &e.derivation, Mode::I0);
            ensure(!r.valid && r.error_kinds().contains(&kind), || format!("{}: expected {kind}, got {:?}", e.name, r.error_kinds()))?;
            n += 1;
        }
    }
    ensure(n >= 30, || format!("only {n} mutations"))?;
    Ok(format!("{n} mutations rejected with their documented kind"))
}

fn elaboration_goldens() -> Verdict {
    let cases = common::elaboration_cases();
    for (file, args) in &cases {
        let golden = std::fs::read_to_string(common::corpus_root().join(file)).map_err(|e| format!("{file}: {e}"))?;
        let out = common::run_cli(args);
        ensure(out.code == 0, || format!("{file}: exit {}", out.code))?;
        ensure(out.stdout == golden, || format!("{file}: output differs from golden"))?;
    }
    Ok(format!("{} elaborations byte-exact", cases.len()))
}

/// Maximal when Q is all of P, minimal-singleton when Q is the description's
/// own predicate alone, restricted otherwise.
fn oracle_degree(desc: &Description, all: &BTreeSet<String>) -> Degree {
    let q: BTreeSet<String> = desc.q.iter().map(|p| p.name.clone()).collect();
    let own = match &desc.body {
        Formula::Atom(p, args) if args == &vec![Term::var(desc.var.clone())] => Some(p.name.clone()),
        _ => None,
    };
    if &q == all {
        Degree::Maximal
    } else if q.len() == 1 && own.is_some_and(|o| q.contains(&o)) {
        Degree::MinimalSingleton
    } else {
        Degree::Restricted
    }
}

fn degrees() -> Verdict {
    let fixed = [("pope_maximal", Degree::Maximal), ("pope_restricted", Degree::Restricted), ("pope_minimal", Degree::MinimalSingleton)];
    let mut n = 0;
    for (name, base_name, text) in corpus::elaboration_inputs() {
        let base = corpus::elaboration_base(base_name).ok_or("missing base")?;
        let sig = base.signature();
        let f = parse_formula(text, sig).map_err(|e| e.to_string())?;
        let all: BTreeSet<String> = sig.predicates().iter().map(|p| p.name.clone()).collect();
        let descs = descriptions_in(&f);
        for d in &descs {
            let got = definiteness_degree(d, sig).map_err(|e| e.to_string())?;
            ensure(got == oracle_degree(d, &all), || format!("{name}: {got} for iota{} {}. {}", d.q, d.var, d.body))?;
            n += 1;
        }
        if let Some((_, want)) = fixed.iter().find(|(fixed_name, _)| *fixed_name == name) {
            let got = definiteness_degree(descs[0], sig).map_err(|e| e.to_string())?;
            ensure(got == *want, || format!("{name}: expected {want}, got {got}"))?;
        }
    }
    Ok(format!("{n} descriptions classified; the pope readings are maximal, restricted, minimal-singleton"))
}

fn run(f: impl FnOnce() -> Verdict) -> Verdict {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    })
}

fn main() -> ExitCode {
    let random = panic::catch_unwind(random).map_err(|_| "generating the random sample panicked".to_string());
    let random = random.as_ref().map_err(Clone::clone);
    let random = &random;
    let with_random = |f: fn(&Random) -> Verdict| move || random.clone().and_then(f);
    let criteria: Vec<Criterion> = vec![
        ("corpus validity", Box::new(corpus_validity)),
        ("iota conversion goldens", Box::new(iota_goldens)),
        ("normalization of random derivations", Box::new(with_random(normalization))),
        ("subformula and subexpression audits", Box::new(with_random(audits))),
        ("conclusion and assumption preservation", Box::new(with_random(preservation))),
        ("identity rule and definition coherence", Box::new(coherence)),
        ("consistency at desk scale", Box::new(consistency)),
        ("mutation suite", Box::new(mutations)),
        ("elaboration goldens", Box::new(elaboration_goldens)),
        ("degree classification", Box::new(degrees)),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.into_iter().enumerate() {
        match run(check) {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
