//! The shipped corpus: worked derivations on small bases, built
//! programmatically. The JSON files under `corpus/` are generated from here.

use crate::base::{GroundAtom, Signature, SubatomicBase};
use crate::build::*;
use crate::derivation::{Derivation, PairSpec};
use crate::syntax::{Arg, Description, Formula, IotaPred, Pred, QSet, Sign, Term};

fn atom(p: &Pred, t: &Term) -> Formula {
    Formula::atom(p, vec![t.clone()])
}

fn full_base(constants: &[&str], unary: &[&str]) -> SubatomicBase {
    let sig = Signature::new(
        constants.iter().map(|c| c.to_string()).collect(),
        unary.iter().map(|p| Pred::new(*p, 1)).collect(),
    );
    let mut base = SubatomicBase::new(sig);
    for p in unary {
        for c in constants {
            base.assign_everywhere(GroundAtom { pred: p.to_string(), args: vec![c.to_string()] });
        }
    }
    base
}

/// Two constants, two predicates, every atom contained in every set it can be in.
pub fn example_base() -> SubatomicBase {
    full_base(&["alpha", "beta"], &["Phi1", "Phi2"])
}

/// A single pope who is bald and Roman.
pub fn pope_base() -> SubatomicBase {
    full_base(&["francis"], &["Pope", "Bald", "Roman"])
}

/// Two popes, both bald, only one of them Roman.
pub fn schism_base() -> SubatomicBase {
    let sig = Signature::new(
        vec!["urban".into(), "clement".into()],
        ["Pope", "Bald", "Roman"].iter().map(|p| Pred::new(*p, 1)).collect(),
    );
    let mut base = SubatomicBase::new(sig);
    for p in ["Pope", "Bald", "Roman"] {
        for c in ["urban", "clement"] {
            if (p, c) != ("Roman", "clement") {
                base.assign_everywhere(GroundAtom { pred: p.into(), args: vec![c.into()] });
            }
        }
    }
    base
}

pub fn pred(base: &SubatomicBase, name: &str) -> Pred {
    base.signature().predicate(name).expect("declared predicate").clone()
}

pub fn qset(base: &SubatomicBase, names: &[&str]) -> QSet {
    QSet::new(names.iter().map(|n| pred(base, n)))
}

/// `D1`: `∃x φ(x)` from `φ(c)` introduced by `asI`.
pub fn existence(phi: &Pred, witness: &str) -> Derivation {
    let c = Term::constant(witness);
    let x = Term::var("x");
    exists_i("x", atom(phi, &x), c.clone(), as_i_leaves(atom(phi, &c)))
}

/// `D2`: `∀u∀v((φ(u) & φ(v)) ⊃ u =+_Q v)` by two `∀I.iii` steps over the
/// constants, each instance by `⊃I` over `=I`. Distinct instances transfer
/// each respect through `asE`/`asI`; reflexive ones use the assumption itself.
pub fn uniqueness(base: &SubatomicBase, phi: &Pred, q: &QSet) -> Derivation {
    let (u, v) = (Term::var("u"), Term::var("v"));
    let constants: Vec<Term> = base.constants().iter().map(Term::constant).collect();
    let respects: Vec<Pred> = base.signature().canonical_order(q).into_iter().cloned().collect();
    let body = |a: &Term, b: &Term| {
        Formula::implies(
            Formula::and(atom(phi, a), atom(phi, b)),
            Formula::qident(Sign::Pos, a.clone(), b.clone(), q.clone()),
        )
    };
    let instance = |a: &Term, b: &Term| {
        let hyp = Derivation::hyp(Formula::and(atom(phi, a), atom(phi, b)), "1");
        let transfer = |from: &Term, to: &Term, psi: &Pred, label: &str, which: u8| {
            let assumed = Derivation::hyp(atom(psi, from), label);
            if from == to {
                assumed
            } else {
                as_i(atom(psi, to), vec![as_e(0, assumed), as_e(1, and_e(which, hyp.clone()))])
            }
        };
        let pairs = respects
            .iter()
            .enumerate()
            .map(|(k, psi)| {
                let labels = [format!("{}_1", k + 1), format!("{}_2", k + 1)];
                let forward = transfer(a, b, psi, &labels[0], 2);
                let backward = transfer(b, a, psi, &labels[1], 1);
                let spec = PairSpec { pred: psi.name.clone(), position: 1, companions: vec![], labels };
                (spec, forward, backward)
            })
            .collect();
        imp_i(
            Some("1"),
            Formula::and(atom(phi, a), atom(phi, b)),
            qident_i(Sign::Pos, a.clone(), b.clone(), q.clone(), pairs),
        )
    };
    let per_u = constants
        .iter()
        .map(|a| forall_iii("v", body(a, &v), constants.iter().map(|b| instance(a, b)).collect()))
        .collect();
    forall_iii("u", Formula::forall("v", body(&u, &v)), per_u)
}

/// `D3`: `∀w(φi(w) ⊃ φj(w))`, each instance by `asI` using the constant's
/// term assumptions recovered from the hypothesis.
pub fn predication(base: &SubatomicBase, phi_i: &Pred, phi_j: &Pred) -> Derivation {
    let w = Term::var("w");
    let premises = base
        .constants()
        .iter()
        .map(|c| {
            let c = Term::constant(c);
            let hyp = Derivation::hyp(atom(phi_i, &c), "2");
            let step = as_i(atom(phi_j, &c), vec![Derivation::term(phi_j.name.clone()), as_e(1, hyp)]);
            imp_i(Some("2"), atom(phi_i, &c), step)
        })
        .collect();
    forall_iii("w", Formula::implies(atom(phi_i, &w), atom(phi_j, &w)), premises)
}

/// `φj(ι_Q x φi(x))`.
pub fn description_formula(phi_i: &Pred, phi_j: &Pred, q: &QSet) -> Formula {
    let desc = Description { q: q.clone(), var: "x".into(), body: atom(phi_i, &Term::var("x")) };
    Formula::Iota(IotaPred { sign: Sign::Pos, pred: phi_j.clone(), args: vec![Arg::Desc(Box::new(desc))] })
}

/// `ιI` over `D1`, `D2`, `D3`.
pub fn definiteness(base: &SubatomicBase, phi_i: &Pred, phi_j: &Pred, q: &QSet, witness: &str) -> Derivation {
    iota_i(
        description_formula(phi_i, phi_j, q),
        existence(phi_i, witness),
        uniqueness(base, phi_i, q),
        predication(base, phi_i, phi_j),
    )
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub description: String,
    pub derivation: Derivation,
    /// Error kind a fixture is expected to be rejected with.
    pub expect_error: Option<String>,
}

impl Entry {
    fn valid(name: &str, description: &str, derivation: Derivation) -> Self {
        Entry { name: name.into(), description: description.into(), derivation, expect_error: None }
    }

    fn invalid(name: &str, kind: &str, description: &str, derivation: Derivation) -> Self {
        Entry { name: name.into(), description: description.into(), derivation, expect_error: Some(kind.into()) }
    }
}

#[derive(Clone, Debug)]
pub struct Script {
    pub name: String,
    pub base_name: String,
    pub base: SubatomicBase,
    pub description: String,
    pub entries: Vec<Entry>,
}

pub fn bases() -> Vec<(&'static str, &'static str, SubatomicBase)> {
    vec![
        ("example", "Two constants and two predicates; every atom is contained.", example_base()),
        ("pope", "One pope, bald and Roman.", pope_base()),
        ("schism", "Two bald popes, only urban is Roman.", schism_base()),
    ]
}

pub fn definite_description() -> Script {
    let base = example_base();
    let (p1, p2) = (pred(&base, "Phi1"), pred(&base, "Phi2"));
    let q = base.signature().all_predicates();
    let entries = vec![
        Entry::valid("d1", "existence: exists x. Phi1(x)", existence(&p1, "alpha")),
        Entry::valid("d2", "qualified uniqueness over all predicates", uniqueness(&base, &p1, &q)),
        Entry::valid("d3", "predication: forall w. Phi1(w) -> Phi2(w)", predication(&base, &p1, &p2)),
        Entry::valid("d4", "description introduction from d1, d2, d3", definiteness(&base, &p1, &p2, &q, "alpha")),
    ];
    Script {
        name: "definite_description".into(),
        base_name: "example".into(),
        base,
        description: "Derivations of existence, uniqueness and predication, and the description they introduce.".into(),
        entries,
    }
}

pub fn minimal_uniqueness() -> Script {
    let base = schism_base();
    let pope = pred(&base, "Pope");
    let q = qset(&base, &["Pope"]);
    Script {
        name: "minimal_uniqueness".into(),
        base_name: "schism".into(),
        description: "Minimal qualified uniqueness for popes in a schism.".into(),
        entries: vec![Entry::valid("d5", "uniqueness with respect to Pope only", uniqueness(&base, &pope, &q))],
        base,
    }
}

pub fn pope_maximal() -> Script {
    let base = pope_base();
    let (pope, bald) = (pred(&base, "Pope"), pred(&base, "Bald"));
    let q = base.signature().all_predicates();
    Script {
        name: "pope_maximal".into(),
        base_name: "pope".into(),
        description: "The pope is bald, with maximal definiteness.".into(),
        entries: vec![Entry::valid("d6", "maximal definiteness", definiteness(&base, &pope, &bald, &q, "francis"))],
        base,
    }
}

pub fn pope_schism() -> Script {
    let base = schism_base();
    let (pope, bald) = (pred(&base, "Pope"), pred(&base, "Bald"));
    let restricted = qset(&base, &["Pope", "Bald"]);
    let minimal = qset(&base, &["Pope"]);
    Script {
        name: "pope_schism".into(),
        base_name: "schism".into(),
        description: "The pope is bald in times of schism, with restricted and minimal definiteness.".into(),
        entries: vec![
            Entry::valid("d7", "restricted definiteness", definiteness(&base, &pope, &bald, &restricted, "urban")),
            Entry::valid("d8", "minimal definiteness", definiteness(&base, &pope, &bald, &minimal, "urban")),
        ],
        base,
    }
}

/// The worked derivations, all valid.
pub fn worked_scripts() -> Vec<Script> {
    vec![definite_description(), minimal_uniqueness(), pope_maximal(), pope_schism()]
}

fn leaves(base: &SubatomicBase, p: &str, c: &str) -> Derivation {
    as_i_leaves(atom(&pred(base, p), &Term::constant(c)))
}

/// `α =+_{Φ1} β` on the example base, each direction rebuilt by `asE`/`asI`.
pub fn example_identity(base: &SubatomicBase) -> Derivation {
    let p1 = pred(base, "Phi1");
    let (a, b) = (Term::constant("alpha"), Term::constant("beta"));
    let transfer = |from: &Term, to: &Term, label: &str| {
        as_i(atom(&p1, to), vec![as_e(0, Derivation::hyp(atom(&p1, from), label)), Derivation::term(to.name())])
    };
    let spec = PairSpec { pred: "Phi1".into(), position: 1, companions: vec![], labels: ["1".into(), "2".into()] };
    qident_i(Sign::Pos, a.clone(), b.clone(), qset(base, &["Phi1"]), vec![(spec, transfer(&a, &b, "1"), transfer(&b, &a, "2"))])
}

/// Valid derivations with one redex each, on the example base.
pub fn conversions() -> Script {
    let base = example_base();
    let p1 = pred(&base, "Phi1");
    let d4 = definite_description().entries[3].derivation.clone();
    let (x, y) = (Term::var("x"), Term::var("y"));
    let alpha = Term::constant("alpha");
    let phi_y = atom(&p1, &y);
    let c4 = forall_e(
        forall_iii("x", atom(&p1, &x), vec![leaves(&base, "Phi1", "alpha"), leaves(&base, "Phi1", "beta")]),
        Term::constant("beta"),
    );
    let c5 = forall_e(
        forall_i(
            "x",
            Formula::implies(atom(&p1, &x), atom(&p1, &x)),
            y.clone(),
            imp_i(Some("1"), phi_y.clone(), Derivation::hyp(phi_y.clone(), "1")),
        ),
        alpha.clone(),
    );
    let c6 = exists_e(
        existence(&p1, "alpha"),
        y.clone(),
        Some("1"),
        exists_i("x", atom(&p1, &x), y.clone(), Derivation::hyp(phi_y, "1")),
    );
    let a = atom(&p1, &alpha);
    let c7 = imp_e(
        imp_i(Some("1"), a.clone(), and_i(Derivation::hyp(a.clone(), "1"), Derivation::hyp(a, "1"))),
        leaves(&base, "Phi1", "alpha"),
    );
    let c8 = qident_e(crate::derivation::Side::First, example_identity(&base), leaves(&base, "Phi1", "alpha"));
    let entries = vec![
        Entry::valid("c1", "existence clause recovered from d4", iota_e(1, d4.clone())),
        Entry::valid("c2", "uniqueness clause recovered from d4", iota_e(2, d4.clone())),
        Entry::valid("c3", "predication clause recovered from d4", iota_e(3, d4)),
        Entry::valid("c4", "universal instance of an each-constant introduction", c4),
        Entry::valid("c5", "universal instance of an eigenvariable introduction", c5),
        Entry::valid("c6", "existential elimination of an introduction", c6),
        Entry::valid("c7", "implication detour copying its minor premise", c7),
        Entry::valid("c8", "identity elimination of an identity introduction", c8),
    ];
    Script {
        name: "conversions".into(),
        base_name: "example".into(),
        base,
        description: "Valid derivations that each contain a redex.".into(),
        entries,
    }
}

fn mutate(d: &Derivation, path: &[usize], f: impl FnOnce(&mut Derivation)) -> Derivation {
    let mut out = d.clone();
    f(out.at_mut(path).expect("mutation path exists"));
    out
}

fn set_rule(d: &Derivation, path: &[usize], rule: crate::derivation::Rule) -> Derivation {
    mutate(d, path, |n| {
        if let Derivation::Node { rule: r, .. } = n {
            *r = rule;
        }
    })
}

fn set_conclusion(d: &Derivation, path: &[usize], f: Formula) -> Derivation {
    mutate(d, path, |n| {
        if let Derivation::Node { conclusion, .. } = n {
            *conclusion = crate::derivation::Unit::Formula(f);
        }
    })
}

fn map_premises(d: &Derivation, path: &[usize], f: impl FnOnce(&mut Vec<Derivation>)) -> Derivation {
    mutate(d, path, |n| {
        if let Derivation::Node { premises, .. } = n {
            f(premises);
        }
    })
}

fn map_pairs(d: &Derivation, path: &[usize], f: impl FnOnce(&mut Vec<PairSpec>, &mut Vec<Derivation>)) -> Derivation {
    mutate(d, path, |n| {
        if let Derivation::Node { rule: crate::derivation::Rule::QIdentI { pairs, .. }, premises, .. } = n {
            f(pairs, premises);
        }
    })
}

/// Single-node mutations of the worked derivations, each with the error kind
/// the kernel must report.
pub fn mutations() -> Vec<Script> {
    use crate::derivation::{ForallVariant, Rule, Side};
    let ex = definite_description();
    let base = ex.base.clone();
    let f = |s: &str| crate::parse::parse_formula(s, base.signature()).expect("fixture formula");
    let [d1, d2, d3, d4] = [0, 1, 2, 3].map(|i| ex.entries[i].derivation.clone());
    let conv = conversions();
    let c = |i: usize| conv.entries[i].derivation.clone();
    let (alpha, beta) = (Term::constant("alpha"), Term::constant("beta"));
    // Paths into d2: [0, 1] is the (alpha, beta) instance, [0, 1, 0] its =I.
    let ab = [0usize, 1, 0];
    let mut example = vec![
        Entry::invalid("m01", "ConclusionMismatch", "existential witness changed", set_rule(&d1, &[], Rule::ExistsI(beta.clone()))),
        Entry::invalid("m02", "ShapeMismatch", "asI swapped for -asI", set_rule(&d1, &[0], Rule::NegAsI)),
        Entry::invalid("m03", "ArityMismatch", "term assumption premise deleted", map_premises(&d1, &[0], |p| { p.pop(); })),
        Entry::invalid("m04", "ShapeMismatch", "asI premises reordered", map_premises(&d1, &[0], |p| p.swap(0, 1))),
        Entry::invalid("m05", "ShapeMismatch", "existential introduction concludes a universal", set_conclusion(&d1, &[], f("forall x. Phi1(x)"))),
        Entry::invalid("m06", "UnknownSymbol", "identity pair names an undeclared predicate", map_pairs(&example_identity(&base), &[], |pairs, _| pairs[0].pred = "Phi3".into())),
        Entry::invalid("m07", "SideConditionViolation", "-asI on a contained atom", mutate(&d1, &[0], |n| {
            if let Derivation::Node { rule, conclusion, .. } = n {
                *rule = Rule::NegAsI;
                *conclusion = crate::derivation::Unit::Formula(f("-Phi1(alpha)"));
            }
        })),
        Entry::invalid("m08", "UnboundDischargeLabel", "discharge deleted", set_rule(&d3, &[0], Rule::ImpI { label: None })),
        Entry::invalid("m09", "UnboundDischargeLabel", "assumption relabelled", mutate(&d3, &[0, 0, 1, 0], |n| {
            *n = Derivation::hyp(f("Phi1(alpha)"), "9");
        })),
        Entry::invalid("m10", "MissingInstance", "each-constant introduction missing an instance", map_premises(&d3, &[], |p| { p.pop(); })),
        Entry::invalid("m11", "WrongPremiseCount", "each-constant introduction swapped for an eigenvariable one", set_rule(&d3, &[], Rule::ForallI(ForallVariant::Eigen(Term::var("w"))))),
        Entry::invalid("m12", "DischargeFormulaMismatch", "implication antecedent changed", set_conclusion(&d3, &[0], f("Phi2(alpha) -> Phi2(alpha)"))),
        Entry::invalid("m13", "IndexOutOfRange", "asE index past the arity", mutate(&d3, &[0, 0, 1], |n| {
            if let Derivation::Node { rule, .. } = n {
                *rule = Rule::AsE(2);
            }
        })),
        Entry::invalid("m14", "ShapeMismatch", "asE swapped for -asE", set_rule(&d3, &[0, 0, 1], Rule::NegAsE(1))),
        Entry::invalid("m15", "MissingPredicatePair", "identity introduction missing a pair", map_pairs(&d2, &ab, |pairs, premises| {
            pairs.pop();
            premises.truncate(2);
        })),
        Entry::invalid("m16", "PolarityMismatch", "identity introduction sign flipped", mutate(&d2, &ab, |n| {
            if let Derivation::Node { rule: Rule::QIdentI { sign, .. }, .. } = n {
                *sign = Sign::Neg;
            }
        })),
        Entry::invalid("m17", "DischargeFormulaMismatch", "pair assumption changed", mutate(&d2, &[0, 1, 0, 0, 0, 0], |n| {
            *n = Derivation::hyp(f("Phi1(beta)"), "1_1");
        })),
        Entry::invalid("m18", "DuplicateDischargeLabel", "pair label rebinds the enclosing label", map_pairs(&d2, &ab, |pairs, premises| {
            pairs[0].labels[0] = "1".into();
            premises[0] = crate::build::as_i(
                f("Phi1(beta)"),
                vec![as_e(0, Derivation::hyp(f("Phi1(alpha)"), "1")), as_e(1, and_e(2, Derivation::hyp(f("Phi1(alpha) & Phi1(beta)"), "1")))],
            );
        })),
        Entry::invalid("m19", "ConjunctShapeMismatch", "description premises reordered", map_premises(&d4, &[], |p| p.swap(0, 2))),
        Entry::invalid("m20", "SignMismatch", "description introduction sign flipped", set_rule(&d4, &[], Rule::IotaI(Sign::Neg))),
        Entry::invalid("m21", "QSetMismatch", "description qualification narrowed", set_conclusion(&d4, &[], description_formula(&pred(&base, "Phi1"), &pred(&base, "Phi2"), &qset(&base, &["Phi1"])))),
        Entry::invalid("m22", "NotIotaFormula", "description introduction concludes an atom", set_conclusion(&d4, &[], f("Phi2(alpha)"))),
        Entry::invalid("m23", "ConclusionMismatch", "description elimination picks the wrong clause", mutate(&c(0), &[], |n| {
            if let Derivation::Node { rule: Rule::IotaE { which, .. }, .. } = n {
                *which = 3;
            }
        })),
        Entry::invalid("m24", "EigenConditionViolation", "each-constant introduction replaced by a constant eigen using its term assumption", mutate(&c(3), &[0], |n| {
            if let Derivation::Node { rule, premises, .. } = n {
                *rule = Rule::ForallI(ForallVariant::Eigen(alpha.clone()));
                premises.truncate(1);
            }
        })),
        Entry::invalid("m25", "EigenConditionViolation", "eigenvariable free in the conclusion of an existential elimination", mutate(&c(5), &[], |n| {
            *n = exists_e(existence(&pred(&base, "Phi1"), "alpha"), Term::var("y"), Some("1"), Derivation::hyp(f("Phi1(y)"), "1"));
        })),
        Entry::invalid("m26", "EigenConditionViolation", "eigenvariable free in an open assumption", mutate(&c(4), &[0], |n| {
            *n = forall_i("x", f("Phi1(x) -> Phi1(x)"), Term::var("y"), imp_i(None, f("Phi1(y)"), Derivation::assume(f("Phi1(y)"))));
        })),
        Entry::invalid("m27", "ConclusionMismatch", "universal instance at the wrong term", set_rule(&c(3), &[], Rule::ForallE(alpha.clone()))),
        Entry::invalid("m28", "NotInstanceOfPredicate", "identity elimination minor lacks the side term", mutate(&c(7), &[], |n| {
            if let Derivation::Node { rule: Rule::QIdentE { side, .. }, .. } = n {
                *side = Side::Second;
            }
        })),
        Entry::invalid("m29", "ConclusionMismatch", "conjunction introduction conclusion swapped", set_conclusion(&c(6), &[0, 0], f("Phi1(beta) & Phi1(alpha)"))),
        Entry::invalid("m30", "ShapeMismatch", "implication elimination on a conjunction", set_rule(&c(6), &[0, 0], Rule::ImpE)),
        Entry::invalid("m31", "NotMirrorAtoms", "pair subderivation concludes an unrelated atom", map_pairs(&example_identity(&base), &[], |_, premises| {
            premises[0] = crate::build::as_i(f("Phi1(alpha)"), vec![as_e(0, Derivation::hyp(f("Phi1(alpha)"), "1")), Derivation::term("alpha")]);
        })),
        Entry::invalid("m35", "MissingInstance", "inner each-constant introduction missing an instance", map_premises(&d2, &[0], |p| { p.pop(); })),
        Entry::invalid("m36", "WrongPremiseCount", "description introduction missing a clause", map_premises(&d4, &[], |p| { p.pop(); })),
        Entry::invalid("m37", "SignMismatch", "description elimination sign flipped", mutate(&c(1), &[], |n| {
            if let Derivation::Node { rule: Rule::IotaE { sign, .. }, .. } = n {
                *sign = Sign::Neg;
            }
        })),
        Entry::invalid("m38", "PolarityMismatch", "identity elimination sign flipped", mutate(&c(7), &[], |n| {
            if let Derivation::Node { rule: Rule::QIdentE { sign, .. }, .. } = n {
                *sign = Sign::Neg;
            }
        })),
        Entry::invalid("m39", "NonGroundAtom", "as-introduction of an open atom", set_conclusion(&d1, &[0], f("Phi1(y)"))),
        Entry::invalid("m40", "DischargeFormulaMismatch", "existential eigenvariable renamed", set_rule(&c(5), &[], Rule::ExistsE { eigen: Term::var("x"), label: Some("1".into()) })),
    ];
    for e in &mut example {
        e.description = format!("{}: {}", e.expect_error.as_deref().unwrap_or_default(), e.description);
    }
    let schism = schism_base();
    let sf = |s: &str| crate::parse::parse_formula(s, schism.signature()).expect("fixture formula");
    let d5 = minimal_uniqueness().entries[0].derivation.clone();
    let mut schism_entries = vec![
        Entry::invalid("m32", "SideConditionViolation", "asI on an atom missing from the base", mutate(&d5, &[], |n| {
            *n = as_i_leaves(sf("Roman(clement)"));
        })),
        Entry::invalid("m33", "PredicateNotInQ", "pair for a predicate outside the qualification", map_pairs(&d5, &[0, 1, 0], |pairs, _| {
            pairs[0].pred = "Bald".into();
        })),
        Entry::invalid("m34", "SideConditionViolation", "maximal uniqueness in a schism", uniqueness(&schism, &pred(&schism, "Pope"), &schism.signature().all_predicates())),
    ];
    for e in &mut schism_entries {
        e.description = format!("{}: {}", e.expect_error.as_deref().unwrap_or_default(), e.description);
    }
    vec![
        Script {
            name: "mutations_example".into(),
            base_name: "example".into(),
            base,
            description: "Rejected single-node mutations of the example derivations.".into(),
            entries: example,
        },
        Script {
            name: "mutations_schism".into(),
            base_name: "schism".into(),
            base: schism,
            description: "Rejected mutations on the schism base.".into(),
            entries: schism_entries,
        },
    ]
}

/// Surface-syntax formulas shipped for elaboration, with the base they use.
pub fn elaboration_inputs() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("pope_maximal", "pope", "the[*] Pope is Bald"),
        ("pope_restricted", "schism", "the[Pope,Bald] Pope is Bald"),
        ("pope_minimal", "schism", "the[Pope] Pope is Bald"),
        ("king_of_france", "france", "-Real(iota[*] x. King-of(x, France))"),
        ("dog_wolf", "outlook", "Descends-from(iota[Dog] x. Dog(x), iota[Wolf] y. Wolf(y))"),
        ("zucchetto", "outlook", "Put-on(iota[*] x. Pope(x), iota[Zucchetto,Pope] y. Zucchetto(y), iota[Zucchetto,Put-on] z. Zucchetto(z))"),
        ("pope_bishop", "outlook", "Blesses(iota[*] x. Pope(x), iota[Bishop] y. Bishop(y))"),
        ("beret", "outlook", "French(iota[Man,Beret,Button] x. Man(x) & Wears(x, iota[Man,Beret,Button] y. Beret(y) & Has(y, iota[Man,Beret,Button] z. Button(z))))"),
    ]
}

/// Signature-only bases for the elaboration examples.
pub fn elaboration_base(name: &str) -> Option<SubatomicBase> {
    let sig = match name {
        "pope" => return Some(pope_base()),
        "schism" => return Some(schism_base()),
        "france" => Signature::new(
            vec!["France".into()],
            vec![Pred::new("King-of", 2), Pred::new("Real", 1)],
        ),
        "outlook" => Signature::new(
            vec!["fido".into()],
            vec![
                Pred::new("Dog", 1),
                Pred::new("Wolf", 1),
                Pred::new("Descends-from", 2),
                Pred::new("Pope", 1),
                Pred::new("Zucchetto", 1),
                Pred::new("Put-on", 3),
                Pred::new("Man", 1),
                Pred::new("Wears", 2),
                Pred::new("Beret", 1),
                Pred::new("Has", 2),
                Pred::new("Button", 1),
                Pred::new("French", 1),
                Pred::new("Bishop", 1),
                Pred::new("Blesses", 2),
            ],
        ),
        _ => return None,
    };
    Some(SubatomicBase::new(sig))
}

/// Description, constants and predicates of the elaboration-only bases.
fn elaboration_base_description(name: &str) -> &'static str {
    match name {
        "france" => "France and the predicates of the non-existent king; no atoms.",
        _ => "Predicates of the nested and relational descriptions; no atoms.",
    }
}

impl Script {
    /// The on-disk form, referring to its base in the sibling `bases` directory.
    pub fn to_file_script(&self) -> crate::script::Script {
        crate::script::Script {
            base_ref: format!("../bases/{}.base.json", self.base_name),
            mode: crate::kernel::Mode::I0,
            description: Some(self.description.clone()),
            derivations: self
                .entries
                .iter()
                .map(|e| crate::script::NamedDerivation {
                    name: e.name.clone(),
                    description: Some(e.description.clone()),
                    expect_error: e.expect_error.clone(),
                    derivation: e.derivation.clone(),
                })
                .collect(),
        }
    }
}

/// Every script shipped in `corpus/scripts`.
pub fn all_scripts() -> Vec<Script> {
    let mut all = worked_scripts();
    all.push(conversions());
    all.extend(mutations());
    all
}

/// The generated corpus files, as paths relative to the corpus directory
/// paired with their contents.
pub fn rendered_files() -> Vec<(String, String)> {
    use crate::script::{script_to_value, to_pretty};
    let mut files = Vec::new();
    let mut push_base = |name: &str, description: &str, base: &SubatomicBase| {
        let file = base.to_file(Some(description.to_string()));
        let value = serde_json::to_value(&file).expect("serializable base");
        files.push((format!("bases/{name}.base.json"), to_pretty(&value)));
    };
    for (name, description, base) in bases() {
        push_base(name, description, &base);
    }
    for name in ["france", "outlook"] {
        push_base(name, elaboration_base_description(name), &elaboration_base(name).expect("known base"));
    }
    for script in all_scripts() {
        let value = script_to_value(&script.to_file_script());
        files.push((format!("scripts/{}.json", script.name), to_pretty(&value)));
    }
    let inputs: Vec<serde_json::Value> = elaboration_inputs()
        .into_iter()
        .map(|(name, base, formula)| {
            serde_json::json!({ "name": name, "base": format!("../bases/{base}.base.json"), "formula": formula })
        })
        .collect();
    files.push(("elaborate/inputs.json".into(), to_pretty(&serde_json::json!({ "version": 1, "inputs": inputs }))));
    files
}
