//! The proof kernel: checks every rule application of a derivation tree,
//! including discharge bookkeeping and eigen-term side conditions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{BaseError, GroundAtom, SubatomicBase, Symbol};
use crate::defs::iota_clauses;
use crate::derivation::{Derivation, ForallVariant, PairSpec, Path, Rule, Side, Unit};
use crate::syntax::{mirror, CaptureError, Description, Formula, IotaPred, Sign, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Intuitionistic: absurdity rule available.
    #[default]
    I0,
    /// Minimal: absurdity rule removed.
    M0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjunct {
    Existence,
    Uniqueness,
    Predication,
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conjunct::Existence => "E",
            Conjunct::Uniqueness => "QU",
            Conjunct::Predication => "P",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("premise shape does not fit the rule: {0}")]
    ShapeMismatch(String),
    #[error("rule expects {expected} premises, found {found}")]
    WrongPremiseCount { expected: usize, found: usize },
    #[error("conclusion should be `{expected}`, found `{found}`")]
    ConclusionMismatch { expected: String, found: String },
    #[error("discharge label `{0}` is not bound by any rule below the assumption")]
    UnboundDischargeLabel(String),
    #[error("discharge label `{0}` is rebound inside its own scope")]
    DuplicateDischargeLabel(String),
    #[error("assumption labelled `{label}` should be `{expected}`, found `{found}`")]
    DischargeFormulaMismatch { label: String, expected: String, found: String },
    #[error("the absurdity rule is not available in minimal mode")]
    RuleDisabledInMinimalMode,
    #[error("side condition violated: {0}")]
    SideConditionViolation(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for an atom of arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("missing mirror pair for {0}")]
    MissingPredicatePair(String),
    #[error("not mirror atoms: {0}")]
    NotMirrorAtoms(String),
    #[error("subderivation has the wrong polarity for this identity rule")]
    WrongPolarity,
    #[error("predicate `{0}` is not among the respects of the identity")]
    PredicateNotInQ(String),
    #[error("polarity of premise does not match the rule")]
    PolarityMismatch,
    #[error("minor premise is not an instance for the identity term: {0}")]
    NotInstanceOfPredicate(String),
    #[error("eigen-term condition violated: {0}")]
    EigenConditionViolation(String),
    #[error("no premise for the instance at constant `{0}`")]
    MissingInstance(String),
    #[error("premise for the {0} clause has the wrong shape")]
    ConjunctShapeMismatch(Conjunct),
    #[error("uniqueness premise is proved for a different set of respects")]
    QSetMismatch,
    #[error("formula is not a description predication")]
    NotIotaFormula,
    #[error("sign of the description does not match the rule")]
    SignMismatch,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("atom `{0}` is not ground")]
    NonGroundAtom(String),
    #[error(transparent)]
    Capture(#[from] CaptureError),
    #[error("description rules apply to a single description with an atomic matrix")]
    NestedDescriptionUnsupported,
}

impl KernelError {
    pub fn kind(&self) -> &'static str {
        match self {
            KernelError::ShapeMismatch(_) => "ShapeMismatch",
            KernelError::WrongPremiseCount { .. } => "WrongPremiseCount",
            KernelError::ConclusionMismatch { .. } => "ConclusionMismatch",
            KernelError::UnboundDischargeLabel(_) => "UnboundDischargeLabel",
            KernelError::DuplicateDischargeLabel(_) => "DuplicateDischargeLabel",
            KernelError::DischargeFormulaMismatch { .. } => "DischargeFormulaMismatch",
            KernelError::RuleDisabledInMinimalMode => "RuleDisabledInMinimalMode",
            KernelError::SideConditionViolation(_) => "SideConditionViolation",
            KernelError::ArityMismatch { .. } => "ArityMismatch",
            KernelError::IndexOutOfRange { .. } => "IndexOutOfRange",
            KernelError::MissingPredicatePair(_) => "MissingPredicatePair",
            KernelError::NotMirrorAtoms(_) => "NotMirrorAtoms",
            KernelError::WrongPolarity => "WrongPolarity",
            KernelError::PredicateNotInQ(_) => "PredicateNotInQ",
            KernelError::PolarityMismatch => "PolarityMismatch",
            KernelError::NotInstanceOfPredicate(_) => "NotInstanceOfPredicate",
            KernelError::EigenConditionViolation(_) => "EigenConditionViolation",
            KernelError::MissingInstance(_) => "MissingInstance",
            KernelError::ConjunctShapeMismatch(_) => "ConjunctShapeMismatch",
            KernelError::QSetMismatch => "QSetMismatch",
            KernelError::NotIotaFormula => "NotIotaFormula",
            KernelError::SignMismatch => "SignMismatch",
            KernelError::UnknownSymbol(_) => "UnknownSymbol",
            KernelError::NonGroundAtom(_) => "NonGroundAtom",
            KernelError::Capture(_) => "CaptureError",
            KernelError::NestedDescriptionUnsupported => "NestedDescriptionUnsupported",
        }
    }
}

impl From<BaseError> for KernelError {
    fn from(e: BaseError) -> Self {
        match e {
            BaseError::UnknownSymbol(s) => KernelError::UnknownSymbol(s),
            BaseError::NonGroundAtom(s) => KernelError::NonGroundAtom(s),
            BaseError::NotAnAtom(s) => KernelError::ShapeMismatch(format!("`{s}` is not an atom")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeError {
    pub path: Path,
    pub error: KernelError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub valid: bool,
    pub conclusion: Unit,
    /// Undischarged assumption formulas, as a multiset in leaf order.
    pub open_assumptions: Vec<Formula>,
    /// Symbols of the term-assumption leaves, in leaf order.
    pub term_leaves: Vec<String>,
    pub errors: Vec<NodeError>,
}

impl CheckReport {
    pub fn error_kinds(&self) -> Vec<&'static str> {
        self.errors.iter().map(|e| e.error.kind()).collect()
    }
}

/// Check a whole derivation against a base.
pub fn check_derivation(base: &SubatomicBase, d: &Derivation, mode: Mode) -> CheckReport {
    let mut scopes = BTreeMap::new();
    let mut shadowed = Vec::new();
    scan_binders(d, &mut Vec::new(), &mut Vec::new(), &mut scopes, &mut shadowed);
    let mut checker = Checker { base, mode, scopes, errors: shadowed };
    let info = checker.visit(d, &mut Vec::new());
    for open in &info.open {
        if let Some(l) = &open.label {
            checker.fail(open.path.clone(), KernelError::UnboundDischargeLabel(l.clone()));
        }
    }
    let mut errors = checker.errors;
    errors.sort_by(|a, b| a.path.cmp(&b.path));
    CheckReport {
        valid: errors.is_empty(),
        conclusion: d.conclusion(),
        open_assumptions: info.open.into_iter().map(|o| o.formula).collect(),
        term_leaves: info.term_leaves,
        errors,
    }
}

/// Convenience: does `d` check without errors?
pub fn is_valid(base: &SubatomicBase, d: &Derivation, mode: Mode) -> bool {
    check_derivation(base, d, mode).valid
}

#[derive(Clone, Debug)]
struct Open {
    formula: Formula,
    label: Option<String>,
    path: Path,
}

#[derive(Default)]
struct Info {
    open: Vec<Open>,
    term_leaves: Vec<String>,
}

impl Info {
    fn mentions(&self, t: &Term) -> bool {
        self.open.iter().any(|o| occurs(t, &o.formula))
    }

    fn has_term_leaf(&self, t: &Term) -> bool {
        t.is_const() && self.term_leaves.iter().any(|s| s == t.name())
    }
}

fn occurs(t: &Term, f: &Formula) -> bool {
    match t {
        Term::Var(v) => f.is_free(v),
        Term::Const(c) => f.contains_const(c),
    }
}

struct Checker<'a> {
    base: &'a SubatomicBase,
    mode: Mode,
    /// Labels bound by the ancestors of each node.
    scopes: BTreeMap<Path, Vec<String>>,
    errors: Vec<NodeError>,
}

/// Record the labels bound by the ancestors of every node, and flag binders
/// that rebind a label already bound by an ancestor for the same premise.
fn scan_binders(
    d: &Derivation,
    path: &mut Path,
    scope: &mut Vec<String>,
    scopes: &mut BTreeMap<Path, Vec<String>>,
    errors: &mut Vec<NodeError>,
) {
    let Derivation::Node { rule, premises, .. } = d else { return };
    scopes.insert(path.clone(), scope.clone());
    let bindings = rule.bindings();
    for (_, l) in &bindings {
        if scope.contains(l) {
            errors.push(NodeError { path: path.clone(), error: KernelError::DuplicateDischargeLabel((*l).clone()) });
        }
    }
    for (i, p) in premises.iter().enumerate() {
        let added: Vec<String> = bindings.iter().filter(|(j, _)| *j == i).map(|(_, l)| (*l).clone()).collect();
        let n = added.len();
        scope.extend(added);
        path.push(i);
        scan_binders(p, path, scope, scopes, errors);
        path.pop();
        scope.truncate(scope.len() - n);
    }
}

type Check = Result<(), KernelError>;

fn mismatch(expected: &Formula, found: &Formula) -> KernelError {
    KernelError::ConclusionMismatch { expected: expected.to_string(), found: found.to_string() }
}

fn same(expected: &Formula, found: &Formula) -> Check {
    if expected.alpha_eq(found) {
        Ok(())
    } else {
        Err(mismatch(expected, found))
    }
}

fn count(premises: &[Unit], n: usize) -> Check {
    if premises.len() == n {
        Ok(())
    } else {
        Err(KernelError::WrongPremiseCount { expected: n, found: premises.len() })
    }
}

fn formula(u: &Unit) -> Result<&Formula, KernelError> {
    match u {
        Unit::Formula(f) => Ok(f),
        Unit::Term(s) => Err(KernelError::ShapeMismatch(format!("`{s}Γ` is a term-assumption unit"))),
    }
}

fn shape(what: &str, f: &Formula) -> KernelError {
    KernelError::ShapeMismatch(format!("expected {what}, found `{f}`"))
}

fn simple_iota(f: &Formula) -> Result<(&IotaPred, &Description), KernelError> {
    match f {
        Formula::Iota(ip) => {
            let s = ip.simple().ok_or(KernelError::NestedDescriptionUnsupported)?;
            Ok((s.iota, s.desc))
        }
        _ => Err(KernelError::NotIotaFormula),
    }
}

/// The two atoms of an identity-introduction pair: `φ(..α1..)` and `φ(..α2..)`.
pub fn pair_atoms(
    base: &SubatomicBase,
    sign: Sign,
    a1: &Term,
    a2: &Term,
    pair: &PairSpec,
) -> Result<(Formula, Formula), KernelError> {
    let p = base
        .signature()
        .predicate(&pair.pred)
        .ok_or_else(|| KernelError::UnknownSymbol(pair.pred.clone()))?;
    if pair.companions.len() + 1 != p.arity {
        return Err(KernelError::ArityMismatch { expected: p.arity - 1, found: pair.companions.len() });
    }
    if pair.position == 0 || pair.position > p.arity {
        return Err(KernelError::IndexOutOfRange { index: pair.position, arity: p.arity });
    }
    let build = |a: &Term| {
        let mut args = pair.companions.clone();
        args.insert(pair.position - 1, a.clone());
        Formula::predication(sign, p, args)
    };
    Ok((build(a1), build(a2)))
}

/// The mirror pairs an identity introduction must supply, in canonical order.
pub fn required_pairs(base: &SubatomicBase, q: &crate::syntax::QSet) -> Result<Vec<(String, usize)>, KernelError> {
    for p in q.iter() {
        if base.signature().predicate(&p.name) != Some(p) {
            return Err(KernelError::UnknownSymbol(p.name.clone()));
        }
    }
    Ok(base
        .signature()
        .canonical_order(q)
        .into_iter()
        .flat_map(|p| (1..=p.arity).map(move |i| (p.name.clone(), i)))
        .collect())
}

impl Checker<'_> {
    /// `∨E` and `∃E` whose minor premises conclude a term-assumption unit.
    fn check_unit_case(&self, rule: &Rule, conclusion: &Unit, concls: &[Unit], infos: &[Info]) -> Check {
        let unit_eq = |u: &Unit| {
            if u == conclusion {
                Ok(())
            } else {
                Err(KernelError::ConclusionMismatch { expected: conclusion.to_string(), found: u.to_string() })
            }
        };
        match rule {
            Rule::OrE { .. } => {
                count(concls, 3)?;
                match formula(&concls[0])? {
                    Formula::Or(..) => {
                        unit_eq(&concls[1])?;
                        unit_eq(&concls[2])
                    }
                    other => Err(shape("a disjunction", other)),
                }
            }
            Rule::ExistsE { eigen, .. } => {
                count(concls, 2)?;
                self.known_term(eigen)?;
                let major = formula(&concls[0])?;
                let Formula::Exists(x, a) = major else {
                    return Err(shape("an existential formula", major));
                };
                a.subst(x, eigen)?;
                unit_eq(&concls[1])?;
                let minor = &infos[1];
                let clash = match eigen {
                    Term::Var(y) => y != x && a.is_free(y),
                    Term::Const(o) => major.contains_const(o) || conclusion == &Unit::Term(o.clone()),
                };
                if clash || minor.mentions(eigen) || (eigen.is_const() && minor.has_term_leaf(eigen)) {
                    return Err(KernelError::EigenConditionViolation(format!("{eigen} is not general in the minor premise")));
                }
                Ok(())
            }
            _ => unreachable!("only disjunction and existential elimination"),
        }
    }

    fn fail(&mut self, path: Path, error: KernelError) {
        self.errors.push(NodeError { path, error });
    }

    fn visit(&mut self, d: &Derivation, path: &mut Path) -> Info {
        match d {
            Derivation::Assume { formula, label } => Info {
                open: vec![Open { formula: formula.clone(), label: label.clone(), path: path.clone() }],
                term_leaves: Vec::new(),
            },
            Derivation::TermLeaf { symbol } => {
                if self.base.signature().symbol(symbol).is_none() {
                    self.fail(path.clone(), KernelError::UnknownSymbol(symbol.clone()));
                }
                Info { open: Vec::new(), term_leaves: vec![symbol.clone()] }
            }
            Derivation::Node { rule, conclusion, premises } => {
                let mut infos = Vec::with_capacity(premises.len());
                for (i, p) in premises.iter().enumerate() {
                    path.push(i);
                    infos.push(self.visit(p, path));
                    path.pop();
                }
                let concls: Vec<Unit> = premises.iter().map(Derivation::conclusion).collect();
                self.discharge(rule, conclusion, &concls, &mut infos, path);
                if let Err(e) = self.check_rule(rule, conclusion, &concls, &infos) {
                    self.fail(path.clone(), e);
                }
                let mut out = Info::default();
                for info in infos {
                    out.open.extend(info.open);
                    out.term_leaves.extend(info.term_leaves);
                }
                out
            }
        }
    }

    /// Discharge slots of a rule: premise index, label, formula to discharge.
    fn slots(&self, rule: &Rule, conclusion: &Unit, concls: &[Unit]) -> Vec<(usize, Option<String>, Option<Formula>)> {
        let prem = |i: usize| concls.get(i).and_then(Unit::formula);
        match rule {
            Rule::ImpI { label } => {
                let a = match conclusion {
                    Unit::Formula(Formula::Implies(a, _)) => Some((**a).clone()),
                    _ => None,
                };
                vec![(0, label.clone(), a)]
            }
            Rule::OrE { left, right } => {
                let (a, b) = match prem(0) {
                    Some(Formula::Or(a, b)) => (Some((**a).clone()), Some((**b).clone())),
                    _ => (None, None),
                };
                vec![(1, left.clone(), a), (2, right.clone(), b)]
            }
            Rule::ExistsE { eigen, label } => {
                let a = match prem(0) {
                    Some(Formula::Exists(x, a)) => a.subst(x, eigen).ok(),
                    _ => None,
                };
                vec![(1, label.clone(), a)]
            }
            Rule::QIdentI { sign, pairs } => {
                let ident = match conclusion {
                    Unit::Formula(Formula::QIdent { left, right, .. }) => Some((left, right)),
                    _ => None,
                };
                pairs
                    .iter()
                    .enumerate()
                    .flat_map(|(k, pair)| {
                        let atoms = ident.and_then(|(a1, a2)| pair_atoms(self.base, *sign, a1, a2, pair).ok());
                        let (f1, f2) = match atoms {
                            Some((f1, f2)) => (Some(f1), Some(f2)),
                            None => (None, None),
                        };
                        [(2 * k, Some(pair.labels[0].clone()), f1), (2 * k + 1, Some(pair.labels[1].clone()), f2)]
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    fn discharge(&mut self, rule: &Rule, conclusion: &Unit, concls: &[Unit], infos: &mut [Info], path: &Path) {
        for (i, label, expected) in self.slots(rule, conclusion, concls) {
            let Some(info) = infos.get_mut(i) else { continue };
            match label {
                Some(l) => {
                    let (bound, rest): (Vec<Open>, Vec<Open>) =
                        info.open.drain(..).partition(|o| o.label.as_ref() == Some(&l));
                    info.open = rest;
                    if let Some(expected) = expected {
                        for o in bound.into_iter().filter(|o| !o.formula.alpha_eq(&expected)) {
                            self.fail(
                                o.path,
                                KernelError::DischargeFormulaMismatch {
                                    label: l.clone(),
                                    expected: expected.to_string(),
                                    found: o.formula.to_string(),
                                },
                            );
                        }
                    }
                }
                None => {
                    // A vacant slot that would bind a labelled assumption whose
                    // label no binder below will bind: the label was lost here.
                    let Some(expected) = expected else { continue };
                    let below = self.scopes.get(path).cloned().unwrap_or_default();
                    let (lost, rest): (Vec<Open>, Vec<Open>) = info.open.drain(..).partition(|o| {
                        o.label.as_ref().is_some_and(|l| !below.contains(l)) && o.formula.alpha_eq(&expected)
                    });
                    info.open = rest;
                    let labels: BTreeSet<String> = lost.into_iter().filter_map(|o| o.label).collect();
                    for l in labels {
                        self.fail(path.clone(), KernelError::UnboundDischargeLabel(l));
                    }
                }
            }
        }
    }

    fn check_rule(&self, rule: &Rule, conclusion: &Unit, concls: &[Unit], infos: &[Info]) -> Check {
        if let (Rule::OrE { .. } | Rule::ExistsE { .. }, Unit::Term(_)) = (rule, conclusion) {
            return self.check_unit_case(rule, conclusion, concls, infos);
        }
        if !matches!(rule, Rule::AsE(_) | Rule::NegAsE(_)) {
            formula(conclusion)?;
        }
        let c = || formula(conclusion);
        let p = |i: usize| formula(&concls[i]);
        match rule {
            Rule::AsI | Rule::NegAsI => self.check_as_intro(rule == &Rule::AsI, c()?, concls),
            Rule::AsE(i) | Rule::NegAsE(i) => {
                count(concls, 1)?;
                self.check_as_elim(matches!(rule, Rule::AsE(_)), p(0)?, *i, conclusion)
            }
            Rule::QIdentI { sign, pairs } => self.check_qident_intro(*sign, pairs, c()?, concls, infos),
            Rule::QIdentE { sign, side } => {
                count(concls, 2)?;
                check_qident_elim(*sign, *side, p(0)?, p(1)?, c()?)
            }
            Rule::AndI => {
                count(concls, 2)?;
                same(&Formula::and(p(0)?.clone(), p(1)?.clone()), c()?)
            }
            Rule::AndE1 | Rule::AndE2 => {
                count(concls, 1)?;
                match p(0)? {
                    Formula::And(a, b) => same(if rule == &Rule::AndE1 { a } else { b }, c()?),
                    other => Err(shape("a conjunction", other)),
                }
            }
            Rule::OrI1 | Rule::OrI2 => {
                count(concls, 1)?;
                match c()? {
                    Formula::Or(a, b) => same(if rule == &Rule::OrI1 { a } else { b }, p(0)?),
                    other => Err(shape("a disjunction", other)),
                }
            }
            Rule::OrE { .. } => {
                count(concls, 3)?;
                match p(0)? {
                    Formula::Or(..) => {
                        same(c()?, p(1)?)?;
                        same(c()?, p(2)?)
                    }
                    other => Err(shape("a disjunction", other)),
                }
            }
            Rule::ImpI { .. } => {
                count(concls, 1)?;
                match c()? {
                    Formula::Implies(_, b) => same(b, p(0)?),
                    other => Err(shape("an implication", other)),
                }
            }
            Rule::ImpE => {
                count(concls, 2)?;
                match p(0)? {
                    Formula::Implies(a, b) => {
                        same(a, p(1)?)?;
                        same(b, c()?)
                    }
                    other => Err(shape("an implication", other)),
                }
            }
            Rule::ForallI(variant) => self.check_forall_intro(variant, c()?, concls, infos),
            Rule::ForallE(t) => {
                count(concls, 1)?;
                self.known_term(t)?;
                match p(0)? {
                    Formula::Forall(x, a) => same(&a.subst(x, t)?, c()?),
                    other => Err(shape("a universal formula", other)),
                }
            }
            Rule::ExistsI(t) => {
                count(concls, 1)?;
                self.known_term(t)?;
                match c()? {
                    Formula::Exists(x, a) => same(&a.subst(x, t)?, p(0)?),
                    other => Err(shape("an existential formula", other)),
                }
            }
            Rule::ExistsE { eigen, .. } => {
                count(concls, 2)?;
                self.known_term(eigen)?;
                let major = p(0)?;
                let Formula::Exists(x, a) = major else {
                    return Err(shape("an existential formula", major));
                };
                a.subst(x, eigen)?;
                let concl = c()?;
                same(concl, p(1)?)?;
                let minor = &infos[1];
                match eigen {
                    Term::Var(y) => {
                        if y != x && a.is_free(y) {
                            return Err(KernelError::EigenConditionViolation(format!("{y} is free in {major}")));
                        }
                        if concl.is_free(y) {
                            return Err(KernelError::EigenConditionViolation(format!("{y} is free in the conclusion")));
                        }
                        if minor.mentions(eigen) {
                            return Err(KernelError::EigenConditionViolation(format!(
                                "{y} is free in an open assumption of the minor premise"
                            )));
                        }
                    }
                    Term::Const(o) => {
                        if major.contains_const(o) || concl.contains_const(o) {
                            return Err(KernelError::EigenConditionViolation(format!(
                                "{o} occurs in the major premise or the conclusion"
                            )));
                        }
                        if minor.mentions(eigen) {
                            return Err(KernelError::EigenConditionViolation(format!(
                                "{o} occurs in an open assumption of the minor premise"
                            )));
                        }
                        if minor.has_term_leaf(eigen) {
                            return Err(KernelError::EigenConditionViolation(format!(
                                "the minor premise uses the term assumption {o}Γ"
                            )));
                        }
                    }
                }
                Ok(())
            }
            Rule::BotI => {
                if self.mode == Mode::M0 {
                    return Err(KernelError::RuleDisabledInMinimalMode);
                }
                count(concls, 1)?;
                same(&Formula::Bottom, p(0)?)
            }
            Rule::IotaI(sign) => {
                count(concls, 3)?;
                let (ip, desc) = simple_iota(c()?)?;
                if desc.inner_sign() != *sign {
                    return Err(KernelError::SignMismatch);
                }
                check_iota_intro(ip, desc, p(0)?, p(1)?, p(2)?)
            }
            Rule::IotaE { sign, which } => {
                count(concls, 1)?;
                let (ip, desc) = simple_iota(p(0)?)?;
                if desc.inner_sign() != *sign {
                    return Err(KernelError::SignMismatch);
                }
                let k = usize::from(*which);
                if !(1..=3).contains(&k) {
                    return Err(KernelError::IndexOutOfRange { index: k, arity: 3 });
                }
                same(&iota_clauses(ip, desc)[k - 1], c()?)
            }
        }
    }

    fn known_term(&self, t: &Term) -> Check {
        match t {
            Term::Const(c) if !self.base.signature().is_constant(c) => Err(KernelError::UnknownSymbol(c.clone())),
            _ => Ok(()),
        }
    }

    fn check_as_intro(&self, positive: bool, concl: &Formula, concls: &[Unit]) -> Check {
        let ok_shape = match concl {
            Formula::Atom(..) => positive,
            Formula::NegPred(..) => !positive,
            _ => false,
        };
        if !ok_shape {
            return Err(shape(if positive { "an atom" } else { "a predication failure" }, concl));
        }
        let atom = GroundAtom::from_formula(concl)?;
        if concls.len() != atom.args.len() + 1 {
            return Err(KernelError::ArityMismatch { expected: atom.args.len() + 1, found: concls.len() });
        }
        let symbols: Vec<Symbol> = std::iter::once(Symbol::Pred(atom.pred.clone()))
            .chain(atom.args.iter().map(|a| Symbol::Const(a.clone())))
            .collect();
        for (k, (u, s)) in concls.iter().zip(&symbols).enumerate() {
            if *u != Unit::Term(s.name().to_string()) {
                return Err(KernelError::ShapeMismatch(format!("premise {k} should be {}Γ, found {u}", s.name())));
            }
        }
        let contained = self.base.positively_contained(&atom)?;
        match (positive, contained) {
            (true, false) => {
                let mut missing = Vec::new();
                for s in &symbols {
                    if !self.base.term_assumptions(s)?.contains(&atom) {
                        missing.push(format!("{}Γ", s.name()));
                    }
                }
                Err(KernelError::SideConditionViolation(format!("{atom} is not in {}", missing.join(", "))))
            }
            (false, true) => Err(KernelError::SideConditionViolation(format!(
                "{atom} is in the term assumptions of all its symbols"
            ))),
            _ => Ok(()),
        }
    }

    fn check_as_elim(&self, positive: bool, prem: &Formula, i: usize, conclusion: &Unit) -> Check {
        let ok_shape = match prem {
            Formula::Atom(..) => positive,
            Formula::NegPred(..) => !positive,
            _ => false,
        };
        if !ok_shape {
            return Err(shape(if positive { "an atom" } else { "a predication failure" }, prem));
        }
        let atom = GroundAtom::from_formula(prem)?;
        if i > atom.args.len() {
            return Err(KernelError::IndexOutOfRange { index: i, arity: atom.args.len() });
        }
        let tau = if i == 0 { atom.pred.clone() } else { atom.args[i - 1].clone() };
        let expected = Unit::Term(tau);
        if *conclusion != expected {
            return Err(KernelError::ConclusionMismatch { expected: expected.to_string(), found: conclusion.to_string() });
        }
        Ok(())
    }

    fn check_qident_intro(&self, sign: Sign, pairs: &[PairSpec], concl: &Formula, concls: &[Unit], infos: &[Info]) -> Check {
        let Formula::QIdent { sign: s, left: a1, right: a2, q } = concl else {
            return Err(shape("a qualified identity", concl));
        };
        if *s != sign {
            return Err(KernelError::PolarityMismatch);
        }
        let required = required_pairs(self.base, q)?;
        if let Some(unknown) = pairs.iter().find(|p| self.base.signature().predicate(&p.pred).is_none()) {
            return Err(KernelError::UnknownSymbol(unknown.pred.clone()));
        }
        if let Some(foreign) = pairs.iter().find(|p| !q.contains_name(&p.pred)) {
            return Err(KernelError::PredicateNotInQ(foreign.pred.clone()));
        }
        for (k, (pred, pos)) in required.iter().enumerate() {
            match pairs.get(k) {
                Some(pair) if pair.pred == *pred && pair.position == *pos => {}
                _ => return Err(KernelError::MissingPredicatePair(format!("{pred} at position {pos}"))),
            }
        }
        if pairs.len() > required.len() {
            let extra = &pairs[required.len()];
            return Err(KernelError::ShapeMismatch(format!(
                "pair for {} at position {} is not required",
                extra.pred, extra.position
            )));
        }
        count(concls, 2 * pairs.len())?;
        for (k, pair) in pairs.iter().enumerate() {
            let (f1, f2) = pair_atoms(self.base, sign, a1, a2, pair)?;
            check_pair_conclusion(sign, &f1, &f2, a1, a2, formula(&concls[2 * k])?)?;
            check_pair_conclusion(sign, &f2, &f1, a1, a2, formula(&concls[2 * k + 1])?)?;
            let mut seen: Vec<&Term> = vec![a1, a2];
            for z in &pair.companions {
                if seen.contains(&z) {
                    return Err(KernelError::EigenConditionViolation(format!(
                        "companion {z} must differ from the identity terms and the other companions"
                    )));
                }
                seen.push(z);
                for info in &infos[2 * k..2 * k + 2] {
                    if info.mentions(z) {
                        return Err(KernelError::EigenConditionViolation(format!(
                            "companion {z} occurs in an open assumption"
                        )));
                    }
                    if info.has_term_leaf(z) {
                        return Err(KernelError::EigenConditionViolation(format!(
                            "the pair subderivation uses the term assumption {z}Γ"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_forall_intro(&self, variant: &ForallVariant, concl: &Formula, concls: &[Unit], infos: &[Info]) -> Check {
        let Formula::Forall(x, a) = concl else {
            return Err(shape("a universal formula", concl));
        };
        match variant {
            ForallVariant::Eigen(t) => {
                count(concls, 1)?;
                self.known_term(t)?;
                same(&a.subst(x, t)?, formula(&concls[0])?)?;
                match t {
                    Term::Var(y) => {
                        if y != x && a.is_free(y) {
                            return Err(KernelError::EigenConditionViolation(format!("{y} is free in {concl}")));
                        }
                        if infos[0].mentions(t) {
                            return Err(KernelError::EigenConditionViolation(format!(
                                "{y} is free in an open assumption"
                            )));
                        }
                    }
                    Term::Const(o) => {
                        if concl.contains_const(o) {
                            return Err(KernelError::EigenConditionViolation(format!("{o} occurs in {concl}")));
                        }
                        if infos[0].mentions(t) {
                            return Err(KernelError::EigenConditionViolation(format!(
                                "{o} occurs in an open assumption"
                            )));
                        }
                        if infos[0].has_term_leaf(t) {
                            return Err(KernelError::EigenConditionViolation(format!(
                                "the premise uses the term assumption {o}Γ"
                            )));
                        }
                    }
                }
                Ok(())
            }
            ForallVariant::EachConstant => {
                let constants = self.base.constants();
                let instances = constants
                    .iter()
                    .map(|c| a.subst(x, &Term::Const(c.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                for (c, inst) in constants.iter().zip(&instances) {
                    if !concls.iter().any(|u| u.formula().is_some_and(|f| f.alpha_eq(inst))) {
                        return Err(KernelError::MissingInstance(c.clone()));
                    }
                }
                count(concls, constants.len())?;
                for (u, inst) in concls.iter().zip(&instances) {
                    same(inst, formula(u)?)?;
                }
                Ok(())
            }
        }
    }
}

fn check_pair_conclusion(sign: Sign, assumed: &Formula, expected: &Formula, a1: &Term, a2: &Term, found: &Formula) -> Check {
    let polarity = match found {
        Formula::Atom(..) => Sign::Pos,
        Formula::NegPred(..) => Sign::Neg,
        other => return Err(shape("an atomic predication", other)),
    };
    if polarity != sign {
        return Err(KernelError::WrongPolarity);
    }
    if !mirror(assumed, found, a1, a2) {
        return Err(KernelError::NotMirrorAtoms(format!("{assumed} and {found}")));
    }
    same(expected, found)
}

fn check_qident_elim(sign: Sign, side: Side, ident: &Formula, minor: &Formula, concl: &Formula) -> Check {
    let Formula::QIdent { sign: s, left, right, q } = ident else {
        return Err(shape("a qualified identity", ident));
    };
    if *s != sign {
        return Err(KernelError::PolarityMismatch);
    }
    let (pred, args, polarity) = match minor {
        Formula::Atom(p, args) => (p, args, Sign::Pos),
        Formula::NegPred(p, args) => (p, args, Sign::Neg),
        other => return Err(shape("an atomic predication", other)),
    };
    if polarity != sign {
        return Err(KernelError::PolarityMismatch);
    }
    if !q.contains(pred) {
        return Err(KernelError::PredicateNotInQ(pred.name.clone()));
    }
    let term = match side {
        Side::First => left,
        Side::Second => right,
    };
    if !args.contains(term) {
        return Err(KernelError::NotInstanceOfPredicate(format!("{term} does not occur in {minor}")));
    }
    same(&minor.swap_terms(left, right), concl)
}

fn check_iota_intro(ip: &IotaPred, desc: &Description, e: &Formula, qu: &Formula, pr: &Formula) -> Check {
    let [ce, cqu, cp] = iota_clauses(ip, desc);
    if !ce.alpha_eq(e) {
        return Err(KernelError::ConjunctShapeMismatch(Conjunct::Existence));
    }
    if !cqu.alpha_eq(qu) {
        if let Formula::Forall(_, inner) = qu {
            if let Formula::Forall(_, inner) = &**inner {
                if let Formula::Implies(_, ident) = &**inner {
                    if let Formula::QIdent { q, .. } = &**ident {
                        let other = Description { q: q.clone(), ..desc.clone() };
                        if *q != desc.q && iota_clauses(ip, &other)[1].alpha_eq(qu) {
                            return Err(KernelError::QSetMismatch);
                        }
                    }
                }
            }
        }
        return Err(KernelError::ConjunctShapeMismatch(Conjunct::Uniqueness));
    }
    if !cp.alpha_eq(pr) {
        let flipped = IotaPred { sign: ip.sign.flip(), ..ip.clone() };
        let other = iota_clauses(&flipped, desc);
        if other[2].alpha_eq(pr) {
            return Err(KernelError::PolarityMismatch);
        }
        return Err(KernelError::ConjunctShapeMismatch(Conjunct::Predication));
    }
    Ok(())
}
