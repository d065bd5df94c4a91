//! Subformula and subexpression audits, and canonicity classification.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::base::SubatomicBase;
use crate::defs::subformulas;
use crate::derivation::{Derivation, Path, Rule, Unit};
use crate::kernel::{check_derivation, Mode};
use crate::normalize::{find_redexes, Redex};
use crate::syntax::{Arg, Formula, IotaPred, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("the derivation is not valid: {}", .0.join(", "))]
    Invalid(Vec<String>),
    #[error("the derivation is not normal ({} redexes)", .0.len())]
    NotNormal(Vec<Redex>),
}

impl AuditError {
    pub fn kind(&self) -> &'static str {
        match self {
            AuditError::Invalid(_) => "Invalid",
            AuditError::NotNormal(_) => "NotNormal",
        }
    }
}

/// One unit occurrence and the member of `Γ ∪ {U}` it descends from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub path: Path,
    pub unit: String,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub passed: bool,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn violations(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| e.witness.is_none())
    }
}

fn precondition(base: &SubatomicBase, d: &Derivation, mode: Mode) -> Result<(Vec<Formula>, Unit), AuditError> {
    let report = check_derivation(base, d, mode);
    if !report.valid {
        return Err(AuditError::Invalid(report.error_kinds().into_iter().map(String::from).collect()));
    }
    let redexes = find_redexes(base, d);
    if !redexes.is_empty() {
        return Err(AuditError::NotNormal(redexes));
    }
    Ok((report.open_assumptions, report.conclusion))
}

/// Candidates for witnessing, each with its subformula closure.
fn closures(d: &Derivation, tops: &[Formula]) -> Vec<(String, BTreeSet<Formula>)> {
    let terms = d.terms();
    let mut seen = BTreeSet::new();
    tops.iter()
        .filter(|f| seen.insert(f.canonical()))
        .map(|f| (f.to_string(), subformulas(f, &terms)))
        .collect()
}

fn witness_formula(f: &Formula, closures: &[(String, BTreeSet<Formula>)]) -> Option<String> {
    let c = f.canonical();
    closures.iter().find(|(_, s)| s.contains(&c)).map(|(w, _)| w.clone())
}

/// Every formula occurrence of a normal derivation of `A` from `Γ` is a
/// subformula of a member of `Γ ∪ {A}`, quantifier instances included.
pub fn audit_subformula(base: &SubatomicBase, d: &Derivation, mode: Mode) -> Result<AuditReport, AuditError> {
    let (mut tops, conclusion) = precondition(base, d, mode)?;
    if let Unit::Formula(a) = &conclusion {
        tops.push(a.clone());
    }
    let closures = closures(d, &tops);
    let entries: Vec<AuditEntry> = formula_occurrences(d)
        .into_iter()
        .map(|(path, f)| AuditEntry { path, unit: f.to_string(), witness: witness_formula(&f, &closures) })
        .collect();
    Ok(AuditReport { passed: entries.iter().all(|e| e.witness.is_some()), entries })
}

/// Every unit occurrence, term assumptions included, is a subexpression of an
/// expression of `Γ ∪ {U}`. The expression of `τΓ` is `τ`; it is a
/// subexpression of a formula when it occurs in one of its subformulas.
pub fn audit_subexpression(base: &SubatomicBase, d: &Derivation, mode: Mode) -> Result<AuditReport, AuditError> {
    let (mut tops, conclusion) = precondition(base, d, mode)?;
    let conclusion_symbol = match &conclusion {
        Unit::Formula(a) => {
            tops.push(a.clone());
            None
        }
        Unit::Term(t) => Some(t.clone()),
    };
    let closures = closures(d, &tops);
    let mut entries = Vec::new();
    for (path, node) in d.nodes() {
        let entry = match node {
            Derivation::Assume { formula, .. } => {
                AuditEntry { path, unit: formula.to_string(), witness: witness_formula(formula, &closures) }
            }
            Derivation::TermLeaf { symbol } => symbol_entry(path, symbol, &conclusion_symbol, &closures),
            Derivation::Node { conclusion: Unit::Formula(f), .. } => {
                AuditEntry { path, unit: f.to_string(), witness: witness_formula(f, &closures) }
            }
            Derivation::Node { conclusion: Unit::Term(s), .. } => symbol_entry(path, s, &conclusion_symbol, &closures),
        };
        entries.push(entry);
    }
    Ok(AuditReport { passed: entries.iter().all(|e| e.witness.is_some()), entries })
}

fn symbol_entry(
    path: Path,
    symbol: &str,
    conclusion_symbol: &Option<String>,
    closures: &[(String, BTreeSet<Formula>)],
) -> AuditEntry {
    let unit = format!("{symbol}Γ");
    if conclusion_symbol.as_deref() == Some(symbol) {
        return AuditEntry { path, witness: Some(unit.clone()), unit };
    }
    let witness = closures
        .iter()
        .find(|(_, s)| s.iter().any(|f| symbols(f).contains(symbol)))
        .map(|(w, _)| w.clone());
    AuditEntry { path, unit, witness }
}

/// Constant and predicate names occurring in `f`.
pub fn symbols(f: &Formula) -> BTreeSet<String> {
    fn terms(ts: &[Term], out: &mut BTreeSet<String>) {
        out.extend(ts.iter().filter(|t| t.is_const()).map(|t| t.name().to_string()));
    }
    fn iota(ip: &IotaPred, out: &mut BTreeSet<String>) {
        out.insert(ip.pred.name.clone());
        for a in &ip.args {
            match a {
                Arg::Term(t) => terms(std::slice::from_ref(t), out),
                Arg::Desc(d) => {
                    out.extend(d.q.iter().map(|p| p.name.clone()));
                    go(&d.body, out);
                }
            }
        }
    }
    fn go(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom(p, ts) | Formula::NegPred(p, ts) => {
                out.insert(p.name.clone());
                terms(ts, out);
            }
            Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => go(a, out),
            Formula::QIdent { left, right, q, .. } => {
                terms(&[left.clone(), right.clone()], out);
                out.extend(q.iter().map(|p| p.name.clone()));
            }
            Formula::Iota(ip) => iota(ip, out),
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut out);
    out
}

fn formula_occurrences(d: &Derivation) -> Vec<(Path, Formula)> {
    d.nodes()
        .into_iter()
        .filter_map(|(path, n)| match n {
            Derivation::Assume { formula, .. } => Some((path, formula.clone())),
            Derivation::Node { conclusion: Unit::Formula(f), .. } => Some((path, f.clone())),
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Canonicity {
    CanonicalProof,
    CanonicalDerivation,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Theorem,
    Thesis,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub canonicity: Canonicity,
    pub status: Status,
}

impl fmt::Display for Canonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Canonicity::CanonicalProof => "canonical proof",
            Canonicity::CanonicalDerivation => "canonical derivation",
            Canonicity::Neither => "neither",
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Theorem => "theorem",
            Status::Thesis => "thesis",
            Status::None => "none",
        })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}", self.canonicity, self.status)
    }
}

/// Canonicity of a valid derivation. The as-rules count as introductions.
pub fn classify(base: &SubatomicBase, d: &Derivation, mode: Mode) -> Classification {
    let intro_final = d.rule().is_some_and(Rule::is_intro) && matches!(d.conclusion(), Unit::Formula(_));
    if !intro_final {
        return Classification { canonicity: Canonicity::Neither, status: Status::None };
    }
    let uses_as = d.nodes().iter().any(|(_, n)| {
        matches!(n.rule(), Some(Rule::AsI | Rule::NegAsI | Rule::AsE(_) | Rule::NegAsE(_)))
    });
    let closed = check_derivation(base, d, mode).open_assumptions.is_empty();
    if !uses_as && closed {
        Classification { canonicity: Canonicity::CanonicalProof, status: Status::Theorem }
    } else {
        Classification { canonicity: Canonicity::CanonicalDerivation, status: Status::Thesis }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::*;
    use crate::corpus::{definite_description, example_base, worked_scripts};
    use crate::normalize::{normalize, DEFAULT_FUEL};
    use crate::parse::parse_formula;

    #[test]
    fn corpus_normal_forms_pass_both_audits() {
        for script in worked_scripts() {
            for e in &script.entries {
                let n = normalize(&script.base, &e.derivation, DEFAULT_FUEL).unwrap().result;
                let sf = audit_subformula(&script.base, &n, Mode::I0).unwrap();
                assert!(sf.passed, "{}: {:?}", e.name, sf.violations().collect::<Vec<_>>());
                let se = audit_subexpression(&script.base, &n, Mode::I0).unwrap();
                assert!(se.passed, "{}: {:?}", e.name, se.violations().collect::<Vec<_>>());
                assert!(se.entries.len() >= sf.entries.len());
            }
        }
    }

    #[test]
    fn hand_built_units_are_witnessed() {
        // P1(alpha) from P1(alpha) & P2(beta): the units are the premise, its
        // left conjunct, P1Γ, alphaΓ and the conclusion.
        let base = example_base();
        let f = |s: &str| parse_formula(s, base.signature()).unwrap();
        let hyp = Derivation::assume(f("Phi1(alpha) & Phi2(beta)"));
        let d = as_i(
            f("Phi1(alpha)"),
            vec![as_e(0, and_e(1, hyp.clone())), Derivation::term("alpha")],
        );
        let r = audit_subexpression(&base, &d, Mode::I0).unwrap();
        assert!(r.passed);
        let units: Vec<&str> = r.entries.iter().map(|e| e.unit.as_str()).collect();
        assert_eq!(units, ["Phi1(alpha)", "Phi1Γ", "Phi1(alpha)", "Phi1(alpha) & Phi2(beta)", "alphaΓ"]);
    }

    #[test]
    fn non_normal_and_invalid_inputs_are_refused() {
        let script = definite_description();
        let d = iota_e(2, script.entries[3].derivation.clone());
        assert_eq!(audit_subformula(&script.base, &d, Mode::I0).unwrap_err().kind(), "NotNormal");
        // An alien conclusion under a conjunction elimination.
        let bad = Derivation::node(Rule::AndE1, Formula::Bottom, vec![Derivation::assume(Formula::Bottom)]);
        assert_eq!(audit_subformula(&script.base, &bad, Mode::I0).unwrap_err().kind(), "Invalid");
    }

    #[test]
    fn theorem_without_assumptions() {
        let base = example_base();
        let a = parse_formula("Phi1(alpha) & Phi2(beta)", base.signature()).unwrap();
        let d = imp_i(Some("1"), a.clone(), and_e(2, Derivation::hyp(a, "1")));
        let r = audit_subformula(&base, &d, Mode::I0).unwrap();
        assert!(r.passed);
        assert!(r.entries.iter().all(|e| e.witness.as_deref() == Some("Phi1(alpha) & Phi2(beta) -> Phi2(beta)")));
    }

    #[test]
    fn classification() {
        let script = definite_description();
        let d4 = &script.entries[3].derivation;
        let c = classify(&script.base, d4, Mode::I0);
        assert_eq!(c.to_string(), "canonical derivation; thesis");
        let a = parse_formula("Phi1(alpha)", script.base.signature()).unwrap();
        let id = imp_i(Some("1"), a.clone(), Derivation::hyp(a.clone(), "1"));
        assert_eq!(classify(&script.base, &id, Mode::I0).to_string(), "canonical proof; theorem");
        assert_eq!(classify(&script.base, &Derivation::assume(a), Mode::I0).to_string(), "neither; none");
    }
}
