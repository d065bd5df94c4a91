//! Derivation trees and structural operations on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::syntax::{Formula, Sign, Term};

/// What a derivation concludes: a formula, or a term-assumption unit `τΓ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    Formula(Formula),
    Term(String),
}

impl Unit {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Unit::Formula(f) => Some(f),
            Unit::Term(_) => None,
        }
    }

    pub fn alpha_eq(&self, other: &Unit) -> bool {
        match (self, other) {
            (Unit::Formula(a), Unit::Formula(b)) => a.alpha_eq(b),
            (Unit::Term(a), Unit::Term(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Formula(x) => write!(f, "{x}"),
            Unit::Term(s) => write!(f, "{s}Γ"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    First,
    Second,
}

/// One mirror pair of an identity introduction: for `pred` with the identity
/// terms at `position` (1-based) and `companions` in the remaining places.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSpec {
    pub pred: String,
    pub position: usize,
    pub companions: Vec<Term>,
    /// Labels of `[φ(..α1..)]` and `[φ(..α2..)]` respectively.
    pub labels: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForallVariant {
    /// Clause (i) for a variable, clause (ii) for a constant.
    Eigen(Term),
    /// Clause (iii): one premise per constant of the base.
    EachConstant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    AsI,
    AsE(usize),
    NegAsI,
    NegAsE(usize),
    QIdentI { sign: Sign, pairs: Vec<PairSpec> },
    QIdentE { sign: Sign, side: Side },
    AndI,
    AndE1,
    AndE2,
    OrI1,
    OrI2,
    OrE { left: Option<String>, right: Option<String> },
    ImpI { label: Option<String> },
    ImpE,
    ForallI(ForallVariant),
    ForallE(Term),
    ExistsI(Term),
    ExistsE { eigen: Term, label: Option<String> },
    BotI,
    IotaI(Sign),
    IotaE { sign: Sign, which: u8 },
}

impl Rule {
    pub fn name(&self) -> String {
        let sign = |s: &Sign| match s {
            Sign::Pos => "pos",
            Sign::Neg => "neg",
        };
        match self {
            Rule::AsI => "asI".into(),
            Rule::AsE(i) => format!("asE{i}"),
            Rule::NegAsI => "negAsI".into(),
            Rule::NegAsE(i) => format!("negAsE{i}"),
            Rule::QIdentI { sign: s, .. } => format!("{}QIdentI", sign(s)),
            Rule::QIdentE { sign: s, .. } => format!("{}QIdentE", sign(s)),
            Rule::AndI => "andI".into(),
            Rule::AndE1 => "andE1".into(),
            Rule::AndE2 => "andE2".into(),
            Rule::OrI1 => "orI1".into(),
            Rule::OrI2 => "orI2".into(),
            Rule::OrE { .. } => "orE".into(),
            Rule::ImpI { .. } => "impI".into(),
            Rule::ImpE => "impE".into(),
            Rule::ForallI(ForallVariant::Eigen(t)) if t.is_const() => "forallI.ii".into(),
            Rule::ForallI(ForallVariant::Eigen(_)) => "forallI.i".into(),
            Rule::ForallI(ForallVariant::EachConstant) => "forallI.iii".into(),
            Rule::ForallE(_) => "forallE".into(),
            Rule::ExistsI(_) => "existsI".into(),
            Rule::ExistsE { eigen, .. } if eigen.is_const() => "existsE.ii".into(),
            Rule::ExistsE { .. } => "existsE.i".into(),
            Rule::BotI => "botI".into(),
            Rule::IotaI(_) => "iotaI".into(),
            Rule::IotaE { which, .. } => format!("iotaE{which}"),
        }
    }

    /// Introduction rules, including the atomic-sentence introductions.
    pub fn is_intro(&self) -> bool {
        matches!(
            self,
            Rule::AsI
                | Rule::NegAsI
                | Rule::QIdentI { .. }
                | Rule::AndI
                | Rule::OrI1
                | Rule::OrI2
                | Rule::ImpI { .. }
                | Rule::ForallI(_)
                | Rule::ExistsI(_)
                | Rule::IotaI(_)
        )
    }

    pub fn is_atomic_rule(&self) -> bool {
        matches!(self, Rule::AsI | Rule::NegAsI | Rule::AsE(_) | Rule::NegAsE(_))
    }

    /// Index of the major premise of an elimination rule.
    pub fn major_premise(&self) -> Option<usize> {
        match self {
            Rule::AsE(_)
            | Rule::NegAsE(_)
            | Rule::QIdentE { .. }
            | Rule::AndE1
            | Rule::AndE2
            | Rule::OrE { .. }
            | Rule::ImpE
            | Rule::ForallE(_)
            | Rule::ExistsE { .. }
            | Rule::IotaE { .. } => Some(0),
            _ => None,
        }
    }

    /// Discharge labels bound by this rule, with the premise each one scopes over.
    pub fn bindings(&self) -> Vec<(usize, &String)> {
        match self {
            Rule::ImpI { label: Some(l) } => vec![(0, l)],
            Rule::OrE { left, right } => {
                let mut v = Vec::new();
                if let Some(l) = left {
                    v.push((1, l));
                }
                if let Some(r) = right {
                    v.push((2, r));
                }
                v
            }
            Rule::ExistsE { label: Some(l), .. } => vec![(1, l)],
            Rule::QIdentI { pairs, .. } => pairs
                .iter()
                .enumerate()
                .flat_map(|(k, p)| [(2 * k, &p.labels[0]), (2 * k + 1, &p.labels[1])])
                .collect(),
            _ => Vec::new(),
        }
    }

    fn bindings_mut(&mut self) -> Vec<(usize, &mut String)> {
        match self {
            Rule::ImpI { label: Some(l) } => vec![(0, l)],
            Rule::OrE { left, right } => {
                let mut v = Vec::new();
                if let Some(l) = left {
                    v.push((1, l));
                }
                if let Some(r) = right {
                    v.push((2, r));
                }
                v
            }
            Rule::ExistsE { label: Some(l), .. } => vec![(1, l)],
            Rule::QIdentI { pairs, .. } => pairs
                .iter_mut()
                .enumerate()
                .flat_map(|(k, p)| {
                    let [a, b] = &mut p.labels;
                    [(2 * k, a), (2 * k + 1, b)]
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    fn map_terms(&self, g: &dyn Fn(&Term) -> Term) -> Rule {
        match self {
            Rule::QIdentI { sign, pairs } => Rule::QIdentI {
                sign: *sign,
                pairs: pairs
                    .iter()
                    .map(|p| PairSpec { companions: p.companions.iter().map(g).collect(), ..p.clone() })
                    .collect(),
            },
            Rule::ForallI(ForallVariant::Eigen(t)) => Rule::ForallI(ForallVariant::Eigen(g(t))),
            Rule::ForallE(t) => Rule::ForallE(g(t)),
            Rule::ExistsI(t) => Rule::ExistsI(g(t)),
            Rule::ExistsE { eigen, label } => Rule::ExistsE { eigen: g(eigen), label: label.clone() },
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Assume { formula: Formula, label: Option<String> },
    TermLeaf { symbol: String },
    Node { rule: Rule, conclusion: Unit, premises: Vec<Derivation> },
}

pub type Path = Vec<usize>;

impl Derivation {
    pub fn assume(formula: Formula) -> Self {
        Derivation::Assume { formula, label: None }
    }

    pub fn hyp(formula: Formula, label: impl Into<String>) -> Self {
        Derivation::Assume { formula, label: Some(label.into()) }
    }

    pub fn term(symbol: impl Into<String>) -> Self {
        Derivation::TermLeaf { symbol: symbol.into() }
    }

    pub fn node(rule: Rule, conclusion: Formula, premises: Vec<Derivation>) -> Self {
        Derivation::Node { rule, conclusion: Unit::Formula(conclusion), premises }
    }

    pub fn conclusion(&self) -> Unit {
        match self {
            Derivation::Assume { formula, .. } => Unit::Formula(formula.clone()),
            Derivation::TermLeaf { symbol } => Unit::Term(symbol.clone()),
            Derivation::Node { conclusion, .. } => conclusion.clone(),
        }
    }

    pub fn conclusion_formula(&self) -> Option<Formula> {
        match self.conclusion() {
            Unit::Formula(f) => Some(f),
            Unit::Term(_) => None,
        }
    }

    pub fn rule(&self) -> Option<&Rule> {
        match self {
            Derivation::Node { rule, .. } => Some(rule),
            _ => None,
        }
    }

    pub fn premises(&self) -> &[Derivation] {
        match self {
            Derivation::Node { premises, .. } => premises,
            _ => &[],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises().iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Rule applications on the longest branch; a leaf has depth 0.
    pub fn depth(&self) -> usize {
        self.height() - 1
    }

    pub fn at(&self, path: &[usize]) -> Option<&Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises().get(*i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                Derivation::Node { premises, .. } => premises.get_mut(*i)?.at_mut(rest),
                _ => None,
            },
        }
    }

    /// All nodes in pre-order together with their paths.
    pub fn nodes(&self) -> Vec<(Path, &Derivation)> {
        let mut out = Vec::new();
        fn go<'a>(d: &'a Derivation, path: &mut Path, out: &mut Vec<(Path, &'a Derivation)>) {
            out.push((path.clone(), d));
            for (i, p) in d.premises().iter().enumerate() {
                path.push(i);
                go(p, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every formula occurrence: assumptions and formula conclusions.
    pub fn formulas(&self) -> Vec<&Formula> {
        self.nodes()
            .into_iter()
            .filter_map(|(_, d)| match d {
                Derivation::Assume { formula, .. } => Some(formula),
                Derivation::Node { conclusion: Unit::Formula(f), .. } => Some(f),
                _ => None,
            })
            .collect()
    }

    /// Every term occurring free in some formula of the derivation, plus the
    /// terms named by rule instantiations.
    pub fn terms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for (_, d) in self.nodes() {
            match d {
                Derivation::Assume { formula, .. } => out.extend(formula.free_terms()),
                Derivation::TermLeaf { .. } => {}
                Derivation::Node { rule, conclusion, .. } => {
                    if let Unit::Formula(f) = conclusion {
                        out.extend(f.free_terms());
                    }
                    match rule {
                        Rule::ForallI(ForallVariant::Eigen(t))
                        | Rule::ForallE(t)
                        | Rule::ExistsI(t)
                        | Rule::ExistsE { eigen: t, .. } => {
                            out.insert(t.clone());
                        }
                        Rule::QIdentI { pairs, .. } => {
                            out.extend(pairs.iter().flat_map(|p| p.companions.iter().cloned()))
                        }
                        _ => {}
                    }
                }
            }
        }
        out
    }

    /// Apply `f` to every formula and `g` to every instantiation term.
    pub fn map(&self, f: &dyn Fn(&Formula) -> Formula, g: &dyn Fn(&Term) -> Term) -> Derivation {
        match self {
            Derivation::Assume { formula, label } => {
                Derivation::Assume { formula: f(formula), label: label.clone() }
            }
            Derivation::TermLeaf { symbol } => match g(&Term::Const(symbol.clone())) {
                Term::Const(c) => Derivation::TermLeaf { symbol: c },
                Term::Var(_) => Derivation::TermLeaf { symbol: symbol.clone() },
            },
            Derivation::Node { rule, conclusion, premises } => Derivation::Node {
                rule: rule.map_terms(g),
                conclusion: match conclusion {
                    Unit::Formula(c) => Unit::Formula(f(c)),
                    Unit::Term(s) => match g(&Term::Const(s.clone())) {
                        Term::Const(c) => Unit::Term(c),
                        Term::Var(_) => Unit::Term(s.clone()),
                    },
                },
                premises: premises.iter().map(|p| p.map(f, g)).collect(),
            },
        }
    }

    /// Replace the free variable `var` by `t` throughout.
    pub fn subst_var(&self, var: &str, t: &Term) -> Derivation {
        let v = Term::Var(var.to_string());
        self.map(&|f| f.subst_avoiding(var, t), &|u| if *u == v { t.clone() } else { u.clone() })
    }

    /// Replace the constant `c` by `t` throughout.
    pub fn replace_const(&self, c: &str, t: &Term) -> Derivation {
        let from = Term::Const(c.to_string());
        self.map(&|f| f.replace_term(&from, t), &|u| if *u == from { t.clone() } else { u.clone() })
    }

    /// Replace every assumption leaf labelled `label` that is free in this
    /// derivation (not rebound below) by `by`.
    pub fn plug(&self, label: &str, by: &Derivation) -> Derivation {
        match self {
            Derivation::Assume { label: Some(l), .. } if l == label => by.clone(),
            Derivation::Node { rule, conclusion, premises } => {
                let rebinds: BTreeSet<usize> =
                    rule.bindings().into_iter().filter(|(_, l)| *l == label).map(|(i, _)| i).collect();
                Derivation::Node {
                    rule: rule.clone(),
                    conclusion: conclusion.clone(),
                    premises: premises
                        .iter()
                        .enumerate()
                        .map(|(i, p)| if rebinds.contains(&i) { p.clone() } else { p.plug(label, by) })
                        .collect(),
                }
            }
            other => other.clone(),
        }
    }

    /// Rename every binder label to `1`, `2`, ... in pre-order, resolving each
    /// labelled leaf to its nearest binding ancestor. Unbound labels are kept.
    pub fn canonicalize_labels(&self) -> Derivation {
        let mut next = 0usize;
        self.relabel(&BTreeMap::new(), &mut next)
    }

    fn relabel(&self, scope: &BTreeMap<String, String>, next: &mut usize) -> Derivation {
        match self {
            Derivation::Assume { formula, label } => Derivation::Assume {
                formula: formula.clone(),
                label: label.as_ref().map(|l| scope.get(l).cloned().unwrap_or_else(|| l.clone())),
            },
            Derivation::TermLeaf { .. } => self.clone(),
            Derivation::Node { rule, conclusion, premises } => {
                let mut rule = rule.clone();
                let mut per_premise: Vec<BTreeMap<String, String>> = vec![scope.clone(); premises.len()];
                for (i, l) in rule.bindings_mut() {
                    *next += 1;
                    let fresh = next.to_string();
                    if let Some(s) = per_premise.get_mut(i) {
                        s.insert(l.clone(), fresh.clone());
                    }
                    *l = fresh;
                }
                let premises =
                    premises.iter().zip(&per_premise).map(|(p, s)| p.relabel(s, next)).collect();
                Derivation::Node { rule, conclusion: conclusion.clone(), premises }
            }
        }
    }

    /// All labels used anywhere, by binders or leaves.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (_, d) in self.nodes() {
            match d {
                Derivation::Assume { label: Some(l), .. } => {
                    out.insert(l.clone());
                }
                Derivation::Node { rule, .. } => out.extend(rule.bindings().into_iter().map(|(_, l)| l.clone())),
                _ => {}
            }
        }
        out
    }

    /// Every name (variable or constant) occurring anywhere.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.formulas().into_iter().flat_map(|f| f.names()).collect();
        out.extend(self.terms().into_iter().map(|t| t.name().to_string()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Pred;

    fn p(t: &str) -> Formula {
        Formula::atom(&Pred::new("P", 1), vec![Term::var(t)])
    }

    #[test]
    fn canonical_labels_follow_scopes() {
        let inner = Derivation::node(
            Rule::ImpI { label: Some("u".into()) },
            Formula::implies(p("x"), p("x")),
            vec![Derivation::hyp(p("x"), "u")],
        );
        let outer = Derivation::node(
            Rule::ImpI { label: Some("u".into()) },
            Formula::implies(p("y"), Formula::implies(p("x"), p("x"))),
            vec![inner],
        );
        let c = outer.canonicalize_labels();
        assert_eq!(c.rule(), Some(&Rule::ImpI { label: Some("1".into()) }));
        let leaf = c.at(&[0, 0]).unwrap();
        assert_eq!(leaf, &Derivation::hyp(p("x"), "2"));
    }

    #[test]
    fn plug_respects_rebinding() {
        let d = Derivation::node(
            Rule::AndI,
            Formula::and(p("x"), p("x")),
            vec![
                Derivation::hyp(p("x"), "1"),
                Derivation::node(
                    Rule::ImpI { label: Some("1".into()) },
                    Formula::implies(p("x"), p("x")),
                    vec![Derivation::hyp(p("x"), "1")],
                ),
            ],
        );
        let by = Derivation::assume(p("x"));
        let got = d.plug("1", &by);
        assert_eq!(got.at(&[0]).unwrap(), &by);
        assert_eq!(got.at(&[1, 0]).unwrap(), &Derivation::hyp(p("x"), "1"));
    }

    #[test]
    fn var_substitution_reaches_rule_terms() {
        let d = Derivation::node(
            Rule::ExistsI(Term::var("y")),
            Formula::exists("x", p("x")),
            vec![Derivation::assume(p("y"))],
        );
        let got = d.subst_var("y", &Term::constant("a"));
        assert_eq!(got.rule(), Some(&Rule::ExistsI(Term::constant("a"))));
        assert_eq!(got.at(&[0]).unwrap().conclusion_formula().unwrap().to_string(), "P(a)");
    }
}
