//! Conversions and normalization.
//!
//! A redex is an elimination whose major premise is a maximal formula: it is
//! concluded by the matching introduction (detour), by the absurdity rule, or
//! by a `∨E`/`∃E` (permutation). A `∨E`/`∃E` that does not use a discharged
//! assumption in the branch it could be replaced by is also a redex
//! (simplification).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::base::SubatomicBase;
use crate::derivation::{Derivation, ForallVariant, PairSpec, Path, Rule, Side, Unit};
use crate::kernel::{pair_atoms, required_pairs};
use crate::syntax::{fresh_name, Formula, Term};

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedexKind {
    DetourAnd,
    DetourOr,
    DetourImplies,
    DetourForall,
    DetourExists,
    DetourAs,
    DetourQIdent,
    DetourIota,
    DetourAbsurdity,
    PermutationOrE,
    PermutationExistsE,
    SimplificationOrE,
    SimplificationExistsE,
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexKind::DetourAnd => "detour(&)",
            RedexKind::DetourOr => "detour(|)",
            RedexKind::DetourImplies => "detour(->)",
            RedexKind::DetourForall => "detour(forall)",
            RedexKind::DetourExists => "detour(exists)",
            RedexKind::DetourAs => "detour(as)",
            RedexKind::DetourQIdent => "detour(qident)",
            RedexKind::DetourIota => "detour(iota)",
            RedexKind::DetourAbsurdity => "detour(bot)",
            RedexKind::PermutationOrE => "permutation(orE)",
            RedexKind::PermutationExistsE => "permutation(existsE)",
            RedexKind::SimplificationOrE => "simplification(orE)",
            RedexKind::SimplificationExistsE => "simplification(existsE)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Redex {
    pub path: Path,
    pub kind: RedexKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub redex: Redex,
    pub before_size: usize,
    pub after_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConversionTrace {
    pub steps: Vec<Step>,
    pub result: Derivation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("no redex of kind {kind} at {path:?}")]
    StaleRedex { path: Path, kind: RedexKind },
    #[error("fuel exhausted after {} conversion steps", .partial.steps.len())]
    FuelExhausted { partial: Box<ConversionTrace> },
    #[error("the node at {0:?} does not conclude a qualified identity")]
    NotIdentityConclusion(Path),
}

/// Fresh variable names and discharge labels for one rewriting session.
struct Supply {
    names: BTreeSet<String>,
    labels: BTreeSet<String>,
}

impl Supply {
    fn for_derivation(d: &Derivation) -> Self {
        Supply { names: d.names(), labels: d.labels() }
    }

    fn name(&mut self, base: &str) -> String {
        let base = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
        let n = fresh_name(if base.is_empty() { "y" } else { base }, &self.names);
        self.names.insert(n.clone());
        n
    }

    fn label(&mut self) -> String {
        let n = fresh_name("n", &self.labels);
        self.labels.insert(n.clone());
        n
    }
}

/// Redexes of `d` in leftmost-innermost order (post-order, left to right).
pub fn find_redexes(base: &SubatomicBase, d: &Derivation) -> Vec<Redex> {
    let mut out = Vec::new();
    fn go(base: &SubatomicBase, d: &Derivation, path: &mut Path, out: &mut Vec<Redex>) {
        for (i, p) in d.premises().iter().enumerate() {
            path.push(i);
            go(base, p, path, out);
            path.pop();
        }
        if let Some(kind) = redex_kind(base, d) {
            out.push(Redex { path: path.clone(), kind });
        }
    }
    go(base, d, &mut Vec::new(), &mut out);
    out
}

pub fn is_normal(base: &SubatomicBase, d: &Derivation) -> bool {
    find_redexes(base, d).is_empty()
}

/// Number of assumption leaves labelled `label` that are free in `d`.
fn free_uses(d: &Derivation, label: &str) -> usize {
    match d {
        Derivation::Assume { label: Some(l), .. } => usize::from(l == label),
        Derivation::Node { rule, premises, .. } => {
            let rebinds: BTreeSet<usize> =
                rule.bindings().into_iter().filter(|(_, l)| *l == label).map(|(i, _)| i).collect();
            premises.iter().enumerate().filter(|(i, _)| !rebinds.contains(i)).map(|(_, p)| free_uses(p, label)).sum()
        }
        _ => 0,
    }
}

fn open_formulas(d: &Derivation) -> Vec<Formula> {
    fn go(d: &Derivation, bound: &mut Vec<String>, out: &mut Vec<Formula>) {
        match d {
            Derivation::Assume { formula, label } => {
                if !label.as_ref().is_some_and(|l| bound.contains(l)) {
                    out.push(formula.clone());
                }
            }
            Derivation::TermLeaf { .. } => {}
            Derivation::Node { rule, premises, .. } => {
                let bindings = rule.bindings();
                for (i, p) in premises.iter().enumerate() {
                    let added: Vec<String> =
                        bindings.iter().filter(|(j, _)| *j == i).map(|(_, l)| (*l).clone()).collect();
                    let n = added.len();
                    bound.extend(added);
                    go(p, bound, out);
                    bound.truncate(bound.len() - n);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(d, &mut Vec::new(), &mut out);
    out
}

/// Open (undischarged) assumption formulas of `d`, in leaf order.
pub fn open_assumptions(d: &Derivation) -> Vec<Formula> {
    open_formulas(d)
}

fn term_leaf_symbols(d: &Derivation) -> BTreeSet<String> {
    d.nodes()
        .into_iter()
        .filter_map(|(_, n)| match n {
            Derivation::TermLeaf { symbol } => Some(symbol.clone()),
            _ => None,
        })
        .collect()
}

fn mentions(t: &Term, f: &Formula) -> bool {
    match t {
        Term::Var(v) => f.is_free(v),
        Term::Const(c) => f.contains_const(c),
    }
}

fn redex_kind(base: &SubatomicBase, d: &Derivation) -> Option<RedexKind> {
    let Derivation::Node { rule, conclusion, premises } = d else { return None };
    let major_ix = rule.major_premise()?;
    let major = &premises[major_ix];
    if let Some(k) = detour_kind(base, rule, premises) {
        return Some(k);
    }
    match major.rule() {
        Some(Rule::BotI) if matches!(conclusion, Unit::Formula(_)) => return Some(RedexKind::DetourAbsurdity),
        Some(Rule::OrE { .. }) => return Some(RedexKind::PermutationOrE),
        Some(Rule::ExistsE { eigen: Term::Const(o), .. }) => {
            let t = Term::Const(o.clone());
            let blocked = match conclusion {
                Unit::Formula(c) => mentions(&t, c),
                Unit::Term(s) => s == o,
            } || premises[1..].iter().any(|p| {
                open_formulas(p).iter().any(|f| mentions(&t, f)) || term_leaf_symbols(p).contains(o)
            });
            if !blocked {
                return Some(RedexKind::PermutationExistsE);
            }
        }
        Some(Rule::ExistsE { .. }) => return Some(RedexKind::PermutationExistsE),
        _ => {}
    }
    match rule {
        Rule::OrE { left, right } => {
            let vacuous = |l: &Option<String>, p: &Derivation| l.as_ref().is_none_or(|l| free_uses(p, l) == 0);
            if vacuous(left, &premises[1]) || vacuous(right, &premises[2]) {
                return Some(RedexKind::SimplificationOrE);
            }
        }
        Rule::ExistsE { label, .. } if label.as_ref().is_none_or(|l| free_uses(&premises[1], l) == 0) => {
            return Some(RedexKind::SimplificationExistsE);
        }
        _ => {}
    }
    None
}

fn detour_kind(base: &SubatomicBase, rule: &Rule, premises: &[Derivation]) -> Option<RedexKind> {
    let major = premises.first()?.rule()?;
    Some(match (rule, major) {
        (Rule::AndE1 | Rule::AndE2, Rule::AndI) => RedexKind::DetourAnd,
        (Rule::OrE { .. }, Rule::OrI1 | Rule::OrI2) => RedexKind::DetourOr,
        (Rule::ImpE, Rule::ImpI { .. }) => RedexKind::DetourImplies,
        (Rule::ForallE(_), Rule::ForallI(ForallVariant::Eigen(_))) => RedexKind::DetourForall,
        (Rule::ForallE(Term::Const(_)), Rule::ForallI(ForallVariant::EachConstant)) => RedexKind::DetourForall,
        (Rule::ExistsE { .. }, Rule::ExistsI(_)) => RedexKind::DetourExists,
        (Rule::AsE(_), Rule::AsI) | (Rule::NegAsE(_), Rule::NegAsI) => RedexKind::DetourAs,
        (Rule::QIdentE { .. }, Rule::QIdentI { .. }) => {
            identity_match(base, premises)?;
            RedexKind::DetourQIdent
        }
        (Rule::IotaE { .. }, Rule::IotaI(_)) => RedexKind::DetourIota,
        _ => return None,
    })
}

/// For `=I` followed by `=E`: the pair subderivation (premise index and
/// discharge label) whose assumption the minor premise instantiates, with the
/// companion values.
fn identity_match(base: &SubatomicBase, premises: &[Derivation]) -> Option<(usize, String, Vec<(Term, Term)>)> {
    let Derivation::Node { rule: Rule::QIdentI { sign, pairs }, conclusion, .. } = &premises[0] else {
        return None;
    };
    let Some(Formula::QIdent { left, right, .. }) = conclusion.formula() else { return None };
    let minor = premises.get(1)?.conclusion_formula()?;
    let target = minor.swap_terms(left, right);
    let (Formula::Atom(p, args) | Formula::NegPred(p, args)) = &minor else { return None };
    for (k, pair) in pairs.iter().enumerate() {
        if p.name != pair.pred {
            continue;
        }
        let Ok((f1, f2)) = pair_atoms(base, *sign, left, right, pair) else { continue };
        for (j, assumed, concluded) in [(0, &f1, &f2), (1, &f2, &f1)] {
            let (Formula::Atom(_, pat) | Formula::NegPred(_, pat)) = assumed else { continue };
            if pat.len() != args.len() {
                continue;
            }
            // Companion slots take the minor's arguments; the identity slot must agree.
            let mut binding: BTreeMap<&Term, &Term> = BTreeMap::new();
            let mut ok = true;
            for (i, (pat, val)) in pat.iter().zip(args).enumerate() {
                if i == pair.position - 1 {
                    ok &= pat == val;
                } else if let Some(prev) = binding.insert(pat, val) {
                    ok &= prev == val;
                }
            }
            if !ok {
                continue;
            }
            let inst: Vec<(Term, Term)> = binding.into_iter().map(|(a, b)| (a.clone(), b.clone())).collect();
            let apply = |f: &Formula| inst.iter().fold(f.clone(), |acc, (z, v)| acc.replace_term(z, v));
            if apply(assumed).alpha_eq(&minor) && apply(concluded).alpha_eq(&target) {
                return Some((2 * k + j, pair.labels[j].clone(), inst));
            }
        }
    }
    None
}

/// Rename every variable eigen-term bound inside `d` to a fresh name.
fn freshen_eigens(d: &Derivation, s: &mut Supply) -> Derivation {
    match d {
        Derivation::Node { rule, conclusion, premises } => {
            let mut premises: Vec<Derivation> = premises.clone();
            let rule = match rule {
                Rule::ForallI(ForallVariant::Eigen(Term::Var(y))) => {
                    let y2 = Term::Var(s.name(y));
                    premises[0] = premises[0].subst_var(y, &y2);
                    Rule::ForallI(ForallVariant::Eigen(y2))
                }
                Rule::ExistsE { eigen: Term::Var(y), label } => {
                    let y2 = Term::Var(s.name(y));
                    premises[1] = premises[1].subst_var(y, &y2);
                    Rule::ExistsE { eigen: y2, label: label.clone() }
                }
                Rule::QIdentI { sign, pairs } => {
                    let mut new_pairs = Vec::with_capacity(pairs.len());
                    for (k, pair) in pairs.iter().enumerate() {
                        let mut companions = Vec::with_capacity(pair.companions.len());
                        for z in &pair.companions {
                            match z {
                                Term::Var(y) => {
                                    let y2 = Term::Var(s.name(y));
                                    for j in [2 * k, 2 * k + 1] {
                                        premises[j] = premises[j].subst_var(y, &y2);
                                    }
                                    companions.push(y2);
                                }
                                c => companions.push(c.clone()),
                            }
                        }
                        new_pairs.push(PairSpec { companions, ..pair.clone() });
                    }
                    Rule::QIdentI { sign: *sign, pairs: new_pairs }
                }
                other => other.clone(),
            };
            let premises = premises.iter().map(|p| freshen_eigens(p, s)).collect();
            Derivation::Node { rule, conclusion: conclusion.clone(), premises }
        }
        other => other.clone(),
    }
}

/// Rename every binder label inside `d` to a fresh label.
fn freshen_labels(d: &Derivation, s: &mut Supply) -> Derivation {
    match d {
        Derivation::Node { rule, conclusion, premises } => {
            let mut rule = rule.clone();
            let mut premises = premises.clone();
            let renames: Vec<(usize, String, String)> =
                rule.bindings().into_iter().map(|(i, l)| (i, l.clone(), s.label())).collect();
            for (i, old, new) in &renames {
                premises[*i] = rename_label(&premises[*i], old, new);
            }
            set_labels(&mut rule, &renames);
            let premises = premises.iter().map(|p| freshen_labels(p, s)).collect();
            Derivation::Node { rule, conclusion: conclusion.clone(), premises }
        }
        other => other.clone(),
    }
}

fn set_labels(rule: &mut Rule, renames: &[(usize, String, String)]) {
    let mut it = renames.iter().map(|(_, _, n)| n.clone());
    match rule {
        Rule::ImpI { label: Some(l) } | Rule::ExistsE { label: Some(l), .. } => *l = it.next().unwrap(),
        Rule::OrE { left, right } => {
            if let Some(l) = left {
                *l = it.next().unwrap();
            }
            if let Some(r) = right {
                *r = it.next().unwrap();
            }
        }
        Rule::QIdentI { pairs, .. } => {
            for p in pairs {
                p.labels = [it.next().unwrap(), it.next().unwrap()];
            }
        }
        _ => {}
    }
}

/// Rename the free leaves labelled `old` to `new`.
fn rename_label(d: &Derivation, old: &str, new: &str) -> Derivation {
    match d {
        Derivation::Assume { formula, label: Some(l) } if l == old => {
            Derivation::Assume { formula: formula.clone(), label: Some(new.to_string()) }
        }
        Derivation::Node { rule, conclusion, premises } => {
            let rebinds: BTreeSet<usize> =
                rule.bindings().into_iter().filter(|(_, l)| *l == old).map(|(i, _)| i).collect();
            Derivation::Node {
                rule: rule.clone(),
                conclusion: conclusion.clone(),
                premises: premises
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if rebinds.contains(&i) { p.clone() } else { rename_label(p, old, new) })
                    .collect(),
            }
        }
        other => other.clone(),
    }
}

/// Plug `by` (with fresh internal labels) for the free leaves labelled `label`
/// in `into` (with fresh internal labels and eigenvariables).
fn plug_fresh(into: &Derivation, label: &Option<String>, by: &Derivation, s: &mut Supply) -> Derivation {
    let into = freshen_labels(&freshen_eigens(into, s), s);
    match label {
        Some(l) => {
            let by = freshen_labels(by, s);
            into.plug(l, &by)
        }
        None => into,
    }
}

fn with_major(rule: &Rule, conclusion: &Unit, premises: &[Derivation], major: Derivation) -> Derivation {
    let mut ps = premises.to_vec();
    ps[0] = major;
    Derivation::Node { rule: rule.clone(), conclusion: conclusion.clone(), premises: ps }
}

fn convert(base: &SubatomicBase, d: &Derivation, kind: RedexKind, s: &mut Supply) -> Option<Derivation> {
    let Derivation::Node { rule, conclusion, premises } = d else { return None };
    if matches!(kind, RedexKind::SimplificationOrE | RedexKind::SimplificationExistsE) {
        return simplify(d);
    }
    let Derivation::Node { rule: mrule, premises: mp, .. } = &premises[0] else { return None };
    Some(match kind {
        RedexKind::DetourAnd => mp[if *rule == Rule::AndE1 { 0 } else { 1 }].clone(),
        RedexKind::DetourOr => {
            let Rule::OrE { left, right } = rule else { return None };
            match mrule {
                Rule::OrI1 => plug_fresh(&premises[1], left, &mp[0], s),
                _ => plug_fresh(&premises[2], right, &mp[0], s),
            }
        }
        RedexKind::DetourImplies => {
            let Rule::ImpI { label } = mrule else { return None };
            plug_fresh(&mp[0], label, &premises[1], s)
        }
        RedexKind::DetourForall => {
            let Rule::ForallE(t) = rule else { return None };
            match mrule {
                Rule::ForallI(ForallVariant::Eigen(Term::Var(y))) => {
                    let body = freshen_labels(&freshen_eigens(&mp[0], s), s);
                    body.subst_var(y, t)
                }
                Rule::ForallI(ForallVariant::Eigen(Term::Const(o))) => {
                    let body = freshen_labels(&freshen_eigens(&mp[0], s), s);
                    body.replace_const(o, t)
                }
                Rule::ForallI(ForallVariant::EachConstant) => {
                    let ix = base.signature().position_of_constant(t.name())?;
                    mp.get(ix)?.clone()
                }
                _ => return None,
            }
        }
        RedexKind::DetourExists => {
            let (Rule::ExistsE { eigen, label }, Rule::ExistsI(t)) = (rule, mrule) else { return None };
            let minor = freshen_labels(&freshen_eigens(&premises[1], s), s);
            let minor = match eigen {
                Term::Var(y) => minor.subst_var(y, t),
                Term::Const(o) => minor.replace_const(o, t),
            };
            match label {
                Some(l) => minor.plug(l, &freshen_labels(&mp[0], s)),
                None => minor,
            }
        }
        RedexKind::DetourAs => {
            let (Rule::AsE(i) | Rule::NegAsE(i)) = rule else { return None };
            mp.get(*i)?.clone()
        }
        RedexKind::DetourQIdent => {
            let (j, label, inst) = identity_match(base, premises)?;
            let mut body = freshen_labels(&freshen_eigens(&mp[j], s), s);
            for (z, v) in &inst {
                body = match z {
                    Term::Var(n) => body.subst_var(n, v),
                    Term::Const(c) => body.replace_const(c, v),
                };
            }
            body.plug(&label, &freshen_labels(&premises[1], s))
        }
        RedexKind::DetourIota => {
            let Rule::IotaE { which, .. } = rule else { return None };
            mp.get(usize::from(*which) - 1)?.clone()
        }
        RedexKind::DetourAbsurdity => Derivation::Node {
            rule: Rule::BotI,
            conclusion: conclusion.clone(),
            premises: vec![mp[0].clone()],
        },
        RedexKind::PermutationOrE => {
            let Rule::OrE { left, right } = mrule else { return None };
            let mut branch = |b: &Derivation, l: &Option<String>| {
                let (b, l2) = match l {
                    Some(l) => {
                        let n = s.label();
                        (rename_label(b, l, &n), Some(n))
                    }
                    None => (b.clone(), None),
                };
                (with_major(rule, conclusion, premises, b), l2)
            };
            let (b1, l1) = branch(&mp[1], left);
            let (b2, l2) = branch(&mp[2], right);
            Derivation::Node {
                rule: Rule::OrE { left: l1, right: l2 },
                conclusion: conclusion.clone(),
                premises: vec![mp[0].clone(), b1, b2],
            }
        }
        RedexKind::PermutationExistsE => {
            let Rule::ExistsE { eigen, label } = mrule else { return None };
            let (minor, eigen) = match eigen {
                Term::Var(y) => {
                    let y2 = Term::Var(s.name(y));
                    (mp[1].subst_var(y, &y2), y2)
                }
                c => (mp[1].clone(), c.clone()),
            };
            let (minor, label) = match label {
                Some(l) => {
                    let n = s.label();
                    (rename_label(&minor, l, &n), Some(n))
                }
                None => (minor, None),
            };
            Derivation::Node {
                rule: Rule::ExistsE { eigen, label },
                conclusion: conclusion.clone(),
                premises: vec![mp[0].clone(), with_major(rule, conclusion, premises, minor)],
            }
        }
        RedexKind::SimplificationOrE | RedexKind::SimplificationExistsE => unreachable!(),
    })
}

fn simplify(d: &Derivation) -> Option<Derivation> {
    let Derivation::Node { rule, premises, .. } = d else { return None };
    match rule {
        Rule::OrE { left, right } => {
            if left.as_ref().is_none_or(|l| free_uses(&premises[1], l) == 0) {
                Some(premises[1].clone())
            } else if right.as_ref().is_none_or(|l| free_uses(&premises[2], l) == 0) {
                Some(premises[2].clone())
            } else {
                None
            }
        }
        Rule::ExistsE { label, .. } => {
            label.as_ref().is_none_or(|l| free_uses(&premises[1], l) == 0).then(|| premises[1].clone())
        }
        _ => None,
    }
}

/// Rewrite the redex `r` of `d`.
pub fn apply_conversion(base: &SubatomicBase, d: &Derivation, r: &Redex) -> Result<Derivation, NormalizeError> {
    let stale = || NormalizeError::StaleRedex { path: r.path.clone(), kind: r.kind };
    let node = d.at(&r.path).ok_or_else(stale)?;
    if redex_kind(base, node) != Some(r.kind) {
        return Err(stale());
    }
    let mut supply = Supply::for_derivation(d);
    let replacement = convert(base, node, r.kind, &mut supply).ok_or_else(stale)?;
    let mut out = d.clone();
    *out.at_mut(&r.path).expect("path checked") = replacement;
    Ok(out)
}

/// Normalize by repeatedly converting the leftmost-innermost redex.
pub fn normalize(base: &SubatomicBase, d: &Derivation, fuel: usize) -> Result<ConversionTrace, NormalizeError> {
    let mut current = d.clone();
    let mut steps = Vec::new();
    loop {
        let Some(redex) = find_redexes(base, &current).into_iter().next() else {
            return Ok(ConversionTrace { steps, result: current });
        };
        if steps.len() >= fuel {
            return Err(NormalizeError::FuelExhausted { partial: Box::new(ConversionTrace { steps, result: current }) });
        }
        let next = apply_conversion(base, &current, &redex)?;
        steps.push(Step { redex, before_size: current.size(), after_size: next.size() });
        current = next;
    }
}

/// Rederive the identity concluded at `path` by `=I` over `=E` steps on the
/// original subderivation.
pub fn expand_identity(base: &SubatomicBase, d: &Derivation, path: &[usize]) -> Result<Derivation, NormalizeError> {
    let not_ident = || NormalizeError::NotIdentityConclusion(path.to_vec());
    let node = d.at(path).ok_or_else(not_ident)?;
    let Some(Formula::QIdent { sign, left, right, q }) = node.conclusion_formula() else {
        return Err(not_ident());
    };
    let required = required_pairs(base, &q).map_err(|_| not_ident())?;
    let mut supply = Supply::for_derivation(d);
    let mut specs = Vec::new();
    let mut premises = Vec::new();
    for (pred, position) in required {
        let arity = base.signature().predicate(&pred).map_or(1, |p| p.arity);
        let companions: Vec<Term> = (1..arity).map(|_| Term::Var(supply.name("z"))).collect();
        let spec = PairSpec { pred, position, companions, labels: [supply.label(), supply.label()] };
        let (f1, f2) = pair_atoms(base, sign, &left, &right, &spec).map_err(|_| not_ident())?;
        for (side, assumed, concluded, label) in
            [(Side::First, &f1, &f2, &spec.labels[0]), (Side::Second, &f2, &f1, &spec.labels[1])]
        {
            premises.push(Derivation::node(
                Rule::QIdentE { sign, side },
                concluded.clone(),
                vec![freshen_labels(node, &mut supply), Derivation::hyp(assumed.clone(), label.clone())],
            ));
        }
        specs.push(spec);
    }
    let expanded = Derivation::node(Rule::QIdentI { sign, pairs: specs }, Formula::qident(sign, left, right, q), premises);
    let mut out = d.clone();
    *out.at_mut(path).expect("path checked") = expanded;
    Ok(out)
}
