//! Subatomic bases `⟨C, P, v⟩` and their term-assumption sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parse::{parse_formula, ParseError};
use crate::syntax::{Formula, Pred, QSet, Term};

/// The non-logical vocabulary: constants `C` and predicates `P`, both in
/// declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    constants: Vec<String>,
    predicates: Vec<Pred>,
}

impl Signature {
    pub fn new(constants: Vec<String>, predicates: Vec<Pred>) -> Self {
        Signature { constants, predicates }
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn predicates(&self) -> &[Pred] {
        &self.predicates
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&Pred> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        if self.is_constant(name) {
            Some(Symbol::Const(name.to_string()))
        } else {
            self.predicate(name).map(|p| Symbol::Pred(p.name.clone()))
        }
    }

    /// The full predicate set `P` as a [`QSet`].
    pub fn all_predicates(&self) -> QSet {
        QSet::new(self.predicates.iter().cloned())
    }

    /// Members of `q` in declaration order.
    pub fn canonical_order<'a>(&'a self, q: &'a QSet) -> Vec<&'a Pred> {
        let mut out: Vec<&Pred> = self.predicates.iter().filter(|p| q.contains(p)).collect();
        // members unknown to the base go last, in name order
        out.extend(q.iter().filter(|p| !self.predicates.contains(p)));
        out
    }

    pub fn position_of_constant(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }
}

/// A non-logical constant `τ ∈ C ∪ P`, the index of a term-assumption set `τΓ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Const(String),
    Pred(String),
}

impl Symbol {
    pub fn name(&self) -> &str {
        match self {
            Symbol::Const(n) | Symbol::Pred(n) => n,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("atom `{0}` is not ground")]
    NonGroundAtom(String),
    #[error("`{0}` is not an atomic predication")]
    NotAnAtom(String),
}

/// A ground atom `φ α1 ... αn` as stored in a valuation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn from_formula(f: &Formula) -> Result<Self, BaseError> {
        match f {
            Formula::Atom(p, args) | Formula::NegPred(p, args) => {
                let mut out = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        Term::Const(c) => out.push(c.clone()),
                        Term::Var(_) => return Err(BaseError::NonGroundAtom(f.to_string())),
                    }
                }
                Ok(GroundAtom { pred: p.name.clone(), args: out })
            }
            other => Err(BaseError::NotAnAtom(other.to_string())),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.args.join(", "))
    }
}

/// A subatomic base: signature plus valuation `v : C ∪ P → ℘(Atm)`.
///
/// The valuation is total: symbols without listed atoms get the empty set.
/// Atoms may deliberately appear in a predicate's set but not in one of its
/// constants' sets; containment then fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubatomicBase {
    signature: Signature,
    valuation: BTreeMap<Symbol, BTreeSet<GroundAtom>>,
}

/// One invariant violation found by [`SubatomicBase::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub symbol: String,
    pub atom: Option<String>,
    pub message: String,
}

impl SubatomicBase {
    pub fn new(signature: Signature) -> Self {
        SubatomicBase { signature, valuation: BTreeMap::new() }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn constants(&self) -> &[String] {
        self.signature.constants()
    }

    /// Add `atom` to `v(symbol)`. No checks; see [`validate`](Self::validate).
    pub fn assign(&mut self, symbol: Symbol, atom: GroundAtom) {
        self.valuation.entry(symbol).or_default().insert(atom);
    }

    /// Add `atom` to the sets of its predicate and of each of its constants.
    pub fn assign_everywhere(&mut self, atom: GroundAtom) {
        self.assign(Symbol::Pred(atom.pred.clone()), atom.clone());
        for c in atom.args.clone() {
            self.assign(Symbol::Const(c), atom.clone());
        }
    }

    fn known(&self, s: &Symbol) -> bool {
        match s {
            Symbol::Const(c) => self.signature.is_constant(c),
            Symbol::Pred(p) => self.signature.predicate(p).is_some(),
        }
    }

    /// `τΓ = v(τ)`.
    pub fn term_assumptions(&self, s: &Symbol) -> Result<BTreeSet<GroundAtom>, BaseError> {
        if !self.known(s) {
            return Err(BaseError::UnknownSymbol(s.name().to_string()));
        }
        Ok(self.valuation.get(s).cloned().unwrap_or_default())
    }

    fn in_set(&self, s: Symbol, atom: &GroundAtom) -> bool {
        self.valuation.get(&s).is_some_and(|set| set.contains(atom))
    }

    fn check_symbols(&self, atom: &GroundAtom) -> Result<(), BaseError> {
        let p = self
            .signature
            .predicate(&atom.pred)
            .ok_or_else(|| BaseError::UnknownSymbol(atom.pred.clone()))?;
        if p.arity != atom.args.len() {
            return Err(BaseError::NotAnAtom(atom.to_string()));
        }
        for c in &atom.args {
            if !self.signature.is_constant(c) {
                return Err(BaseError::UnknownSymbol(c.clone()));
            }
        }
        Ok(())
    }

    /// `φ α1...αn ∈ φΓ ∩ α1Γ ∩ ... ∩ αnΓ`.
    pub fn positively_contained(&self, atom: &GroundAtom) -> Result<bool, BaseError> {
        self.check_symbols(atom)?;
        Ok(self.in_set(Symbol::Pred(atom.pred.clone()), atom)
            && atom.args.iter().all(|c| self.in_set(Symbol::Const(c.clone()), atom)))
    }

    /// Side condition of `-asI`: the atom lies outside the intersection.
    pub fn negatively_contained(&self, atom: &GroundAtom) -> Result<bool, BaseError> {
        self.positively_contained(atom).map(|b| !b)
    }

    pub fn positively_contained_formula(&self, f: &Formula) -> Result<bool, BaseError> {
        self.positively_contained(&GroundAtom::from_formula(f)?)
    }

    /// Check every invariant of a base. Empty result iff well-formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let sig = &self.signature;
        let diag = |symbol: &str, atom: Option<&GroundAtom>, message: String| Diagnostic {
            symbol: symbol.to_string(),
            atom: atom.map(|a| a.to_string()),
            message,
        };
        if sig.constants.is_empty() {
            out.push(diag("C", None, "the set of constants must be nonempty".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &sig.constants {
            if !seen.insert(c.clone()) {
                out.push(diag(c, None, format!("constant `{c}` declared twice")));
            }
        }
        for p in &sig.predicates {
            if !seen.insert(p.name.clone()) {
                out.push(diag(&p.name, None, format!("name `{}` declared twice", p.name)));
            }
            if p.arity == 0 {
                out.push(diag(&p.name, None, format!("predicate `{}` has arity 0", p.name)));
            }
        }
        for (sym, atoms) in &self.valuation {
            if !self.known(sym) {
                out.push(diag(sym.name(), None, format!("valuation for undeclared symbol `{sym}`")));
                continue;
            }
            for atom in atoms {
                match sig.predicate(&atom.pred) {
                    None => out.push(diag(
                        sym.name(),
                        Some(atom),
                        format!("atom uses undeclared predicate `{}`", atom.pred),
                    )),
                    Some(p) if p.arity != atom.args.len() => out.push(diag(
                        sym.name(),
                        Some(atom),
                        format!("arity mismatch: `{}` takes {} arguments", p.name, p.arity),
                    )),
                    Some(_) => {}
                }
                for c in &atom.args {
                    if !sig.is_constant(c) {
                        out.push(diag(sym.name(), Some(atom), format!("atom uses undeclared constant `{c}`")));
                    }
                }
                match sym {
                    Symbol::Const(c) if !atom.args.contains(c) => out.push(diag(
                        c,
                        Some(atom),
                        format!("v({c}) must only contain atoms in Atm({c}), i.e. atoms containing `{c}`"),
                    )),
                    Symbol::Pred(p) if &atom.pred != p => out.push(diag(
                        p,
                        Some(atom),
                        format!("v({p}) must only contain atoms in Atm({p})"),
                    )),
                    _ => {}
                }
            }
        }
        out
    }

    pub fn from_file(file: &BaseFile) -> Result<Self, BaseLoadError> {
        if file.version != 1 {
            return Err(BaseLoadError::Version(file.version));
        }
        let predicates = file.predicates.iter().map(|p| Pred::new(&p.name, p.arity)).collect();
        let sig = Signature::new(file.constants.clone(), predicates);
        let mut base = SubatomicBase::new(sig);
        for (i, entry) in file.valuation.iter().enumerate() {
            let symbol = base
                .signature
                .symbol(&entry.symbol)
                .ok_or_else(|| BaseLoadError::Entry(i, format!("unknown symbol `{}`", entry.symbol)))?;
            let f = parse_formula(&entry.atom, &base.signature)
                .map_err(|e| BaseLoadError::Atom(i, e))?;
            if !matches!(f, Formula::Atom(..)) {
                return Err(BaseLoadError::Entry(i, format!("`{}` is not an atom", entry.atom)));
            }
            let atom = GroundAtom::from_formula(&f).map_err(|e| BaseLoadError::Entry(i, e.to_string()))?;
            base.assign(symbol, atom);
        }
        let diags = base.validate();
        if !diags.is_empty() {
            return Err(BaseLoadError::Invalid(diags));
        }
        Ok(base)
    }

    pub fn to_file(&self, description: Option<String>) -> BaseFile {
        let mut valuation = Vec::new();
        let order = self
            .signature
            .predicates
            .iter()
            .map(|p| Symbol::Pred(p.name.clone()))
            .chain(self.signature.constants.iter().map(|c| Symbol::Const(c.clone())));
        for sym in order {
            for atom in self.valuation.get(&sym).into_iter().flatten() {
                valuation.push(ValuationEntry { symbol: sym.name().to_string(), atom: atom.to_string() });
            }
        }
        BaseFile {
            version: 1,
            description,
            constants: self.signature.constants.clone(),
            predicates: self
                .signature
                .predicates
                .iter()
                .map(|p| PredicateDecl { name: p.name.clone(), arity: p.arity })
                .collect(),
            valuation,
        }
    }
}

#[derive(Debug, Error)]
pub enum BaseLoadError {
    #[error("unsupported base file version {0}")]
    Version(u32),
    #[error("valuation[{0}]: {1}")]
    Entry(usize, String),
    #[error("valuation[{0}]: {1}")]
    Atom(usize, ParseError),
    #[error("invalid base: {}", .0.iter().map(|d| d.message.clone()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

/// On-disk base format (JSON).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub constants: Vec<String>,
    pub predicates: Vec<PredicateDecl>,
    #[serde(default)]
    pub valuation: Vec<ValuationEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationEntry {
    pub symbol: String,
    pub atom: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ga(p: &str, args: &[&str]) -> GroundAtom {
        GroundAtom { pred: p.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    /// Francis is pope and bald; Benedict is bald, but `Bald(benedict)` is
    /// left out of benedict's own set.
    fn schism() -> SubatomicBase {
        let sig = Signature::new(
            vec!["francis".into(), "benedict".into()],
            vec![Pred::new("Pope", 1), Pred::new("Bald", 1)],
        );
        let mut b = SubatomicBase::new(sig);
        b.assign_everywhere(ga("Pope", &["francis"]));
        b.assign_everywhere(ga("Bald", &["francis"]));
        b.assign(Symbol::Pred("Bald".into()), ga("Bald", &["benedict"]));
        b
    }

    #[test]
    fn term_assumptions_lookup() {
        let b = schism();
        let pope = b.term_assumptions(&Symbol::Pred("Pope".into())).unwrap();
        assert_eq!(pope, [ga("Pope", &["francis"])].into());
        assert_eq!(
            b.term_assumptions(&Symbol::Const("nobody".into())),
            Err(BaseError::UnknownSymbol("nobody".into()))
        );
        assert!(b.term_assumptions(&Symbol::Const("benedict".into())).unwrap().is_empty());
    }

    #[test]
    fn containment() {
        let b = schism();
        assert!(b.positively_contained(&ga("Pope", &["francis"])).unwrap());
        // in v(Bald) but not in v(benedict)
        assert!(!b.positively_contained(&ga("Bald", &["benedict"])).unwrap());
        assert!(b.negatively_contained(&ga("Bald", &["benedict"])).unwrap());
        assert!(!b.positively_contained(&ga("Pope", &["benedict"])).unwrap());
        assert!(!b.negatively_contained(&ga("Pope", &["francis"])).unwrap());
        assert!(matches!(
            b.positively_contained(&ga("Pope", &["x"])),
            Err(BaseError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn validation_diagnostics() {
        let b = schism();
        assert!(b.validate().is_empty());
        let mut bad = b.clone();
        bad.assign(Symbol::Const("benedict".into()), ga("Pope", &["francis"]));
        let d = bad.validate();
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("Atm(benedict)"));
        let mut bad = b.clone();
        bad.assign(Symbol::Pred("Pope".into()), ga("Pope", &["francis", "benedict"]));
        assert_eq!(bad.validate().len(), 1);
        // idempotent
        assert_eq!(bad.validate(), bad.validate());
    }

    #[test]
    fn file_round_trip() {
        let b = schism();
        let file = b.to_file(None);
        let back = SubatomicBase::from_file(&file).unwrap();
        assert_eq!(back, b);
    }
}
