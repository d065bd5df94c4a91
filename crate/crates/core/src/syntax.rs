//! Abstract syntax of the bipredicational language with qualified
//! definiteness: nominal terms, predications and predication failures,
//! connectives, quantifiers, qualified identity and definite descriptions.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A nominal term. Constants and variables live in disjoint namespaces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Const(n) | Term::Var(n) => n,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An n-ary predicate constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pred {
    pub name: String,
    pub arity: usize,
}

impl Pred {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Pred { name: name.into(), arity }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The set of respects `Q` of a qualified identity or description.
///
/// Stored sorted by name; the order in which identity-introduction premises
/// are supplied is taken from the base instead (see `Signature::canonical_order`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QSet(BTreeSet<Pred>);

impl QSet {
    pub fn new(preds: impl IntoIterator<Item = Pred>) -> Self {
        QSet(preds.into_iter().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pred> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &Pred) -> bool {
        self.0.contains(p)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.0.iter().any(|p| p.name == name)
    }
}

impl fmt::Display for QSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&p.name)?;
        }
        f.write_str("]")
    }
}

/// Polarity: predication vs. predication failure, `=+` vs. `=-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Pos => "pos",
            Sign::Neg => "neg",
        }
    }
}

/// A definite description `iota[Q] x. body`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Description {
    pub q: QSet,
    pub var: String,
    pub body: Formula,
}

impl Description {
    /// Polarity of the description's matrix: negative iff it is a predication failure.
    pub fn inner_sign(&self) -> Sign {
        match self.body {
            Formula::NegPred(..) => Sign::Neg,
            _ => Sign::Pos,
        }
    }

    /// `φ(t)`: the body with the bound variable replaced by `t`.
    pub fn instance(&self, t: &Term) -> Formula {
        self.body.subst_avoiding(&self.var, t)
    }

    /// Predicate of the body when the body is a single (negative) predication.
    pub fn atomic_pred(&self) -> Option<&Pred> {
        match &self.body {
            Formula::Atom(p, _) | Formula::NegPred(p, _) => Some(p),
            _ => None,
        }
    }
}

/// An argument of a predication that contains descriptions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arg {
    Term(Term),
    Desc(Box<Description>),
}

/// `ψ(ι_Q x φ(x))` or `-ψ(ι_Q x φ(x))`: a (negative) predication at least one of
/// whose arguments is a description.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IotaPred {
    /// Outer polarity: `Neg` for `-ψ(...)`.
    pub sign: Sign,
    pub pred: Pred,
    pub args: Vec<Arg>,
}

/// The shape the proof rules for descriptions act on: one description (possibly
/// filling several argument places) with an atomic matrix, all other arguments terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleIota<'a> {
    pub iota: &'a IotaPred,
    pub desc: &'a Description,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Pred, Vec<Term>),
    NegPred(Pred, Vec<Term>),
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    QIdent {
        sign: Sign,
        left: Term,
        right: Term,
        q: QSet,
    },
    Iota(IotaPred),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("substituting {term} for {var} would capture it under a binder")]
pub struct CaptureError {
    pub var: String,
    pub term: Term,
}

impl Formula {
    pub fn atom(p: &Pred, args: Vec<Term>) -> Self {
        Formula::Atom(p.clone(), args)
    }

    pub fn neg_pred(p: &Pred, args: Vec<Term>) -> Self {
        Formula::NegPred(p.clone(), args)
    }

    /// Atom or predication failure depending on `sign`.
    pub fn predication(sign: Sign, p: &Pred, args: Vec<Term>) -> Self {
        match sign {
            Sign::Pos => Formula::Atom(p.clone(), args),
            Sign::Neg => Formula::NegPred(p.clone(), args),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `¬A`, i.e. `A ⊃ ⊥`.
    pub fn not(a: Formula) -> Self {
        Formula::implies(a, Formula::Bottom)
    }

    /// `A ↔ B`, i.e. `(A ⊃ B) & (B ⊃ A)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn forall(x: impl Into<String>, a: Formula) -> Self {
        Formula::Forall(x.into(), Box::new(a))
    }

    pub fn exists(x: impl Into<String>, a: Formula) -> Self {
        Formula::Exists(x.into(), Box::new(a))
    }

    pub fn qident(sign: Sign, left: Term, right: Term, q: QSet) -> Self {
        Formula::QIdent { sign, left, right, q }
    }

    /// Right-associated conjunction of a nonempty list.
    pub fn conj(mut parts: Vec<Formula>) -> Option<Self> {
        let mut acc = parts.pop()?;
        while let Some(p) = parts.pop() {
            acc = Formula::and(p, acc);
        }
        Some(acc)
    }

    pub fn is_atomic_predication(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::NegPred(..))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Atom(_, args) | Formula::NegPred(_, args) => {
                for a in args {
                    term(a, bound, out);
                }
            }
            Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free_vars(bound, out);
                b.collect_free_vars(bound, out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free_vars(bound, out);
                bound.pop();
            }
            Formula::QIdent { left, right, .. } => {
                term(left, bound, out);
                term(right, bound, out);
            }
            Formula::Iota(ip) => {
                for arg in &ip.args {
                    match arg {
                        Arg::Term(t) => term(t, bound, out),
                        Arg::Desc(d) => {
                            bound.push(d.var.clone());
                            d.body.collect_free_vars(bound, out);
                            bound.pop();
                        }
                    }
                }
            }
        }
    }

    pub fn is_free(&self, v: &str) -> bool {
        self.free_vars().contains(v)
    }

    /// Every name (constant, free or bound variable) appearing anywhere.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_names(&mut |n| {
            out.insert(n.to_string());
        });
        out
    }

    fn visit_names(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Atom(_, args) | Formula::NegPred(_, args) => args.iter().for_each(|t| f(t.name())),
            Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_names(f);
                b.visit_names(f);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                f(x);
                a.visit_names(f);
            }
            Formula::QIdent { left, right, .. } => {
                f(left.name());
                f(right.name());
            }
            Formula::Iota(ip) => {
                for arg in &ip.args {
                    match arg {
                        Arg::Term(t) => f(t.name()),
                        Arg::Desc(d) => {
                            f(&d.var);
                            d.body.visit_names(f);
                        }
                    }
                }
            }
        }
    }

    /// Constants and free variables occurring in the formula.
    pub fn free_terms(&self) -> BTreeSet<Term> {
        let mut out: BTreeSet<Term> = self.free_vars().into_iter().map(Term::Var).collect();
        self.visit_terms(&mut |t| {
            if t.is_const() {
                out.insert(t.clone());
            }
        });
        out
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom(_, args) | Formula::NegPred(_, args) => args.iter().for_each(&mut *f),
            Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_terms(f),
            Formula::QIdent { left, right, .. } => {
                f(left);
                f(right);
            }
            Formula::Iota(ip) => {
                for arg in &ip.args {
                    match arg {
                        Arg::Term(t) => f(t),
                        Arg::Desc(d) => d.body.visit_terms(f),
                    }
                }
            }
        }
    }

    pub fn contains_const(&self, c: &str) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| {
            if let Term::Const(n) = t {
                found |= n == c;
            }
        });
        found
    }

    pub fn contains_iota(&self) -> bool {
        match self {
            Formula::Iota(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.contains_iota() || b.contains_iota()
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.contains_iota(),
            _ => false,
        }
    }

    /// Capture-checked substitution `A(x/t)`. Fails if `t` is a variable that
    /// would become bound.
    pub fn subst(&self, var: &str, t: &Term) -> Result<Formula, CaptureError> {
        let err = || CaptureError { var: var.to_string(), term: t.clone() };
        let st = |s: &Term| match s {
            Term::Var(v) if v == var => t.clone(),
            other => other.clone(),
        };
        Ok(match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(st).collect()),
            Formula::NegPred(p, args) => Formula::NegPred(p.clone(), args.iter().map(st).collect()),
            Formula::Bottom => Formula::Bottom,
            Formula::And(a, b) => Formula::and(a.subst(var, t)?, b.subst(var, t)?),
            Formula::Or(a, b) => Formula::or(a.subst(var, t)?, b.subst(var, t)?),
            Formula::Implies(a, b) => Formula::implies(a.subst(var, t)?, b.subst(var, t)?),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let body = if x == var {
                    (**a).clone()
                } else {
                    if t.as_var() == Some(x.as_str()) && a.is_free(var) {
                        return Err(err());
                    }
                    a.subst(var, t)?
                };
                rebind(self, x.clone(), body)
            }
            Formula::QIdent { sign, left, right, q } => Formula::QIdent {
                sign: *sign,
                left: st(left),
                right: st(right),
                q: q.clone(),
            },
            Formula::Iota(ip) => {
                let mut args = Vec::with_capacity(ip.args.len());
                for arg in &ip.args {
                    args.push(match arg {
                        Arg::Term(s) => Arg::Term(st(s)),
                        Arg::Desc(d) => {
                            if d.var == var {
                                arg.clone()
                            } else {
                                if t.as_var() == Some(d.var.as_str()) && d.body.is_free(var) {
                                    return Err(err());
                                }
                                Arg::Desc(Box::new(Description {
                                    q: d.q.clone(),
                                    var: d.var.clone(),
                                    body: d.body.subst(var, t)?,
                                }))
                            }
                        }
                    });
                }
                Formula::Iota(IotaPred { sign: ip.sign, pred: ip.pred.clone(), args })
            }
        })
    }

    /// Substitution that renames binders instead of failing on capture.
    pub fn subst_avoiding(&self, var: &str, t: &Term) -> Formula {
        self.replace_term(&Term::Var(var.to_string()), t)
    }

    /// Replace every free occurrence of `from` (a constant, or a free variable)
    /// by `to`, renaming binders that would capture `to`.
    pub fn replace_term(&self, from: &Term, to: &Term) -> Formula {
        let rt = |s: &Term| if s == from { to.clone() } else { s.clone() };
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(rt).collect()),
            Formula::NegPred(p, args) => Formula::NegPred(p.clone(), args.iter().map(rt).collect()),
            Formula::Bottom => Formula::Bottom,
            Formula::And(a, b) => Formula::and(a.replace_term(from, to), b.replace_term(from, to)),
            Formula::Or(a, b) => Formula::or(a.replace_term(from, to), b.replace_term(from, to)),
            Formula::Implies(a, b) => {
                Formula::implies(a.replace_term(from, to), b.replace_term(from, to))
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                if from.as_var() == Some(x.as_str()) {
                    return self.clone();
                }
                let (x2, body) = avoid_capture(x, a, from, to);
                rebind(self, x2, body.replace_term(from, to))
            }
            Formula::QIdent { sign, left, right, q } => Formula::QIdent {
                sign: *sign,
                left: rt(left),
                right: rt(right),
                q: q.clone(),
            },
            Formula::Iota(ip) => Formula::Iota(IotaPred {
                sign: ip.sign,
                pred: ip.pred.clone(),
                args: ip
                    .args
                    .iter()
                    .map(|arg| match arg {
                        Arg::Term(s) => Arg::Term(rt(s)),
                        Arg::Desc(d) => {
                            if from.as_var() == Some(d.var.as_str()) {
                                return arg.clone();
                            }
                            let (x2, body) = avoid_capture(&d.var, &d.body, from, to);
                            Arg::Desc(Box::new(Description {
                                q: d.q.clone(),
                                var: x2,
                                body: body.replace_term(from, to),
                            }))
                        }
                    })
                    .collect(),
            }),
        }
    }

    /// Simultaneously exchange two terms everywhere (free occurrences).
    pub fn swap_terms(&self, a: &Term, b: &Term) -> Formula {
        let tmp = Term::Var(fresh_name("%swap", &self.names()));
        self.replace_term(a, &tmp).replace_term(b, a).replace_term(&tmp, b)
    }

    /// Representative of the formula's alpha-equivalence class: bound variables
    /// are renamed by binding depth into a namespace the parser cannot produce.
    pub fn canonical(&self) -> Formula {
        self.canon(&mut Vec::new())
    }

    fn canon(&self, env: &mut Vec<(String, String)>) -> Formula {
        let ct = |t: &Term, env: &Vec<(String, String)>| match t {
            Term::Var(v) => match env.iter().rev().find(|(o, _)| o == v) {
                Some((_, n)) => Term::Var(n.clone()),
                None => t.clone(),
            },
            c => c.clone(),
        };
        match self {
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|t| ct(t, env)).collect())
            }
            Formula::NegPred(p, args) => {
                Formula::NegPred(p.clone(), args.iter().map(|t| ct(t, env)).collect())
            }
            Formula::Bottom => Formula::Bottom,
            Formula::And(a, b) => Formula::and(a.canon(env), b.canon(env)),
            Formula::Or(a, b) => Formula::or(a.canon(env), b.canon(env)),
            Formula::Implies(a, b) => Formula::implies(a.canon(env), b.canon(env)),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let n = format!("%{}", env.len());
                env.push((x.clone(), n.clone()));
                let body = a.canon(env);
                env.pop();
                rebind(self, n, body)
            }
            Formula::QIdent { sign, left, right, q } => Formula::QIdent {
                sign: *sign,
                left: ct(left, env),
                right: ct(right, env),
                q: q.clone(),
            },
            Formula::Iota(ip) => Formula::Iota(IotaPred {
                sign: ip.sign,
                pred: ip.pred.clone(),
                args: ip
                    .args
                    .iter()
                    .map(|arg| match arg {
                        Arg::Term(t) => Arg::Term(ct(t, env)),
                        Arg::Desc(d) => {
                            let n = format!("%{}", env.len());
                            env.push((d.var.clone(), n.clone()));
                            let body = d.body.canon(env);
                            env.pop();
                            Arg::Desc(Box::new(Description { q: d.q.clone(), var: n, body }))
                        }
                    })
                    .collect(),
            }),
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || self.canonical() == other.canonical()
    }

    /// Number of logical symbols; used by generators and for reporting.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::NegPred(..) | Formula::Bottom | Formula::QIdent { .. } => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::Iota(ip) => {
                1 + ip
                    .args
                    .iter()
                    .map(|a| match a {
                        Arg::Term(_) => 0,
                        Arg::Desc(d) => d.body.size(),
                    })
                    .sum::<usize>()
            }
        }
    }
}

fn rebind(shape: &Formula, x: String, body: Formula) -> Formula {
    match shape {
        Formula::Forall(..) => Formula::Forall(x, Box::new(body)),
        Formula::Exists(..) => Formula::Exists(x, Box::new(body)),
        _ => unreachable!("rebind on a non-binder"),
    }
}

fn avoid_capture(x: &str, body: &Formula, from: &Term, to: &Term) -> (String, Formula) {
    let captures = to.as_var() == Some(x) && occurs_free_term(body, from);
    if !captures {
        return (x.to_string(), body.clone());
    }
    let mut avoid = body.names();
    avoid.insert(to.name().to_string());
    avoid.insert(from.name().to_string());
    let x2 = fresh_name(x, &avoid);
    let renamed = body.replace_term(&Term::Var(x.to_string()), &Term::Var(x2.clone()));
    (x2, renamed)
}

fn occurs_free_term(f: &Formula, t: &Term) -> bool {
    match t {
        Term::Var(v) => f.is_free(v),
        Term::Const(c) => f.contains_const(c),
    }
}

/// `base` if unused, otherwise `base1`, `base2`, ...
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of names")
}

/// Mirror test: `a1` and `a2` are predications of the same predicate and
/// polarity that differ exactly by exchanging `t1` and `t2`.
pub fn mirror(a1: &Formula, a2: &Formula, t1: &Term, t2: &Term) -> bool {
    let swap = |t: &Term| {
        if t == t1 {
            t2.clone()
        } else if t == t2 {
            t1.clone()
        } else {
            t.clone()
        }
    };
    match (a1, a2) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys))
        | (Formula::NegPred(p, xs), Formula::NegPred(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().map(swap).eq(ys.iter().cloned())
        }
        _ => false,
    }
}

impl IotaPred {
    /// First description argument, scanning left to right.
    pub fn first_desc(&self) -> Option<&Description> {
        self.args.iter().find_map(|a| match a {
            Arg::Desc(d) => Some(&**d),
            Arg::Term(_) => None,
        })
    }

    /// `ψ(t)`: the context obtained by filling every place occupied by `desc`
    /// with `t`. Collapses to a plain (negative) predication when no other
    /// description remains.
    pub fn fill(&self, desc: &Description, t: &Term) -> Formula {
        let args: Vec<Arg> = self
            .args
            .iter()
            .map(|a| match a {
                Arg::Desc(d) if **d == *desc => Arg::Term(t.clone()),
                other => other.clone(),
            })
            .collect();
        if args.iter().all(|a| matches!(a, Arg::Term(_))) {
            let terms = args
                .into_iter()
                .map(|a| match a {
                    Arg::Term(t) => t,
                    Arg::Desc(_) => unreachable!(),
                })
                .collect();
            Formula::predication(self.sign, &self.pred, terms)
        } else {
            Formula::Iota(IotaPred { sign: self.sign, pred: self.pred.clone(), args })
        }
    }

    /// The simple shape accepted by the proof rules, if this is one.
    pub fn simple(&self) -> Option<SimpleIota<'_>> {
        let desc = self.first_desc()?;
        let same = self.args.iter().all(|a| match a {
            Arg::Term(_) => true,
            Arg::Desc(d) => **d == *desc,
        });
        let atomic = match &desc.body {
            Formula::Atom(_, args) | Formula::NegPred(_, args) => {
                args.contains(&Term::Var(desc.var.clone()))
            }
            _ => false,
        };
        (same && atomic).then_some(SimpleIota { iota: self, desc })
    }

    pub fn descriptions(&self) -> impl Iterator<Item = &Description> {
        self.args.iter().filter_map(|a| match a {
            Arg::Desc(d) => Some(&**d),
            Arg::Term(_) => None,
        })
    }
}
