//! Seeded generation of toy bases and of valid derivations that contain
//! redexes of every kind.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::base::{GroundAtom, Signature, SubatomicBase, Symbol};
use crate::build;
use crate::defs::iota_clauses;
use crate::derivation::{Derivation, PairSpec, Side};
use crate::kernel::{pair_atoms, required_pairs};
use crate::syntax::{
    fresh_name, Arg, Description, Formula, IotaPred, Pred, QSet, Sign, Term,
};

/// A base with 1 to 3 constants and 1 to 3 unary predicates. Each atom is
/// contained, assigned to some of its symbols only, or absent.
pub fn toy_base(rng: &mut impl Rng) -> SubatomicBase {
    let constants: Vec<String> = ["a", "b", "c"][..rng.gen_range(1..=3)].iter().map(|s| s.to_string()).collect();
    let preds: Vec<Pred> = ["P", "Q", "R"][..rng.gen_range(1..=3)].iter().map(|p| Pred::new(*p, 1)).collect();
    let mut base = SubatomicBase::new(Signature::new(constants.clone(), preds.clone()));
    for p in &preds {
        for c in &constants {
            let atom = GroundAtom { pred: p.name.clone(), args: vec![c.clone()] };
            match rng.gen_range(0..4) {
                0 | 1 => base.assign_everywhere(atom),
                2 => base.assign(Symbol::Pred(p.name.clone()), atom),
                _ => {}
            }
        }
    }
    base
}

#[derive(Clone, Default)]
struct Ctx {
    hyps: Vec<(Formula, String)>,
    /// Eigenvariables in scope; open assumptions may not mention them.
    eigen: BTreeSet<String>,
}

impl Ctx {
    fn with(&self, f: Formula, label: String) -> Ctx {
        let mut c = self.clone();
        c.hyps.push((f, label));
        c
    }

    fn with_eigen(&self, y: &str) -> Ctx {
        let mut c = self.clone();
        c.eigen.insert(y.to_string());
        c
    }
}

pub struct Generator<'a> {
    base: &'a SubatomicBase,
    rng: ChaCha8Rng,
    labels: usize,
    vars: usize,
}

#[derive(Clone, Copy)]
enum Strategy {
    Intro,
    DetourAnd,
    DetourImplies,
    DetourOr,
    DetourForall,
    DetourExists,
    DetourAs,
    DetourAbsurdity,
    DetourIota,
    DetourQIdent,
    Permutation,
    Vacuous,
}

const STRATEGIES: [Strategy; 12] = [
    Strategy::Intro,
    Strategy::DetourAnd,
    Strategy::DetourImplies,
    Strategy::DetourOr,
    Strategy::DetourForall,
    Strategy::DetourExists,
    Strategy::DetourAs,
    Strategy::DetourAbsurdity,
    Strategy::DetourIota,
    Strategy::DetourQIdent,
    Strategy::Permutation,
    Strategy::Vacuous,
];

impl<'a> Generator<'a> {
    pub fn new(base: &'a SubatomicBase, seed: u64) -> Self {
        Generator { base, rng: ChaCha8Rng::seed_from_u64(seed), labels: 0, vars: 0 }
    }

    fn label(&mut self) -> String {
        self.labels += 1;
        format!("g{}", self.labels)
    }

    fn var(&mut self) -> String {
        self.vars += 1;
        format!("y{}", self.vars)
    }

    fn constant(&mut self) -> Term {
        Term::constant(self.base.constants().choose(&mut self.rng).expect("a constant").clone())
    }

    fn predicate(&mut self) -> Pred {
        self.base.signature().predicates().choose(&mut self.rng).expect("a predicate").clone()
    }

    /// A random formula whose free variables are among `scope`.
    pub fn formula(&mut self, depth: usize, scope: &[String]) -> Formula {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        if leaf {
            if self.rng.gen_bool(0.05) {
                return Formula::Bottom;
            }
            let p = self.predicate();
            let t = if !scope.is_empty() && self.rng.gen_bool(0.5) {
                Term::var(scope.choose(&mut self.rng).unwrap().clone())
            } else {
                self.constant()
            };
            return if self.rng.gen_bool(0.15) { Formula::neg_pred(&p, vec![t]) } else { Formula::atom(&p, vec![t]) };
        }
        match self.rng.gen_range(0..5) {
            0 => Formula::and(self.formula(depth - 1, scope), self.formula(depth - 1, scope)),
            1 => Formula::or(self.formula(depth - 1, scope), self.formula(depth - 1, scope)),
            2 => Formula::implies(self.formula(depth - 1, scope), self.formula(depth - 1, scope)),
            k => {
                let x = format!("x{}", scope.len() + 1);
                let mut inner = scope.to_vec();
                inner.push(x.clone());
                let body = self.formula(depth - 1, &inner);
                if k == 3 { Formula::forall(x, body) } else { Formula::exists(x, body) }
            }
        }
    }

    /// A valid derivation of depth at most `depth` with its redexes.
    pub fn derivation(&mut self, depth: usize) -> Derivation {
        let f = self.formula(2, &[]);
        self.goal(&f, &Ctx::default(), depth).expect("closed goals always have a derivation")
    }

    fn fallback(&mut self, f: &Formula, ctx: &Ctx) -> Option<Derivation> {
        if let Some((_, l)) = ctx.hyps.iter().find(|(h, _)| h.alpha_eq(f)) {
            return Some(Derivation::hyp(f.clone(), l.clone()));
        }
        if ctx.eigen.iter().any(|y| f.is_free(y)) {
            return None;
        }
        Some(Derivation::assume(f.clone()))
    }

    /// A major premise for an elimination: usually an assumption, so that the
    /// elimination itself is not reduced away first.
    fn major(&mut self, f: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        if self.rng.gen_bool(0.7) {
            self.fallback(f, ctx)
        } else {
            self.goal(f, ctx, depth)
        }
    }

    fn goal(&mut self, f: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        if depth == 0 || self.rng.gen_bool(0.15) {
            return self.fallback(f, ctx);
        }
        if ctx.hyps.iter().any(|(h, _)| h.alpha_eq(f)) && self.rng.gen_bool(0.5) {
            return self.fallback(f, ctx);
        }
        let mut order = STRATEGIES.to_vec();
        order.shuffle(&mut self.rng);
        // Favour introductions so that detours stay nested rather than chained.
        if self.rng.gen_bool(0.4) {
            order.insert(0, Strategy::Intro);
        }
        for s in order {
            if let Some(d) = self.strategy(s, f, ctx, depth) {
                return Some(d);
            }
        }
        self.fallback(f, ctx)
    }

    fn strategy(&mut self, s: Strategy, f: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        let closed_scope: Vec<String> = Vec::new();
        match s {
            Strategy::Intro => self.intro(f, ctx, depth),
            Strategy::DetourAnd if depth >= 2 => {
                let g = self.formula(1, &closed_scope);
                let left = self.goal(f, ctx, depth - 2)?;
                let right = self.goal(&g, ctx, depth - 2)?;
                Some(if self.rng.gen_bool(0.5) {
                    build::and_e(1, build::and_i(left, right))
                } else {
                    build::and_e(2, build::and_i(right, left))
                })
            }
            Strategy::DetourImplies if depth >= 2 => {
                let a = self.formula(1, &closed_scope);
                let l = self.label();
                let body = self.goal(f, &ctx.with(a.clone(), l.clone()), depth - 2)?;
                let minor = self.goal(&a, ctx, depth - 1)?;
                Some(build::imp_e(build::imp_i(Some(&l), a, body), minor))
            }
            Strategy::DetourOr if depth >= 2 => {
                let (a, b) = (self.formula(1, &closed_scope), self.formula(1, &closed_scope));
                let (l, r) = (self.label(), self.label());
                let left = self.rng.gen_bool(0.5);
                let major = if left {
                    build::or_i(1, self.goal(&a, ctx, depth - 2)?, b.clone())
                } else {
                    build::or_i(2, self.goal(&b, ctx, depth - 2)?, a.clone())
                };
                let d1 = self.goal(f, &ctx.with(a, l.clone()), depth - 1)?;
                let d2 = self.goal(f, &ctx.with(b, r.clone()), depth - 1)?;
                Some(build::or_e(major, Some(&l), d1, Some(&r), d2))
            }
            Strategy::DetourForall if depth >= 2 => {
                // Abstract a constant of the goal (or quantify vacuously).
                let consts: Vec<Term> = f.free_terms().into_iter().filter(Term::is_const).collect();
                let c = consts.choose(&mut self.rng).cloned().unwrap_or_else(|| self.constant());
                let x = fresh_name("x", &f.names());
                let body = f.replace_term(&c, &Term::var(x.clone()));
                let intro = if self.rng.gen_bool(0.5) {
                    let y = self.var();
                    let inst = body.subst_avoiding(&x, &Term::var(y.clone()));
                    let p = self.goal(&inst, &ctx.with_eigen(&y), depth - 2)?;
                    build::forall_i(&x, body, Term::var(y), p)
                } else {
                    let mut ps = Vec::new();
                    for k in self.base.constants().to_vec() {
                        ps.push(self.goal(&body.subst_avoiding(&x, &Term::constant(k)), ctx, depth - 2)?);
                    }
                    build::forall_iii(&x, body, ps)
                };
                Some(build::forall_e(intro, c))
            }
            Strategy::DetourExists if depth >= 2 => {
                let x = "x1".to_string();
                let a = self.formula(1, std::slice::from_ref(&x));
                let c = self.constant();
                let y = self.var();
                let l = self.label();
                let witness = self.goal(&a.subst_avoiding(&x, &c), ctx, depth - 2)?;
                let inner = ctx.with(a.subst_avoiding(&x, &Term::var(y.clone())), l.clone()).with_eigen(&y);
                let minor = self.goal(f, &inner, depth - 1)?;
                Some(build::exists_e(build::exists_i(&x, a, c, witness), Term::var(y), Some(&l), minor))
            }
            Strategy::DetourAs if depth >= 3 => {
                let (Formula::Atom(p, args) | Formula::NegPred(p, args)) = f else { return None };
                if !args.iter().all(Term::is_const) || !as_rule_applies(self.base, f) {
                    return None;
                }
                let mut units = Vec::new();
                for i in 0..=args.len() {
                    let d = self.goal(f, ctx, depth - 2)?;
                    units.push(if i == 0 && self.rng.gen_bool(0.3) {
                        Derivation::term(p.name.clone())
                    } else {
                        build::as_e(i, d)
                    });
                }
                Some(build::as_i(f.clone(), units))
            }
            Strategy::DetourAbsurdity if depth >= 3 => {
                let g = self.formula(1, &closed_scope);
                let bot = self.goal(&Formula::Bottom, ctx, depth - 3)?;
                let conj = Formula::and(f.clone(), g);
                Some(build::and_e(1, build::bot_i(bot, conj)))
            }
            Strategy::Permutation if depth >= 5 => {
                // The branches conclude `f & M` for the major `M`, rebuilt from
                // the discharged assumption, so neither branch is vacuous.
                let inner = if self.rng.gen_bool(0.5) {
                    let (a, b) = (self.formula(1, &closed_scope), self.formula(1, &closed_scope));
                    let m = Formula::or(a.clone(), b.clone());
                    let major = self.major(&m, ctx, depth - 2)?;
                    let (l, r) = (self.label(), self.label());
                    let d1 = self.goal(f, &ctx.with(a.clone(), l.clone()), depth - 4)?;
                    let d1 = build::and_i(d1, build::or_i(1, Derivation::hyp(a.clone(), l.clone()), b.clone()));
                    let d2 = self.goal(f, &ctx.with(b.clone(), r.clone()), depth - 4)?;
                    let d2 = build::and_i(d2, build::or_i(2, Derivation::hyp(b, r.clone()), a));
                    build::or_e(major, Some(&l), d1, Some(&r), d2)
                } else {
                    let x = "x1".to_string();
                    let a = self.formula(1, std::slice::from_ref(&x));
                    let m = Formula::exists(x.clone(), a.clone());
                    let major = self.major(&m, ctx, depth - 2)?;
                    let (y, l) = (self.var(), self.label());
                    let yt = Term::var(y.clone());
                    let hyp = a.subst_avoiding(&x, &yt);
                    let minor = self.goal(f, &ctx.with(hyp.clone(), l.clone()).with_eigen(&y), depth - 4)?;
                    let rebuilt = build::exists_i(&x, a, yt.clone(), Derivation::hyp(hyp, l.clone()));
                    build::exists_e(major, yt, Some(&l), build::and_i(minor, rebuilt))
                };
                Some(build::and_e(1, inner))
            }
            Strategy::Vacuous if depth >= 2 => {
                if self.rng.gen_bool(0.5) {
                    let (a, b) = (self.formula(1, &closed_scope), self.formula(1, &closed_scope));
                    let major = self.major(&Formula::or(a, b), ctx, depth - 1)?;
                    let d1 = self.goal(f, ctx, depth - 1)?;
                    let d2 = self.goal(f, ctx, depth - 1)?;
                    Some(build::or_e(major, None, d1, None, d2))
                } else {
                    let x = "x1".to_string();
                    let a = self.formula(1, std::slice::from_ref(&x));
                    let major = self.major(&Formula::exists(x, a), ctx, depth - 1)?;
                    let y = self.var();
                    let minor = self.goal(f, &ctx.with_eigen(&y), depth - 1)?;
                    Some(build::exists_e(major, Term::var(y), None, minor))
                }
            }
            Strategy::DetourIota if depth >= 4 => {
                let iota = self.iota_formula();
                let Formula::Iota(ip) = &iota else { unreachable!() };
                let s = ip.simple().expect("simple description");
                let clauses = iota_clauses(ip, s.desc);
                let k = self.rng.gen_range(1..=3u8);
                let mut ps = Vec::new();
                for c in &clauses {
                    ps.push(self.goal(c, ctx, depth - 3)?);
                }
                let [e, u, p]: [Derivation; 3] = ps.try_into().ok()?;
                let minor = build::iota_e(k, build::iota_i(iota, e, u, p));
                let a = clauses[usize::from(k) - 1].clone();
                let l = self.label();
                let body = self.goal(f, &ctx.with(a.clone(), l.clone()), depth - 2)?;
                Some(build::imp_e(build::imp_i(Some(&l), a, body), minor))
            }
            Strategy::DetourQIdent if depth >= 4 => {
                let (sign, a1, a2, q) = self.identity_parts();
                let ident = self.qident_intro(sign, &a1, &a2, &q, ctx, depth - 3)?;
                let phi = q.iter().next().expect("nonempty").clone();
                let side = if self.rng.gen_bool(0.5) { Side::First } else { Side::Second };
                let from = if side == Side::First { &a1 } else { &a2 };
                let minor_f = Formula::predication(sign, &phi, vec![from.clone()]);
                let minor = self.goal(&minor_f, ctx, depth - 3)?;
                let elim = build::qident_e(side, ident, minor);
                let a = elim.conclusion_formula().expect("formula");
                let l = self.label();
                let body = self.goal(f, &ctx.with(a.clone(), l.clone()), depth - 2)?;
                Some(build::imp_e(build::imp_i(Some(&l), a, body), elim))
            }
            _ => None,
        }
    }

    fn intro(&mut self, f: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        let d = depth - 1;
        match f {
            Formula::Atom(_, args) | Formula::NegPred(_, args) => {
                (args.iter().all(Term::is_const) && as_rule_applies(self.base, f)).then(|| build::as_i_leaves(f.clone()))
            }
            Formula::Bottom => None,
            Formula::And(a, b) => Some(build::and_i(self.goal(a, ctx, d)?, self.goal(b, ctx, d)?)),
            Formula::Or(a, b) => Some(if self.rng.gen_bool(0.5) {
                build::or_i(1, self.goal(a, ctx, d)?, (**b).clone())
            } else {
                build::or_i(2, self.goal(b, ctx, d)?, (**a).clone())
            }),
            Formula::Implies(a, b) => {
                let l = self.label();
                let body = self.goal(b, &ctx.with((**a).clone(), l.clone()), d)?;
                Some(build::imp_i(Some(&l), (**a).clone(), body))
            }
            Formula::Forall(x, a) => {
                if self.rng.gen_bool(0.5) {
                    let y = self.var();
                    let inst = a.subst_avoiding(x, &Term::var(y.clone()));
                    if let Some(p) = self.goal(&inst, &ctx.with_eigen(&y), d) {
                        return Some(build::forall_i(x, (**a).clone(), Term::var(y), p));
                    }
                }
                let mut ps = Vec::new();
                for c in self.base.constants().to_vec() {
                    ps.push(self.goal(&a.subst_avoiding(x, &Term::constant(c)), ctx, d)?);
                }
                Some(build::forall_iii(x, (**a).clone(), ps))
            }
            Formula::Exists(x, a) => {
                let c = self.constant();
                let p = self.goal(&a.subst_avoiding(x, &c), ctx, d)?;
                Some(build::exists_i(x, (**a).clone(), c, p))
            }
            Formula::QIdent { sign, left, right, q } => self.qident_intro(*sign, left, right, q, ctx, d),
            Formula::Iota(ip) => {
                let s = ip.simple()?;
                let mut ps = Vec::new();
                for c in iota_clauses(ip, s.desc) {
                    ps.push(self.goal(&c, ctx, d)?);
                }
                let [e, u, p]: [Derivation; 3] = ps.try_into().ok()?;
                Some(build::iota_i(f.clone(), e, u, p))
            }
        }
    }

    fn qident_intro(&mut self, sign: Sign, a1: &Term, a2: &Term, q: &QSet, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        let mut pairs = Vec::new();
        for (pred, position) in required_pairs(self.base, q).ok()? {
            let spec = PairSpec { pred, position, companions: vec![], labels: [self.label(), self.label()] };
            let (f1, f2) = pair_atoms(self.base, sign, a1, a2, &spec).ok()?;
            let fwd = self.goal(&f2, &ctx.with(f1.clone(), spec.labels[0].clone()), depth)?;
            let bwd = self.goal(&f1, &ctx.with(f2, spec.labels[1].clone()), depth)?;
            pairs.push((spec, fwd, bwd));
        }
        Some(build::qident_i(sign, a1.clone(), a2.clone(), q.clone(), pairs))
    }

    fn qset(&mut self) -> QSet {
        let preds = self.base.signature().predicates().to_vec();
        let n = self.rng.gen_range(1..=preds.len());
        QSet::new(preds.choose_multiple(&mut self.rng, n).cloned())
    }

    fn identity_parts(&mut self) -> (Sign, Term, Term, QSet) {
        let sign = if self.rng.gen_bool(0.7) { Sign::Pos } else { Sign::Neg };
        (sign, self.constant(), self.constant(), self.qset())
    }

    /// `ψ(ιx φ(x))` with a random qualification.
    fn iota_formula(&mut self) -> Formula {
        let (phi, psi) = (self.predicate(), self.predicate());
        let inner = if self.rng.gen_bool(0.8) { Sign::Pos } else { Sign::Neg };
        let outer = if self.rng.gen_bool(0.8) { Sign::Pos } else { Sign::Neg };
        let body = Formula::predication(inner, &phi, vec![Term::var("x")]);
        let desc = Description { q: self.qset(), var: "x".into(), body };
        Formula::Iota(IotaPred { sign: outer, pred: psi, args: vec![Arg::Desc(Box::new(desc))] })
    }
}

fn as_rule_applies(base: &SubatomicBase, f: &Formula) -> bool {
    let Ok(atom) = GroundAtom::from_formula(f) else { return false };
    let contained = base.positively_contained(&atom).unwrap_or(false);
    matches!((f, contained), (Formula::Atom(..), true) | (Formula::NegPred(..), false))
}

/// `n` toy bases with one derivation each, reproducible from `seed`.
pub fn sample(seed: u64, n: usize, depth: usize) -> Vec<(SubatomicBase, Derivation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let base = toy_base(&mut rng);
            let d = Generator::new(&base, rng.gen()).derivation(depth);
            (base, d)
        })
        .collect()
}
