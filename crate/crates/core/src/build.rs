//! Smart constructors that compute a rule's conclusion from its premises.
//!
//! They do not check side conditions; run the kernel for that. Constructors
//! panic when the premises do not have the shape the rule needs, so they are
//! meant for programmatic construction from known-good shapes.

use crate::defs::iota_clauses;
use crate::derivation::{Derivation, ForallVariant, PairSpec, Rule, Side, Unit};
use crate::syntax::{Formula, Sign, Term};

fn concl(d: &Derivation) -> Formula {
    d.conclusion_formula().expect("premise concludes a formula")
}

pub fn as_i(atom: Formula, premises: Vec<Derivation>) -> Derivation {
    let rule = match atom {
        Formula::Atom(..) => Rule::AsI,
        Formula::NegPred(..) => Rule::NegAsI,
        _ => panic!("as-introduction concludes an atomic predication"),
    };
    Derivation::node(rule, atom, premises)
}

/// `asI` with term-assumption leaves for every symbol of the atom.
pub fn as_i_leaves(atom: Formula) -> Derivation {
    let (p, args) = match &atom {
        Formula::Atom(p, a) | Formula::NegPred(p, a) => (p.clone(), a.clone()),
        _ => panic!("atomic predication expected"),
    };
    let mut premises = vec![Derivation::term(p.name.clone())];
    premises.extend(args.iter().map(|t| Derivation::term(t.name())));
    as_i(atom, premises)
}

pub fn as_e(i: usize, d: Derivation) -> Derivation {
    let (rule, tau) = match concl(&d) {
        Formula::Atom(p, args) => (Rule::AsE(i), if i == 0 { p.name } else { args[i - 1].name().to_string() }),
        Formula::NegPred(p, args) => (Rule::NegAsE(i), if i == 0 { p.name } else { args[i - 1].name().to_string() }),
        _ => panic!("as-elimination needs an atomic premise"),
    };
    Derivation::Node { rule, conclusion: Unit::Term(tau), premises: vec![d] }
}

pub fn and_i(a: Derivation, b: Derivation) -> Derivation {
    let c = Formula::and(concl(&a), concl(&b));
    Derivation::node(Rule::AndI, c, vec![a, b])
}

pub fn and_e(which: u8, d: Derivation) -> Derivation {
    let Formula::And(a, b) = concl(&d) else { panic!("conjunction expected") };
    if which == 1 {
        Derivation::node(Rule::AndE1, *a, vec![d])
    } else {
        Derivation::node(Rule::AndE2, *b, vec![d])
    }
}

pub fn or_i(which: u8, d: Derivation, other: Formula) -> Derivation {
    let c = concl(&d);
    if which == 1 {
        Derivation::node(Rule::OrI1, Formula::or(c, other), vec![d])
    } else {
        Derivation::node(Rule::OrI2, Formula::or(other, c), vec![d])
    }
}

pub fn or_e(major: Derivation, left: Option<&str>, l: Derivation, right: Option<&str>, r: Derivation) -> Derivation {
    let c = concl(&l);
    Derivation::node(
        Rule::OrE { left: left.map(Into::into), right: right.map(Into::into) },
        c,
        vec![major, l, r],
    )
}

pub fn imp_i(label: Option<&str>, antecedent: Formula, d: Derivation) -> Derivation {
    let c = Formula::implies(antecedent, concl(&d));
    Derivation::node(Rule::ImpI { label: label.map(Into::into) }, c, vec![d])
}

pub fn imp_e(major: Derivation, minor: Derivation) -> Derivation {
    let Formula::Implies(_, b) = concl(&major) else { panic!("implication expected") };
    Derivation::node(Rule::ImpE, *b, vec![major, minor])
}

/// `∀I` by clause (i) or (ii): the premise proves `body(x/eigen)`.
pub fn forall_i(x: &str, body: Formula, eigen: Term, d: Derivation) -> Derivation {
    Derivation::node(Rule::ForallI(ForallVariant::Eigen(eigen)), Formula::forall(x, body), vec![d])
}

/// `∀I` by clause (iii): one premise per constant.
pub fn forall_iii(x: &str, body: Formula, premises: Vec<Derivation>) -> Derivation {
    Derivation::node(Rule::ForallI(ForallVariant::EachConstant), Formula::forall(x, body), premises)
}

pub fn forall_e(d: Derivation, t: Term) -> Derivation {
    let Formula::Forall(x, a) = concl(&d) else { panic!("universal formula expected") };
    let c = a.subst(&x, &t).expect("term free for the variable");
    Derivation::node(Rule::ForallE(t), c, vec![d])
}

pub fn exists_i(x: &str, body: Formula, t: Term, d: Derivation) -> Derivation {
    Derivation::node(Rule::ExistsI(t), Formula::exists(x, body), vec![d])
}

pub fn exists_e(major: Derivation, eigen: Term, label: Option<&str>, minor: Derivation) -> Derivation {
    let c = concl(&minor);
    Derivation::node(Rule::ExistsE { eigen, label: label.map(Into::into) }, c, vec![major, minor])
}

pub fn bot_i(d: Derivation, c: Formula) -> Derivation {
    Derivation::node(Rule::BotI, c, vec![d])
}

/// Identity introduction; `pairs` are in the canonical order with their two
/// subderivations each.
pub fn qident_i(sign: Sign, a1: Term, a2: Term, q: crate::syntax::QSet, pairs: Vec<(PairSpec, Derivation, Derivation)>) -> Derivation {
    let mut specs = Vec::new();
    let mut premises = Vec::new();
    for (spec, d1, d2) in pairs {
        specs.push(spec);
        premises.push(d1);
        premises.push(d2);
    }
    Derivation::node(Rule::QIdentI { sign, pairs: specs }, Formula::qident(sign, a1, a2, q), premises)
}

pub fn qident_e(side: Side, ident: Derivation, minor: Derivation) -> Derivation {
    let Formula::QIdent { sign, left, right, .. } = concl(&ident) else { panic!("identity expected") };
    let c = concl(&minor).swap_terms(&left, &right);
    Derivation::node(Rule::QIdentE { sign, side }, c, vec![ident, minor])
}

pub fn iota_i(conclusion: Formula, e: Derivation, qu: Derivation, p: Derivation) -> Derivation {
    let Formula::Iota(ip) = &conclusion else { panic!("description predication expected") };
    let sign = ip.simple().expect("simple description").desc.inner_sign();
    Derivation::node(Rule::IotaI(sign), conclusion, vec![e, qu, p])
}

pub fn iota_e(which: u8, d: Derivation) -> Derivation {
    let f = concl(&d);
    let Formula::Iota(ip) = &f else { panic!("description predication expected") };
    let s = ip.simple().expect("simple description");
    let c = iota_clauses(ip, s.desc)[usize::from(which) - 1].clone();
    Derivation::node(Rule::IotaE { sign: s.desc.inner_sign(), which }, c, vec![d])
}
