//! ASCII surface syntax.
//!
//! ```text
//! formula  := imp ('<->' imp)?
//! imp      := or ('->' imp)?
//! or       := and ('|' or)?
//! and      := unary ('&' and)?
//! unary    := '!' unary | ('forall' | 'exists') VAR '.' formula
//!           | 'the' qset PRED 'is' '-'? PRED | primary
//! primary  := 'bot' | '(' formula ')' | '-'? PRED '(' arg (',' arg)* ')'
//!           | term ('=+' | '=-') qset term
//! arg      := term | 'iota' qset VAR '.' formula
//! qset     := '[' ('*' | '{'? PRED (',' PRED)* '}'?) ']'
//! ```
//!
//! Names declared as constants in the signature are constants, every other
//! name in term position is a variable. `[*]` stands for the whole predicate
//! set; so does `[P]` when the signature declares no predicate called `P`.

use std::fmt;

use thiserror::Error;

use crate::base::Signature;
use crate::syntax::{fresh_name, Arg, Description, Formula, IotaPred, Pred, QSet, Sign, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Amp,
    Bar,
    Arrow,
    Iff,
    Bang,
    Minus,
    EqPos,
    EqNeg,
    Star,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Bang => "!",
            Tok::Minus => "-",
            Tok::EqPos => "=+",
            Tok::EqNeg => "=-",
            Tok::Star => "*",
        };
        write!(f, "`{s}`")
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset, message: String| ParseError { offset, message };
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = src.get(i..i + 2).unwrap_or("");
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            i += 1;
            while i < bytes.len() {
                let d = bytes[i] as char;
                let hyphen_inside = d == '-'
                    && bytes.get(i + 1).is_some_and(|n| (*n as char).is_ascii_alphanumeric());
                if d.is_ascii_alphanumeric() || d == '_' || hyphen_inside {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
            continue;
        } else if src[i..].starts_with("<->") {
            i += 3;
            Tok::Iff
        } else if two == "->" {
            i += 2;
            Tok::Arrow
        } else if two == "=+" {
            i += 2;
            Tok::EqPos
        } else if two == "=-" {
            i += 2;
            Tok::EqNeg
        } else {
            i += 1;
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '!' => Tok::Bang,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                _ => return Err(err(start, format!("unexpected character `{c}`"))),
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

const KEYWORDS: &[&str] = &["forall", "exists", "iota", "bot", "the", "is"];

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
    sig: &'a Signature,
}

/// Parse a formula against a signature.
pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, len: src.len(), sig };
    let f = p.formula()?;
    if let Some((off, t)) = p.toks.get(p.pos) {
        return Err(ParseError { offset: *off, message: format!("unexpected {t} after formula") });
    }
    Ok(f)
}

/// Parse a nominal term: a declared constant or a variable.
pub fn parse_term(src: &str, sig: &Signature) -> Result<Term, ParseError> {
    let s = src.trim();
    let toks = lex(s)?;
    match toks.as_slice() {
        [(_, Tok::Ident(n))] if !KEYWORDS.contains(&n.as_str()) => Ok(classify(n, sig)),
        _ => Err(ParseError { offset: 0, message: format!("`{src}` is not a nominal term") }),
    }
}

fn classify(name: &str, sig: &Signature) -> Term {
    if sig.is_constant(name) {
        Term::Const(name.to_string())
    } else {
        Term::Var(name.to_string())
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), message: message.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.error(format!("expected {t}, found {found}")),
                None => self.error(format!("expected {t}, found end of input")),
            }
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(n)) if !KEYWORDS.contains(&n.as_str()) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            Some(t) => self.error(format!("expected a name, found {t}")),
            None => self.error("expected a name, found end of input"),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(n)) if n == kw)
    }

    fn binder(&mut self) -> Result<String, ParseError> {
        let off = self.offset();
        let x = self.ident()?;
        if self.sig.is_constant(&x) {
            return Err(ParseError { offset: off, message: format!("cannot bind constant `{x}`") });
        }
        Ok(x)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.imp()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.imp()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.and()?;
        if self.eat(&Tok::Bar) {
            let rhs = self.or()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Amp) {
            let rhs = self.and()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.keyword("forall") || self.keyword("exists") {
            let universal = self.keyword("forall");
            self.pos += 1;
            let x = self.binder()?;
            self.expect(Tok::Dot)?;
            let body = self.formula()?;
            return Ok(if universal { Formula::forall(x, body) } else { Formula::exists(x, body) });
        }
        if self.keyword("the") {
            return self.the_sugar();
        }
        self.primary()
    }

    /// `the[Q] F is G` ⇒ `G(iota[Q] x. F(x))`.
    fn the_sugar(&mut self) -> Result<Formula, ParseError> {
        self.pos += 1;
        let q = self.qset()?;
        let f = self.unary_predicate()?;
        if !self.keyword("is") {
            return self.error("expected `is`");
        }
        self.pos += 1;
        let sign = if self.eat(&Tok::Minus) { Sign::Neg } else { Sign::Pos };
        let g = self.unary_predicate()?;
        let x = fresh_name("x", &self.sig.constants().iter().cloned().collect());
        let body = Formula::atom(&f, vec![Term::Var(x.clone())]);
        let desc = Description { q, var: x, body };
        Ok(Formula::Iota(IotaPred { sign, pred: g, args: vec![Arg::Desc(Box::new(desc))] }))
    }

    fn unary_predicate(&mut self) -> Result<Pred, ParseError> {
        let off = self.offset();
        let name = self.ident()?;
        match self.sig.predicate(&name) {
            Some(p) if p.arity == 1 => Ok(p.clone()),
            Some(p) => Err(ParseError {
                offset: off,
                message: format!("`{name}` has arity {}, expected a unary predicate", p.arity),
            }),
            None => Err(ParseError { offset: off, message: format!("unknown predicate `{name}`") }),
        }
    }

    fn qset(&mut self) -> Result<QSet, ParseError> {
        self.expect(Tok::LBrack)?;
        if self.eat(&Tok::Star) {
            self.expect(Tok::RBrack)?;
            return Ok(self.sig.all_predicates());
        }
        if self.eat(&Tok::RBrack) {
            return self.error("the set of respects must be nonempty");
        }
        let braced = self.eat(&Tok::LBrace);
        let mut preds = Vec::new();
        loop {
            let off = self.offset();
            let name = self.ident()?;
            match self.sig.predicate(&name) {
                Some(p) => preds.push(p.clone()),
                None if name == "P" => preds.extend(self.sig.predicates().iter().cloned()),
                None => {
                    return Err(ParseError { offset: off, message: format!("unknown predicate `{name}`") })
                }
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if braced {
            self.expect(Tok::RBrace)?;
        }
        self.expect(Tok::RBrack)?;
        Ok(QSet::new(preds))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.keyword("bot") {
            self.pos += 1;
            return Ok(Formula::Bottom);
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if self.eat(&Tok::Minus) {
            let is_app = matches!(self.peek(), Some(Tok::Ident(_))) && self.peek_at(1) == Some(&Tok::LParen);
            if !is_app || self.keyword("bot") {
                return self.error("predication failure `-` applies only to a predicate application");
            }
            return self.predication(Sign::Neg);
        }
        match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(_)), Some(Tok::LParen)) => self.predication(Sign::Pos),
            (Some(Tok::Ident(_)), Some(Tok::EqPos | Tok::EqNeg)) => {
                let left = classify(&self.ident()?, self.sig);
                let sign = if self.eat(&Tok::EqPos) {
                    Sign::Pos
                } else {
                    self.pos += 1;
                    Sign::Neg
                };
                let q = self.qset()?;
                let right = classify(&self.ident()?, self.sig);
                Ok(Formula::qident(sign, left, right, q))
            }
            (Some(t), _) => self.error(format!("expected a formula, found {t}")),
            (None, _) => self.error("expected a formula, found end of input"),
        }
    }

    fn predication(&mut self, sign: Sign) -> Result<Formula, ParseError> {
        let off = self.offset();
        let name = self.ident()?;
        let pred = self
            .sig
            .predicate(&name)
            .cloned()
            .ok_or_else(|| ParseError { offset: off, message: format!("unknown predicate `{name}`") })?;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            args.push(self.arg()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        if args.len() != pred.arity {
            return Err(ParseError {
                offset: off,
                message: format!("`{name}` takes {} arguments, got {}", pred.arity, args.len()),
            });
        }
        if args.iter().all(|a| matches!(a, Arg::Term(_))) {
            let terms = args
                .into_iter()
                .map(|a| match a {
                    Arg::Term(t) => t,
                    Arg::Desc(_) => unreachable!(),
                })
                .collect();
            return Ok(Formula::predication(sign, &pred, terms));
        }
        Ok(Formula::Iota(IotaPred { sign, pred, args }))
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        if self.keyword("iota") {
            self.pos += 1;
            let q = self.qset()?;
            let off = self.offset();
            let var = self.binder()?;
            self.expect(Tok::Dot)?;
            let body = self.formula()?;
            if !body.is_free(&var) {
                return Err(ParseError {
                    offset: off,
                    message: format!("description body must contain the bound variable `{var}`"),
                });
            }
            return Ok(Arg::Desc(Box::new(Description { q, var, body })));
        }
        Ok(Arg::Term(classify(&self.ident()?, self.sig)))
    }
}

// Printing. Levels: 0 `<->`, 1 `->`, 2 `|`, 3 `&`, 4 prefix, 5 atomic.

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

fn iff_parts(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::And(l, r) = f {
        if let (Formula::Implies(a, b), Formula::Implies(b2, a2)) = (&**l, &**r) {
            if a == a2 && b == b2 {
                return Some((a, b));
            }
        }
    }
    None
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, ctx: u8) -> fmt::Result {
    let (level, needs_parens) = match f {
        Formula::Forall(..) | Formula::Exists(..) => (0, ctx > 0),
        _ if iff_parts(f).is_some() => (0, ctx > 0),
        Formula::Implies(_, b) if **b == Formula::Bottom => (4, ctx > 4),
        Formula::Implies(..) => (1, ctx > 1),
        Formula::Or(..) => (2, ctx > 2),
        Formula::And(..) => (3, ctx > 3),
        _ => (5, false),
    };
    if needs_parens {
        out.write_str("(")?;
    }
    let _ = level;
    match f {
        _ if iff_parts(f).is_some() => {
            let (a, b) = iff_parts(f).unwrap();
            write_formula(out, a, 1)?;
            out.write_str(" <-> ")?;
            write_formula(out, b, 1)?;
        }
        Formula::Implies(a, b) if **b == Formula::Bottom => {
            out.write_str("!")?;
            write_formula(out, a, 4)?;
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, 2)?;
            out.write_str(" -> ")?;
            write_formula(out, b, 1)?;
        }
        Formula::Or(a, b) => {
            write_formula(out, a, 3)?;
            out.write_str(" | ")?;
            write_formula(out, b, 2)?;
        }
        Formula::And(a, b) => {
            write_formula(out, a, 4)?;
            out.write_str(" & ")?;
            write_formula(out, b, 3)?;
        }
        Formula::Forall(x, a) => {
            write!(out, "forall {x}. ")?;
            write_formula(out, a, 0)?;
        }
        Formula::Exists(x, a) => {
            write!(out, "exists {x}. ")?;
            write_formula(out, a, 0)?;
        }
        Formula::Bottom => out.write_str("bot")?,
        Formula::Atom(p, args) => write_app(out, "", p, args.iter().map(|t| t.to_string()))?,
        Formula::NegPred(p, args) => write_app(out, "-", p, args.iter().map(|t| t.to_string()))?,
        Formula::QIdent { sign, left, right, q } => {
            let op = if *sign == Sign::Pos { "=+" } else { "=-" };
            write!(out, "{left} {op}{q} {right}")?;
        }
        Formula::Iota(ip) => {
            let prefix = if ip.sign == Sign::Neg { "-" } else { "" };
            let args = ip.args.iter().map(|a| match a {
                Arg::Term(t) => t.to_string(),
                Arg::Desc(d) => format!("iota{} {}. {}", d.q, d.var, d.body),
            });
            write_app(out, prefix, &ip.pred, args)?;
        }
    }
    if needs_parens {
        out.write_str(")")?;
    }
    Ok(())
}

fn write_app(
    out: &mut fmt::Formatter<'_>,
    prefix: &str,
    p: &Pred,
    args: impl Iterator<Item = String>,
) -> fmt::Result {
    write!(out, "{prefix}{}(", p.name)?;
    for (i, a) in args.enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        out.write_str(&a)?;
    }
    out.write_str(")")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(
            vec!["a".into(), "b".into(), "France".into()],
            vec![
                Pred::new("P", 1),
                Pred::new("B", 1),
                Pred::new("R", 2),
                Pred::new("King-of", 2),
                Pred::new("Real", 1),
            ],
        )
    }

    fn p(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    #[test]
    fn sugar_expands() {
        let s = sig();
        let pa = p("P(a)");
        assert_eq!(p("!P(a)"), Formula::implies(pa.clone(), Formula::Bottom));
        assert_eq!(p("P(a) <-> B(a)"), Formula::iff(pa, p("B(a)")));
        assert!(matches!(p("P(x)"), Formula::Atom(_, ref args) if args[0] == Term::var("x")));
        assert!(matches!(p("P(a)"), Formula::Atom(_, ref args) if args[0] == Term::constant("a")));
        let _ = s;
    }

    #[test]
    fn braced_respects() {
        assert_eq!(p("B(iota[{P}] x. P(x))"), p("B(iota[P] x. P(x))"));
        assert_eq!(p("a =+[{P,B}] b"), p("a =+[P,B] b"));
        assert!(parse_formula("a =+[{P] b", &sig()).is_err());
    }

    #[test]
    fn associativity_and_precedence() {
        assert_eq!(p("P(a) & P(b) & B(a)"), p("P(a) & (P(b) & B(a))"));
        assert_eq!(p("P(a) -> P(b) -> B(a)"), p("P(a) -> (P(b) -> B(a))"));
        assert_eq!(p("P(a) & P(b) -> B(a) | B(b)"), p("(P(a) & P(b)) -> (B(a) | B(b))"));
        assert_eq!(p("forall x. P(x) -> B(x)"), p("forall x. (P(x) -> B(x))"));
    }

    #[test]
    fn negative_predication_only_on_atoms() {
        assert!(parse_formula("-(P(a) & P(b))", &sig()).is_err());
        assert!(parse_formula("-bot", &sig()).is_err());
        assert!(parse_formula("--P(a)", &sig()).is_err());
        assert!(matches!(p("-P(a)"), Formula::NegPred(..)));
    }

    #[test]
    fn qualified_identity_and_descriptions() {
        let f = p("a =+[P,B] b");
        assert!(matches!(f, Formula::QIdent { sign: Sign::Pos, ref q, .. } if q.len() == 2));
        let g = p("-Real(iota[*] x. King-of(x, France))");
        match g {
            Formula::Iota(ref ip) => {
                assert_eq!(ip.sign, Sign::Neg);
                assert_eq!(ip.first_desc().unwrap().q.len(), 5);
            }
            _ => panic!("expected a description"),
        }
        assert!(parse_formula("B(iota[P] x. P(a))", &sig()).is_err());
        assert!(parse_formula("a =+[] b", &sig()).is_err());
        assert!(parse_formula("forall a. P(a)", &sig()).is_err());
        assert!(parse_formula("R(a)", &sig()).is_err());
    }

    #[test]
    fn the_sugar() {
        assert_eq!(p("the[B] P is B"), p("B(iota[B] x. P(x))"));
        assert_eq!(p("the[B] P is -B"), p("-B(iota[B] x. P(x))"));
    }

    #[test]
    fn print_parse_round_trip_examples() {
        for src in [
            "P(a)",
            "-R(a, x)",
            "(P(a) -> B(a)) & (B(b) -> P(a))",
            "(forall x. P(x)) & B(a)",
            "!(P(a) | B(a))",
            "!!P(a)",
            "P(a) -> bot -> bot",
            "(P(a) -> bot) -> bot",
            "exists x. -P(x) & forall y. R(x, y) <-> B(y)",
            "Real(iota[P,B] x. R(x, iota[B] y. B(y) & R(y, x)))",
            "a =-[R] b",
        ] {
            let f = p(src);
            let printed = f.to_string();
            assert_eq!(p(&printed), f, "{src} printed as {printed}");
        }
    }
}
