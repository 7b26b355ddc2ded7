//! Text syntax.
//!
//! ```text
//! formula := ("forall" | "exists") name "." formula | imp
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | quantified | "Prov" "(" term ")" | term "=" term | "(" formula ")"
//! term    := prod ("+" prod)*
//! prod    := base ("*" base)*
//! base    := "0" | "#" digits | name | "(" term ")"
//!          | ("S" | "D" | "b0" | "b1") "(" term ")"
//! ```
//!
//! `#n` abbreviates the binary numeral of `n`; the printer uses it for every
//! canonical numeral other than `0`.

use std::fmt;

use num_bigint::BigUint;

use super::{numeral, valid_name, Formula, GoedelError, Term};

/// `Some(n)` if `t` is exactly `numeral(n)`.
fn canonical_numeral(t: &Term) -> Option<BigUint> {
    let mut digits = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Zero => break,
            Term::B0(_) => digits.push(false),
            Term::B1(_) => digits.push(true),
            _ => return None,
        }
        cur = match cur {
            Term::B0(inner) | Term::B1(inner) => inner,
            _ => unreachable!(),
        };
    }
    if digits.last() == Some(&false) {
        return None;
    }
    let mut n = BigUint::default();
    for &d in digits.iter().rev() {
        n = (n << 1u32) + u32::from(d);
    }
    Some(n)
}

fn fmt_term(t: &Term, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if !matches!(t, Term::Zero) {
        if let Some(n) = canonical_numeral(t) {
            return write!(f, "#{n}");
        }
    }
    let prec = match t {
        Term::Plus(..) => 1,
        Term::Times(..) => 2,
        _ => 3,
    };
    if prec < ctx {
        f.write_str("(")?;
    }
    match t {
        Term::Zero => f.write_str("0")?,
        Term::Var(v) => f.write_str(v)?,
        Term::B0(a) | Term::B1(a) | Term::Succ(a) | Term::Diag(a) => {
            let head = match t {
                Term::B0(_) => "b0",
                Term::B1(_) => "b1",
                Term::Succ(_) => "S",
                _ => "D",
            };
            write!(f, "{head}(")?;
            fmt_term(a, 0, f)?;
            f.write_str(")")?;
        }
        Term::Plus(a, b) => {
            fmt_term(a, 1, f)?;
            f.write_str(" + ")?;
            fmt_term(b, 2, f)?;
        }
        Term::Times(a, b) => {
            fmt_term(a, 2, f)?;
            f.write_str(" * ")?;
            fmt_term(b, 3, f)?;
        }
    }
    if prec < ctx {
        f.write_str(")")?;
    }
    Ok(())
}

fn fmt_formula(g: &Formula, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match g {
        Formula::ForAll(..) | Formula::Exists(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    };
    if prec < ctx {
        f.write_str("(")?;
    }
    match g {
        Formula::Eq(a, b) => {
            fmt_term(a, 0, f)?;
            f.write_str(" = ")?;
            fmt_term(b, 0, f)?;
        }
        Formula::Prov(t) => {
            f.write_str("Prov(")?;
            fmt_term(t, 0, f)?;
            f.write_str(")")?;
        }
        Formula::Not(a) => {
            f.write_str("~")?;
            fmt_formula(a, 4, f)?;
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            fmt_formula(a, prec, f)?;
            f.write_str(if prec == 3 { " & " } else { " | " })?;
            fmt_formula(b, prec + 1, f)?;
        }
        Formula::Implies(a, b) => {
            fmt_formula(a, 2, f)?;
            f.write_str(" -> ")?;
            fmt_formula(b, 1, f)?;
        }
        Formula::ForAll(v, a) | Formula::Exists(v, a) => {
            let q = if matches!(g, Formula::ForAll(..)) {
                "forall"
            } else {
                "exists"
            };
            write!(f, "{q} {v}. ")?;
            fmt_formula(a, 0, f)?;
        }
    }
    if prec < ctx {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, 0, f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Num(String),
    Hash(String),
    Sym(&'static str),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, GoedelError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            Tok::Word(s[start..i].to_string())
        } else if c.is_ascii_digit() || c == b'#' {
            i += usize::from(c == b'#');
            let digits = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if digits == i {
                return Err(GoedelError::Parse {
                    col: start + 1,
                    reason: "expected digits after `#`".into(),
                });
            }
            if c == b'#' {
                Tok::Hash(s[digits..i].to_string())
            } else {
                Tok::Num(s[digits..i].to_string())
            }
        } else {
            let sym = ["->", "~", "&", "|", "(", ")", "=", "+", "*", "."]
                .into_iter()
                .find(|p| s[i..].starts_with(p))
                .ok_or_else(|| GoedelError::Parse {
                    col: start + 1,
                    reason: format!("unexpected `{}`", c as char),
                })?;
            i += sym.len();
            Tok::Sym(sym)
        };
        out.push((start + 1, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.0)
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T, GoedelError> {
        Err(GoedelError::Parse {
            col: self.col(),
            reason: reason.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.1)
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), GoedelError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.err(format!("expected `{sym}`"))
        }
    }

    fn name(&mut self) -> Result<String, GoedelError> {
        match self.peek() {
            Some(Tok::Word(w)) if valid_name(w) && w != "forall" && w != "exists" => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.err("expected a variable name"),
        }
    }

    fn formula(&mut self) -> Result<Formula, GoedelError> {
        if let Some(Tok::Word(w)) = self.peek() {
            if w == "forall" || w == "exists" {
                let all = w == "forall";
                self.pos += 1;
                let v = self.name()?;
                self.expect(".")?;
                let body = Box::new(self.formula()?);
                return Ok(if all {
                    Formula::ForAll(v, body)
                } else {
                    Formula::Exists(v, body)
                });
            }
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, GoedelError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            return Ok(Formula::Implies(
                Box::new(lhs),
                Box::new(self.implication()?),
            ));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, GoedelError> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = Formula::Or(Box::new(f), Box::new(self.conjunction()?));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, GoedelError> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = Formula::And(Box::new(f), Box::new(self.unary()?));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, GoedelError> {
        if self.eat("~") {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if matches!(self.peek(), Some(Tok::Word(w)) if w == "forall" || w == "exists") {
            return self.formula();
        }
        if matches!(self.peek(), Some(Tok::Word(w)) if w == "Prov") {
            self.pos += 1;
            self.expect("(")?;
            let t = self.term()?;
            self.expect(")")?;
            return Ok(Formula::Prov(t));
        }
        let save = self.pos;
        if let Ok(lhs) = self.term() {
            if self.eat("=") {
                return Ok(Formula::Eq(lhs, self.term()?));
            }
        }
        self.pos = save;
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        self.err("expected a formula")
    }

    fn term(&mut self) -> Result<Term, GoedelError> {
        let mut t = self.product()?;
        while self.eat("+") {
            t = Term::Plus(Box::new(t), Box::new(self.product()?));
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<Term, GoedelError> {
        let mut t = self.base()?;
        while self.eat("*") {
            t = Term::Times(Box::new(t), Box::new(self.base()?));
        }
        Ok(t)
    }

    fn base(&mut self) -> Result<Term, GoedelError> {
        if self.eat("(") {
            let t = self.term()?;
            self.expect(")")?;
            return Ok(t);
        }
        match self.peek().cloned() {
            Some(Tok::Num(n)) if n == "0" => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some(Tok::Hash(n)) => {
                self.pos += 1;
                Ok(numeral(&n.parse::<BigUint>().expect("lexed digits")))
            }
            Some(Tok::Word(w))
                if matches!(w.as_str(), "S" | "D" | "b0" | "b1")
                    && self.peek2() == Some(&Tok::Sym("(")) =>
            {
                self.pos += 2;
                let inner = Box::new(self.term()?);
                self.expect(")")?;
                Ok(match w.as_str() {
                    "S" => Term::Succ(inner),
                    "D" => Term::Diag(inner),
                    "b0" => Term::B0(inner),
                    _ => Term::B1(inner),
                })
            }
            Some(Tok::Word(_)) => Ok(Term::Var(self.name()?)),
            _ => self.err("expected a term"),
        }
    }

    fn done(&self) -> Result<(), GoedelError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }
}

fn parser(s: &str) -> Result<Parser, GoedelError> {
    Ok(Parser {
        toks: lex(s)?,
        pos: 0,
        end_col: s.len() + 1,
    })
}

pub fn parse_formula(s: &str) -> Result<Formula, GoedelError> {
    let mut p = parser(s)?;
    let f = p.formula()?;
    p.done()?;
    Ok(f)
}

pub fn parse_term(s: &str) -> Result<Term, GoedelError> {
    let mut p = parser(s)?;
    let t = p.term()?;
    p.done()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{arb_formula, arb_term};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn printing() {
        let f = parse_formula("~Prov(x + #3) & forall y. y = y * (S(0) + D(y))").unwrap();
        assert_eq!(
            f.to_string(),
            "~Prov(x + #3) & (forall y. y = y * (S(0) + D(y)))"
        );
        assert_eq!(parse_term("b1(b1(0))").unwrap().to_string(), "#3");
        assert_eq!(parse_term("b0(0)").unwrap().to_string(), "b0(0)");
        assert_eq!(
            parse_formula("p = q -> r = s -> t = u")
                .unwrap()
                .to_string(),
            "p = q -> r = s -> t = u"
        );
    }

    #[test]
    fn parse_errors_have_columns() {
        assert!(matches!(
            parse_formula("x = "),
            Err(GoedelError::Parse { col: 5, .. })
        ));
        assert!(matches!(
            parse_formula("x = y $"),
            Err(GoedelError::Parse { col: 7, .. })
        ));
        assert!(parse_formula("forall 9. x = x").is_err());
        assert!(parse_term("#").is_err());
    }

    proptest! {
        #[test]
        fn formula_text_round_trips(f in arb_formula(5)) {
            prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn term_text_round_trips(t in arb_term()) {
            prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
    }
}
