//! First-order arithmetic syntax with a positional Gödel numbering.
//!
//! Serialization is prefix (Polish) order over a 54-symbol alphabet:
//!
//! | value | symbol  | value | symbol  | value | symbol   |
//! |-------|---------|-------|---------|-------|----------|
//! | 1     | `0`     | 7     | `*`     | 13    | `\|`     |
//! | 2     | `b0`    | 8     | `D`     | 14    | `->`     |
//! | 3     | `b1`    | 9     | `=`     | 15    | `forall` |
//! | 4     | var     | 10    | `Prov`  | 16    | `exists` |
//! | 5     | `S`     | 11    | `~`     | 17    | end      |
//! | 6     | `+`     | 12    | `&`     | 18–54 | `a`–`z`, `0`–`9`, `_` |
//!
//! A variable is `var c₁ … cₖ end` with a name matching `[a-z][a-z0-9_]*`;
//! a quantifier is followed by such a name (without the leading `var`) and
//! then its body. The code of a symbol string `s₁ … sₗ` is its bijective
//! base-54 reading `Σ sᵢ · 54^(l-i)`, so every positive integer spells
//! exactly one symbol string. The term `0` has code 1.

mod diag;
mod syntax;

pub use diag::{
    delta, denote, diagonalize, matryoshka_family, numeral, self_subst, DiagonalCertificate,
    MatryoshkaMember,
};
pub use syntax::{parse_formula, parse_term};

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero as _};
use thiserror::Error;

pub const ALPHABET_SIZE: u32 = 54;

const S_ZERO: u8 = 1;
const S_B0: u8 = 2;
const S_B1: u8 = 3;
const S_VAR: u8 = 4;
const S_SUCC: u8 = 5;
const S_PLUS: u8 = 6;
const S_TIMES: u8 = 7;
const S_DIAG: u8 = 8;
const S_EQ: u8 = 9;
const S_PROV: u8 = 10;
const S_NOT: u8 = 11;
const S_AND: u8 = 12;
const S_OR: u8 = 13;
const S_IMPLIES: u8 = 14;
const S_FORALL: u8 = 15;
const S_EXISTS: u8 = 16;
const S_END: u8 = 17;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    /// `2·t`
    B0(Box<Term>),
    /// `2·t + 1`
    B1(Box<Term>),
    Var(String),
    Succ(Box<Term>),
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
    /// Self-substitution, interpreted as [`delta`].
    Diag(Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Prov(Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoedelCode(pub BigUint);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoedelError {
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("expected exactly one free variable, found {{{}}}", .0.join(", "))]
    Arity(Vec<String>),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("parse error at column {col}: {reason}")]
    Parse { col: usize, reason: String },
}

pub fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

fn name_symbol(c: char) -> u8 {
    match c {
        'a'..='z' => 18 + (c as u8 - b'a'),
        '0'..='9' => 44 + (c as u8 - b'0'),
        _ => 54,
    }
}

fn symbol_char(s: u8) -> Option<char> {
    match s {
        18..=43 => Some((b'a' + s - 18) as char),
        44..=53 => Some((b'0' + s - 44) as char),
        54 => Some('_'),
        _ => None,
    }
}

/// Syntax that has a symbol serialization.
pub trait Syntax {
    fn write_symbols(&self, out: &mut Vec<u8>);

    fn symbols(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_symbols(&mut out);
        out
    }

    /// Length of the serialization, in symbols.
    fn size(&self) -> usize {
        self.symbols().len()
    }
}

fn write_name(name: &str, out: &mut Vec<u8>) {
    out.extend(name.chars().map(name_symbol));
    out.push(S_END);
}

impl Syntax for Term {
    fn write_symbols(&self, out: &mut Vec<u8>) {
        match self {
            Term::Zero => out.push(S_ZERO),
            Term::B0(t) => {
                out.push(S_B0);
                t.write_symbols(out)
            }
            Term::B1(t) => {
                out.push(S_B1);
                t.write_symbols(out)
            }
            Term::Var(v) => {
                out.push(S_VAR);
                write_name(v, out)
            }
            Term::Succ(t) => {
                out.push(S_SUCC);
                t.write_symbols(out)
            }
            Term::Plus(a, b) | Term::Times(a, b) => {
                out.push(if matches!(self, Term::Plus(..)) {
                    S_PLUS
                } else {
                    S_TIMES
                });
                a.write_symbols(out);
                b.write_symbols(out)
            }
            Term::Diag(t) => {
                out.push(S_DIAG);
                t.write_symbols(out)
            }
        }
    }
}

impl Syntax for Formula {
    fn write_symbols(&self, out: &mut Vec<u8>) {
        match self {
            Formula::Eq(a, b) => {
                out.push(S_EQ);
                a.write_symbols(out);
                b.write_symbols(out)
            }
            Formula::Prov(t) => {
                out.push(S_PROV);
                t.write_symbols(out)
            }
            Formula::Not(f) => {
                out.push(S_NOT);
                f.write_symbols(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                out.push(match self {
                    Formula::And(..) => S_AND,
                    Formula::Or(..) => S_OR,
                    _ => S_IMPLIES,
                });
                a.write_symbols(out);
                b.write_symbols(out)
            }
            Formula::ForAll(v, f) | Formula::Exists(v, f) => {
                out.push(if matches!(self, Formula::ForAll(..)) {
                    S_FORALL
                } else {
                    S_EXISTS
                });
                write_name(v, out);
                f.write_symbols(out)
            }
        }
    }
}

/// Reads a symbol string as a bijective base-54 numeral.
pub fn code_of_symbols(symbols: &[u8]) -> GoedelCode {
    let base = BigUint::from(ALPHABET_SIZE);
    GoedelCode(
        symbols
            .iter()
            .fold(BigUint::zero(), |acc, &s| acc * &base + BigUint::from(s)),
    )
}

/// Inverse of [`code_of_symbols`]; zero spells the empty string.
pub fn symbols_of_code(g: &GoedelCode) -> Vec<u8> {
    let base = BigUint::from(ALPHABET_SIZE);
    let mut n = g.0.clone();
    let mut out = Vec::new();
    while !n.is_zero() {
        let d = ((&n - 1u32) % &base).to_u8().unwrap() + 1;
        out.push(d);
        n = (n - d) / &base;
    }
    out.reverse();
    out
}

pub fn code<T: Syntax + ?Sized>(x: &T) -> GoedelCode {
    code_of_symbols(&x.symbols())
}

struct Decoder<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Decoder<'_> {
    fn err(&self, reason: &str) -> GoedelError {
        GoedelError::InvalidCode(format!("{reason} at symbol {}", self.pos))
    }

    fn next(&mut self) -> Result<u8, GoedelError> {
        let s = *self.s.get(self.pos).ok_or_else(|| self.err("truncated"))?;
        self.pos += 1;
        Ok(s)
    }

    fn name(&mut self) -> Result<String, GoedelError> {
        let mut name = String::new();
        loop {
            match self.next()? {
                S_END => break,
                s => {
                    name.push(symbol_char(s).ok_or_else(|| self.err("expected a name character"))?)
                }
            }
        }
        if !valid_name(&name) {
            return Err(self.err("malformed variable name"));
        }
        Ok(name)
    }

    fn term(&mut self) -> Result<Term, GoedelError> {
        let bx = |t: Term| Box::new(t);
        Ok(match self.next()? {
            S_ZERO => Term::Zero,
            S_B0 => Term::B0(bx(self.term()?)),
            S_B1 => Term::B1(bx(self.term()?)),
            S_VAR => Term::Var(self.name()?),
            S_SUCC => Term::Succ(bx(self.term()?)),
            S_PLUS => Term::Plus(bx(self.term()?), bx(self.term()?)),
            S_TIMES => Term::Times(bx(self.term()?), bx(self.term()?)),
            S_DIAG => Term::Diag(bx(self.term()?)),
            _ => {
                return Err(GoedelError::InvalidCode(format!(
                    "expected a term at symbol {}",
                    self.pos - 1
                )))
            }
        })
    }

    fn formula(&mut self) -> Result<Formula, GoedelError> {
        let bx = |f: Formula| Box::new(f);
        Ok(match self.next()? {
            S_EQ => Formula::Eq(self.term()?, self.term()?),
            S_PROV => Formula::Prov(self.term()?),
            S_NOT => Formula::Not(bx(self.formula()?)),
            S_AND => Formula::And(bx(self.formula()?), bx(self.formula()?)),
            S_OR => Formula::Or(bx(self.formula()?), bx(self.formula()?)),
            S_IMPLIES => Formula::Implies(bx(self.formula()?), bx(self.formula()?)),
            S_FORALL => Formula::ForAll(self.name()?, bx(self.formula()?)),
            S_EXISTS => Formula::Exists(self.name()?, bx(self.formula()?)),
            _ => {
                return Err(GoedelError::InvalidCode(format!(
                    "expected a formula at symbol {}",
                    self.pos - 1
                )))
            }
        })
    }

    fn finish<T>(self, value: T) -> Result<T, GoedelError> {
        if self.pos != self.s.len() {
            return Err(self.err("trailing symbols"));
        }
        Ok(value)
    }
}

pub fn decode_formula(g: &GoedelCode) -> Result<Formula, GoedelError> {
    let s = symbols_of_code(g);
    let mut d = Decoder { s: &s, pos: 0 };
    let f = d.formula()?;
    d.finish(f)
}

pub fn decode_term(g: &GoedelCode) -> Result<Term, GoedelError> {
    let s = symbols_of_code(g);
    let mut d = Decoder { s: &s, pos: 0 };
    let t = d.term()?;
    d.finish(t)
}

impl Term {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Zero => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::B0(t) | Term::B1(t) | Term::Succ(t) | Term::Diag(t) => t.collect_vars(out),
            Term::Plus(a, b) | Term::Times(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out)
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Replaces every occurrence of `var` with `by`.
    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        let s = |t: &Term| Box::new(t.substitute(var, by));
        match self {
            Term::Zero => Term::Zero,
            Term::Var(v) if v == var => by.clone(),
            Term::Var(v) => Term::Var(v.clone()),
            Term::B0(t) => Term::B0(s(t)),
            Term::B1(t) => Term::B1(s(t)),
            Term::Succ(t) => Term::Succ(s(t)),
            Term::Diag(t) => Term::Diag(s(t)),
            Term::Plus(a, b) => Term::Plus(s(a), s(b)),
            Term::Times(a, b) => Term::Times(s(a), s(b)),
        }
    }
}

impl Formula {
    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let terms = |ts: &[&Term], out: &mut BTreeSet<String>| {
            for t in ts {
                out.extend(t.vars().into_iter().filter(|v| !bound.contains(v)));
            }
        };
        match self {
            Formula::Eq(a, b) => terms(&[a, b], out),
            Formula::Prov(t) => terms(&[t], out),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out)
            }
            Formula::ForAll(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    /// The unique free variable, or an arity error.
    pub fn sole_free_var(&self) -> Result<String, GoedelError> {
        let free = self.free_vars();
        if free.len() == 1 {
            Ok(free.into_iter().next().unwrap())
        } else {
            Err(GoedelError::Arity(free.into_iter().collect()))
        }
    }

    /// Replaces the free occurrences of `var` with `by`. Capture is not
    /// checked, so `by` should not mention variables bound in `self`.
    pub fn substitute(&self, var: &str, by: &Term) -> Formula {
        let s = |f: &Formula| Box::new(f.substitute(var, by));
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.substitute(var, by), b.substitute(var, by)),
            Formula::Prov(t) => Formula::Prov(t.substitute(var, by)),
            Formula::Not(f) => Formula::Not(s(f)),
            Formula::And(a, b) => Formula::And(s(a), s(b)),
            Formula::Or(a, b) => Formula::Or(s(a), s(b)),
            Formula::Implies(a, b) => Formula::Implies(s(a), s(b)),
            Formula::ForAll(v, f) if v == var => Formula::ForAll(v.clone(), f.clone()),
            Formula::Exists(v, f) if v == var => Formula::Exists(v.clone(), f.clone()),
            Formula::ForAll(v, f) => Formula::ForAll(v.clone(), s(f)),
            Formula::Exists(v, f) => Formula::Exists(v.clone(), s(f)),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn arb_name() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("x".to_string()),
            Just("y".to_string()),
            Just("z".to_string()),
            "[a-z][a-z0-9_]{0,3}"
        ]
        .prop_filter("keyword", |n| n != "forall" && n != "exists")
    }

    pub(crate) fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![Just(Term::Zero), arb_name().prop_map(Term::Var)];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::B0(Box::new(t))),
                inner.clone().prop_map(|t| Term::B1(Box::new(t))),
                inner.clone().prop_map(|t| Term::Succ(Box::new(t))),
                inner.clone().prop_map(|t| Term::Diag(Box::new(t))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::Plus(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Term::Times(Box::new(a), Box::new(b))),
            ]
        })
    }

    pub(crate) fn arb_formula(depth: u32) -> impl Strategy<Value = Formula> {
        let atom = prop_oneof![
            (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Eq(a, b)),
            arb_term().prop_map(Formula::Prov),
        ];
        atom.prop_recursive(depth, 32, 2, |inner| {
            let b = |f: Formula| Box::new(f);
            prop_oneof![
                inner.clone().prop_map(move |f| Formula::Not(b(f))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Formula::And(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Formula::Or(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Formula::Implies(b(x), b(y))),
                (arb_name(), inner.clone()).prop_map(move |(v, f)| Formula::ForAll(v, b(f))),
                (arb_name(), inner).prop_map(move |(v, f)| Formula::Exists(v, b(f))),
            ]
        })
    }

    #[test]
    fn code_of_zero_is_locked() {
        assert_eq!(code(&Term::Zero), GoedelCode(BigUint::from(1u32)));
        let x_eq_x = Formula::Eq(Term::Var("x".into()), Term::Var("x".into()));
        // [9, 4, 41, 17, 4, 41, 17]
        let expected = [9u32, 4, 41, 17, 4, 41, 17]
            .iter()
            .fold(0u64, |acc, &s| acc * 54 + u64::from(s));
        assert_eq!(code(&x_eq_x).0, BigUint::from(expected));
    }

    #[test]
    fn invalid_codes_rejected() {
        let bad = |n: u32| decode_formula(&GoedelCode(BigUint::from(n))).is_err();
        assert!(bad(0));
        assert!(bad(1)); // a term, not a formula
        assert!(decode_term(&GoedelCode(BigUint::from(1u32))).is_ok());
        // `Prov 0 0`: trailing symbol
        assert!(decode_formula(&code_of_symbols(&[S_PROV, S_ZERO, S_ZERO])).is_err());
        // variable named `9`
        assert!(decode_term(&code_of_symbols(&[S_VAR, 53, S_END])).is_err());
    }

    #[test]
    fn one_connective_changes_the_code() {
        let p = Formula::Prov(Term::Zero);
        let and = Formula::And(Box::new(p.clone()), Box::new(p.clone()));
        let or = Formula::Or(Box::new(p.clone()), Box::new(p));
        assert_ne!(code(&and), code(&or));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn formula_codes_round_trip(f in arb_formula(6)) {
            prop_assert_eq!(decode_formula(&code(&f)).unwrap(), f);
        }

        #[test]
        fn symbol_strings_round_trip(s in proptest::collection::vec(1u8..=54, 0..40)) {
            prop_assert_eq!(symbols_of_code(&code_of_symbols(&s)), s);
        }

        #[test]
        fn codes_are_injective(f in arb_formula(4), g in arb_formula(4)) {
            prop_assert_eq!(code(&f) == code(&g), f == g);
        }
    }
}
