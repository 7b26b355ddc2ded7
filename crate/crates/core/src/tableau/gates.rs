//! Tseitin gate construction with constant folding.
//!
//! Every gate output is a fresh variable fully defined by its inputs, so
//! unit propagation evaluates a circuit forward once its inputs are fixed.

use std::ops::Not;

use crate::cnf::{ClauseSink, Lit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Bit {
    Const(bool),
    Lit(Lit),
}

pub(crate) const FALSE: Bit = Bit::Const(false);
pub(crate) const TRUE: Bit = Bit::Const(true);

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        match self {
            Bit::Const(b) => Bit::Const(!b),
            Bit::Lit(l) => Bit::Lit(-l),
        }
    }
}

impl Bit {
    pub(crate) fn var(v: u32) -> Bit {
        Bit::Lit(v as Lit)
    }
}

pub(crate) struct Builder<'s, S: ClauseSink> {
    sink: &'s mut S,
    next_var: u32,
    clauses: usize,
    scratch: Vec<Lit>,
}

impl<'s, S: ClauseSink> Builder<'s, S> {
    pub(crate) fn new(sink: &'s mut S) -> Self {
        Builder {
            sink,
            next_var: 0,
            clauses: 0,
            scratch: Vec::new(),
        }
    }

    pub(crate) fn num_vars(&self) -> u32 {
        self.next_var
    }

    pub(crate) fn num_clauses(&self) -> usize {
        self.clauses
    }

    pub(crate) fn fresh(&mut self) -> u32 {
        self.next_var += 1;
        self.next_var
    }

    pub(crate) fn fresh_bits(&mut self, n: usize) -> Vec<u32> {
        (0..n).map(|_| self.fresh()).collect()
    }

    /// Emits a clause, dropping false constants and skipping satisfied ones.
    pub(crate) fn clause(&mut self, bits: &[Bit]) {
        self.scratch.clear();
        for &b in bits {
            match b {
                Bit::Const(true) => return,
                Bit::Const(false) => {}
                Bit::Lit(l) => self.scratch.push(l),
            }
        }
        self.clauses += 1;
        self.sink.add_clause(&self.scratch);
    }

    /// A fresh variable constrained equal to `b`.
    pub(crate) fn define(&mut self, b: Bit) -> u32 {
        let v = self.fresh();
        let x = Bit::var(v);
        match b {
            Bit::Const(c) => self.clause(&[if c { x } else { !x }]),
            Bit::Lit(_) => {
                self.clause(&[!x, b]);
                self.clause(&[x, !b]);
            }
        }
        v
    }

    pub(crate) fn and(&mut self, xs: &[Bit]) -> Bit {
        let mut lits: Vec<Lit> = Vec::with_capacity(xs.len());
        for &x in xs {
            match x {
                Bit::Const(false) => return FALSE,
                Bit::Const(true) => {}
                Bit::Lit(l) => {
                    if lits.contains(&-l) {
                        return FALSE;
                    }
                    if !lits.contains(&l) {
                        lits.push(l);
                    }
                }
            }
        }
        match lits.len() {
            0 => TRUE,
            1 => Bit::Lit(lits[0]),
            _ => {
                let y = Bit::var(self.fresh());
                for &l in &lits {
                    self.clause(&[!y, Bit::Lit(l)]);
                }
                let mut big: Vec<Bit> = lits.iter().map(|&l| Bit::Lit(-l)).collect();
                big.push(y);
                self.clause(&big);
                y
            }
        }
    }

    pub(crate) fn and2(&mut self, a: Bit, b: Bit) -> Bit {
        self.and(&[a, b])
    }

    pub(crate) fn or(&mut self, xs: &[Bit]) -> Bit {
        let negated: Vec<Bit> = xs.iter().map(|&x| !x).collect();
        !self.and(&negated)
    }

    pub(crate) fn or2(&mut self, a: Bit, b: Bit) -> Bit {
        self.or(&[a, b])
    }

    pub(crate) fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), other) | (other, Bit::Const(x)) => {
                if x {
                    !other
                } else {
                    other
                }
            }
            _ if a == b => FALSE,
            _ if a == !b => TRUE,
            _ => {
                let y = Bit::var(self.fresh());
                self.clause(&[!y, a, b]);
                self.clause(&[!y, !a, !b]);
                self.clause(&[y, !a, b]);
                self.clause(&[y, a, !b]);
                y
            }
        }
    }

    /// `s ? a : b`
    pub(crate) fn mux(&mut self, s: Bit, a: Bit, b: Bit) -> Bit {
        match s {
            Bit::Const(true) => return a,
            Bit::Const(false) => return b,
            _ => {}
        }
        if a == b {
            return a;
        }
        match (a, b) {
            (Bit::Const(true), Bit::Const(false)) => return s,
            (Bit::Const(false), Bit::Const(true)) => return !s,
            (Bit::Const(_), _) | (_, Bit::Const(_)) => {
                let l = self.and2(s, a);
                let r = self.and2(!s, b);
                return self.or2(l, r);
            }
            _ => {}
        }
        let y = Bit::var(self.fresh());
        self.clause(&[!s, !a, y]);
        self.clause(&[!s, a, !y]);
        self.clause(&[s, !b, y]);
        self.clause(&[s, b, !y]);
        y
    }

    fn majority(&mut self, a: Bit, b: Bit, c: Bit) -> Bit {
        let consts = [a, b, c]
            .iter()
            .filter(|x| matches!(x, Bit::Const(_)))
            .count();
        if consts > 0 {
            let ab = self.and2(a, b);
            let ac = self.and2(a, c);
            let bc = self.and2(b, c);
            return self.or(&[ab, ac, bc]);
        }
        let y = Bit::var(self.fresh());
        self.clause(&[!a, !b, y]);
        self.clause(&[!a, !c, y]);
        self.clause(&[!b, !c, y]);
        self.clause(&[a, b, !y]);
        self.clause(&[a, c, !y]);
        self.clause(&[b, c, !y]);
        y
    }

    /// Ripple-carry `a + b + carry_in`, truncated to the operand width.
    pub(crate) fn add(&mut self, a: &[Bit], b: &[Bit], carry_in: Bit) -> Vec<Bit> {
        debug_assert_eq!(a.len(), b.len());
        let mut carry = carry_in;
        let mut out = Vec::with_capacity(a.len());
        for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
            let half = self.xor(x, y);
            out.push(self.xor(half, carry));
            if i + 1 < a.len() {
                carry = self.majority(x, y, carry);
            }
        }
        out
    }

    /// `a - b` modulo `2^len`.
    pub(crate) fn sub(&mut self, a: &[Bit], b: &[Bit]) -> Vec<Bit> {
        let nb: Vec<Bit> = b.iter().map(|&x| !x).collect();
        self.add(a, &nb, TRUE)
    }

    pub(crate) fn eq(&mut self, a: &[Bit], b: &[Bit]) -> Bit {
        debug_assert_eq!(a.len(), b.len());
        let diffs: Vec<Bit> = a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect();
        !self.or(&diffs)
    }

    /// `bits == c`, bits least significant first.
    pub(crate) fn eq_const(&mut self, bits: &[Bit], c: u64) -> Bit {
        if bits.len() < 64 && c >> bits.len() != 0 {
            return FALSE;
        }
        let lits: Vec<Bit> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| if c >> i & 1 == 1 { b } else { !b })
            .collect();
        self.and(&lits)
    }

    /// Unsigned `bits < c`, bits least significant first.
    pub(crate) fn lt_const(&mut self, bits: &[Bit], c: u64) -> Bit {
        if bits.len() < 64 && c >> bits.len() != 0 {
            return TRUE;
        }
        // scan from the least significant bit up: lt_i is the answer for bits[..=i]
        let mut lt = FALSE;
        for (i, &b) in bits.iter().enumerate() {
            lt = if c >> i & 1 == 1 {
                self.or2(!b, lt)
            } else {
                self.and2(!b, lt)
            };
        }
        lt
    }
}

pub(crate) fn const_bits(value: u64, width: usize) -> Vec<Bit> {
    (0..width)
        .map(|i| Bit::Const(i < 64 && value >> i & 1 == 1))
        .collect()
}

pub(crate) fn var_bits(vars: &[u32]) -> Vec<Bit> {
    vars.iter().map(|&v| Bit::var(v)).collect()
}
