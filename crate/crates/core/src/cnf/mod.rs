//! CNF formulas over dense positive-integer variables.
//!
//! Literals follow the DIMACS convention: `v` is the positive literal of
//! variable `v`, `-v` its negation. Clause order and literal order are kept
//! exactly as given so that serialization is deterministic.

mod dimacs;
mod solve;

pub use dimacs::{parse_dimacs, write_dimacs, write_dimacs_to, DimacsError, DimacsPrefix};
pub use solve::{solve_dpll, solve_exhaustive, solve_exhaustive_with_cap, EXHAUSTIVE_CAP};

use std::fmt;

use thiserror::Error;

/// A DIMACS literal: nonzero, sign is polarity.
pub type Lit = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("literal {lit} in clause {clause} is outside 1..={num_vars}")]
    LiteralOutOfRange {
        clause: usize,
        lit: Lit,
        num_vars: u32,
    },
    #[error("assignment covers {got} variables, formula has {expected}")]
    ArityMismatch { expected: u32, got: usize },
    #[error("exhaustive search cap is {cap} variables, formula has {num_vars}")]
    CapExceeded { cap: u32, num_vars: u32 },
}

/// Receives clauses from an encoder without committing to a storage strategy.
pub trait ClauseSink {
    fn add_clause(&mut self, lits: &[Lit]);
}

impl ClauseSink for Vec<Vec<Lit>> {
    fn add_clause(&mut self, lits: &[Lit]) {
        self.push(lits.to_vec());
    }
}

/// A conjunction of clauses over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Vec<Lit>>) -> Result<Self, CnfError> {
        for (idx, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() > num_vars {
                    return Err(CnfError::LiteralOutOfRange {
                        clause: idx,
                        lit,
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Empty formula over `num_vars` variables.
    pub fn with_vars(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn push_clause(&mut self, clause: Vec<Lit>) -> Result<(), CnfError> {
        if let Some(&lit) = clause
            .iter()
            .find(|l| **l == 0 || l.unsigned_abs() > self.num_vars)
        {
            return Err(CnfError::LiteralOutOfRange {
                clause: self.clauses.len(),
                lit,
                num_vars: self.num_vars,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Removes and returns the clause at `idx`. Mostly useful for building
    /// tampered variants of a formula in tests.
    pub fn remove_clause(&mut self, idx: usize) -> Vec<Lit> {
        self.clauses.remove(idx)
    }

    pub fn into_clauses(self) -> Vec<Vec<Lit>> {
        self.clauses
    }
}

/// Total truth assignment over variables `1..=len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all_false(num_vars: u32) -> Self {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    /// Builds an assignment from a model given as literals. Variables not
    /// mentioned default to false.
    pub fn from_literals(num_vars: u32, lits: &[Lit]) -> Result<Self, CnfError> {
        let mut values = vec![false; num_vars as usize];
        for (idx, &lit) in lits.iter().enumerate() {
            if lit == 0 || lit.unsigned_abs() > num_vars {
                return Err(CnfError::LiteralOutOfRange {
                    clause: idx,
                    lit,
                    num_vars,
                });
            }
            values[lit.unsigned_abs() as usize - 1] = lit > 0;
        }
        Ok(Assignment { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of variable `var` (1-based).
    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = value;
    }

    pub fn satisfies(&self, lit: Lit) -> bool {
        self.value(lit.unsigned_abs()) == (lit > 0)
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// The model as signed literals `1..=len`, one per variable.
    pub fn to_literals(&self) -> Vec<Lit> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| if v { i as Lit + 1 } else { -(i as Lit + 1) })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerdictTag {
    Sat,
    Unsat,
}

impl VerdictTag {
    pub fn negate(self) -> Self {
        match self {
            VerdictTag::Sat => VerdictTag::Unsat,
            VerdictTag::Unsat => VerdictTag::Sat,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictTag::Sat => "SAT",
            VerdictTag::Unsat => "UNSAT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "SAT" => Some(VerdictTag::Sat),
            "UNSAT" => Some(VerdictTag::Unsat),
            _ => None,
        }
    }
}

impl fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a satisfiability check. A `Sat` verdict always carries its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(Assignment),
    Unsat,
}

impl Verdict {
    pub fn tag(&self) -> VerdictTag {
        match self {
            Verdict::Sat(_) => VerdictTag::Sat,
            Verdict::Unsat => VerdictTag::Unsat,
        }
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            Verdict::Sat(a) => Some(a),
            Verdict::Unsat => None,
        }
    }
}

/// True iff every clause has a literal satisfied by `a`.
pub fn eval(f: &CnfFormula, a: &Assignment) -> Result<bool, CnfError> {
    if a.len() != f.num_vars as usize {
        return Err(CnfError::ArityMismatch {
            expected: f.num_vars,
            got: a.len(),
        });
    }
    Ok(f.clauses.iter().all(|c| c.iter().any(|&l| a.satisfies(l))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(num_vars: u32, clauses: &[&[Lit]]) -> CnfFormula {
        CnfFormula::new(num_vars, clauses.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn eval_simple_clause_check() {
        let phi = f(2, &[&[1, -2], &[2]]);
        assert!(eval(&phi, &Assignment::new(vec![true, true])).unwrap());
        assert!(!eval(&phi, &Assignment::new(vec![false, true])).unwrap());
    }

    #[test]
    fn empty_conjunction_is_true() {
        let phi = CnfFormula::with_vars(3);
        assert!(eval(&phi, &Assignment::all_false(3)).unwrap());
    }

    #[test]
    fn empty_clause_is_false() {
        let phi = f(1, &[&[1], &[]]);
        assert!(!eval(&phi, &Assignment::new(vec![true])).unwrap());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let phi = f(2, &[&[1]]);
        assert_eq!(
            eval(&phi, &Assignment::all_false(3)),
            Err(CnfError::ArityMismatch {
                expected: 2,
                got: 3
            })
        );
    }

    #[test]
    fn out_of_range_literal_rejected() {
        assert!(matches!(
            CnfFormula::new(2, vec![vec![1, 3]]),
            Err(CnfError::LiteralOutOfRange { lit: 3, .. })
        ));
        assert!(CnfFormula::new(2, vec![vec![0]]).is_err());
    }

    #[test]
    fn assignment_literal_round_trip() {
        let a = Assignment::new(vec![true, false, true]);
        assert_eq!(a.to_literals(), vec![1, -2, 3]);
        assert_eq!(Assignment::from_literals(3, &a.to_literals()).unwrap(), a);
    }
}
