//! Fixed points in a finite instance space with stipulated meanings.
//!
//! Each formula of a [`FiniteSpace`] is read as a claim about the classifier:
//! "S outputs `asserted` on formula `target`". Under this reading a formula
//! counts as SAT exactly when its claim holds. A fixed point is a formula that
//! claims the classifier rejects it; whatever a table answers there, the
//! answer makes the claim come out the other way.
//!
//! The stipulated reading can disagree with real CNF semantics (`¬p` is
//! satisfiable even when it is read as UNSAT); reports carry both.

use std::fmt::Write as _;

use crate::cnf::{solve_dpll, CnfFormula, VerdictTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claim {
    pub target: usize,
    pub asserted: VerdictTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    pub names: Vec<String>,
    pub formulas: Vec<CnfFormula>,
    pub claims: Vec<Claim>,
}

/// A total classifier over a finite space, as its table of answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifierTable {
    pub verdicts: Vec<VerdictTag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    /// The classifier's answer assumed in this branch.
    pub assumed: VerdictTag,
    /// The status of the fixed point implied by that answer.
    pub implied: VerdictTag,
    pub fails: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteReport {
    pub fixed_point: Option<usize>,
    /// Both hypothetical answers at the fixed point, SAT first.
    pub branches: Option<[Branch; 2]>,
    pub table_verdict: Option<VerdictTag>,
    /// Status of the fixed point under the stipulated reading, given the table.
    pub stipulated_status: Option<VerdictTag>,
    /// Status of the fixed point as a CNF formula.
    pub actual_status: Option<VerdictTag>,
    pub misclassified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("space needs matching formula, name and claim lists")]
    Shape,
    #[error("claim of formula {index} targets {target}, outside the space")]
    TargetOutOfRange { index: usize, target: usize },
    #[error("table has {found} verdicts for a space of {expected}")]
    TableArity { expected: usize, found: usize },
}

impl FiniteSpace {
    pub fn new(
        names: Vec<String>,
        formulas: Vec<CnfFormula>,
        claims: Vec<Claim>,
    ) -> Result<Self, SpaceError> {
        if names.len() != formulas.len() || formulas.len() != claims.len() {
            return Err(SpaceError::Shape);
        }
        for (index, c) in claims.iter().enumerate() {
            if c.target >= claims.len() {
                return Err(SpaceError::TargetOutOfRange {
                    index,
                    target: c.target,
                });
            }
        }
        Ok(FiniteSpace {
            names,
            formulas,
            claims,
        })
    }

    /// `{p, ¬p}`: `p` says the classifier accepts `¬p`, `¬p` says it rejects
    /// `¬p`.
    pub fn two_formula() -> Self {
        Self::self_describing(2)
    }

    /// The `k`-formula generalisation of [`FiniteSpace::two_formula`]:
    /// formula `i < k - 1` claims the classifier accepts formula `i + 1`, and
    /// the last formula claims the classifier rejects it.
    ///
    /// Formulas are `p`, `¬p`, then `p ∧ ¬p ∧ x2 ∧ … ∧ x(i-1)` for `i ≥ 2`.
    pub fn self_describing(k: usize) -> Self {
        assert!(
            k >= 2,
            "a self-describing space needs at least two formulas"
        );
        let mut names = Vec::with_capacity(k);
        let mut formulas = Vec::with_capacity(k);
        let mut claims = Vec::with_capacity(k);
        for i in 0..k {
            let (name, f) = match i {
                0 => ("p".to_string(), CnfFormula::new(1, vec![vec![1]]).unwrap()),
                1 => (
                    "~p".to_string(),
                    CnfFormula::new(1, vec![vec![-1]]).unwrap(),
                ),
                _ => {
                    let mut clauses = vec![vec![1], vec![-1]];
                    let mut name = "p & ~p".to_string();
                    for v in 2..i as i32 {
                        clauses.push(vec![v]);
                        let _ = write!(name, " & x{v}");
                    }
                    (name, CnfFormula::new((i as u32).max(1), clauses).unwrap())
                }
            };
            names.push(name);
            formulas.push(f);
            claims.push(if i + 1 < k {
                Claim {
                    target: i + 1,
                    asserted: VerdictTag::Sat,
                }
            } else {
                Claim {
                    target: i,
                    asserted: VerdictTag::Unsat,
                }
            });
        }
        FiniteSpace {
            names,
            formulas,
            claims,
        }
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    /// First formula whose claim says the classifier rejects that formula.
    pub fn fixed_point(&self) -> Option<usize> {
        self.claims
            .iter()
            .enumerate()
            .find(|(i, c)| c.target == *i && c.asserted == VerdictTag::Unsat)
            .map(|(i, _)| i)
    }

    /// Status of formula `i` under the stipulated reading.
    pub fn stipulated_status(&self, table: &ClassifierTable, i: usize) -> VerdictTag {
        let c = self.claims[i];
        if table.verdicts[c.target] == c.asserted {
            VerdictTag::Sat
        } else {
            VerdictTag::Unsat
        }
    }
}

impl ClassifierTable {
    /// All `2^k` tables over a `k`-element space; bit `i` of the index set
    /// means formula `i` is answered UNSAT.
    pub fn all(k: usize) -> Vec<ClassifierTable> {
        (0..1u64 << k)
            .map(|mask| ClassifierTable {
                verdicts: (0..k)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            VerdictTag::Unsat
                        } else {
                            VerdictTag::Sat
                        }
                    })
                    .collect(),
            })
            .collect()
    }
}

pub fn finite_fixed_point(
    space: &FiniteSpace,
    table: &ClassifierTable,
) -> Result<FiniteReport, SpaceError> {
    if table.verdicts.len() != space.len() {
        return Err(SpaceError::TableArity {
            expected: space.len(),
            found: table.verdicts.len(),
        });
    }
    let Some(i) = space.fixed_point() else {
        return Ok(FiniteReport {
            fixed_point: None,
            branches: None,
            table_verdict: None,
            stipulated_status: None,
            actual_status: None,
            misclassified: false,
        });
    };
    let claim = space.claims[i];
    let branch = |assumed: VerdictTag| {
        let implied = if assumed == claim.asserted {
            VerdictTag::Sat
        } else {
            VerdictTag::Unsat
        };
        Branch {
            assumed,
            implied,
            fails: implied != assumed,
        }
    };
    let status = space.stipulated_status(table, i);
    let verdict = table.verdicts[i];
    Ok(FiniteReport {
        fixed_point: Some(i),
        branches: Some([branch(VerdictTag::Sat), branch(VerdictTag::Unsat)]),
        table_verdict: Some(verdict),
        stipulated_status: Some(status),
        actual_status: Some(solve_dpll(&space.formulas[i]).tag()),
        misclassified: status != verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use VerdictTag::{Sat, Unsat};

    #[test]
    fn two_formula_space_fixed_point_is_not_p() {
        let space = FiniteSpace::two_formula();
        assert_eq!(space.fixed_point(), Some(1));
        assert_eq!(space.names[1], "~p");
        let table = ClassifierTable {
            verdicts: vec![Sat, Unsat],
        };
        let r = finite_fixed_point(&space, &table).unwrap();
        assert!(r.misclassified);
        let [a, b] = r.branches.unwrap();
        assert_eq!((a.assumed, a.implied, a.fails), (Sat, Unsat, true));
        assert_eq!((b.assumed, b.implied, b.fails), (Unsat, Sat, true));
        assert_eq!(r.stipulated_status, Some(Sat));
        assert_eq!(r.actual_status, Some(Sat));
    }

    #[test]
    fn every_table_fails_on_small_spaces() {
        for k in 2..=4 {
            let space = FiniteSpace::self_describing(k);
            for table in ClassifierTable::all(k) {
                assert!(finite_fixed_point(&space, &table).unwrap().misclassified);
            }
        }
    }

    #[test]
    fn no_reflexive_claim_no_fixed_point() {
        let f = CnfFormula::new(1, vec![vec![1]]).unwrap();
        let space = FiniteSpace::new(
            vec!["a".into(), "b".into()],
            vec![f.clone(), f],
            vec![
                Claim {
                    target: 1,
                    asserted: Unsat,
                },
                Claim {
                    target: 0,
                    asserted: Unsat,
                },
            ],
        )
        .unwrap();
        let r = finite_fixed_point(
            &space,
            &ClassifierTable {
                verdicts: vec![Sat, Sat],
            },
        )
        .unwrap();
        assert_eq!(r.fixed_point, None);
        assert!(!r.misclassified);
    }

    #[test]
    fn bad_spaces_rejected() {
        let f = CnfFormula::new(1, vec![vec![1]]).unwrap();
        let err = FiniteSpace::new(
            vec!["a".into()],
            vec![f],
            vec![Claim {
                target: 3,
                asserted: Sat,
            }],
        )
        .unwrap_err();
        assert_eq!(
            err,
            SpaceError::TargetOutOfRange {
                index: 0,
                target: 3
            }
        );
        let space = FiniteSpace::two_formula();
        let table = ClassifierTable {
            verdicts: vec![Sat],
        };
        assert!(finite_fixed_point(&space, &table).is_err());
    }
}
