//! DIMACS-CNF reading and writing.
//!
//! The writer is byte-deterministic: header `p cnf <vars> <clauses>`, then one
//! clause per line with literals separated by single spaces and a trailing
//! `0`. The reader additionally accepts comment lines, blank lines, clauses
//! spanning several lines and a SATLIB-style `%` end marker.

use std::fmt::Write as _;
use std::io;

use thiserror::Error;

use super::{ClauseSink, CnfFormula, Lit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: clause data before the `p cnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {lit} outside 1..={num_vars}")]
    LiteralOutOfRange {
        line: usize,
        lit: i64,
        num_vars: u32,
    },
    #[error("line {line}: last clause is not terminated by 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: header declares {expected} clauses, found {found}")]
    ClauseCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
}

impl DimacsError {
    pub fn line(&self) -> usize {
        match self {
            DimacsError::MalformedHeader { line, .. }
            | DimacsError::MissingHeader { line }
            | DimacsError::InvalidToken { line, .. }
            | DimacsError::LiteralOutOfRange { line, .. }
            | DimacsError::MissingTerminator { line }
            | DimacsError::ClauseCountMismatch { line, .. } => *line,
        }
    }
}

fn push_clause_line(out: &mut String, clause: &[Lit]) {
    for &lit in clause {
        let _ = write!(out, "{lit} ");
    }
    out.push_str("0\n");
}

pub fn write_dimacs(f: &CnfFormula) -> String {
    let mut out = String::with_capacity(16 + f.num_clauses() * 12);
    let _ = writeln!(out, "p cnf {} {}", f.num_vars(), f.num_clauses());
    for clause in f.clauses() {
        push_clause_line(&mut out, clause);
    }
    out
}

pub fn write_dimacs_to<W: io::Write>(f: &CnfFormula, mut w: W) -> io::Result<()> {
    writeln!(w, "p cnf {} {}", f.num_vars(), f.num_clauses())?;
    let mut line = String::new();
    for clause in f.clauses() {
        line.clear();
        push_clause_line(&mut line, clause);
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(u32, usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::MalformedHeader {
                    line: line_no,
                    reason: "duplicate header".into(),
                });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::MalformedHeader {
                    line: line_no,
                    reason: "expected `p cnf <vars> <clauses>`".into(),
                });
            }
            let vars = parts[2]
                .parse::<u32>()
                .ok()
                .filter(|v| *v <= i32::MAX as u32);
            let count = parts[3].parse::<usize>().ok();
            match (vars, count) {
                (Some(v), Some(c)) => header = Some((v, c, line_no)),
                _ => {
                    return Err(DimacsError::MalformedHeader {
                        line: line_no,
                        reason: "counts must be non-negative integers".into(),
                    })
                }
            }
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(DimacsError::MissingHeader { line: line_no });
        };
        for token in line.split_whitespace() {
            let lit: i64 = token.parse().map_err(|_| DimacsError::InvalidToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > u64::from(num_vars) {
                return Err(DimacsError::LiteralOutOfRange {
                    line: line_no,
                    lit,
                    num_vars,
                });
            } else {
                current.push(lit as Lit);
            }
        }
    }
    let Some((num_vars, expected, header_line)) = header else {
        return Err(DimacsError::MalformedHeader {
            line: last_line.max(1),
            reason: "no `p cnf` header".into(),
        });
    };
    if !current.is_empty() {
        return Err(DimacsError::MissingTerminator { line: last_line });
    }
    if clauses.len() != expected {
        return Err(DimacsError::ClauseCountMismatch {
            line: header_line,
            expected,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses).expect("literals range-checked during parsing"))
}

/// Clause sink that records the exact DIMACS text an encoder would produce,
/// materializing only the first `limit` bytes of the clause body.
///
/// The header depends on the final counts, so it can only be assembled once
/// the encoder has finished; [`DimacsPrefix::finish`] does that.
#[derive(Debug, Clone)]
pub struct DimacsPrefix {
    limit: usize,
    body: String,
    body_len: usize,
    num_clauses: usize,
    scratch: String,
}

impl DimacsPrefix {
    pub fn new(limit: usize) -> Self {
        DimacsPrefix {
            limit,
            body: String::new(),
            body_len: 0,
            num_clauses: 0,
            scratch: String::new(),
        }
    }

    /// Returns the materialized prefix of the whole document (header
    /// included) and the length the full document would have.
    pub fn finish(self, num_vars: u32) -> (Vec<u8>, usize) {
        let header = format!("p cnf {} {}\n", num_vars, self.num_clauses);
        let total = header.len() + self.body_len;
        let mut bytes = header.into_bytes();
        bytes.extend_from_slice(self.body.as_bytes());
        (bytes, total)
    }
}

impl ClauseSink for DimacsPrefix {
    fn add_clause(&mut self, lits: &[Lit]) {
        self.num_clauses += 1;
        self.scratch.clear();
        push_clause_line(&mut self.scratch, lits);
        self.body_len += self.scratch.len();
        if self.body.len() < self.limit {
            let room = self.limit - self.body.len();
            let take = room.min(self.scratch.len());
            self.body.push_str(&self.scratch[..take]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn writer_format() {
        let f = CnfFormula::new(2, vec![vec![1, -2]]).unwrap();
        assert_eq!(write_dimacs(&f), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn reader_accepts_comments_and_split_clauses() {
        let text = "c hello\nc world\np cnf 3 2\n1 -2\n 3 0\n-1 0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.clauses(), &[vec![1, -2, 3], vec![-1]]);
    }

    #[test]
    fn out_of_range_literal_names_line() {
        let err = parse_dimacs("p cnf 2 1\n3 0\n").unwrap_err();
        assert_eq!(
            err,
            DimacsError::LiteralOutOfRange {
                line: 2,
                lit: 3,
                num_vars: 2
            }
        );
    }

    #[test]
    fn missing_terminator() {
        let err = parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err();
        assert!(matches!(err, DimacsError::MissingTerminator { line: 2 }));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(
            parse_dimacs("p dnf 2 1\n1 0\n"),
            Err(DimacsError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf x 1\n"),
            Err(DimacsError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("1 0\n"),
            Err(DimacsError::MissingHeader { line: 1 })
        ));
        assert!(matches!(
            parse_dimacs(""),
            Err(DimacsError::MalformedHeader { .. })
        ));
    }

    #[test]
    fn clause_count_checked() {
        let err = parse_dimacs("p cnf 2 2\n1 0\n").unwrap_err();
        assert!(matches!(
            err,
            DimacsError::ClauseCountMismatch {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn empty_clause_round_trips() {
        let f = CnfFormula::new(1, vec![vec![], vec![1]]).unwrap();
        let text = write_dimacs(&f);
        assert_eq!(text, "p cnf 1 2\n0\n1 0\n");
        assert_eq!(parse_dimacs(&text).unwrap(), f);
    }

    #[test]
    fn prefix_sink_matches_writer() {
        let clauses = vec![vec![1, -2], vec![2, 3, -1], vec![-3]];
        let f = CnfFormula::new(3, clauses.clone()).unwrap();
        let full = write_dimacs(&f);
        for limit in [0, 3, 7, 100] {
            let mut sink = DimacsPrefix::new(limit);
            for c in &clauses {
                sink.add_clause(c);
            }
            let (bytes, total) = sink.finish(3);
            assert_eq!(total, full.len());
            assert!(full.as_bytes().starts_with(&bytes));
            assert!(bytes.len() >= "p cnf 3 3\n".len() + limit.min(total - 10));
        }
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (0u32..30).prop_flat_map(|n| {
            let lits = if n == 0 {
                prop::collection::vec(Just(1i32), 0..1).boxed()
            } else {
                prop::collection::vec(
                    (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v }),
                    0..6,
                )
                .boxed()
            };
            let lits = lits.prop_map(move |c| if n == 0 { Vec::new() } else { c });
            prop::collection::vec(lits, 0..20).prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn read_write_identity(f in arb_formula()) {
            let text = write_dimacs(&f);
            prop_assert_eq!(parse_dimacs(&text).unwrap(), f.clone());
            let mut buf = Vec::new();
            write_dimacs_to(&f, &mut buf).unwrap();
            prop_assert_eq!(buf, text.into_bytes());
        }
    }
}
