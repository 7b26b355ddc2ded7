use super::{Assignment, CnfError, CnfFormula, Lit, Verdict};

/// Default variable cap for [`solve_exhaustive`].
pub const EXHAUSTIVE_CAP: u32 = 25;

/// Exhaustive enumeration with the default cap.
pub fn solve_exhaustive(f: &CnfFormula) -> Result<Verdict, CnfError> {
    solve_exhaustive_with_cap(f, EXHAUSTIVE_CAP)
}

/// Enumerates assignments in lexicographic order (`x1` most significant,
/// false before true) and returns the first satisfying one.
pub fn solve_exhaustive_with_cap(f: &CnfFormula, cap: u32) -> Result<Verdict, CnfError> {
    let n = f.num_vars();
    if n > cap || n > 63 {
        return Err(CnfError::CapExceeded {
            cap: cap.min(63),
            num_vars: n,
        });
    }
    if f.clauses().iter().any(|c| c.is_empty()) {
        return Ok(Verdict::Unsat);
    }
    // Bit (n - v) of the counter holds variable v.
    let bit = |lit: Lit| 1u64 << (n - lit.unsigned_abs());
    let masks: Vec<(u64, u64)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), &l| {
                if l > 0 {
                    (pos | bit(l), neg)
                } else {
                    (pos, neg | bit(l))
                }
            })
        })
        .collect();
    let total: u64 = 1u64 << n;
    for k in 0..total {
        if masks
            .iter()
            .all(|&(pos, neg)| k & pos != 0 || !k & neg != 0)
        {
            let values = (1..=n).map(|v| k & (1u64 << (n - v)) != 0).collect();
            return Ok(Verdict::Sat(Assignment::new(values)));
        }
    }
    Ok(Verdict::Unsat)
}

/// DPLL with two-watched-literal unit propagation and chronological
/// backtracking. Branches on the lowest unassigned variable, true first.
pub fn solve_dpll(f: &CnfFormula) -> Verdict {
    Dpll::new(f).map_or(Verdict::Unsat, |mut s| s.solve())
}

const UNASSIGNED: i8 = 0;

#[inline]
fn code(lit: Lit) -> usize {
    (lit.unsigned_abs() as usize) << 1 | usize::from(lit < 0)
}

struct Level {
    trail_start: usize,
    decision: Lit,
    flipped: bool,
}

struct Dpll {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    values: Vec<i8>,
    trail: Vec<Lit>,
    qhead: usize,
    levels: Vec<Level>,
    cursor: usize,
    root_units: Vec<Lit>,
}

impl Dpll {
    /// Returns `None` when the formula contains an empty clause.
    fn new(f: &CnfFormula) -> Option<Self> {
        let num_vars = f.num_vars() as usize;
        let mut clauses = Vec::with_capacity(f.num_clauses());
        let mut root_units = Vec::new();
        let mut seen = vec![0u32; num_vars + 1];
        let mut stamp = 0u32;
        'outer: for clause in f.clauses() {
            stamp += 1;
            let mut lits = Vec::with_capacity(clause.len());
            for &l in clause {
                let v = l.unsigned_abs() as usize;
                let sign = if l > 0 { 1 } else { 2 };
                if seen[v] >> 2 == stamp {
                    let prev = seen[v] & 3;
                    if prev & sign == 0 {
                        // x and -x together
                        continue 'outer;
                    }
                    continue;
                }
                seen[v] = stamp << 2 | sign;
                lits.push(l);
            }
            match lits.len() {
                0 => return None,
                1 => root_units.push(lits[0]),
                _ => clauses.push(lits),
            }
        }
        let mut watches = vec![Vec::new(); (num_vars + 1) * 2];
        for (idx, c) in clauses.iter().enumerate() {
            watches[code(c[0])].push(idx);
            watches[code(c[1])].push(idx);
        }
        Some(Dpll {
            num_vars,
            clauses,
            watches,
            values: vec![UNASSIGNED; num_vars + 1],
            trail: Vec::with_capacity(num_vars),
            qhead: 0,
            levels: Vec::new(),
            cursor: 1,
            root_units,
        })
    }

    #[inline]
    fn lit_value(&self, lit: Lit) -> i8 {
        let v = self.values[lit.unsigned_abs() as usize];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    /// Returns false on conflict with an already-assigned opposite value.
    fn enqueue(&mut self, lit: Lit) -> bool {
        match self.lit_value(lit) {
            1 => true,
            -1 => false,
            _ => {
                self.values[lit.unsigned_abs() as usize] = if lit > 0 { 1 } else { -1 };
                self.trail.push(lit);
                true
            }
        }
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = -p;
            let mut ws = std::mem::take(&mut self.watches[code(false_lit)]);
            let mut i = 0;
            let mut conflict = false;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.values[first.unsigned_abs() as usize];
                    if first > 0 {
                        v
                    } else {
                        -v
                    }
                };
                if first_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.values[l.unsigned_abs() as usize];
                    let lv = if l > 0 { v } else { -v };
                    if lv != -1 {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[code(new_watch)].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if first_val == -1 {
                    conflict = true;
                    break;
                }
                self.values[first.unsigned_abs() as usize] = if first > 0 { 1 } else { -1 };
                self.trail.push(first);
                i += 1;
            }
            let slot = &mut self.watches[code(false_lit)];
            ws.append(slot);
            *slot = ws;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, trail_len: usize) {
        while self.trail.len() > trail_len {
            let lit = self.trail.pop().expect("trail longer than target");
            let v = lit.unsigned_abs() as usize;
            self.values[v] = UNASSIGNED;
            self.cursor = self.cursor.min(v);
        }
        self.qhead = trail_len;
    }

    fn next_unassigned(&mut self) -> Option<usize> {
        while self.cursor <= self.num_vars && self.values[self.cursor] != UNASSIGNED {
            self.cursor += 1;
        }
        (self.cursor <= self.num_vars).then_some(self.cursor)
    }

    /// Backtracks to the most recent unflipped decision and flips it.
    /// Returns false when the search space is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(level) = self.levels.pop() {
            self.undo_to(level.trail_start);
            if !level.flipped {
                let lit = -level.decision;
                self.levels.push(Level {
                    trail_start: self.trail.len(),
                    decision: lit,
                    flipped: true,
                });
                self.enqueue(lit);
                return true;
            }
        }
        false
    }

    fn solve(&mut self) -> Verdict {
        for lit in std::mem::take(&mut self.root_units) {
            if !self.enqueue(lit) {
                return Verdict::Unsat;
            }
        }
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return Verdict::Unsat;
                }
                continue;
            }
            match self.next_unassigned() {
                None => {
                    let values = self.values[1..].iter().map(|&v| v == 1).collect();
                    return Verdict::Sat(Assignment::new(values));
                }
                Some(var) => {
                    let lit = var as Lit;
                    self.levels.push(Level {
                        trail_start: self.trail.len(),
                        decision: lit,
                        flipped: false,
                    });
                    self.enqueue(lit);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{eval, VerdictTag};
    use proptest::prelude::*;

    fn f(num_vars: u32, clauses: &[&[Lit]]) -> CnfFormula {
        CnfFormula::new(num_vars, clauses.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn contradiction_is_unsat() {
        let phi = f(1, &[&[1], &[-1]]);
        assert_eq!(solve_exhaustive(&phi).unwrap(), Verdict::Unsat);
        assert_eq!(solve_dpll(&phi), Verdict::Unsat);
    }

    #[test]
    fn positive_unit_has_true_witness() {
        let phi = f(1, &[&[1]]);
        assert_eq!(
            solve_exhaustive(&phi).unwrap(),
            Verdict::Sat(Assignment::new(vec![true]))
        );
    }

    #[test]
    fn negative_unit_is_really_satisfiable() {
        let phi = f(1, &[&[-1]]);
        assert_eq!(
            solve_exhaustive(&phi).unwrap(),
            Verdict::Sat(Assignment::new(vec![false]))
        );
        assert_eq!(solve_dpll(&phi), Verdict::Sat(Assignment::new(vec![false])));
    }

    #[test]
    fn all_four_sign_patterns_unsat() {
        let phi = f(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert_eq!(solve_dpll(&phi), Verdict::Unsat);
        assert_eq!(solve_exhaustive(&phi).unwrap(), Verdict::Unsat);
    }

    #[test]
    fn exhaustive_picks_lexicographically_first() {
        // x1 or x2: first in order (F,F),(F,T),... is (F,T)
        let phi = f(2, &[&[1, 2]]);
        assert_eq!(
            solve_exhaustive(&phi).unwrap(),
            Verdict::Sat(Assignment::new(vec![false, true]))
        );
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let phi = CnfFormula::with_vars(26);
        assert_eq!(
            solve_exhaustive(&phi),
            Err(CnfError::CapExceeded {
                cap: 25,
                num_vars: 26
            })
        );
    }

    #[test]
    fn empty_clause_and_zero_vars() {
        assert_eq!(solve_dpll(&f(0, &[&[]])), Verdict::Unsat);
        assert_eq!(
            solve_dpll(&CnfFormula::with_vars(0)),
            Verdict::Sat(Assignment::new(vec![]))
        );
        assert_eq!(
            solve_exhaustive(&CnfFormula::with_vars(0)).unwrap().tag(),
            VerdictTag::Sat
        );
    }

    #[test]
    fn duplicate_and_tautological_literals() {
        let phi = f(2, &[&[1, 1, -1], &[2, 2], &[-2, -1, -1]]);
        let v = solve_dpll(&phi);
        assert!(eval(&phi, v.witness().unwrap()).unwrap());
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p_{i,j}: pigeon i in hole j, var = 2*i + j + 1
        let var = |i: i32, j: i32| 2 * i + j + 1;
        let mut clauses: Vec<Vec<Lit>> = (0..3).map(|i| vec![var(i, 0), var(i, 1)]).collect();
        for j in 0..2 {
            for a in 0..3 {
                for b in (a + 1)..3 {
                    clauses.push(vec![-var(a, j), -var(b, j)]);
                }
            }
        }
        let phi = CnfFormula::new(6, clauses).unwrap();
        assert_eq!(solve_dpll(&phi), Verdict::Unsat);
        assert_eq!(solve_exhaustive(&phi).unwrap(), Verdict::Unsat);
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (1u32..=12).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            prop::collection::vec(prop::collection::vec(lit, 0..4), 0..40)
                .prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
        })
    }

    proptest! {
        #[test]
        fn dpll_agrees_with_enumeration(phi in arb_formula()) {
            let truth = solve_exhaustive(&phi).unwrap();
            let dpll = solve_dpll(&phi);
            prop_assert_eq!(truth.tag(), dpll.tag());
            if let Some(w) = dpll.witness() {
                prop_assert!(eval(&phi, w).unwrap());
            }
            if let Some(w) = truth.witness() {
                prop_assert!(eval(&phi, w).unwrap());
            }
        }

        #[test]
        fn dpll_is_deterministic(phi in arb_formula()) {
            prop_assert_eq!(solve_dpll(&phi), solve_dpll(&phi));
        }
    }
}
