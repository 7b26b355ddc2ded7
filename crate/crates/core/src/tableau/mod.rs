//! Bounded acceptance as CNF.
//!
//! [`encode`] turns "program `p` accepts within `t` steps from some initial
//! memory agreeing with the pins" into a formula that is satisfiable exactly
//! when such a run exists. Memory is not laid out as columns; each step that
//! may execute a `LOAD` gets an access record, and reads are resolved
//! against earlier `STORE`/`SELF` steps by read-over-write constraints. The
//! formula is therefore independent of the memory size.
//!
//! # Variable numbering
//!
//! Variables are allocated in one forward pass:
//!
//! 1. the state block of time 0 (pc bits, then each register's bits, then
//!    the halted and accepted flags; all bit vectors least significant first);
//! 2. for each step `i` in `0..t`: the step's gate variables, its access
//!    record if it can read, and the state block of time `i + 1`;
//! 3. after the unit clause asserting `accepted` at time `t`, one gate
//!    variable per (pin, access record) pair.
//!
//! Pins only contribute to step 3 and their values only change literal
//! signs there, so the DIMACS text of everything before that point does not
//! depend on the pins at all, and its length does not depend on pin values.
//!
//! Unpinned memory cells are unconstrained words, whether or not the
//! program declares `.input`.

mod decode;
mod encode;
mod gates;

pub use decode::{decode_witness, Trace};
pub use encode::{encode, encode_into, reachable_pcs};

use std::fmt::Write as _;

use thiserror::Error;

use crate::machine::Program;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("step bound must be at least 1")]
    ZeroBound,
    #[error("SELF image of {len} bytes does not fit in {cells} memory cells")]
    SelfImageTooLong { len: usize, cells: u64 },
    #[error("pinned address {addr} outside memory of {cells} cells")]
    PinOutOfRange { addr: u64, cells: u64 },
    #[error("address {0} pinned twice")]
    DuplicatePin(u64),
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

/// A state component at one time point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    PcBit(u32),
    RegisterBit { reg: u8, bit: u8 },
    Halted,
    Accepted,
}

/// Variables of one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVars {
    pub pc: Vec<u32>,
    pub registers: Vec<Vec<u32>>,
    pub halted: u32,
    pub accepted: u32,
}

/// Variables of the access record of a step that may read memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadRecord {
    pub step: usize,
    pub is_read: u32,
    /// Set when the step reads a cell no earlier step wrote.
    pub initial: u32,
    pub addr: Vec<u32>,
    /// The initial content of `addr`; forced to zero unless `initial`.
    pub initial_value: Vec<u32>,
    pub value: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauLayout {
    pub program: Program,
    pub t: usize,
    pub pinned: Vec<(u64, u8)>,
    pub num_vars: u32,
    pub num_clauses: usize,
    /// `states[i]` holds the variables of time `i`, for `i` in `0..=t`.
    pub states: Vec<StateVars>,
    pub reads: Vec<ReadRecord>,
}

impl TableauLayout {
    pub fn var_of(&self, time: usize, c: Component) -> Option<u32> {
        let s = self.states.get(time)?;
        match c {
            Component::PcBit(b) => s.pc.get(b as usize).copied(),
            Component::RegisterBit { reg, bit } => {
                s.registers.get(reg as usize)?.get(bit as usize).copied()
            }
            Component::Halted => Some(s.halted),
            Component::Accepted => Some(s.accepted),
        }
    }

    /// Text table of every named variable, one component per line.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        let join = |vs: &[u32]| vs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "fixpoint-layout v1");
        let _ = writeln!(out, "t {}", self.t);
        let _ = writeln!(out, "num_vars {}", self.num_vars);
        let _ = writeln!(out, "num_clauses {}", self.num_clauses);
        let _ = writeln!(out, "c bit vectors are least significant first");
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "state {i} pc {}", join(&s.pc));
            for (r, bits) in s.registers.iter().enumerate() {
                let _ = writeln!(out, "state {i} r{r} {}", join(bits));
            }
            let _ = writeln!(out, "state {i} halted {}", s.halted);
            let _ = writeln!(out, "state {i} accepted {}", s.accepted);
        }
        for r in &self.reads {
            let _ = writeln!(out, "read {} is_read {}", r.step, r.is_read);
            let _ = writeln!(out, "read {} initial {}", r.step, r.initial);
            let _ = writeln!(out, "read {} addr {}", r.step, join(&r.addr));
            let _ = writeln!(
                out,
                "read {} initial_value {}",
                r.step,
                join(&r.initial_value)
            );
            let _ = writeln!(out, "read {} value {}", r.step, join(&r.value));
        }
        for (a, v) in &self.pinned {
            let _ = writeln!(out, "pin {a} {v}");
        }
        out
    }
}
