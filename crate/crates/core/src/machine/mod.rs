//! A small register machine: the procedure space classifiers live in.
//!
//! Words are `word_bits` wide and arithmetic wraps modulo `2^word_bits`.
//! Memory has `memory_cells` words (a power of two); addresses are register
//! values reduced modulo the cell count. Executing `HALT_ACCEPT` or
//! `HALT_REJECT` takes one step. Falling off the end of the program behaves
//! like a `HALT_REJECT` placed at index `instructions.len()`.

mod asm;
mod memory;
mod serialize;
mod sim;

pub use asm::{parse_assembly, to_assembly};
pub use memory::Memory;
pub use serialize::{deserialize, deserialize_prefix, serialize};
pub use sim::{run, run_from, run_traced, step, RunOutcome, RunTag, StepResult, TracedRun};

use std::fmt;

use thiserror::Error;

pub const MAX_REGISTERS: u8 = 8;
pub const MIN_WORD_BITS: u8 = 8;
pub const MAX_WORD_BITS: u8 = 32;
pub const MAX_INSTRUCTIONS: usize = u16::MAX as usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("decode error at byte {offset}: {reason}")]
    Decode { offset: usize, reason: String },
    #[error("assembly line {line}: {reason}")]
    Assembly { line: usize, reason: String },
    #[error("input of {len} bytes does not fit in {cells} memory cells")]
    InputTooLong { len: usize, cells: u64 },
}

/// Register index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg(pub u8);

impl Reg {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    LoadImm {
        dst: Reg,
        value: u32,
    },
    Mov {
        dst: Reg,
        src: Reg,
    },
    Add {
        dst: Reg,
        src: Reg,
    },
    Sub {
        dst: Reg,
        src: Reg,
    },
    /// `dst := memory[addr]`
    Load {
        dst: Reg,
        addr: Reg,
    },
    /// `memory[addr] := src`
    Store {
        addr: Reg,
        src: Reg,
    },
    JumpIfZero {
        reg: Reg,
        target: u16,
    },
    Jump {
        target: u16,
    },
    /// Writes the program's own serialization at `memory[dest..]` and its
    /// length into `len`. The write happens before `len` is updated.
    SelfImage {
        dest: Reg,
        len: Reg,
    },
    HaltAccept,
    HaltReject,
}

impl Instruction {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            Instruction::LoadImm { .. } => "LOADI",
            Instruction::Mov { .. } => "MOV",
            Instruction::Add { .. } => "ADD",
            Instruction::Sub { .. } => "SUB",
            Instruction::Load { .. } => "LOAD",
            Instruction::Store { .. } => "STORE",
            Instruction::JumpIfZero { .. } => "JZ",
            Instruction::Jump { .. } => "JMP",
            Instruction::SelfImage { .. } => "SELF",
            Instruction::HaltAccept => "HALT_ACCEPT",
            Instruction::HaltReject => "HALT_REJECT",
        }
    }

    fn registers(&self) -> Vec<Reg> {
        match *self {
            Instruction::LoadImm { dst, .. } => vec![dst],
            Instruction::Mov { dst, src }
            | Instruction::Add { dst, src }
            | Instruction::Sub { dst, src } => {
                vec![dst, src]
            }
            Instruction::Load { dst, addr } => vec![dst, addr],
            Instruction::Store { addr, src } => vec![addr, src],
            Instruction::JumpIfZero { reg, .. } => vec![reg],
            Instruction::SelfImage { dest, len } => vec![dest, len],
            Instruction::Jump { .. } | Instruction::HaltAccept | Instruction::HaltReject => vec![],
        }
    }

    /// Register written by this instruction, if any.
    pub fn written_register(&self) -> Option<Reg> {
        match *self {
            Instruction::LoadImm { dst, .. }
            | Instruction::Mov { dst, .. }
            | Instruction::Add { dst, .. }
            | Instruction::Sub { dst, .. }
            | Instruction::Load { dst, .. } => Some(dst),
            Instruction::SelfImage { len, .. } => Some(len),
            _ => None,
        }
    }

    pub fn jump_target(&self) -> Option<u16> {
        match *self {
            Instruction::JumpIfZero { target, .. } | Instruction::Jump { target } => Some(target),
            _ => None,
        }
    }

    pub fn is_halt(&self) -> bool {
        matches!(self, Instruction::HaltAccept | Instruction::HaltReject)
    }
}

/// Static parameters of a machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MachineShape {
    pub register_count: u8,
    pub word_bits: u8,
    pub memory_cells: u64,
    /// When set, `run` loads the input bytes at address 0.
    pub takes_input: bool,
}

impl Default for MachineShape {
    fn default() -> Self {
        MachineShape {
            register_count: 4,
            word_bits: 16,
            memory_cells: 256,
            takes_input: false,
        }
    }
}

impl MachineShape {
    pub fn word_mask(&self) -> u64 {
        (1u64 << self.word_bits) - 1
    }

    /// log2 of the memory size.
    pub fn address_bits(&self) -> u32 {
        self.memory_cells.trailing_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    shape: MachineShape,
    instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(shape: MachineShape, instructions: Vec<Instruction>) -> Result<Self, MachineError> {
        let bad = |msg: String| Err(MachineError::InvalidProgram(msg));
        if shape.register_count == 0 || shape.register_count > MAX_REGISTERS {
            return bad(format!(
                "register count {} outside 1..={MAX_REGISTERS}",
                shape.register_count
            ));
        }
        if !(MIN_WORD_BITS..=MAX_WORD_BITS).contains(&shape.word_bits) {
            return bad(format!(
                "word width {} outside {MIN_WORD_BITS}..={MAX_WORD_BITS}",
                shape.word_bits
            ));
        }
        if !shape.memory_cells.is_power_of_two() || shape.memory_cells > 1u64 << shape.word_bits {
            return bad(format!(
                "memory size {} must be a power of two no larger than 2^{}",
                shape.memory_cells, shape.word_bits
            ));
        }
        if instructions.is_empty() || instructions.len() > MAX_INSTRUCTIONS {
            return bad(format!(
                "instruction count {} outside 1..={MAX_INSTRUCTIONS}",
                instructions.len()
            ));
        }
        for (pc, ins) in instructions.iter().enumerate() {
            if let Some(r) = ins
                .registers()
                .into_iter()
                .find(|r| r.0 >= shape.register_count)
            {
                return bad(format!(
                    "instruction {pc}: register {r} not below {}",
                    shape.register_count
                ));
            }
            if let Some(t) = ins.jump_target() {
                if t as usize >= instructions.len() {
                    return bad(format!("instruction {pc}: jump target {t} out of range"));
                }
            }
            if let Instruction::LoadImm { value, .. } = ins {
                if u64::from(*value) > shape.word_mask() {
                    return bad(format!(
                        "instruction {pc}: constant {value} wider than {} bits",
                        shape.word_bits
                    ));
                }
            }
        }
        Ok(Program {
            shape,
            instructions,
        })
    }

    pub fn shape(&self) -> &MachineShape {
        &self.shape
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Instruction at `pc`; the index one past the end reads as `HALT_REJECT`.
    pub fn fetch(&self, pc: usize) -> Instruction {
        self.instructions
            .get(pc)
            .copied()
            .unwrap_or(Instruction::HaltReject)
    }

    pub fn contains_self(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i, Instruction::SelfImage { .. }))
    }
}

/// Machine state between steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub pc: usize,
    pub registers: Vec<u32>,
    pub memory: Memory,
}

impl Config {
    /// All registers zero, `pc = 0`, zeroed memory.
    pub fn initial(p: &Program) -> Self {
        Config {
            pc: 0,
            registers: vec![0; p.shape.register_count as usize],
            memory: Memory::zeroed(p.shape.memory_cells),
        }
    }

    pub fn with_memory(p: &Program, memory: Memory) -> Self {
        Config {
            pc: 0,
            registers: vec![0; p.shape.register_count as usize],
            memory,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape() -> MachineShape {
        MachineShape::default()
    }

    #[test]
    fn rejects_bad_jump_target() {
        let err = Program::new(shape(), vec![Instruction::Jump { target: 1 }]).unwrap_err();
        assert!(matches!(err, MachineError::InvalidProgram(_)));
    }

    #[test]
    fn rejects_bad_register() {
        let s = MachineShape {
            register_count: 2,
            ..shape()
        };
        assert!(Program::new(
            s,
            vec![Instruction::LoadImm {
                dst: Reg(2),
                value: 0
            }]
        )
        .is_err());
        assert!(Program::new(
            s,
            vec![Instruction::LoadImm {
                dst: Reg(1),
                value: 0
            }]
        )
        .is_ok());
    }

    #[test]
    fn rejects_wide_constant_and_odd_memory() {
        assert!(Program::new(
            shape(),
            vec![Instruction::LoadImm {
                dst: Reg(0),
                value: 1 << 16
            }]
        )
        .is_err());
        let s = MachineShape {
            memory_cells: 100,
            ..shape()
        };
        assert!(Program::new(s, vec![Instruction::HaltAccept]).is_err());
        let s = MachineShape {
            memory_cells: 1 << 17,
            ..shape()
        };
        assert!(Program::new(s, vec![Instruction::HaltAccept]).is_err());
    }

    #[test]
    fn rejects_empty_program_and_bad_widths() {
        assert!(Program::new(shape(), vec![]).is_err());
        let s = MachineShape {
            word_bits: 7,
            memory_cells: 2,
            ..shape()
        };
        assert!(Program::new(s, vec![Instruction::HaltAccept]).is_err());
        let s = MachineShape {
            register_count: 9,
            ..shape()
        };
        assert!(Program::new(s, vec![Instruction::HaltAccept]).is_err());
    }

    #[test]
    fn fetch_past_end_is_reject() {
        let p = Program::new(shape(), vec![Instruction::HaltAccept]).unwrap();
        assert_eq!(p.fetch(1), Instruction::HaltReject);
    }
}
