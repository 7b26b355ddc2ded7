use std::collections::{BTreeSet, HashSet};

use super::{serialize, Config, Instruction, MachineError, Memory, Program};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Continue(Config),
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunTag {
    Accept,
    Reject,
    OutOfFuel,
}

impl RunTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RunTag::Accept => "accept",
            RunTag::Reject => "reject",
            RunTag::OutOfFuel => "out-of-fuel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub tag: RunTag,
    /// Steps executed, the halting step included.
    pub steps_used: u64,
    /// Configuration when the run stopped. A halted run keeps `pc` at the
    /// halt instruction.
    pub final_config: Config,
}

/// A run together with the memory cells it read before writing them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracedRun {
    pub outcome: RunOutcome,
    /// `(address, value)` in order of first read. Addresses are reduced
    /// modulo the memory size.
    pub initial_reads: Vec<(u64, u32)>,
}

struct Exec<'a> {
    p: &'a Program,
    image: Option<Vec<u8>>,
}

enum Halt {
    Accept,
    Reject,
}

/// Observer for memory traffic.
trait Probe {
    fn read(&mut self, addr: u64, value: u32);
    fn write(&mut self, addr: u64);
}

impl Probe for () {
    fn read(&mut self, _: u64, _: u32) {}
    fn write(&mut self, _: u64) {}
}

#[derive(Default)]
struct ReadProbe {
    written: HashSet<u64>,
    seen: BTreeSet<u64>,
    reads: Vec<(u64, u32)>,
}

impl Probe for ReadProbe {
    fn read(&mut self, addr: u64, value: u32) {
        if !self.written.contains(&addr) && self.seen.insert(addr) {
            self.reads.push((addr, value));
        }
    }

    fn write(&mut self, addr: u64) {
        self.written.insert(addr);
    }
}

impl<'a> Exec<'a> {
    fn new(p: &'a Program) -> Self {
        Exec { p, image: None }
    }

    fn step(&mut self, c: &mut Config, probe: &mut impl Probe) -> Option<Halt> {
        let shape = self.p.shape();
        let mask = shape.word_mask();
        let cells_mask = shape.memory_cells - 1;
        let reg = |c: &Config, r: super::Reg| u64::from(c.registers[r.index()]);
        let mut next = c.pc + 1;
        match self.p.fetch(c.pc) {
            Instruction::LoadImm { dst, value } => c.registers[dst.index()] = value,
            Instruction::Mov { dst, src } => c.registers[dst.index()] = c.registers[src.index()],
            Instruction::Add { dst, src } => {
                c.registers[dst.index()] = ((reg(c, dst) + reg(c, src)) & mask) as u32;
            }
            Instruction::Sub { dst, src } => {
                c.registers[dst.index()] = (reg(c, dst).wrapping_sub(reg(c, src)) & mask) as u32;
            }
            Instruction::Load { dst, addr } => {
                let a = reg(c, addr) & cells_mask;
                let v = c.memory.get(a);
                probe.read(a, v);
                c.registers[dst.index()] = v;
            }
            Instruction::Store { addr, src } => {
                let a = reg(c, addr) & cells_mask;
                probe.write(a);
                c.memory.set(a, c.registers[src.index()]);
            }
            Instruction::JumpIfZero { reg: r, target } => {
                if c.registers[r.index()] == 0 {
                    next = target as usize;
                }
            }
            Instruction::Jump { target } => next = target as usize,
            Instruction::SelfImage { dest, len } => {
                let image = self.image.get_or_insert_with(|| serialize(self.p));
                let base = reg(c, dest);
                for (k, &b) in image.iter().enumerate() {
                    let a = (base + k as u64) & cells_mask;
                    probe.write(a);
                    c.memory.set(a, u32::from(b));
                }
                c.registers[len.index()] = (image.len() as u64 & mask) as u32;
            }
            Instruction::HaltAccept => return Some(Halt::Accept),
            Instruction::HaltReject => return Some(Halt::Reject),
        }
        c.pc = next;
        None
    }

    fn run(&mut self, mut c: Config, fuel: u64, probe: &mut impl Probe) -> RunOutcome {
        for used in 1..=fuel {
            if let Some(h) = self.step(&mut c, probe) {
                let tag = match h {
                    Halt::Accept => RunTag::Accept,
                    Halt::Reject => RunTag::Reject,
                };
                return RunOutcome {
                    tag,
                    steps_used: used,
                    final_config: c,
                };
            }
        }
        RunOutcome {
            tag: RunTag::OutOfFuel,
            steps_used: fuel,
            final_config: c,
        }
    }
}

/// One step of `p` from `c`.
pub fn step(p: &Program, c: &Config) -> StepResult {
    let mut next = c.clone();
    match Exec::new(p).step(&mut next, &mut ()) {
        None => StepResult::Continue(next),
        Some(Halt::Accept) => StepResult::Accept,
        Some(Halt::Reject) => StepResult::Reject,
    }
}

fn initial_config(p: &Program, input: &[u8]) -> Result<Config, MachineError> {
    let cells = p.shape().memory_cells;
    if input.len() as u64 > cells {
        return Err(MachineError::InputTooLong {
            len: input.len(),
            cells,
        });
    }
    let memory = if p.shape().takes_input {
        Memory::with_image(cells, input)
    } else {
        Memory::zeroed(cells)
    };
    Ok(Config::with_memory(p, memory))
}

/// Runs `p` for at most `fuel` steps. Input bytes are loaded at address 0
/// when the program takes input and ignored otherwise.
pub fn run(p: &Program, input: &[u8], fuel: u64) -> Result<RunOutcome, MachineError> {
    let c = initial_config(p, input)?;
    Ok(Exec::new(p).run(c, fuel, &mut ()))
}

/// Runs `p` from an arbitrary starting configuration.
pub fn run_from(p: &Program, start: Config, fuel: u64) -> RunOutcome {
    Exec::new(p).run(start, fuel, &mut ())
}

/// Like [`run`], additionally recording every cell read before its first
/// write.
pub fn run_traced(p: &Program, input: &[u8], fuel: u64) -> Result<TracedRun, MachineError> {
    let c = initial_config(p, input)?;
    let mut probe = ReadProbe::default();
    let outcome = Exec::new(p).run(c, fuel, &mut probe);
    Ok(TracedRun {
        outcome,
        initial_reads: probe.reads,
    })
}
