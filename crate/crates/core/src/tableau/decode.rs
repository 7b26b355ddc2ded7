use super::{TableauError, TableauLayout};
use crate::cnf::{eval, Assignment, CnfFormula};
use crate::machine::{step, Config, Memory, RunTag, StepResult};

/// A decoded execution: `configs[i]` is the configuration at time `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub configs: Vec<Config>,
    pub outcome: RunTag,
    /// Number of steps up to and including the halting one.
    pub steps: usize,
}

fn read_word(a: &Assignment, vars: &[u32]) -> u64 {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | (u64::from(a.value(v)) << i))
}

fn violation(msg: impl Into<String>) -> TableauError {
    TableauError::ContractViolation(msg.into())
}

/// Reconstructs the accepting run a satisfying assignment describes and
/// replays it under [`step`].
pub fn decode_witness(
    f: &CnfFormula,
    layout: &TableauLayout,
    a: &Assignment,
) -> Result<Trace, TableauError> {
    if f.num_vars() != layout.num_vars {
        return Err(violation(format!(
            "formula has {} variables, layout expects {}",
            f.num_vars(),
            layout.num_vars
        )));
    }
    if !eval(f, a).map_err(|e| violation(e.to_string()))? {
        return Err(violation("assignment does not satisfy the formula"));
    }
    let p = &layout.program;
    let cells = p.shape().memory_cells;

    let mut memory = Memory::zeroed(cells);
    let mut fixed: std::collections::HashMap<u64, u32> = Default::default();
    for &(addr, byte) in &layout.pinned {
        fixed.insert(addr, u32::from(byte));
    }
    for r in &layout.reads {
        if a.value(r.initial) {
            let addr = read_word(a, &r.addr);
            let value = read_word(a, &r.initial_value) as u32;
            if let Some(&prev) = fixed.get(&addr) {
                if prev != value {
                    return Err(violation(format!(
                        "cell {addr} read initially as both {prev} and {value}"
                    )));
                }
            }
            fixed.insert(addr, value);
        }
    }
    for (&addr, &value) in &fixed {
        memory.set(addr, value);
    }

    let mut c = Config::with_memory(p, memory);
    let mut configs = Vec::with_capacity(layout.t + 1);
    let mut halt: Option<(RunTag, usize)> = None;
    for (i, s) in layout.states.iter().enumerate() {
        let pc = read_word(a, &s.pc) as usize;
        if pc != c.pc {
            return Err(violation(format!(
                "time {i}: encoded pc {pc}, replay pc {}",
                c.pc
            )));
        }
        for (r, bits) in s.registers.iter().enumerate() {
            let v = read_word(a, bits) as u32;
            if v != c.registers[r] {
                return Err(violation(format!(
                    "time {i}: encoded r{r} = {v}, replay {}",
                    c.registers[r]
                )));
            }
        }
        if a.value(s.halted) != halt.is_some() {
            return Err(violation(format!(
                "time {i}: halted flag disagrees with replay"
            )));
        }
        let accepted = matches!(halt, Some((RunTag::Accept, _)));
        if a.value(s.accepted) != accepted {
            return Err(violation(format!(
                "time {i}: accepted flag disagrees with replay"
            )));
        }
        configs.push(c.clone());
        if i == layout.t || halt.is_some() {
            continue;
        }
        match step(p, &c) {
            StepResult::Continue(next) => c = next,
            StepResult::Accept => halt = Some((RunTag::Accept, i + 1)),
            StepResult::Reject => halt = Some((RunTag::Reject, i + 1)),
        }
    }
    match halt {
        Some((RunTag::Accept, steps)) => Ok(Trace {
            configs,
            outcome: RunTag::Accept,
            steps,
        }),
        _ => Err(violation("replayed run does not accept within the bound")),
    }
}
