//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

use fixpoint::cnf::{CnfFormula, Lit};
use fixpoint::goedel::{Formula, Term};
use fixpoint::machine::{Instruction, MachineShape, Program, Reg};
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every program over {LOADI, JZ, JMP, HALT_ACCEPT, HALT_REJECT} with at most
/// three instructions, constants 0..3 and one register.
pub fn corpus() -> Vec<Program> {
    let shape = MachineShape {
        register_count: 1,
        word_bits: 8,
        memory_cells: 1,
        takes_input: false,
    };
    let mut out = Vec::new();
    for n in 1..=3u16 {
        let mut choices = Vec::new();
        for c in 0..4 {
            choices.push(Instruction::LoadImm {
                dst: Reg(0),
                value: c,
            });
        }
        for target in 0..n {
            choices.push(Instruction::JumpIfZero {
                reg: Reg(0),
                target,
            });
            choices.push(Instruction::Jump { target });
        }
        choices.push(Instruction::HaltAccept);
        choices.push(Instruction::HaltReject);
        let k = choices.len();
        for mut code in 0..k.pow(n as u32) {
            let mut ins = Vec::new();
            for _ in 0..n {
                ins.push(choices[code % k]);
                code /= k;
            }
            out.push(Program::new(shape, ins).unwrap());
        }
    }
    out
}

pub const VAR: u8 = 4;
pub const END: u8 = 17;
pub const DIAG: u8 = 8;
pub const X: u8 = 18 + (b'x' - b'a');

pub fn var() -> Term {
    Term::Var("x".into())
}

/// Random formula of depth at most `depth` whose only free variable is `x`.
pub fn theta(rng: &mut ChaCha8Rng, depth: u32) -> Formula {
    fn term(rng: &mut ChaCha8Rng, depth: u32, bound: &[&str]) -> Term {
        let leafy = depth == 0 || rng.gen_bool(0.4);
        if leafy {
            return match rng.gen_range(0..3) {
                0 => Term::Zero,
                1 if !bound.is_empty() => Term::Var(bound[rng.gen_range(0..bound.len())].into()),
                _ => var(),
            };
        }
        let kind = rng.gen_range(0..6);
        let mut sub = || Box::new(term(rng, depth - 1, bound));
        match kind {
            0 => Term::Succ(sub()),
            1 => Term::B0(sub()),
            2 => Term::B1(sub()),
            3 => Term::Diag(sub()),
            4 => Term::Plus(sub(), sub()),
            _ => Term::Times(sub(), sub()),
        }
    }
    fn formula(rng: &mut ChaCha8Rng, depth: u32, bound: &mut Vec<&str>) -> Formula {
        if depth <= 1 || rng.gen_bool(0.25) {
            let d = depth.saturating_sub(1).min(2);
            return if rng.gen_bool(0.5) {
                Formula::Eq(term(rng, d, bound), term(rng, d, bound))
            } else {
                Formula::Prov(term(rng, d, bound))
            };
        }
        match rng.gen_range(0..6) {
            0 => Formula::Not(Box::new(formula(rng, depth - 1, bound))),
            1 => Formula::And(
                Box::new(formula(rng, depth - 1, bound)),
                Box::new(formula(rng, depth - 1, bound)),
            ),
            2 => Formula::Or(
                Box::new(formula(rng, depth - 1, bound)),
                Box::new(formula(rng, depth - 1, bound)),
            ),
            3 => Formula::Implies(
                Box::new(formula(rng, depth - 1, bound)),
                Box::new(formula(rng, depth - 1, bound)),
            ),
            q => {
                let v = if rng.gen_bool(0.5) { "y" } else { "z" };
                bound.push(v);
                let body = Box::new(formula(rng, depth - 1, bound));
                bound.pop();
                if q == 4 {
                    Formula::ForAll(v.into(), body)
                } else {
                    Formula::Exists(v.into(), body)
                }
            }
        }
    }
    loop {
        let f = formula(rng, depth, &mut Vec::new());
        if f.free_vars().len() == 1 {
            return f;
        }
    }
}

/// `ψ`'s symbol string built by splicing, without touching syntax trees:
/// every `var x end` in θ becomes `D` followed by the numeral's symbols.
pub fn spliced(theta_syms: &[u8], beta_code: &BigUint) -> Vec<u8> {
    let bits = beta_code.bits();
    let mut numeral_syms: Vec<u8> = (0..bits)
        .map(|i| if beta_code.bit(i) { 3 } else { 2 })
        .collect();
    numeral_syms.push(1);
    let mut out = Vec::new();
    let mut i = 0;
    while i < theta_syms.len() {
        if theta_syms[i..].starts_with(&[VAR, X, END]) {
            out.push(DIAG);
            out.extend_from_slice(&numeral_syms);
            i += 3;
        } else {
            out.push(theta_syms[i]);
            i += 1;
        }
    }
    out
}

pub fn occurrences(syms: &[u8]) -> usize {
    syms.windows(3).filter(|w| *w == [VAR, X, END]).count()
}

/// Random CNF over at most `max_vars` variables, clauses of width 1..=4.
pub fn random_cnf(rng: &mut ChaCha8Rng, max_vars: u32) -> CnfFormula {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=4 * n as usize);
    let clauses = (0..m)
        .map(|_| {
            let width = rng.gen_range(1..=4);
            (0..width)
                .map(|_| {
                    let v = rng.gen_range(1..=n) as Lit;
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

/// Random well-formed program over the full instruction set.
pub fn random_program(rng: &mut ChaCha8Rng) -> Program {
    let word_bits = rng.gen_range(8..=32);
    let shape = MachineShape {
        register_count: rng.gen_range(1..=8),
        word_bits,
        memory_cells: 1 << rng.gen_range(0..=word_bits.min(20)),
        takes_input: rng.gen_bool(0.5),
    };
    let n = rng.gen_range(1..=40u16);
    let regs = shape.register_count;
    let value_max = if shape.word_bits == 32 {
        u32::MAX
    } else {
        (1u32 << shape.word_bits) - 1
    };
    let reg = |rng: &mut ChaCha8Rng| Reg(rng.gen_range(0..regs));
    let instructions = (0..n)
        .map(|_| match rng.gen_range(0..11) {
            0 => Instruction::LoadImm {
                dst: reg(rng),
                value: rng.gen_range(0..=value_max),
            },
            1 => Instruction::Mov {
                dst: reg(rng),
                src: reg(rng),
            },
            2 => Instruction::Add {
                dst: reg(rng),
                src: reg(rng),
            },
            3 => Instruction::Sub {
                dst: reg(rng),
                src: reg(rng),
            },
            4 => Instruction::Load {
                dst: reg(rng),
                addr: reg(rng),
            },
            5 => Instruction::Store {
                addr: reg(rng),
                src: reg(rng),
            },
            6 => Instruction::JumpIfZero {
                reg: reg(rng),
                target: rng.gen_range(0..n),
            },
            7 => Instruction::Jump {
                target: rng.gen_range(0..n),
            },
            8 => Instruction::SelfImage {
                dest: reg(rng),
                len: reg(rng),
            },
            9 => Instruction::HaltAccept,
            _ => Instruction::HaltReject,
        })
        .collect();
    Program::new(shape, instructions).unwrap()
}
