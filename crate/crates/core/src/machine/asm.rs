//! Textual assembly for register-machine programs.
//!
//! ```text
//! program     := { line "\n" }
//! line        := [ label ":" ] [ directive | instruction ] [ ";" comment ]
//! directive   := ".registers" N | ".word_bits" N | ".memory" N | ".input"
//! instruction := "LOADI" reg "," N     | "MOV" reg "," reg   | "ADD" reg "," reg
//!              | "SUB" reg "," reg     | "LOAD" reg "," reg  | "STORE" reg "," reg
//!              | "JZ" reg "," target   | "JMP" target        | "SELF" reg "," reg
//!              | "HALT_ACCEPT"         | "HALT_REJECT"
//! reg         := "r" digit
//! target      := N | label
//! ```
//!
//! Mnemonics are case-insensitive. Directives must precede the first
//! instruction; omitted ones take the [`MachineShape`] defaults. `LOAD r, a`
//! reads `memory[a]` into `r`; `STORE a, s` writes `s` to `memory[a]`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Instruction, MachineError, MachineShape, Program, Reg};

fn asm_err(line: usize, reason: impl Into<String>) -> MachineError {
    MachineError::Assembly {
        line,
        reason: reason.into(),
    }
}

fn parse_number(tok: &str, line: usize) -> Result<u64, MachineError> {
    let parsed = if let Some(hex) = tok.strip_prefix("0x") {
        u64::from_str_radix(hex, 16)
    } else {
        tok.parse::<u64>()
    };
    parsed.map_err(|_| asm_err(line, format!("expected a number, found `{tok}`")))
}

fn parse_reg(tok: &str, line: usize) -> Result<Reg, MachineError> {
    tok.strip_prefix(['r', 'R'])
        .and_then(|n| n.parse::<u8>().ok())
        .map(Reg)
        .ok_or_else(|| asm_err(line, format!("expected a register, found `{tok}`")))
}

enum Target {
    Index(u16),
    Label(String),
}

enum Pending {
    Ready(Instruction),
    Jz(Reg, Target),
    Jmp(Target),
}

fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_assembly(text: &str) -> Result<Program, MachineError> {
    let mut shape = MachineShape::default();
    let mut labels: HashMap<String, usize> = HashMap::new();
    let mut pending: Vec<(usize, Pending)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut line = raw.split(';').next().unwrap_or("").trim();
        if let Some(colon) = line.find(':') {
            let label = line[..colon].trim();
            if !is_label(label) {
                return Err(asm_err(line_no, format!("invalid label `{label}`")));
            }
            if labels.insert(label.to_string(), pending.len()).is_some() {
                return Err(asm_err(line_no, format!("duplicate label `{label}`")));
            }
            line = line[colon + 1..].trim();
        }
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let args: Vec<&str> = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',').map(str::trim).collect()
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(asm_err(
                    line_no,
                    format!("`{head}` takes {n} operand(s), found {}", args.len()),
                ))
            }
        };

        if let Some(directive) = head.strip_prefix('.') {
            if !pending.is_empty() {
                return Err(asm_err(line_no, "directives must precede instructions"));
            }
            match directive {
                "registers" => {
                    arity(1)?;
                    shape.register_count = u8::try_from(parse_number(args[0], line_no)?)
                        .map_err(|_| asm_err(line_no, "register count too large"))?;
                }
                "word_bits" => {
                    arity(1)?;
                    shape.word_bits = u8::try_from(parse_number(args[0], line_no)?)
                        .map_err(|_| asm_err(line_no, "word width too large"))?;
                }
                "memory" => {
                    arity(1)?;
                    shape.memory_cells = parse_number(args[0], line_no)?;
                }
                "input" => {
                    arity(0)?;
                    shape.takes_input = true;
                }
                other => return Err(asm_err(line_no, format!("unknown directive `.{other}`"))),
            }
            continue;
        }

        let target = |tok: &str| -> Result<Target, MachineError> {
            if tok.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                let n = parse_number(tok, line_no)?;
                u16::try_from(n)
                    .map(Target::Index)
                    .map_err(|_| asm_err(line_no, "jump target too large"))
            } else if is_label(tok) {
                Ok(Target::Label(tok.to_string()))
            } else {
                Err(asm_err(line_no, format!("invalid jump target `{tok}`")))
            }
        };
        let two_regs = || -> Result<(Reg, Reg), MachineError> {
            arity(2)?;
            Ok((parse_reg(args[0], line_no)?, parse_reg(args[1], line_no)?))
        };

        let item = match head.to_ascii_uppercase().as_str() {
            "LOADI" => {
                arity(2)?;
                let dst = parse_reg(args[0], line_no)?;
                let value = u32::try_from(parse_number(args[1], line_no)?)
                    .map_err(|_| asm_err(line_no, "constant exceeds 32 bits"))?;
                Pending::Ready(Instruction::LoadImm { dst, value })
            }
            "MOV" => two_regs().map(|(dst, src)| Pending::Ready(Instruction::Mov { dst, src }))?,
            "ADD" => two_regs().map(|(dst, src)| Pending::Ready(Instruction::Add { dst, src }))?,
            "SUB" => two_regs().map(|(dst, src)| Pending::Ready(Instruction::Sub { dst, src }))?,
            "LOAD" => {
                two_regs().map(|(dst, addr)| Pending::Ready(Instruction::Load { dst, addr }))?
            }
            "STORE" => {
                two_regs().map(|(addr, src)| Pending::Ready(Instruction::Store { addr, src }))?
            }
            "SELF" => two_regs()
                .map(|(dest, len)| Pending::Ready(Instruction::SelfImage { dest, len }))?,
            "JZ" => {
                arity(2)?;
                Pending::Jz(parse_reg(args[0], line_no)?, target(args[1])?)
            }
            "JMP" => {
                arity(1)?;
                Pending::Jmp(target(args[0])?)
            }
            "HALT_ACCEPT" => {
                arity(0)?;
                Pending::Ready(Instruction::HaltAccept)
            }
            "HALT_REJECT" => {
                arity(0)?;
                Pending::Ready(Instruction::HaltReject)
            }
            other => return Err(asm_err(line_no, format!("unknown mnemonic `{other}`"))),
        };
        pending.push((line_no, item));
    }

    let resolve = |t: Target, line: usize| -> Result<u16, MachineError> {
        match t {
            Target::Index(i) => Ok(i),
            Target::Label(l) => labels
                .get(&l)
                .map(|&i| i as u16)
                .ok_or_else(|| asm_err(line, format!("undefined label `{l}`"))),
        }
    };
    let mut instructions = Vec::with_capacity(pending.len());
    for (line, item) in pending {
        instructions.push(match item {
            Pending::Ready(i) => i,
            Pending::Jz(reg, t) => Instruction::JumpIfZero {
                reg,
                target: resolve(t, line)?,
            },
            Pending::Jmp(t) => Instruction::Jump {
                target: resolve(t, line)?,
            },
        });
    }
    Program::new(shape, instructions)
}

/// Canonical listing: all directives, then one instruction per line with
/// numeric jump targets. `parse_assembly(to_assembly(p)) == p`.
pub fn to_assembly(p: &Program) -> String {
    let s = p.shape();
    let mut out = String::new();
    let _ = writeln!(out, ".registers {}", s.register_count);
    let _ = writeln!(out, ".word_bits {}", s.word_bits);
    let _ = writeln!(out, ".memory {}", s.memory_cells);
    if s.takes_input {
        out.push_str(".input\n");
    }
    for ins in p.instructions() {
        let m = ins.mnemonic();
        let _ = match *ins {
            Instruction::LoadImm { dst, value } => writeln!(out, "{m} {dst}, {value}"),
            Instruction::Mov { dst, src }
            | Instruction::Add { dst, src }
            | Instruction::Sub { dst, src } => {
                writeln!(out, "{m} {dst}, {src}")
            }
            Instruction::Load { dst, addr } => writeln!(out, "{m} {dst}, {addr}"),
            Instruction::Store { addr, src } => writeln!(out, "{m} {addr}, {src}"),
            Instruction::JumpIfZero { reg, target } => writeln!(out, "{m} {reg}, {target}"),
            Instruction::Jump { target } => writeln!(out, "{m} {target}"),
            Instruction::SelfImage { dest, len } => writeln!(out, "{m} {dest}, {len}"),
            Instruction::HaltAccept | Instruction::HaltReject => writeln!(out, "{m}"),
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_labels_comments_and_directives() {
        let src = "; count down\n.registers 2\n.input\n  LOADI r0, 3\nloop: JZ r0, done ; exit\n LOADI r1, 1\n SUB r0, r1\n jmp loop\ndone: halt_accept\n";
        let p = parse_assembly(src).unwrap();
        assert_eq!(p.shape().register_count, 2);
        assert!(p.shape().takes_input);
        assert_eq!(
            p.instructions()[1],
            Instruction::JumpIfZero {
                reg: Reg(0),
                target: 5
            }
        );
        assert_eq!(p.instructions()[4], Instruction::Jump { target: 1 });
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_assembly("HALT_ACCEPT\nFROB r0\n").unwrap_err();
        assert!(matches!(err, MachineError::Assembly { line: 2, .. }));
        let err = parse_assembly("JMP nowhere\n").unwrap_err();
        assert!(matches!(err, MachineError::Assembly { line: 1, .. }));
        let err = parse_assembly("HALT_ACCEPT\n.input\n").unwrap_err();
        assert!(matches!(err, MachineError::Assembly { line: 2, .. }));
        let err = parse_assembly("MOV r0\n").unwrap_err();
        assert!(matches!(err, MachineError::Assembly { line: 1, .. }));
    }

    #[test]
    fn semantic_errors_surface_as_invalid_program() {
        let err = parse_assembly(".registers 1\nMOV r0, r1\n").unwrap_err();
        assert!(matches!(err, MachineError::InvalidProgram(_)));
    }

    proptest! {
        #[test]
        fn listing_round_trips(p in crate::machine::serialize::tests::arb_program()) {
            prop_assert_eq!(parse_assembly(&to_assembly(&p)).unwrap(), p);
        }
    }
}
