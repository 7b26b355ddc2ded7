//! Canonical binary coding of programs.
//!
//! ```text
//! 0      magic 0x52
//! 1      register count
//! 2      word bits
//! 3      flags (bit 0: takes input; other bits zero)
//! 4      log2(memory cells)
//! 5..7   instruction count, u16 big-endian
//! 7..    instructions: opcode byte followed by fixed-width operands
//! ```
//!
//! | opcode | instruction   | operands                     |
//! |--------|---------------|------------------------------|
//! | 0x01   | LOADI r, c    | r: u8, c: u32 BE             |
//! | 0x02   | MOV r, s      | r: u8, s: u8                 |
//! | 0x03   | ADD r, s      | r: u8, s: u8                 |
//! | 0x04   | SUB r, s      | r: u8, s: u8                 |
//! | 0x05   | LOAD r, a     | r: u8, a: u8                 |
//! | 0x06   | STORE a, s    | a: u8, s: u8                 |
//! | 0x07   | JZ r, t       | r: u8, t: u16 BE             |
//! | 0x08   | JMP t         | t: u16 BE                    |
//! | 0x09   | SELF d, l     | d: u8, l: u8                 |
//! | 0x0A   | HALT_ACCEPT   |                              |
//! | 0x0B   | HALT_REJECT   |                              |
//!
//! Every field is fixed width and range-checked on decode, so the coding is
//! injective and `serialize(deserialize(b)) == b` for every accepted `b`.

use super::{Instruction, MachineError, MachineShape, Program, Reg};

const MAGIC: u8 = 0x52;

pub fn serialize(p: &Program) -> Vec<u8> {
    let shape = p.shape();
    let mut out = Vec::with_capacity(7 + p.len() * 4);
    out.push(MAGIC);
    out.push(shape.register_count);
    out.push(shape.word_bits);
    out.push(u8::from(shape.takes_input));
    out.push(shape.address_bits() as u8);
    out.extend_from_slice(&(p.len() as u16).to_be_bytes());
    for ins in p.instructions() {
        match *ins {
            Instruction::LoadImm { dst, value } => {
                out.extend_from_slice(&[0x01, dst.0]);
                out.extend_from_slice(&value.to_be_bytes());
            }
            Instruction::Mov { dst, src } => out.extend_from_slice(&[0x02, dst.0, src.0]),
            Instruction::Add { dst, src } => out.extend_from_slice(&[0x03, dst.0, src.0]),
            Instruction::Sub { dst, src } => out.extend_from_slice(&[0x04, dst.0, src.0]),
            Instruction::Load { dst, addr } => out.extend_from_slice(&[0x05, dst.0, addr.0]),
            Instruction::Store { addr, src } => out.extend_from_slice(&[0x06, addr.0, src.0]),
            Instruction::JumpIfZero { reg, target } => {
                out.extend_from_slice(&[0x07, reg.0]);
                out.extend_from_slice(&target.to_be_bytes());
            }
            Instruction::Jump { target } => {
                out.push(0x08);
                out.extend_from_slice(&target.to_be_bytes());
            }
            Instruction::SelfImage { dest, len } => out.extend_from_slice(&[0x09, dest.0, len.0]),
            Instruction::HaltAccept => out.push(0x0A),
            Instruction::HaltReject => out.push(0x0B),
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, reason: impl Into<String>) -> MachineError {
        MachineError::Decode {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn u8(&mut self) -> Result<u8, MachineError> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| self.err("truncated"))?;
        self.pos += 1;
        Ok(b)
    }

    fn u16(&mut self) -> Result<u16, MachineError> {
        Ok(u16::from_be_bytes([self.u8()?, self.u8()?]))
    }

    fn u32(&mut self) -> Result<u32, MachineError> {
        Ok(u32::from_be_bytes([
            self.u8()?,
            self.u8()?,
            self.u8()?,
            self.u8()?,
        ]))
    }
}

/// Decodes one program from the front of `bytes`, returning it with the
/// number of bytes consumed.
pub fn deserialize_prefix(bytes: &[u8]) -> Result<(Program, usize), MachineError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.u8()? != MAGIC {
        return Err(MachineError::Decode {
            offset: 0,
            reason: "bad magic byte".into(),
        });
    }
    let register_count = r.u8()?;
    let word_bits = r.u8()?;
    let flags_at = r.pos;
    let flags = r.u8()?;
    if flags & !1 != 0 {
        return Err(MachineError::Decode {
            offset: flags_at,
            reason: format!("unknown flag bits {flags:#04x}"),
        });
    }
    let log_at = r.pos;
    let log_cells = r.u8()?;
    if log_cells > 63 {
        return Err(MachineError::Decode {
            offset: log_at,
            reason: "memory size exponent too large".into(),
        });
    }
    let count = r.u16()? as usize;
    let mut instructions = Vec::with_capacity(count);
    for _ in 0..count {
        let op_at = r.pos;
        let ins = match r.u8()? {
            0x01 => Instruction::LoadImm {
                dst: Reg(r.u8()?),
                value: r.u32()?,
            },
            0x02 => Instruction::Mov {
                dst: Reg(r.u8()?),
                src: Reg(r.u8()?),
            },
            0x03 => Instruction::Add {
                dst: Reg(r.u8()?),
                src: Reg(r.u8()?),
            },
            0x04 => Instruction::Sub {
                dst: Reg(r.u8()?),
                src: Reg(r.u8()?),
            },
            0x05 => Instruction::Load {
                dst: Reg(r.u8()?),
                addr: Reg(r.u8()?),
            },
            0x06 => Instruction::Store {
                addr: Reg(r.u8()?),
                src: Reg(r.u8()?),
            },
            0x07 => Instruction::JumpIfZero {
                reg: Reg(r.u8()?),
                target: r.u16()?,
            },
            0x08 => Instruction::Jump { target: r.u16()? },
            0x09 => Instruction::SelfImage {
                dest: Reg(r.u8()?),
                len: Reg(r.u8()?),
            },
            0x0A => Instruction::HaltAccept,
            0x0B => Instruction::HaltReject,
            op => {
                return Err(MachineError::Decode {
                    offset: op_at,
                    reason: format!("unknown opcode {op:#04x}"),
                })
            }
        };
        instructions.push(ins);
    }
    let shape = MachineShape {
        register_count,
        word_bits,
        memory_cells: 1u64 << log_cells,
        takes_input: flags & 1 == 1,
    };
    let program = Program::new(shape, instructions).map_err(|e| MachineError::Decode {
        offset: r.pos,
        reason: e.to_string(),
    })?;
    Ok((program, r.pos))
}

/// Decodes a program that must occupy all of `bytes`.
pub fn deserialize(bytes: &[u8]) -> Result<Program, MachineError> {
    let (p, used) = deserialize_prefix(bytes)?;
    if used != bytes.len() {
        return Err(MachineError::Decode {
            offset: used,
            reason: "trailing bytes".into(),
        });
    }
    Ok(p)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn accept_only() -> Program {
        Program::new(MachineShape::default(), vec![Instruction::HaltAccept]).unwrap()
    }

    #[test]
    fn halt_accept_bytes_are_locked() {
        // default shape: 4 registers, 16-bit words, 256 cells, no input
        assert_eq!(
            serialize(&accept_only()),
            vec![0x52, 4, 16, 0, 8, 0, 1, 0x0A]
        );
    }

    #[test]
    fn one_constant_changes_bytes() {
        let mk = |c| {
            Program::new(
                MachineShape::default(),
                vec![
                    Instruction::LoadImm {
                        dst: Reg(0),
                        value: c,
                    },
                    Instruction::HaltAccept,
                ],
            )
            .unwrap()
        };
        assert_ne!(serialize(&mk(5)), serialize(&mk(6)));
    }

    #[test]
    fn truncated_input_reports_offset() {
        let bytes = serialize(&accept_only());
        let err = deserialize(&bytes[..7]).unwrap_err();
        assert_eq!(
            err,
            MachineError::Decode {
                offset: 7,
                reason: "truncated".into()
            }
        );
        let err = deserialize(&[0x53]).unwrap_err();
        assert!(matches!(err, MachineError::Decode { offset: 0, .. }));
    }

    #[test]
    fn trailing_bytes_rejected_but_prefix_decodes() {
        let mut bytes = serialize(&accept_only());
        bytes.push(0xFF);
        assert!(matches!(
            deserialize(&bytes),
            Err(MachineError::Decode { offset: 8, .. })
        ));
        assert_eq!(deserialize_prefix(&bytes).unwrap(), (accept_only(), 8));
    }

    #[test]
    fn semantic_violation_is_decode_error() {
        // JMP 5 in a one-instruction program
        let bytes = vec![0x52, 4, 16, 0, 8, 0, 1, 0x08, 0, 5];
        assert!(matches!(
            deserialize(&bytes),
            Err(MachineError::Decode { .. })
        ));
        // unknown opcode
        let bytes = vec![0x52, 4, 16, 0, 8, 0, 1, 0x0C];
        assert!(matches!(
            deserialize(&bytes),
            Err(MachineError::Decode { offset: 7, .. })
        ));
    }

    pub(crate) fn arb_program() -> impl Strategy<Value = Program> {
        (1u8..=8, 8u8..=32, any::<bool>(), 1usize..12).prop_flat_map(|(regs, bits, input, n)| {
            let reg = (0..regs).prop_map(Reg);
            let target = (0..n as u16).boxed();
            let mask = (1u64 << bits) - 1;
            let value = any::<u32>().prop_map(move |v| (u64::from(v) & mask) as u32);
            let ins = prop_oneof![
                (reg.clone(), value).prop_map(|(dst, value)| Instruction::LoadImm { dst, value }),
                (reg.clone(), reg.clone()).prop_map(|(dst, src)| Instruction::Mov { dst, src }),
                (reg.clone(), reg.clone()).prop_map(|(dst, src)| Instruction::Add { dst, src }),
                (reg.clone(), reg.clone()).prop_map(|(dst, src)| Instruction::Sub { dst, src }),
                (reg.clone(), reg.clone()).prop_map(|(dst, addr)| Instruction::Load { dst, addr }),
                (reg.clone(), reg.clone()).prop_map(|(addr, src)| Instruction::Store { addr, src }),
                (reg.clone(), target.clone())
                    .prop_map(|(reg, target)| Instruction::JumpIfZero { reg, target }),
                target.prop_map(|target| Instruction::Jump { target }),
                (reg.clone(), reg).prop_map(|(dest, len)| Instruction::SelfImage { dest, len }),
                Just(Instruction::HaltAccept),
                Just(Instruction::HaltReject),
            ];
            (prop::collection::vec(ins, n), 0..=u32::from(bits)).prop_map(
                move |(instructions, log_cells)| {
                    let shape = MachineShape {
                        register_count: regs,
                        word_bits: bits,
                        memory_cells: 1u64 << log_cells,
                        takes_input: input,
                    };
                    Program::new(shape, instructions).unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn round_trip_identity(p in arb_program()) {
            let bytes = serialize(&p);
            let back = deserialize(&bytes).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(serialize(&back), bytes);
        }

        #[test]
        fn accepted_bytes_reserialize_verbatim(bytes in prop::collection::vec(any::<u8>(), 0..24)) {
            let mut framed = vec![0x52, 2, 16, 0, 4, 0, 2];
            framed.extend(bytes);
            if let Ok(p) = deserialize(&framed) {
                prop_assert_eq!(serialize(&p), framed);
            }
        }
    }
}
