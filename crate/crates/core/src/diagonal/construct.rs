use super::DiagonalError;
use crate::machine::{serialize, Instruction, Program, Reg};

/// Instructions placed before the classifier body.
pub const PROLOGUE_LEN: usize = 3;

/// The diagonal machine of `classifier`.
///
/// ```text
/// 0: LOADI r0, M - L      ; L = length of this program's own image
/// 1: SELF  r0, r0         ; image at the top of memory
/// 2: LOADI r0, 0
/// 3: classifier, jump targets shifted by 3, accept and reject swapped
///    HALT_ACCEPT          ; reached when the classifier falls off its end
/// ```
///
/// The formula arrives through the input channel at address 0, so the
/// classifier body sees the same memory below `M - L` as when it runs alone,
/// and the machine accepts exactly when the classifier rejects. Its runtime
/// is the classifier's plus 3.
pub fn build_diagonal_program(classifier: &Program) -> Result<Program, DiagonalError> {
    let shape = *classifier.shape();
    if !shape.takes_input {
        return Err(DiagonalError::Construction(
            "classifier must declare `.input`".into(),
        ));
    }
    if classifier.contains_self() {
        return Err(DiagonalError::Construction(
            "classifier must not use SELF".into(),
        ));
    }
    let body = classifier.instructions().iter().map(|ins| match *ins {
        Instruction::JumpIfZero { reg, target } => Instruction::JumpIfZero {
            reg,
            target: target + PROLOGUE_LEN as u16,
        },
        Instruction::Jump { target } => Instruction::Jump {
            target: target + PROLOGUE_LEN as u16,
        },
        Instruction::HaltAccept => Instruction::HaltReject,
        Instruction::HaltReject => Instruction::HaltAccept,
        other => other,
    });
    let assemble = |base: u32| {
        let mut ins = vec![
            Instruction::LoadImm {
                dst: Reg(0),
                value: base,
            },
            Instruction::SelfImage {
                dest: Reg(0),
                len: Reg(0),
            },
            Instruction::LoadImm {
                dst: Reg(0),
                value: 0,
            },
        ];
        ins.extend(body.clone());
        ins.push(Instruction::HaltAccept);
        Program::new(shape, ins).map_err(|e| DiagonalError::Construction(e.to_string()))
    };
    let draft = assemble(0)?;
    let len = serialize(&draft).len() as u64;
    if len > shape.memory_cells {
        return Err(DiagonalError::Construction(format!(
            "diagonal image of {len} bytes does not fit in {} memory cells",
            shape.memory_cells
        )));
    }
    assemble((shape.memory_cells - len) as u32)
}
