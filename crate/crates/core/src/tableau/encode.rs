use std::collections::{BTreeSet, HashSet};

use super::gates::{const_bits, var_bits, Bit, Builder, FALSE, TRUE};
use super::{ReadRecord, StateVars, TableauError, TableauLayout};
use crate::cnf::{ClauseSink, CnfFormula, Lit};
use crate::machine::{serialize, Instruction, Program};

/// Static over-approximation of the pcs each step can execute, for steps
/// `0..t`. Halted runs stay at their halt instruction.
pub fn reachable_pcs(p: &Program, t: usize) -> Vec<Vec<usize>> {
    let n = p.len();
    let mut out = Vec::with_capacity(t);
    let mut cur: BTreeSet<usize> = BTreeSet::from([0]);
    for _ in 0..t {
        let mut next = BTreeSet::new();
        for &k in &cur {
            match p.fetch(k) {
                _ if k == n => {
                    next.insert(k);
                }
                Instruction::HaltAccept | Instruction::HaltReject => {
                    next.insert(k);
                }
                Instruction::Jump { target } => {
                    next.insert(target as usize);
                }
                Instruction::JumpIfZero { target, .. } => {
                    next.insert(target as usize);
                    next.insert(k + 1);
                }
                _ => {
                    next.insert(k + 1);
                }
            }
        }
        out.push(cur.into_iter().collect());
        cur = next;
    }
    out
}

fn bits_for(max_value: u64) -> usize {
    (64 - max_value.leading_zeros() as usize).max(1)
}

struct WriteRec {
    store: Bit,
    self_image: Bit,
    addr: Vec<Bit>,
    value: Vec<Bit>,
}

enum NextPc {
    Fixed(u64),
    Branch {
        zero: Bit,
        target: u64,
        fallthrough: u64,
    },
}

struct Encoder<'s, S: ClauseSink> {
    b: Builder<'s, S>,
    word_bits: usize,
    image: Vec<u8>,
    /// Address bits needed to index into the SELF image.
    image_index_bits: usize,
    writes: Vec<WriteRec>,
    reads: Vec<ReadRecord>,
}

impl<S: ClauseSink> Encoder<'_, S> {
    fn state_block(&mut self, pc_bits: usize, registers: usize) -> StateVars {
        let pc = self.b.fresh_bits(pc_bits);
        let registers = (0..registers)
            .map(|_| self.b.fresh_bits(self.word_bits))
            .collect();
        let halted = self.b.fresh();
        let accepted = self.b.fresh();
        StateVars {
            pc,
            registers,
            halted,
            accepted,
        }
    }

    fn define_state(
        &mut self,
        pc: &[Bit],
        registers: &[Vec<Bit>],
        halted: Bit,
        accepted: Bit,
    ) -> StateVars {
        let pc = pc.iter().map(|&x| self.b.define(x)).collect();
        let registers = registers
            .iter()
            .map(|r| r.iter().map(|&x| self.b.define(x)).collect())
            .collect();
        let halted = self.b.define(halted);
        let accepted = self.b.define(accepted);
        StateVars {
            pc,
            registers,
            halted,
            accepted,
        }
    }

    /// Minterms `m[o] = (index == o)` for `o < count`, index bits least
    /// significant first.
    fn decoder(&mut self, index: &[Bit], count: usize) -> Vec<Bit> {
        let k = index.len();
        let mut level = vec![TRUE];
        for depth in 0..k {
            let bit = index[k - 1 - depth];
            let span = 1usize << (k - 1 - depth);
            let mut next = Vec::with_capacity(level.len() * 2);
            for (v, &m) in level.iter().enumerate() {
                for choice in 0..2 {
                    let value = v * 2 + choice;
                    if value * span < count {
                        let lit = if choice == 1 { bit } else { !bit };
                        next.push(self.b.and2(m, lit));
                    }
                }
            }
            level = next;
        }
        level.truncate(count);
        level
    }

    /// Builds the access record of a reading step and returns its value bits.
    fn read_record(&mut self, step: usize, is_read: Bit, addr: &[Bit]) -> Vec<Bit> {
        let is_read_v = self.b.define(is_read);
        let addr_v: Vec<u32> = addr.iter().map(|&x| self.b.define(x)).collect();
        let addr = var_bits(&addr_v);
        let image_len = self.image.len() as u64;

        let mut hits = Vec::with_capacity(self.writes.len());
        let mut offsets = Vec::with_capacity(self.writes.len());
        for idx in 0..self.writes.len() {
            let (store, self_image) = (self.writes[idx].store, self.writes[idx].self_image);
            let store_hit = if store != FALSE {
                let wa = self.writes[idx].addr.clone();
                let same = self.b.eq(&wa, &addr);
                self.b.and2(store, same)
            } else {
                FALSE
            };
            let (self_hit, offset) = if self_image != FALSE {
                let wa = self.writes[idx].addr.clone();
                let offset = self.b.sub(&addr, &wa);
                let inside = self.b.lt_const(&offset, image_len);
                (self.b.and2(self_image, inside), offset)
            } else {
                (FALSE, Vec::new())
            };
            hits.push(self.b.or2(store_hit, self_hit));
            offsets.push(offset);
        }

        let mut latest = vec![FALSE; hits.len()];
        let mut later = FALSE;
        for idx in (0..hits.len()).rev() {
            latest[idx] = self.b.and2(hits[idx], !later);
            later = self.b.or2(later, hits[idx]);
        }
        let initial = self.b.and2(Bit::var(is_read_v), !later);
        let initial_v = self.b.define(initial);
        let initial = Bit::var(initial_v);

        let ivar = self.b.fresh_bits(self.word_bits);
        for &v in &ivar {
            self.b.clause(&[initial, !Bit::var(v)]);
        }
        // two initial reads of one cell see one value
        for r in 0..self.reads.len() {
            let other = var_bits(&self.reads[r].addr);
            let same = self.b.eq(&other, &addr);
            let other_initial = Bit::var(self.reads[r].initial);
            for bit in 0..self.word_bits {
                let x = Bit::var(self.reads[r].initial_value[bit]);
                let y = Bit::var(ivar[bit]);
                self.b.clause(&[!other_initial, !initial, !same, !x, y]);
                self.b.clause(&[!other_initial, !initial, !same, x, !y]);
            }
        }

        let mut from_self = Vec::new();
        let mut selected_offset: Vec<Vec<Bit>> = vec![Vec::new(); self.image_index_bits];
        for idx in 0..hits.len() {
            let si = self.writes[idx].self_image;
            if si == FALSE {
                continue;
            }
            let chosen = self.b.and2(latest[idx], si);
            from_self.push(chosen);
            for (bit, slot) in selected_offset.iter_mut().enumerate() {
                let term = self.b.and2(chosen, offsets[idx][bit]);
                slot.push(term);
            }
        }
        let lookup = if from_self.is_empty() {
            Vec::new()
        } else {
            let self_sel = self.b.or(&from_self);
            let index: Vec<Bit> = selected_offset
                .iter()
                .map(|terms| self.b.or(terms))
                .collect();
            let minterms = self.decoder(&index, self.image.len());
            (0..8)
                .map(|bit| {
                    let ones: Vec<Bit> = minterms
                        .iter()
                        .zip(&self.image)
                        .filter(|(_, &byte)| byte >> bit & 1 == 1)
                        .map(|(&m, _)| m)
                        .collect();
                    let any = self.b.or(&ones);
                    self.b.and2(self_sel, any)
                })
                .collect()
        };

        let mut value_v = Vec::with_capacity(self.word_bits);
        for bit in 0..self.word_bits {
            let mut terms = Vec::new();
            for idx in 0..hits.len() {
                let w = &self.writes[idx];
                if w.store != FALSE {
                    let (store, wv) = (w.store, w.value[bit]);
                    terms.push(self.b.and(&[latest[idx], store, wv]));
                }
            }
            if let Some(&l) = lookup.get(bit) {
                terms.push(l);
            }
            terms.push(self.b.and2(initial, Bit::var(ivar[bit])));
            let v = self.b.or(&terms);
            value_v.push(self.b.define(v));
        }

        self.reads.push(ReadRecord {
            step,
            is_read: is_read_v,
            initial: initial_v,
            addr: addr_v,
            initial_value: ivar,
            value: value_v.clone(),
        });
        var_bits(&value_v)
    }
}

fn validate(p: &Program, pins: &[(u64, u8)], t: usize) -> Result<(), TableauError> {
    if t == 0 {
        return Err(TableauError::ZeroBound);
    }
    let cells = p.shape().memory_cells;
    let mut seen = HashSet::new();
    for &(addr, _) in pins {
        if addr >= cells {
            return Err(TableauError::PinOutOfRange { addr, cells });
        }
        if !seen.insert(addr) {
            return Err(TableauError::DuplicatePin(addr));
        }
    }
    if p.contains_self() {
        let len = serialize(p).len();
        if len as u64 > cells {
            return Err(TableauError::SelfImageTooLong { len, cells });
        }
    }
    Ok(())
}

/// Streams the tableau of `p` into `sink`.
pub fn encode_into<S: ClauseSink>(
    p: &Program,
    pins: &[(u64, u8)],
    t: usize,
    sink: &mut S,
) -> Result<TableauLayout, TableauError> {
    validate(p, pins, t)?;
    let shape = *p.shape();
    let n = p.len();
    let word_bits = shape.word_bits as usize;
    let addr_bits = shape.address_bits() as usize;
    let pc_bits = bits_for(n as u64);
    let image = if p.contains_self() {
        serialize(p)
    } else {
        Vec::new()
    };
    let image_index_bits = if image.is_empty() {
        0
    } else {
        bits_for(image.len() as u64 - 1)
    };
    let reach = reachable_pcs(p, t);

    let mut enc = Encoder {
        b: Builder::new(sink),
        word_bits,
        image,
        image_index_bits,
        writes: Vec::new(),
        reads: Vec::new(),
    };

    let s0 = enc.state_block(pc_bits, shape.register_count as usize);
    for v in s0
        .pc
        .iter()
        .chain(s0.registers.iter().flatten())
        .chain([&s0.halted, &s0.accepted])
    {
        enc.b.clause(&[!Bit::var(*v)]);
    }
    let mut states = vec![s0];

    for (i, pcs) in reach.iter().enumerate() {
        let cur = &states[i];
        let pc = var_bits(&cur.pc);
        let regs: Vec<Vec<Bit>> = cur.registers.iter().map(|r| var_bits(r)).collect();
        let (halted, accepted) = (Bit::var(cur.halted), Bit::var(cur.accepted));

        let at: Vec<(usize, Bit)> = if pcs.len() == 1 {
            vec![(pcs[0], TRUE)]
        } else {
            pcs.iter()
                .map(|&k| (k, enc.b.eq_const(&pc, k as u64)))
                .collect()
        };
        let fetch = |k: usize| {
            if k == n {
                Instruction::HaltReject
            } else {
                p.fetch(k)
            }
        };

        // memory side of the step
        let mut loads = Vec::new();
        let mut stores = Vec::new();
        let mut selfs = Vec::new();
        let mut addr_terms: Vec<(Bit, usize)> = Vec::new();
        for &(k, a) in &at {
            match fetch(k) {
                Instruction::Load { addr, .. } => {
                    loads.push(a);
                    addr_terms.push((a, addr.index()));
                }
                Instruction::Store { addr, .. } => {
                    stores.push(a);
                    addr_terms.push((a, addr.index()));
                }
                Instruction::SelfImage { dest, .. } => {
                    selfs.push(a);
                    addr_terms.push((a, dest.index()));
                }
                _ => {}
            }
        }
        let mut addr = Vec::with_capacity(addr_bits);
        if !addr_terms.is_empty() {
            for bit in 0..addr_bits {
                let terms: Vec<Bit> = addr_terms
                    .iter()
                    .map(|&(a, r)| enc.b.and2(a, regs[r][bit]))
                    .collect();
                addr.push(enc.b.or(&terms));
            }
        }
        let loaded = if loads.is_empty() {
            None
        } else {
            let is_read = enc.b.or(&loads);
            Some(enc.read_record(i, is_read, &addr))
        };
        if !stores.is_empty() || !selfs.is_empty() {
            let store = enc.b.or(&stores);
            let self_image = enc.b.or(&selfs);
            let mut value = Vec::with_capacity(word_bits);
            for bit in 0..word_bits {
                let terms: Vec<Bit> = at
                    .iter()
                    .filter_map(|&(k, a)| match fetch(k) {
                        Instruction::Store { src, .. } => Some((a, src.index())),
                        _ => None,
                    })
                    .map(|(a, r)| enc.b.and2(a, regs[r][bit]))
                    .collect();
                value.push(enc.b.or(&terms));
            }
            enc.writes.push(WriteRec {
                store,
                self_image,
                addr: addr.clone(),
                value,
            });
        }

        // register updates and successor pc
        let mut writers: Vec<Vec<(Bit, Vec<Bit>)>> = vec![Vec::new(); regs.len()];
        let mut next_pc: Vec<(Bit, NextPc)> = Vec::with_capacity(at.len());
        let mut halts = Vec::new();
        let mut accepts = Vec::new();
        let image_len = enc.image.len() as u64;
        for &(k, a) in &at {
            let ins = fetch(k);
            let step_over = NextPc::Fixed(k as u64 + 1);
            let next = match ins {
                Instruction::LoadImm { dst, value } => {
                    writers[dst.index()].push((a, const_bits(u64::from(value), word_bits)));
                    step_over
                }
                Instruction::Mov { dst, src } => {
                    writers[dst.index()].push((a, regs[src.index()].clone()));
                    step_over
                }
                Instruction::Add { dst, src } => {
                    let sum = enc.b.add(&regs[dst.index()], &regs[src.index()], FALSE);
                    writers[dst.index()].push((a, sum));
                    step_over
                }
                Instruction::Sub { dst, src } => {
                    let diff = enc.b.sub(&regs[dst.index()], &regs[src.index()]);
                    writers[dst.index()].push((a, diff));
                    step_over
                }
                Instruction::Load { dst, .. } => {
                    let v = loaded.clone().expect("reading step has a record");
                    writers[dst.index()].push((a, v));
                    step_over
                }
                Instruction::Store { .. } => step_over,
                Instruction::SelfImage { len, .. } => {
                    writers[len.index()]
                        .push((a, const_bits(image_len & shape.word_mask(), word_bits)));
                    step_over
                }
                Instruction::JumpIfZero { reg, target } => {
                    let nonzero = enc.b.or(&regs[reg.index()]);
                    NextPc::Branch {
                        zero: !nonzero,
                        target: u64::from(target),
                        fallthrough: k as u64 + 1,
                    }
                }
                Instruction::Jump { target } => NextPc::Fixed(u64::from(target)),
                Instruction::HaltAccept => {
                    halts.push(a);
                    accepts.push(a);
                    NextPc::Fixed(k as u64)
                }
                Instruction::HaltReject => {
                    halts.push(a);
                    NextPc::Fixed(k as u64)
                }
            };
            next_pc.push((a, next));
        }

        let mut new_pc = Vec::with_capacity(pc_bits);
        for bit in 0..pc_bits {
            let mut terms = Vec::new();
            for (a, next) in &next_pc {
                let chosen = match *next {
                    NextPc::Fixed(v) => Bit::Const(v >> bit & 1 == 1),
                    NextPc::Branch {
                        zero,
                        target,
                        fallthrough,
                    } => enc.b.mux(
                        zero,
                        Bit::Const(target >> bit & 1 == 1),
                        Bit::Const(fallthrough >> bit & 1 == 1),
                    ),
                };
                terms.push(enc.b.and2(*a, chosen));
            }
            new_pc.push(enc.b.or(&terms));
        }

        let mut new_regs = Vec::with_capacity(regs.len());
        for (r, ws) in writers.iter().enumerate() {
            if ws.is_empty() {
                new_regs.push(regs[r].clone());
                continue;
            }
            let gates: Vec<Bit> = ws.iter().map(|(a, _)| *a).collect();
            let written = enc.b.or(&gates);
            let mut bits = Vec::with_capacity(word_bits);
            for bit in 0..word_bits {
                let mut terms: Vec<Bit> = ws.iter().map(|(a, v)| enc.b.and2(*a, v[bit])).collect();
                terms.push(enc.b.and2(!written, regs[r][bit]));
                bits.push(enc.b.or(&terms));
            }
            new_regs.push(bits);
        }

        halts.push(halted);
        accepts.push(accepted);
        let new_halted = enc.b.or(&halts);
        let new_accepted = enc.b.or(&accepts);
        let next = enc.define_state(&new_pc, &new_regs, new_halted, new_accepted);
        states.push(next);
    }

    let accept_var = states[t].accepted;
    enc.b.clause(&[Bit::var(accept_var)]);

    for &(addr, byte) in pins {
        for r in 0..enc.reads.len() {
            let rec_addr = var_bits(&enc.reads[r].addr);
            let same = enc.b.eq_const(&rec_addr, addr);
            let initial = Bit::var(enc.reads[r].initial);
            for bit in 0..word_bits {
                let v = Bit::var(enc.reads[r].initial_value[bit]);
                let want = bit < 8 && byte >> bit & 1 == 1;
                enc.b.clause(&[!initial, !same, if want { v } else { !v }]);
            }
        }
    }

    Ok(TableauLayout {
        program: p.clone(),
        t,
        pinned: pins.to_vec(),
        num_vars: enc.b.num_vars(),
        num_clauses: enc.b.num_clauses(),
        states,
        reads: enc.reads,
    })
}

/// Encodes "p accepts within t steps from a memory agreeing with `pins`".
pub fn encode(
    p: &Program,
    pins: &[(u64, u8)],
    t: usize,
) -> Result<(CnfFormula, TableauLayout), TableauError> {
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let layout = encode_into(p, pins, t, &mut clauses)?;
    let f = CnfFormula::new(layout.num_vars, clauses).expect("encoder emits in-range literals");
    Ok((f, layout))
}
