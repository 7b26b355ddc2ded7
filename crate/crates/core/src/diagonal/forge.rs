use sha2::{Digest, Sha256};

use super::{build_diagonal_program, DiagonalError, MisclassificationCertificate, PROLOGUE_LEN};
use crate::cnf::{eval, solve_dpll, write_dimacs, CnfFormula, DimacsPrefix, Verdict, VerdictTag};
use crate::machine::{self, run, run_traced, serialize, Program, RunTag};
use crate::tableau::{encode, encode_into};

/// Formulas up to this many variables go to the built-in DPLL oracle.
pub const DPLL_VAR_LIMIT: u32 = 5000;

/// Pin refinement rounds tried at each bound before moving on.
pub const MAX_REFINEMENTS: usize = 3;

const INITIAL_PREFIX: usize = 4096;

/// An independent satisfiability decision procedure.
pub trait SatOracle {
    fn name(&self) -> String;
    fn solve(&self, f: &CnfFormula) -> Result<Verdict, String>;
}

pub struct Dpll;

impl SatOracle for Dpll {
    fn name(&self) -> String {
        "dpll".into()
    }

    fn solve(&self, f: &CnfFormula) -> Result<Verdict, String> {
        Ok(solve_dpll(f))
    }
}

#[derive(Clone, Copy)]
pub struct ForgeOptions<'a> {
    pub t_cap: usize,
    /// Used instead of DPLL for formulas above [`DPLL_VAR_LIMIT`] variables.
    pub large_oracle: Option<&'a dyn SatOracle>,
}

impl ForgeOptions<'_> {
    pub fn with_cap(t_cap: usize) -> Self {
        ForgeOptions {
            t_cap,
            large_oracle: None,
        }
    }
}

/// What the search saw at one bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    /// The diagonal machine was still running after `t` steps.
    Exceeded,
    /// It halted after `runtime` steps; `rounds` pin sets were tried.
    Halted {
        runtime: u64,
        rounds: usize,
        converged: bool,
    },
    /// The formula would not fit below the machine's own image.
    TooLarge { len: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub t: usize,
    pub measurement: Measurement,
}

pub fn classifier_hash(classifier: &Program) -> String {
    Sha256::digest(serialize(classifier))
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub(crate) fn image_base(d: &Program) -> u64 {
    d.shape().memory_cells - serialize(d).len() as u64
}

pub(crate) fn verdict_of(tag: RunTag) -> Option<VerdictTag> {
    match tag {
        RunTag::Accept => Some(VerdictTag::Sat),
        RunTag::Reject => Some(VerdictTag::Unsat),
        RunTag::OutOfFuel => None,
    }
}

pub(crate) fn pins_from(reads: &[(u64, u32)]) -> Vec<(u64, u8)> {
    let mut pins: Vec<(u64, u8)> = reads.iter().map(|&(a, v)| (a, v as u8)).collect();
    pins.sort_unstable();
    pins
}

struct Probe {
    total_len: u64,
    outcome: machine::TracedRun,
}

/// Runs `d` for `t` steps on the formula `encode(d, pins, t)`, materializing
/// only as much of the formula text as the run reads.
fn probe(d: &Program, pins: &[(u64, u8)], t: usize) -> Result<Probe, DiagonalError> {
    let mut limit = INITIAL_PREFIX;
    loop {
        let mut sink = DimacsPrefix::new(limit);
        let layout = encode_into(d, pins, t, &mut sink)?;
        let (bytes, total) = sink.finish(layout.num_vars);
        let total_len = total as u64;
        if total_len > image_base(d) {
            return Ok(Probe {
                total_len,
                outcome: run_traced(d, &[], 0)?,
            });
        }
        let outcome = run_traced(d, &bytes, t as u64)?;
        let known = bytes.len() as u64;
        let missing = outcome
            .initial_reads
            .iter()
            .map(|&(a, _)| a)
            .filter(|&a| a >= known && a < total_len)
            .min();
        match missing {
            Some(a) => limit = ((a + 1) as usize).next_power_of_two().max(limit * 2),
            None => return Ok(Probe { total_len, outcome }),
        }
    }
}

/// Searches for a bound at which the diagonal machine of `classifier` is
/// self-consistent and returns the resulting certificate.
pub fn forge(
    classifier: &Program,
    opts: ForgeOptions<'_>,
) -> Result<MisclassificationCertificate, DiagonalError> {
    let d = build_diagonal_program(classifier)?;
    let mut transcript = Vec::new();
    let mut t = 4usize;
    while t <= opts.t_cap {
        let mut pins: Vec<(u64, u8)> = Vec::new();
        let mut rounds = 0;
        let entry = loop {
            rounds += 1;
            let p = probe(&d, &pins, t)?;
            if p.total_len > image_base(&d) {
                break Measurement::TooLarge { len: p.total_len };
            }
            let out = &p.outcome.outcome;
            if out.tag == RunTag::OutOfFuel {
                break Measurement::Exceeded;
            }
            let next = pins_from(&p.outcome.initial_reads);
            if next == pins {
                transcript.push(TranscriptEntry {
                    t,
                    measurement: Measurement::Halted {
                        runtime: out.steps_used,
                        rounds,
                        converged: true,
                    },
                });
                return finalize(classifier, d, pins, t, transcript, opts);
            }
            if rounds > MAX_REFINEMENTS {
                break Measurement::Halted {
                    runtime: out.steps_used,
                    rounds,
                    converged: false,
                };
            }
            pins = next;
        };
        transcript.push(TranscriptEntry {
            t,
            measurement: entry,
        });
        if matches!(entry, Measurement::TooLarge { .. }) {
            break;
        }
        t = match t.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
    }
    Err(DiagonalError::BoundNotFound { transcript })
}

fn finalize(
    classifier: &Program,
    d: Program,
    pins: Vec<(u64, u8)>,
    t: usize,
    transcript: Vec<TranscriptEntry>,
    opts: ForgeOptions<'_>,
) -> Result<MisclassificationCertificate, DiagonalError> {
    let hash = classifier_hash(classifier);
    let (forged, _) = encode(&d, &pins, t)?;
    let bytes = write_dimacs(&forged).into_bytes();

    let d_run = run(&d, &bytes, t as u64)?;
    let c_run = run(classifier, &bytes, t as u64)?;
    let Some(classifier_verdict) = verdict_of(c_run.tag) else {
        return Err(DiagonalError::ClassifierOutOfFuel {
            hash,
            fuel: t as u64,
        });
    };
    if verdict_of(d_run.tag) != Some(classifier_verdict.negate())
        || d_run.steps_used != c_run.steps_used + PROLOGUE_LEN as u64
    {
        return Err(DiagonalError::Inconsistent(format!(
            "diagonal run ({}, {} steps) does not mirror the classifier ({}, {} steps)",
            d_run.tag.as_str(),
            d_run.steps_used,
            c_run.tag.as_str(),
            c_run.steps_used
        )));
    }

    let oracle: &dyn SatOracle = match opts.large_oracle {
        Some(o) if forged.num_vars() > DPLL_VAR_LIMIT => o,
        _ => &Dpll,
    };
    let oracle_verdict = oracle.solve(&forged).map_err(DiagonalError::Oracle)?;
    if let Verdict::Sat(a) = &oracle_verdict {
        if !eval(&forged, a).unwrap_or(false) {
            return Err(DiagonalError::Oracle(format!(
                "{} returned a model that fails evaluation",
                oracle.name()
            )));
        }
    }
    if oracle_verdict.tag() == classifier_verdict {
        return Err(DiagonalError::Inconsistent(format!(
            "oracle agrees with the classifier ({}) on the forged formula",
            classifier_verdict
        )));
    }
    Ok(MisclassificationCertificate {
        classifier: classifier.clone(),
        classifier_hash: hash,
        diagonal_program: d,
        bound_t: t,
        diagonal_runtime: d_run.steps_used,
        pins,
        forged,
        classifier_verdict,
        oracle_verdict,
        oracle: oracle.name(),
        transcript,
    })
}
