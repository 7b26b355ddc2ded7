use std::fmt::{self, Write as _};

use thiserror::Error;

use super::forge::{image_base, pins_from, verdict_of};
use super::{build_diagonal_program, classifier_hash, Measurement, TranscriptEntry};
use crate::cnf::{
    eval, parse_dimacs, solve_dpll, write_dimacs, Assignment, CnfFormula, Verdict, VerdictTag,
};
use crate::machine::{parse_assembly, run, run_traced, to_assembly, Program, RunTag};
use crate::tableau::encode;

const MAGIC: &str = "fixpoint-certificate v1";

/// Everything needed to re-check a forged misclassification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisclassificationCertificate {
    pub classifier: Program,
    /// SHA-256 of the classifier's byte image, lowercase hex.
    pub classifier_hash: String,
    pub diagonal_program: Program,
    pub bound_t: usize,
    pub diagonal_runtime: u64,
    /// Memory cells fixed in the forged formula, sorted by address.
    pub pins: Vec<(u64, u8)>,
    pub forged: CnfFormula,
    pub classifier_verdict: VerdictTag,
    pub oracle_verdict: Verdict,
    pub oracle: String,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    ClassifierHash,
    DiagonalProgram,
    Rederivation,
    ClassifierSimulation,
    Oracle,
    Disagreement,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::ClassifierHash => "classifier-hash",
            Check::DiagonalProgram => "diagonal-program",
            Check::Rederivation => "rederivation",
            Check::ClassifierSimulation => "classifier-simulation",
            Check::Oracle => "oracle",
            Check::Disagreement => "disagreement",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{check} check failed: {detail}")]
pub struct VerifyFailure {
    pub check: Check,
    pub detail: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("certificate line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

fn fail(check: Check, detail: impl Into<String>) -> VerifyFailure {
    VerifyFailure {
        check,
        detail: detail.into(),
    }
}

/// Re-checks a certificate from scratch, using only the classifier, the
/// bound and the simulator.
pub fn verify_certificate(cert: &MisclassificationCertificate) -> Result<(), VerifyFailure> {
    let hash = classifier_hash(&cert.classifier);
    if hash != cert.classifier_hash {
        return Err(fail(
            Check::ClassifierHash,
            format!("recorded {}, computed {hash}", cert.classifier_hash),
        ));
    }

    let d = build_diagonal_program(&cert.classifier)
        .map_err(|e| fail(Check::DiagonalProgram, e.to_string()))?;
    if d != cert.diagonal_program {
        return Err(fail(
            Check::DiagonalProgram,
            "recorded program differs from the rebuilt one",
        ));
    }

    let t = cert.bound_t;
    let bytes = write_dimacs(&cert.forged).into_bytes();
    if bytes.len() as u64 > image_base(&d) {
        return Err(fail(
            Check::Rederivation,
            "formula overlaps the diagonal image",
        ));
    }
    let traced =
        run_traced(&d, &bytes, t as u64).map_err(|e| fail(Check::Rederivation, e.to_string()))?;
    if traced.outcome.tag == RunTag::OutOfFuel {
        return Err(fail(
            Check::Rederivation,
            format!("diagonal machine does not halt within {t} steps"),
        ));
    }
    if traced.outcome.steps_used != cert.diagonal_runtime {
        return Err(fail(
            Check::Rederivation,
            format!(
                "diagonal runtime {} differs from recorded {}",
                traced.outcome.steps_used, cert.diagonal_runtime
            ),
        ));
    }
    let pins = pins_from(&traced.initial_reads);
    if pins != cert.pins {
        return Err(fail(
            Check::Rederivation,
            "cells read by the diagonal machine differ from the recorded pins",
        ));
    }
    let (rebuilt, _) =
        encode(&d, &pins, t).map_err(|e| fail(Check::Rederivation, e.to_string()))?;
    if rebuilt != cert.forged {
        return Err(fail(
            Check::Rederivation,
            "re-encoding the diagonal machine gives a different formula",
        ));
    }

    let c_run = run(&cert.classifier, &bytes, t as u64)
        .map_err(|e| fail(Check::ClassifierSimulation, e.to_string()))?;
    let Some(verdict) = verdict_of(c_run.tag) else {
        return Err(fail(
            Check::ClassifierSimulation,
            format!("classifier does not halt within {t} steps"),
        ));
    };
    if verdict != cert.classifier_verdict {
        return Err(fail(
            Check::ClassifierSimulation,
            format!(
                "classifier answers {verdict}, certificate records {}",
                cert.classifier_verdict
            ),
        ));
    }

    match &cert.oracle_verdict {
        Verdict::Sat(a) => {
            if !eval(&cert.forged, a).unwrap_or(false) {
                return Err(fail(
                    Check::Oracle,
                    "recorded witness does not satisfy the formula",
                ));
            }
        }
        Verdict::Unsat => {
            if solve_dpll(&cert.forged).tag() != VerdictTag::Unsat {
                return Err(fail(Check::Oracle, "formula is satisfiable"));
            }
        }
    }

    if cert.oracle_verdict.tag() == verdict {
        return Err(fail(
            Check::Disagreement,
            format!("classifier and oracle both say {verdict}"),
        ));
    }
    Ok(())
}

fn measurement_line(e: &TranscriptEntry) -> String {
    match e.measurement {
        Measurement::Exceeded => format!("t={} exceeded", e.t),
        Measurement::Halted {
            runtime,
            rounds,
            converged,
        } => {
            format!(
                "t={} halted runtime={runtime} rounds={rounds} converged={converged}",
                e.t
            )
        }
        Measurement::TooLarge { len } => format!("t={} too-large len={len}", e.t),
    }
}

fn section(out: &mut String, name: &str, lines: &[String]) {
    let _ = writeln!(out, "begin {name} {}", lines.len());
    for l in lines {
        out.push_str(l);
        out.push('\n');
    }
    let _ = writeln!(out, "end {name}");
}

fn text_lines(s: &str) -> Vec<String> {
    s.lines().map(str::to_owned).collect()
}

impl MisclassificationCertificate {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        let _ = writeln!(out, "classifier-sha256 {}", self.classifier_hash);
        let _ = writeln!(out, "bound {}", self.bound_t);
        let _ = writeln!(out, "diagonal-runtime {}", self.diagonal_runtime);
        let _ = writeln!(out, "classifier-verdict {}", self.classifier_verdict);
        let _ = writeln!(out, "oracle-verdict {}", self.oracle_verdict.tag());
        let _ = writeln!(out, "oracle {}", self.oracle);
        section(
            &mut out,
            "classifier",
            &text_lines(&to_assembly(&self.classifier)),
        );
        section(
            &mut out,
            "diagonal",
            &text_lines(&to_assembly(&self.diagonal_program)),
        );
        section(
            &mut out,
            "pins",
            &self
                .pins
                .iter()
                .map(|(a, b)| format!("{a} {b}"))
                .collect::<Vec<_>>(),
        );
        section(
            &mut out,
            "transcript",
            &self
                .transcript
                .iter()
                .map(measurement_line)
                .collect::<Vec<_>>(),
        );
        let witness: Vec<String> = match self.oracle_verdict.witness() {
            Some(a) => {
                let mut line: String = a.to_literals().iter().map(|l| format!("{l} ")).collect();
                line.push('0');
                vec![line]
            }
            None => Vec::new(),
        };
        section(&mut out, "witness", &witness);
        section(&mut out, "dimacs", &text_lines(&write_dimacs(&self.forged)));
        out
    }
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, reason: impl Into<String>) -> ParseError {
        ParseError {
            line: self.pos.max(1),
            reason: reason.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str, ParseError> {
        let l = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| ParseError {
                line: self.pos + 1,
                reason: "unexpected end of certificate".into(),
            })?;
        self.pos += 1;
        Ok(l)
    }

    fn key(&mut self, key: &str) -> Result<&'a str, ParseError> {
        let l = self.next()?;
        l.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key}`")))
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ParseError> {
        let v = self.key(key)?;
        v.parse()
            .map_err(|_| self.err(format!("`{key}` is not a number")))
    }

    fn verdict(&mut self, key: &str) -> Result<VerdictTag, ParseError> {
        let v = self.key(key)?;
        VerdictTag::parse(v).ok_or_else(|| self.err(format!("`{key}` must be SAT or UNSAT")))
    }

    fn section(&mut self, name: &str) -> Result<Vec<&'a str>, ParseError> {
        let n: usize = self.number(&format!("begin {name}"))?;
        let mut body = Vec::with_capacity(n);
        for _ in 0..n {
            body.push(self.next()?);
        }
        if self.next()? != format!("end {name}") {
            return Err(self.err(format!("expected `end {name}`")));
        }
        Ok(body)
    }
}

fn parse_program(r: &Reader<'_>, lines: &[&str]) -> Result<Program, ParseError> {
    let mut text = lines.join("\n");
    text.push('\n');
    parse_assembly(&text).map_err(|e| r.err(e.to_string()))
}

fn parse_entry(line: &str) -> Option<TranscriptEntry> {
    let mut words = line.split(' ');
    let t = words.next()?.strip_prefix("t=")?.parse().ok()?;
    let field = |w: Option<&str>, key: &str| w.and_then(|w| w.strip_prefix(key)).map(str::to_owned);
    let measurement = match words.next()? {
        "exceeded" => Measurement::Exceeded,
        "halted" => Measurement::Halted {
            runtime: field(words.next(), "runtime=")?.parse().ok()?,
            rounds: field(words.next(), "rounds=")?.parse().ok()?,
            converged: field(words.next(), "converged=")?.parse().ok()?,
        },
        "too-large" => Measurement::TooLarge {
            len: field(words.next(), "len=")?.parse().ok()?,
        },
        _ => return None,
    };
    words
        .next()
        .is_none()
        .then_some(TranscriptEntry { t, measurement })
}

pub fn parse_certificate(text: &str) -> Result<MisclassificationCertificate, ParseError> {
    let mut r = Reader {
        lines: text.lines().collect(),
        pos: 0,
    };
    if r.next()? != MAGIC {
        return Err(r.err(format!("expected `{MAGIC}`")));
    }
    let classifier_hash = r.key("classifier-sha256")?.to_owned();
    let bound_t = r.number("bound")?;
    let diagonal_runtime = r.number("diagonal-runtime")?;
    let classifier_verdict = r.verdict("classifier-verdict")?;
    let oracle_tag = r.verdict("oracle-verdict")?;
    let oracle = r.key("oracle")?.to_owned();

    let body = r.section("classifier")?;
    let classifier = parse_program(&r, &body)?;
    let body = r.section("diagonal")?;
    let diagonal_program = parse_program(&r, &body)?;

    let mut pins = Vec::new();
    for l in r.section("pins")? {
        let pin = l
            .split_once(' ')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)));
        pins.push(pin.ok_or_else(|| r.err(format!("bad pin `{l}`")))?);
    }
    let mut transcript = Vec::new();
    for l in r.section("transcript")? {
        transcript
            .push(parse_entry(l).ok_or_else(|| r.err(format!("bad transcript entry `{l}`")))?);
    }
    let witness = r.section("witness")?;
    let body = r.section("dimacs")?;
    let forged =
        parse_dimacs(&body.join("\n")).map_err(|e| r.err(format!("embedded formula: {e}")))?;
    if r.pos != r.lines.len() {
        return Err(ParseError {
            line: r.pos + 1,
            reason: "trailing content".into(),
        });
    }

    let oracle_verdict = match (oracle_tag, witness.as_slice()) {
        (VerdictTag::Unsat, []) => Verdict::Unsat,
        (VerdictTag::Sat, [line]) => {
            let lits: Result<Vec<i32>, _> = line
                .split_whitespace()
                .map(str::parse)
                .filter(|l| *l != Ok(0))
                .collect();
            let lits = lits.map_err(|_| r.err("witness is not a literal list"))?;
            let a = Assignment::from_literals(forged.num_vars(), &lits)
                .map_err(|e| r.err(e.to_string()))?;
            Verdict::Sat(a)
        }
        _ => return Err(r.err("witness section does not match the oracle verdict")),
    };

    Ok(MisclassificationCertificate {
        classifier,
        classifier_hash,
        diagonal_program,
        bound_t,
        diagonal_runtime,
        pins,
        forged,
        classifier_verdict,
        oracle_verdict,
        oracle,
        transcript,
    })
}
