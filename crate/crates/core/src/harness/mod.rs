//! Reports, artifact storage and the external solver adapter behind the
//! `fixpoint` command line.

mod solver;

pub use solver::{
    external_solver_check, parse_solver_output, ExternalSolver, SolverAdapterConfig, SolverError,
    INPUT_PLACEHOLDER,
};

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::cnf::{write_dimacs, CnfFormula, VerdictTag};
use crate::diagonal::{
    finite_fixed_point, ClassifierTable, FiniteSpace, Measurement, MisclassificationCertificate,
    TranscriptEntry,
};
use crate::goedel::{matryoshka_family, DiagonalCertificate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BOUND_NOT_FOUND: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

pub const ARTIFACTS_ENV: &str = "FIXPOINT_ARTIFACTS";
pub const DEFAULT_ARTIFACTS_DIR: &str = "fixpoint-artifacts";

/// Directory of content-addressed output files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifacts {
    dir: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Artifacts {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Artifacts { dir: dir.into() }
    }

    /// `$FIXPOINT_ARTIFACTS`, or `fixpoint-artifacts` in the working directory.
    pub fn from_env() -> Self {
        Self::new(
            std::env::var_os(ARTIFACTS_ENV)
                .map_or_else(|| PathBuf::from(DEFAULT_ARTIFACTS_DIR), PathBuf::from),
        )
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `bytes` to `<sha256>.<ext>` unless it is already there.
    pub fn store(&self, bytes: &[u8], ext: &str) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(format!("{}.{ext}", sha256_hex(bytes)));
        if !path.exists() {
            let tmp = path.with_extension(format!("{ext}.partial"));
            fs::write(&tmp, bytes)?;
            fs::rename(&tmp, &path)?;
        }
        Ok(path)
    }

    pub fn store_dimacs(&self, f: &CnfFormula) -> io::Result<PathBuf> {
        self.store(write_dimacs(f).as_bytes(), "cnf")
    }
}

pub fn status_line(status: &str, detail: &str) -> String {
    if detail.is_empty() {
        format!("status: {status}")
    } else {
        format!("status: {status} {detail}")
    }
}

/// The case analysis over every classifier table of a self-describing
/// space of `k` formulas. The flag is set when all tables misclassify.
pub fn demo_minimal_report(k: usize) -> (String, bool) {
    let space = FiniteSpace::self_describing(k);
    let mut out = String::new();
    let name = |i: usize| space.names[i].as_str();
    let _ = writeln!(out, "space of {k} formulas, each read as a claim about S:");
    let width = space.names.iter().map(String::len).max().unwrap_or(0);
    for (i, c) in space.claims.iter().enumerate() {
        let _ = writeln!(
            out,
            "  [{i}] {:width$}  says  S({}) = {}",
            name(i),
            name(c.target),
            c.asserted
        );
    }
    let fp = space
        .fixed_point()
        .expect("self-describing spaces have a fixed point");
    let psi = name(fp);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "fixed point [{fp}]:  {psi} is SAT  <->  not S({psi}) = SAT"
    );

    let tables = ClassifierTable::all(k);
    let mut failures = 0;
    for (n, table) in tables.iter().enumerate() {
        let r = finite_fixed_point(&space, table).expect("table matches space");
        let answers: Vec<String> = (0..k)
            .map(|i| format!("S({}) = {}", name(i), table.verdicts[i]))
            .collect();
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "table {}/{}: {}",
            n + 1,
            tables.len(),
            answers.join(", ")
        );
        for b in r.branches.expect("fixed point present") {
            let _ = writeln!(
                out,
                "  if S({psi}) = {:<5} then {psi} is {:<5}: {}",
                b.assumed,
                b.implied,
                if b.fails { "S is wrong" } else { "S is right" }
            );
        }
        let verdict = r.table_verdict.expect("fixed point present");
        let status = r.stipulated_status.expect("fixed point present");
        let _ = writeln!(
            out,
            "  this table answers {verdict} while {psi} is {status}: {}",
            if r.misclassified {
                "misclassified"
            } else {
                "correct"
            }
        );
        if r.branches.is_some_and(|bs| bs.iter().all(|b| b.fails)) {
            let _ = writeln!(out, "  S fails in both branches");
        }
        if let Some(actual) = r.actual_status.filter(|a| *a != status) {
            let _ = writeln!(
                out,
                "  (as a CNF formula {psi} is {actual}; the claim reading is stipulated)"
            );
        }
        failures += usize::from(r.misclassified);
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{failures}/{} tables misclassify the fixed point",
        tables.len()
    );
    (out, failures == tables.len())
}

pub fn transcript_text(transcript: &[TranscriptEntry]) -> String {
    let mut out = String::new();
    for e in transcript {
        let _ = match e.measurement {
            Measurement::Exceeded => writeln!(out, "t = {:<6} runtime > t", e.t),
            Measurement::Halted {
                runtime,
                rounds,
                converged,
            } => writeln!(
                out,
                "t = {:<6} runtime = {runtime} after {rounds} pin round(s), {}",
                e.t,
                if converged {
                    "converged"
                } else {
                    "not converged"
                }
            ),
            Measurement::TooLarge { len } => {
                writeln!(out, "t = {:<6} formula of {len} bytes does not fit", e.t)
            }
        };
    }
    out
}

pub fn forge_summary(cert: &MisclassificationCertificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "classifier sha256 {}", cert.classifier_hash);
    out.push_str(&transcript_text(&cert.transcript));
    let _ = writeln!(
        out,
        "forged formula: {} variables, {} clauses, bound t = {}, diagonal runtime {}",
        cert.forged.num_vars(),
        cert.forged.num_clauses(),
        cert.bound_t,
        cert.diagonal_runtime
    );
    let _ = writeln!(out, "classifier says {}", cert.classifier_verdict);
    let _ = writeln!(out, "{} says {}", cert.oracle, cert.oracle_verdict.tag());
    out
}

pub fn diagonal_certificate_text(c: &DiagonalCertificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "theta     {}", c.theta);
    let _ = writeln!(out, "beta      {}", c.beta);
    let _ = writeln!(out, "b         {}", c.beta_code.0);
    let _ = writeln!(out, "psi       {}", c.psi);
    let _ = writeln!(out, "code(psi) {}", c.psi_code.0);
    let _ = writeln!(out, "delta(b)  {}", c.delta_value);
    let _ = writeln!(out, "check     {}", if c.check() { "pass" } else { "FAIL" });
    out
}

/// One line per member; the flag is set when every certificate passes and
/// all codes differ.
pub fn matryoshka_report(count: usize) -> (String, bool) {
    let family = matryoshka_family(count);
    let mut out = String::new();
    let mut codes = std::collections::HashSet::new();
    let mut ok = true;
    for m in &family {
        let c = &m.certificate;
        let pass = c.check();
        let fresh = codes.insert(c.psi_code.clone());
        ok &= pass && fresh;
        let digits = c.psi_code.0.to_string();
        let _ = writeln!(
            out,
            "n = {:<3} {:<4} code has {} digits, sha256 {}{}",
            m.n,
            if pass { "pass" } else { "FAIL" },
            digits.len(),
            &sha256_hex(digits.as_bytes())[..16],
            if fresh { "" } else { " (duplicate)" }
        );
    }
    let _ = writeln!(
        out,
        "{} sentences, {} distinct codes",
        family.len(),
        codes.len()
    );
    (out, ok)
}

pub fn verdict_word(v: VerdictTag) -> &'static str {
    match v {
        VerdictTag::Sat => "SATISFIABLE",
        VerdictTag::Unsat => "UNSATISFIABLE",
    }
}
