use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::Artifacts;
use crate::cnf::{eval, Assignment, CnfFormula, Lit, Verdict};
use crate::diagonal::SatOracle;

pub const INPUT_PLACEHOLDER: &str = "{input}";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverAdapterConfig {
    pub program: String,
    /// Arguments; exactly one contains [`INPUT_PLACEHOLDER`].
    pub args: Vec<String>,
    pub timeout: Duration,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("bad solver command: {0}")]
    Template(String),
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("unparseable solver output: {0}")]
    Output(String),
    #[error("solver model does not satisfy the formula")]
    BadModel,
}

impl SolverAdapterConfig {
    /// Splits a whitespace-separated command template such as
    /// `kissat -q {input}`.
    pub fn parse(template: &str, timeout: Duration) -> Result<Self, SolverError> {
        let mut words = template.split_whitespace().map(str::to_owned);
        let program = words
            .next()
            .ok_or_else(|| SolverError::Template("empty command".into()))?;
        let args: Vec<String> = words.collect();
        let holes = args
            .iter()
            .map(|a| a.matches(INPUT_PLACEHOLDER).count())
            .sum::<usize>()
            + program.matches(INPUT_PLACEHOLDER).count();
        if holes != 1 || program.contains(INPUT_PLACEHOLDER) {
            return Err(SolverError::Template(format!(
                "`{template}` must contain `{INPUT_PLACEHOLDER}` exactly once, as an argument"
            )));
        }
        Ok(SolverAdapterConfig {
            program,
            args,
            timeout,
        })
    }
}

/// Reads `s` and `v` lines in the SAT competition format.
pub fn parse_solver_output(out: &str, num_vars: u32) -> Result<Option<Vec<Lit>>, SolverError> {
    let mut status = None;
    let mut model = Vec::new();
    let mut terminated = false;
    for line in out.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            let parsed = match s.trim() {
                "SATISFIABLE" => true,
                "UNSATISFIABLE" => false,
                other => return Err(SolverError::Output(format!("status `{other}`"))),
            };
            if status.replace(parsed).is_some_and(|prev| prev != parsed) {
                return Err(SolverError::Output("conflicting status lines".into()));
            }
        } else if let Some(v) = line.strip_prefix("v ").or((line == "v").then_some("")) {
            for word in v.split_whitespace() {
                let lit: Lit = word
                    .parse()
                    .map_err(|_| SolverError::Output(format!("bad literal `{word}`")))?;
                if lit == 0 {
                    terminated = true;
                } else if lit.unsigned_abs() > num_vars {
                    return Err(SolverError::Output(format!(
                        "literal {lit} outside 1..={num_vars}"
                    )));
                } else {
                    model.push(lit);
                }
            }
        }
    }
    match status {
        None => Err(SolverError::Output("no status line".into())),
        Some(false) => Ok(None),
        Some(true) if !terminated => Err(SolverError::Output(
            "satisfiable without a complete model".into(),
        )),
        Some(true) => Ok(Some(model)),
    }
}

/// Runs an external solver on `f`. The DIMACS input is kept in `artifacts`.
pub fn external_solver_check(
    f: &CnfFormula,
    cfg: &SolverAdapterConfig,
    artifacts: &Artifacts,
) -> Result<Verdict, SolverError> {
    let path = artifacts.store_dimacs(f)?;
    let path = path.to_string_lossy();
    let args: Vec<String> = cfg
        .args
        .iter()
        .map(|a| a.replace(INPUT_PLACEHOLDER, &path))
        .collect();
    let mut child = Command::new(&cfg.program)
        .args(&args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let start = Instant::now();
    loop {
        if child.try_wait()?.is_some() {
            break;
        }
        if start.elapsed() >= cfg.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SolverError::Timeout(cfg.timeout));
        }
        thread::sleep(Duration::from_millis(5));
    }
    let out = reader
        .join()
        .map_err(|_| SolverError::Output("reader thread panicked".into()))??;
    match parse_solver_output(&out, f.num_vars())? {
        None => Ok(Verdict::Unsat),
        Some(lits) => {
            let a = Assignment::from_literals(f.num_vars(), &lits)
                .map_err(|e| SolverError::Output(e.to_string()))?;
            if eval(f, &a).unwrap_or(false) {
                Ok(Verdict::Sat(a))
            } else {
                Err(SolverError::BadModel)
            }
        }
    }
}

/// An external solver usable as a forge oracle.
pub struct ExternalSolver<'a> {
    pub cfg: SolverAdapterConfig,
    pub artifacts: &'a Artifacts,
}

impl SatOracle for ExternalSolver<'_> {
    fn name(&self) -> String {
        format!("external:{}", self.cfg.program)
    }

    fn solve(&self, f: &CnfFormula) -> Result<Verdict, String> {
        external_solver_check(f, &self.cfg, self.artifacts).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_needs_one_placeholder() {
        let t = Duration::from_secs(1);
        assert!(SolverAdapterConfig::parse("kissat {input}", t).is_ok());
        assert!(SolverAdapterConfig::parse("kissat", t).is_err());
        assert!(SolverAdapterConfig::parse("kissat {input} {input}", t).is_err());
        assert!(SolverAdapterConfig::parse("{input}", t).is_err());
        assert!(SolverAdapterConfig::parse("", t).is_err());
    }

    #[test]
    fn output_parsing() {
        assert_eq!(
            parse_solver_output("c hi\ns UNSATISFIABLE\n", 2).unwrap(),
            None
        );
        assert_eq!(
            parse_solver_output("s SATISFIABLE\nv 1 -2\nv 0\n", 2).unwrap(),
            Some(vec![1, -2])
        );
        assert!(parse_solver_output("s SATISFIABLE\n", 2).is_err());
        assert!(parse_solver_output("s SATISFIABLE\nv 3 0\n", 2).is_err());
        assert!(parse_solver_output("hello\n", 2).is_err());
        assert!(parse_solver_output("s UNKNOWN\n", 2).is_err());
        assert!(parse_solver_output("s SATISFIABLE\ns UNSATISFIABLE\nv 0\n", 2).is_err());
    }
}
