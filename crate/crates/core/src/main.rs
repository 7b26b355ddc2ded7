use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use fixpoint::cnf::{parse_dimacs, solve_dpll, Verdict};
use fixpoint::diagonal::{
    forge, parse_certificate, verify_certificate, DiagonalError, ForgeOptions,
};
use fixpoint::goedel::{diagonalize, parse_formula};
use fixpoint::harness::{
    demo_minimal_report, diagonal_certificate_text, external_solver_check, forge_summary,
    matryoshka_report, status_line, transcript_text, verdict_word, Artifacts, ExternalSolver,
    SolverAdapterConfig, EXIT_BOUND_NOT_FOUND, EXIT_ERROR, EXIT_OK, EXIT_VERIFY_FAILED,
};
use fixpoint::machine::parse_assembly;
use fixpoint::tableau::encode;

/// Diagonal fixed points, executable.
///
/// Exit codes: 0 success, 1 error, 2 no self-consistent bound, 3 failed
/// verification. The last line of output is always `status: ...`.
#[derive(Parser)]
#[command(name = "fixpoint", version)]
struct Cli {
    /// Artifacts directory [default: $FIXPOINT_ARTIFACTS or ./fixpoint-artifacts]
    #[arg(long, global = true)]
    artifacts: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Case analysis of every classifier table on a self-describing space.
    DemoMinimal {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=12))]
        space: u8,
    },
    /// Build and check a misclassification certificate for a classifier.
    Forge {
        classifier: PathBuf,
        #[arg(long, default_value_t = 1 << 16)]
        t_cap: usize,
        /// Certificate path [default: <artifacts>/<classifier sha256>.cert]
        #[arg(long)]
        out: Option<PathBuf>,
        /// External solver for large formulas, e.g. "kissat -q {input}"
        #[arg(long)]
        solver_cmd: Option<String>,
        /// External solver timeout in seconds
        #[arg(long, default_value_t = 600)]
        timeout: u64,
    },
    /// Re-check a certificate file.
    Verify { certificate: PathBuf },
    /// Decide a DIMACS file.
    Solve {
        input: PathBuf,
        #[arg(long)]
        solver_cmd: Option<String>,
        #[arg(long, default_value_t = 600)]
        timeout: u64,
    },
    /// Fixed point of a formula with one free variable, e.g. "~Prov(x)".
    DiagLemma { theta: String },
    /// The family of fixed points of ~Prov(x + n).
    Matryoshka {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

struct Outcome {
    code: i32,
    status: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome {
        code: EXIT_OK,
        status: status_line("ok", &detail.into()),
    }
}

fn error(msg: impl std::fmt::Display) -> Outcome {
    eprintln!("error: {msg}");
    Outcome {
        code: EXIT_ERROR,
        status: status_line("error", ""),
    }
}

fn solver_config(cmd: Option<String>, timeout: u64) -> Result<Option<SolverAdapterConfig>, String> {
    cmd.map(|c| {
        SolverAdapterConfig::parse(&c, Duration::from_secs(timeout)).map_err(|e| e.to_string())
    })
    .transpose()
}

fn run(cli: Cli) -> Outcome {
    let artifacts = cli
        .artifacts
        .map_or_else(Artifacts::from_env, Artifacts::new);
    match cli.command {
        Cmd::DemoMinimal { space } => {
            let (text, all_fail) = demo_minimal_report(space.into());
            print!("{text}");
            if all_fail {
                ok("")
            } else {
                Outcome {
                    code: EXIT_ERROR,
                    status: status_line("error", "some table classified the fixed point"),
                }
            }
        }
        Cmd::Forge {
            classifier,
            t_cap,
            out,
            solver_cmd,
            timeout,
        } => {
            let src = match fs::read_to_string(&classifier) {
                Ok(s) => s,
                Err(e) => return error(format!("{}: {e}", classifier.display())),
            };
            let program = match parse_assembly(&src) {
                Ok(p) => p,
                Err(e) => return error(format!("{}: {e}", classifier.display())),
            };
            let cfg = match solver_config(solver_cmd, timeout) {
                Ok(c) => c,
                Err(e) => return error(e),
            };
            let external = cfg.map(|cfg| ExternalSolver {
                cfg,
                artifacts: &artifacts,
            });
            let opts = ForgeOptions {
                t_cap,
                large_oracle: external.as_ref().map(|o| o as _),
            };
            match forge(&program, opts) {
                Ok(cert) => {
                    print!("{}", forge_summary(&cert));
                    let text = cert.to_text();
                    let written = match &out {
                        Some(p) => fs::write(p, &text).map(|_| p.clone()),
                        None => artifacts.store(text.as_bytes(), "cert"),
                    };
                    let path = match written {
                        Ok(p) => p,
                        Err(e) => return error(format!("writing certificate: {e}")),
                    };
                    let extras = encode(&cert.diagonal_program, &cert.pins, cert.bound_t).map(
                        |(_, layout)| {
                            (
                                artifacts.store_dimacs(&cert.forged),
                                artifacts.store(layout.to_sidecar().as_bytes(), "layout"),
                            )
                        },
                    );
                    if let Ok((Ok(cnf), Ok(layout))) = extras {
                        println!("formula {}", cnf.display());
                        println!("layout {}", layout.display());
                    }
                    println!("certificate {}", path.display());
                    ok(format!(
                        "classifier={} oracle={}",
                        cert.classifier_verdict,
                        cert.oracle_verdict.tag()
                    ))
                }
                Err(DiagonalError::BoundNotFound { transcript }) => {
                    let text = transcript_text(&transcript);
                    print!("{text}");
                    let path = match &out {
                        Some(p) => {
                            let p = p.with_extension("transcript");
                            fs::write(&p, &text).map(|_| p)
                        }
                        None => artifacts.store(text.as_bytes(), "transcript"),
                    };
                    match path {
                        Ok(p) => println!("transcript {}", p.display()),
                        Err(e) => eprintln!("error: writing transcript: {e}"),
                    }
                    Outcome {
                        code: EXIT_BOUND_NOT_FOUND,
                        status: status_line("bound-not-found", &format!("t_cap={t_cap}")),
                    }
                }
                Err(e) => error(e),
            }
        }
        Cmd::Verify { certificate } => {
            let text = match fs::read_to_string(&certificate) {
                Ok(t) => t,
                Err(e) => return error(format!("{}: {e}", certificate.display())),
            };
            let cert = match parse_certificate(&text) {
                Ok(c) => c,
                Err(e) => return error(e),
            };
            match verify_certificate(&cert) {
                Ok(()) => {
                    println!(
                        "classifier says {}, {} says {}",
                        cert.classifier_verdict,
                        cert.oracle,
                        cert.oracle_verdict.tag()
                    );
                    ok("verified")
                }
                Err(f) => {
                    println!("{f}");
                    Outcome {
                        code: EXIT_VERIFY_FAILED,
                        status: status_line("verify-failed", &format!("check={}", f.check)),
                    }
                }
            }
        }
        Cmd::Solve {
            input,
            solver_cmd,
            timeout,
        } => {
            let f = match fs::read_to_string(&input)
                .map_err(|e| e.to_string())
                .and_then(|t| parse_dimacs(&t).map_err(|e| e.to_string()))
            {
                Ok(f) => f,
                Err(e) => return error(format!("{}: {e}", input.display())),
            };
            let verdict = match solver_config(solver_cmd, timeout) {
                Err(e) => return error(e),
                Ok(None) => solve_dpll(&f),
                Ok(Some(cfg)) => match external_solver_check(&f, &cfg, &artifacts) {
                    Ok(v) => v,
                    Err(e) => return error(e),
                },
            };
            println!("s {}", verdict_word(verdict.tag()));
            if let Verdict::Sat(a) = &verdict {
                let lits: Vec<String> = a.to_literals().iter().map(i32::to_string).collect();
                println!("v {} 0", lits.join(" "));
            }
            ok(verdict.tag().as_str())
        }
        Cmd::DiagLemma { theta } => {
            let cert = match parse_formula(&theta).and_then(|t| diagonalize(&t)) {
                Ok(c) => c,
                Err(e) => return error(e),
            };
            print!("{}", diagonal_certificate_text(&cert));
            if cert.check() {
                ok("pass")
            } else {
                Outcome {
                    code: EXIT_VERIFY_FAILED,
                    status: status_line("verify-failed", "check=diagonal"),
                }
            }
        }
        Cmd::Matryoshka { count } => {
            let (text, all_ok) = matryoshka_report(count);
            print!("{text}");
            if all_ok {
                ok(format!("count={count}"))
            } else {
                Outcome {
                    code: EXIT_VERIFY_FAILED,
                    status: status_line("verify-failed", "check=matryoshka"),
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let outcome = match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            ok("")
        }
        Err(e) => {
            eprint!("{e}");
            Outcome {
                code: EXIT_ERROR,
                status: status_line("error", "usage"),
            }
        }
    };
    println!("{}", outcome.status);
    ExitCode::from(outcome.code as u8)
}
