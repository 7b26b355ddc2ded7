//! Diagonal constructions, finite and machine-level.
//!
//! [`finite_fixed_point`] works over a small stipulated instance space.
//! [`forge`] builds the diagonal machine of a concrete classifier, compiles
//! it into a formula and packages the result as a checkable
//! [`MisclassificationCertificate`].

mod certificate;
mod construct;
mod finite;
mod forge;

pub use certificate::{
    parse_certificate, verify_certificate, Check, MisclassificationCertificate, ParseError,
    VerifyFailure,
};
pub use construct::{build_diagonal_program, PROLOGUE_LEN};
pub use finite::{
    finite_fixed_point, Branch, Claim, ClassifierTable, FiniteReport, FiniteSpace, SpaceError,
};
pub use forge::{
    classifier_hash, forge, Dpll, ForgeOptions, Measurement, SatOracle, TranscriptEntry,
    DPLL_VAR_LIMIT, MAX_REFINEMENTS,
};

use thiserror::Error;

use crate::machine::MachineError;
use crate::tableau::TableauError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagonalError {
    #[error("cannot build diagonal machine: {0}")]
    Construction(String),
    #[error("no self-consistent bound found ({} bounds tried)", transcript.len())]
    BoundNotFound { transcript: Vec<TranscriptEntry> },
    #[error("classifier {hash} did not halt within {fuel} steps on the forged formula")]
    ClassifierOutOfFuel { hash: String, fuel: u64 },
    #[error("inconsistent construction: {0}")]
    Inconsistent(String),
    #[error("oracle failed: {0}")]
    Oracle(String),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}
