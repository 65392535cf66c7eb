//! Numerical laboratory for approximate quantum error correction under
//! amplitude-damping noise.
//!
//! The crate constructs noise-strength-adapted (NSA) code families, evaluates
//! Knill-Laflamme violation losses, builds syndrome-filter recovery plans with
//! exact worst-case fidelities, and learns code spaces variationally:
//!
//! - [`linalg`]: dense complex vectors/matrices, tensor products, projectors,
//!   channel application, and a small Hermitian eigensolver.
//! - [`dit`]: length-n digit strings over {0..q-1} labeling basis states.
//! - [`noise`]: single-site amplitude-damping Kraus families and weight-bounded
//!   independent error sets.
//! - [`codes`]: the LNCY, self-complementary (qubit and qudit),
//!   pair-complementary, and 0-2-4 binomial code families, plus the
//!   basis-class search that fixes the logical dimension.
//! - [`kl`]: Knill-Laflamme matrices, L1/L2 violation losses, and the
//!   loss-based fidelity bound.
//! - [`recovery`]: syndrome-sector recovery plans, worst-case fidelity, an
//!   independent density-matrix oracle, and closed-form fidelity evaluators.
//! - [`fit`]: power-law and quadratic-deficit fitting plus kink detection.
//! - [`bfgs`]: quasi-Newton minimizer with a strong-Wolfe line search.
//! - [`vql`]: the layered variational encoding circuit, two-stage loss
//!   minimization, and codeword-ansatz extraction.

pub mod bfgs;
pub mod closed_form;
pub mod codes;
pub mod dit;
pub mod fit;
pub mod kl;
pub mod linalg;
pub mod noise;
pub mod recovery;
pub mod vql;

pub use linalg::{CMat, CVec, C64, DIM_CAP};

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum AqecError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("dimension {got} exceeds the dense-storage cap {cap}")]
    DimCap { got: usize, cap: usize },
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("invalid basis set: {0}")]
    InvalidBasis(String),
    #[error("rank-deficient input: {0}")]
    RankDeficient(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, AqecError>;
