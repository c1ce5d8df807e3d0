//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by curve evaluation, quadrature, solving, and meshing.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented domain restriction.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested at a pole of the expression.
    #[error("pole of {expr} at z = {z}")]
    Pole {
        /// Which expression has the pole.
        expr: &'static str,
        /// The offending point.
        z: Complex64,
    },

    /// A continuation path came too close to a branch point.
    #[error("continuation path within clearance {clearance:.3e} of branch point {near}")]
    Continuation {
        /// Nearest branch point.
        near: Complex64,
        /// Required clearance.
        clearance: f64,
    },

    /// Both square-root candidates were equally close; the step needs refinement.
    #[error("ambiguous continuation step at z = {z}; refine the path")]
    AmbiguousStep {
        /// The point where the step became ambiguous.
        z: Complex64,
    },

    /// Quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: achieved error {achieved:.3e} > tol {tol:.3e}")]
    Accuracy {
        /// Error estimate actually achieved.
        achieved: f64,
        /// Requested tolerance.
        tol: f64,
    },

    /// A denominator was indistinguishable from zero at the working accuracy.
    #[error("indeterminate value: {0}")]
    Indeterminate(String),

    /// The arccos argument left [-1, 1]; no angle solves the ratio.
    #[error("no solution: |A_num/A_den| = {ratio} >= 1")]
    NoAlpha {
        /// The out-of-range cosine candidate.
        ratio: f64,
    },

    /// No sign change of c1 - c2 was found over the scan bracket.
    #[error("no sign change of c1 - c2 in lambda bracket ({lo}, {hi})")]
    Bracket {
        /// Lower bracket bound.
        lo: f64,
        /// Upper bracket bound.
        hi: f64,
    },

    /// The root finder landed on a root with non-positive c^2.
    #[error("invalid solution: c^2 = {c2} <= 0 at lambda = {lambda}")]
    InvalidSolution {
        /// The common value of c1 and c2 at the root.
        c2: f64,
        /// The root.
        lambda: f64,
    },

    /// Mesh geometry broke an invariant (weld mismatch, cycle residual, ...).
    #[error("mesh error: {0}")]
    Mesh(String),

    /// I/O failure, annotated with the path involved.
    #[error("io error on {path}: {source}")]
    Io {
        /// File being read or written.
        path: String,
        /// Underlying error.
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file.
    #[error("parse error in {path}: {message}")]
    Parse {
        /// File being parsed.
        path: String,
        /// What went wrong.
        message: String,
    },
}

impl Error {
    /// Attach a path to a raw I/O error.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
