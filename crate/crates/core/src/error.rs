use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The index form vanishes (relative to the tolerance) on the cubic.
    #[error("non-transversal umbilic: T = {t} is below tolerance")]
    NonTransversal { t: f64 },

    /// Parameters outside the open cone `-beta/3 < alpha < beta`.
    #[error("metric parameters (alpha = {alpha}, beta = {beta}) are not admissible: {reason}")]
    NotAdmissible {
        alpha: f64,
        beta: f64,
        reason: &'static str,
    },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("{discarded} of {n} samples had a numerically vanishing index form")]
    DegenerateCount { discarded: u64, n: u64 },

    #[error("no samples fell in the positive cone; ratio undefined")]
    EmptyCone,

    #[error("principal directions undefined: all line-field coefficients vanish")]
    DegeneratePoint,

    #[error("principal direction equation has complex roots (discriminant {discriminant:e})")]
    ComplexRoots { discriminant: f64 },

    #[error("winding did not converge to a half-integer (last total {turns} turns, {steps} steps)")]
    NoConvergence { turns: f64, steps: usize },

    #[error("eigen-solver returned a complex eigenvalue (imaginary part {imaginary:e})")]
    ComplexEigenvalue { imaginary: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
