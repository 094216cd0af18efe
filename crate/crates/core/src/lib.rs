//! Askey-scheme and q-Askey-scheme orthogonal polynomials, the Jacobi-matrix
//! spectral machinery behind their orthogonality measures, Clebsch-Gordan and
//! Racah coupling coefficients (classical and quantum), and a verification
//! engine that numerically certifies the convolution and linearisation
//! identities connecting them.
//!
//! Layout:
//! * [`numerics`] — complex log-gamma, (q-)shifted factorials, terminating
//!   hypergeometric and basic hypergeometric sums, double-double arithmetic.
//! * [`polynomials`] — the polynomial families, their evaluators, recurrence
//!   coefficients, normalisations, and weight functions.
//! * [`spectral`] — Jacobi operators, tridiagonal eigensolver, Gauss rules,
//!   and the representation operators realised as Jacobi matrices.
//! * [`coupling`] — Clebsch-Gordan / Racah coefficients and their
//!   q-analogues, eigenbasis overlaps, linearisation coefficients.
//! * [`verify`] — the identity catalog, parameter sampler, and residual
//!   reports.

pub mod coupling;
pub mod numerics;
pub mod polynomials;
pub mod spectral;
pub mod verify;

pub use numerics::{cx, Cx};
pub use polynomials::{
    argument, eval, orthonormal_eval, recurrence, weight, ArgumentMap, ClassicalFamily, Family,
    QFamily, WeightEval,
};
pub use spectral::{
    eig_tridiagonal, eval_by_recurrence, gauss_rule, representation_operator, truncate, Dimension,
    JacobiOperator, QuadratureRule, RepnOperatorSpec, TridiagonalEigen, TridiagonalMatrix,
};

/// Error type shared by every module.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Parameter outside the admissible domain of a family or operator.
    #[error("domain error: {0}")]
    Domain(String),
    /// A pole was hit: gamma at a nonpositive integer, or a vanishing
    /// denominator Pochhammer inside a terminating series.
    #[error("pole error: {0}")]
    Pole(String),
    /// A contractually real quantity came back with too large an imaginary
    /// part (|Im| > 1e-10 * (1 + |Re|)).
    #[error("realification error: {0}")]
    Realification(String),
    /// Operation not defined for this family.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    /// Iterative eigensolver failed to converge within its iteration cap.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// Truncation size exceeds the operator dimension, or similar.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// Coupling-label constraint system violated.
    #[error("constraint error: {0}")]
    Constraint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
