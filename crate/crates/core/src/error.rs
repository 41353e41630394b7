use thiserror::Error;

use crate::ring::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shape or index problems in caller-supplied data.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Rank 0, missing unit and similar inputs every dimension formula chokes on.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("Perron-Frobenius iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("{formula}: value {re:.9}{im:+.9}i at {indices} is not a nonnegative integer within tolerance {tolerance:e}")]
    NotIntegral {
        formula: &'static str,
        indices: String,
        re: f64,
        im: f64,
        tolerance: f64,
    },

    #[error("unknown catalog category '{0}'")]
    UnknownCategory(String),

    #[error("degenerate quadratic form: {0}")]
    DegenerateForm(String),

    #[error("sector {sector}: found {found} minimal idempotents, expected {expected}")]
    NotSemisimple {
        sector: String,
        found: usize,
        expected: usize,
    },

    #[error("no unique dual for {label}: {detail}")]
    NoDual { label: String, detail: String },

    #[error("no convolution idempotent in the trivial sector acts as the composition unit")]
    NoUnit,

    #[error("not a Lagrangian subgroup: {0}")]
    NotLagrangian(String),

    #[error("invalid action data: {0}")]
    InvalidAction(String),

    #[error("invalid algebra spec: {0}")]
    InvalidSpec(String),

    #[error("structure constants disagree with the closed form ({detail}); residual {residual:.3e}")]
    SelfConsistency { detail: String, residual: f64 },

    #[error("parity violation for n={n}, g={g}, h={h}: exponent {exponent} is odd")]
    ParityViolation { n: u64, g: u64, h: u64, exponent: i64 },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("result failed verification: {}", fmt_violations(.0))]
    Unverified(Vec<Violation>),
}

fn fmt_violations(v: &[Violation]) -> String {
    let shown: Vec<String> = v.iter().take(5).map(|x| x.to_string()).collect();
    if v.len() > 5 {
        format!("{} (+{} more)", shown.join("; "), v.len() - 5)
    } else {
        shown.join("; ")
    }
}

impl Error {
    /// Errors that say the input data is not that of a (spherical) extension,
    /// as opposed to input that could not be read at all.
    pub fn is_diagnostic(&self) -> bool {
        matches!(
            self,
            Error::NotIntegral { .. }
                | Error::NoDual { .. }
                | Error::NoUnit
                | Error::NotSemisimple { .. }
                | Error::SelfConsistency { .. }
                | Error::ParityViolation { .. }
                | Error::Unverified(_)
                | Error::NonConvergence { .. }
        )
    }
}

pub(crate) fn not_integral(
    formula: &'static str,
    indices: String,
    value: num_complex::Complex64,
    tolerance: f64,
) -> Error {
    Error::NotIntegral {
        formula,
        indices,
        re: value.re,
        im: value.im,
        tolerance,
    }
}

/// Rounds a complex value to a nonnegative integer, or reports why it cannot.
pub(crate) fn round_nonneg(
    value: num_complex::Complex64,
    tolerance: f64,
    formula: &'static str,
    indices: impl FnOnce() -> String,
) -> Result<u64> {
    let r = value.re.round();
    if (value.re - r).abs() > tolerance || value.im.abs() > tolerance || r < 0.0 {
        return Err(not_integral(formula, indices(), value, tolerance));
    }
    Ok(r as u64)
}
