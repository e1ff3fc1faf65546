// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Invalid or incomplete user configuration (kernel tables, CLI options).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A block that should be a polynomial in the cyclic shift is not one.
    #[error("structure error: {0}")]
    Structure(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         ({converged} of {dimension} eigenvalues deflated)"
    )]
    NoConvergence {
        dimension: usize,
        converged: usize,
        iterations: usize,
    },

    #[error("eigenpair residual {residual:e} exceeds bound {bound:e} (dimension {dimension})")]
    Residual {
        dimension: usize,
        residual: f64,
        bound: f64,
    },

    /// Partial decay rates do not sum to the upper state's decay constant.
    #[error("sum rule violated for {state}: rates sum to {sum}, decay constant is {decay}")]
    Consistency { state: String, sum: f64, decay: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors raised by the eigensolvers rather than by input validation.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Residual { .. } | Error::Structure(_)
        )
    }
}
