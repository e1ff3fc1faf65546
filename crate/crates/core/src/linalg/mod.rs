// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra used by the oracle and the reduced solvers.

mod jacobi;
mod lu;
mod schur;

pub use jacobi::eigh;
pub use lu::Lu;
pub use schur::{eig, frobenius, residual, Eig};
