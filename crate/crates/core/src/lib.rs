// SPDX-License-Identifier: Apache-2.0

//! Complex eigenvalues and eigenstates of exchange-coupled qubits on a regular polygon.

pub mod basis;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod oracle;
pub mod solver;
pub mod special;
pub mod spectroscopy;

pub use error::{Error, Result};
