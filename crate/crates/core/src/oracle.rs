// SPDX-License-Identifier: Apache-2.0

//! Brute-force diagonalization of whole blocks, independent of the symmetry reductions.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::basis::{build_basis, build_hamiltonian_block, HamiltonianBlock};
use crate::coupling::{CouplingSet, CouplingUnits};
use crate::error::{Error, Result};
use crate::linalg::{eig, eigh, frobenius, residual};
use crate::manifold::{label_by_rotation, EigenManifold, RESIDUAL_TOL};

pub const MAX_DENSE_DIMENSION: usize = 1024;
/// Largest polygon `full_spectrum` accepts.
pub const MAX_FULL_SPECTRUM_SITES: usize = 10;

#[derive(Clone, Debug)]
pub struct DenseEigenpair {
    pub value: Complex64,
    pub vector: Array1<Complex64>,
}

#[derive(Clone, Debug)]
pub struct DenseSolveReport {
    pub dimension: usize,
    pub eigenpairs: Vec<DenseEigenpair>,
    pub max_residual: f64,
    pub iterations: usize,
}

fn check_dimension(matrix: &Array2<Complex64>) -> Result<()> {
    let d = matrix.nrows();
    if d != matrix.ncols() {
        return Err(Error::Precondition(format!("matrix is {}x{}, not square", d, matrix.ncols())));
    }
    if d > MAX_DENSE_DIMENSION {
        return Err(Error::Precondition(format!(
            "dimension {d} exceeds the dense limit {MAX_DENSE_DIMENSION}"
        )));
    }
    Ok(())
}

/// Full eigen-decomposition of a general complex matrix, residual-verified.
pub fn dense_eigensolve(matrix: &Array2<Complex64>) -> Result<DenseSolveReport> {
    check_dimension(matrix)?;
    let e = eig(matrix)?;
    let eigenpairs: Vec<DenseEigenpair> = e
        .values
        .iter()
        .enumerate()
        .map(|(k, &value)| DenseEigenpair {
            value,
            vector: e.vectors.column(k).to_owned(),
        })
        .collect();
    let max_residual = eigenpairs
        .iter()
        .map(|p| residual(matrix, p.value, &p.vector))
        .fold(0.0, f64::max);
    let bound = RESIDUAL_TOL * frobenius(matrix);
    if max_residual > bound {
        return Err(Error::Residual {
            dimension: matrix.nrows(),
            residual: max_residual,
            bound,
        });
    }
    Ok(DenseSolveReport {
        dimension: matrix.nrows(),
        eigenpairs,
        max_residual,
        iterations: e.iterations,
    })
}

/// Solves a whole block densely and labels the eigenvectors by rotation mode.
///
/// Real (Hermitian) blocks go through the Jacobi solver so that degenerate
/// eigenvectors come out orthonormal.
pub fn dense_manifold(block: &HamiltonianBlock, units: CouplingUnits) -> Result<EigenManifold> {
    check_dimension(&block.matrix)?;
    let (values, vectors) = if block.matrix.iter().all(|z| z.im == 0.0) {
        let (w, v) = eigh(&block.matrix)?;
        (w.into_iter().map(|x| Complex64::new(x, 0.0)).collect::<Vec<_>>(), v)
    } else {
        let e = eig(&block.matrix)?;
        (e.values, e.vectors)
    };
    let mut manifold = EigenManifold::new(block.basis.clone(), units);
    for (value, x, mode) in label_by_rotation(&block.basis, &values, &vectors) {
        manifold.push(value + block.diagonal_offset.im * Complex64::i(), x, mode);
    }
    manifold.finalize();
    manifold.verify(block)?;
    Ok(manifold)
}

/// Every block n = 0…N of an N-gon, each solved densely.
pub fn full_spectrum(n_sites: usize, couplings: &CouplingSet) -> Result<Vec<EigenManifold>> {
    if n_sites > MAX_FULL_SPECTRUM_SITES {
        return Err(Error::Precondition(format!(
            "full spectrum limited to N ≤ {MAX_FULL_SPECTRUM_SITES}, got {n_sites}"
        )));
    }
    if couplings.n_sites() != n_sites {
        return Err(Error::Precondition(format!(
            "couplings are for N = {}, not {n_sites}",
            couplings.n_sites()
        )));
    }
    (0..=n_sites)
        .map(|n| {
            if couplings.units() == CouplingUnits::LongWavelength {
                crate::solver::solve_long_wavelength_with(n_sites, n, couplings, dense_manifold)
            } else {
                let block = build_hamiltonian_block(&build_basis(n_sites, n)?, couplings)?;
                dense_manifold(&block, couplings.units())
            }
        })
        .collect()
}
