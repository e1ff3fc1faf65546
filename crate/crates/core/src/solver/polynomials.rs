// SPDX-License-Identifier: Apache-2.0

use ndarray::Array2;
use num_complex::Complex64;

use crate::basis::HamiltonianBlock;
use crate::error::{Error, Result};
use crate::manifold::root_power;

/// Core of a block written as a K×K array of polynomials in the cyclic shift:
/// submatrix (i, j) between full classes i and j equals Σ_k c_k P^k.
#[derive(Clone, Debug)]
pub struct BlockPolynomials {
    n_sites: usize,
    classes: usize,
    coeffs: Vec<Complex64>,
}

impl BlockPolynomials {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Number of full classes K.
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Coefficient c_k of P^k in submatrix (i, j), k in 0..N.
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.coeffs[(i * self.classes + j) * self.n_sites + k]
    }

    /// M(λ^v): the K×K mode matrix with entries Σ_k c_k λ^{vk}.
    pub fn evaluate(&self, mode: usize) -> Array2<Complex64> {
        let n = self.n_sites;
        Array2::from_shape_fn((self.classes, self.classes), |(i, j)| {
            (0..n)
                .map(|k| self.coefficient(i, j, k) * root_power(n, (mode * k) as i64))
                .sum()
        })
    }

    /// Rebuilds the core submatrices from the coefficients.
    pub fn reconstruct(&self) -> Array2<Complex64> {
        let n = self.n_sites;
        let dim = self.classes * n;
        Array2::from_shape_fn((dim, dim), |(r, c)| {
            let (i, p) = (r / n, r % n);
            let (j, q) = (c / n, c % n);
            self.coefficient(i, j, (q + n - p) % n)
        })
    }
}

/// Reads off the polynomial coefficients of the full-class core of a block.
///
/// Short classes, if any, sit after the core and are ignored here. Fails with a
/// structure error when a submatrix is not circulant.
pub fn extract_block_polynomials(block: &HamiltonianBlock) -> Result<BlockPolynomials> {
    let basis = &block.basis;
    let n = basis.n_sites();
    let full: Vec<_> = basis.full_classes().collect();
    let k = full.len();
    if let Some(pos) = basis.classes().iter().position(|c| c.size < n) {
        if basis.classes()[pos..].iter().any(|c| c.size == n) {
            return Err(Error::Structure("full classes must precede short classes".into()));
        }
    }
    let h = &block.matrix;
    let scale = h.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(f64::MIN_POSITIVE);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); k * k * n];
    for (i, ci) in full.iter().enumerate() {
        for (j, cj) in full.iter().enumerate() {
            for q in 0..n {
                coeffs[(i * k + j) * n + q] = h[[ci.start, cj.start + q]];
            }
            for p in 0..n {
                for q in 0..n {
                    let want = coeffs[(i * k + j) * n + (q + n - p) % n];
                    if (h[[ci.start + p, cj.start + q]] - want).norm() > 1e-12 * scale {
                        return Err(Error::Structure(format!(
                            "submatrix ({i}, {j}) is not a polynomial in the cyclic shift"
                        )));
                    }
                }
            }
        }
    }
    Ok(BlockPolynomials {
        n_sites: n,
        classes: k,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, build_hamiltonian_block};
    use crate::coupling::{CouplingSet, CouplingUnits};

    fn pentagon(a: Complex64, b: Complex64) -> BlockPolynomials {
        let c = CouplingSet::new(5, vec![a, b], CouplingUnits::Gamma).unwrap();
        let block = build_hamiltonian_block(&build_basis(5, 2).unwrap(), &c).unwrap();
        extract_block_polynomials(&block).unwrap()
    }

    #[test]
    fn pentagon_pair_polynomials() {
        let (a, b) = (Complex64::new(1.3, 0.2), Complex64::new(-0.4, 0.7));
        let p = pentagon(a, b);
        let z = Complex64::new(0.0, 0.0);
        let coeffs = |i, j| (0..5).map(|k| p.coefficient(i, j, k)).collect::<Vec<_>>();
        // M11 = b(x + x⁴), M22 = a(x² + x³), M12 = a(x⁴ + x⁵) + b(x + x³) with x⁵ = 1.
        assert_eq!(coeffs(0, 0), vec![z, b, z, z, b]);
        assert_eq!(coeffs(1, 1), vec![z, z, a, a, z]);
        assert_eq!(coeffs(0, 1), vec![a, b, z, b, a]);
    }

    #[test]
    fn heptagon_reconstructs_exactly() {
        let vals = vec![Complex64::new(0.9, 0.1), Complex64::new(0.2, -0.3), Complex64::new(-0.5, 0.05)];
        let c = CouplingSet::new(7, vals, CouplingUnits::Gamma).unwrap();
        let block = build_hamiltonian_block(&build_basis(7, 2).unwrap(), &c).unwrap();
        let p = extract_block_polynomials(&block).unwrap();
        let diff = &p.reconstruct() - &block.matrix;
        assert!(diff.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn non_circulant_block_rejected() {
        let c = CouplingSet::uniform(5, Complex64::new(1.0, 0.0)).unwrap();
        let mut block = build_hamiltonian_block(&build_basis(5, 2).unwrap(), &c).unwrap();
        block.matrix[[0, 1]] += 0.5;
        assert!(matches!(extract_block_polynomials(&block), Err(Error::Structure(_))));
    }
}
