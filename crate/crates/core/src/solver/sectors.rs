// SPDX-License-Identifier: Apache-2.0

//! Mode-by-mode solution of a block whose basis is organized in rotation classes.
//!
//! For each mode v the full-class core is reduced to its K×K mode matrix
//! M(λ^v) and diagonalized. Sectors that also contain short classes (those
//! with v·s ≡ 0 mod N) are completed by a generalized eigenproblem on the span
//! of the core eigenvectors and the short-class Fourier vectors. When that
//! span is numerically degenerate the sector is instead solved densely in its
//! orthonormal Fourier basis.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::polynomials::extract_block_polynomials;
use crate::basis::{HamiltonianBlock, OrbitClass};
use crate::coupling::CouplingUnits;
use crate::error::Result;
use crate::linalg::{eig, Lu};
use crate::manifold::{root_power, EigenManifold};

/// Relative Gram determinant below which the extension basis is treated as singular.
const EXTENSION_DET_TOL: f64 = 1e-12;

/// Fourier vector of one class for mode v, as a full-length vector.
fn class_vector(dim: usize, n_sites: usize, class: &OrbitClass, mode: usize) -> Array1<Complex64> {
    let mut x = Array1::zeros(dim);
    for p in 0..class.size {
        x[class.start + p] = root_power(n_sites, (mode * (p + 1)) as i64);
    }
    x
}

fn conj_t(b: &Array2<Complex64>) -> Array2<Complex64> {
    b.t().mapv(|z| z.conj())
}

fn columns(vs: &[Array1<Complex64>], dim: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((dim, vs.len()), |(r, c)| vs[c][r])
}

type Pairs = Vec<(Complex64, Array1<Complex64>)>;

/// Solves (BᴴHB)y = ε(BᴴB)y; None when BᴴB is close to singular.
fn generalized(h: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Option<Pairs>> {
    let bh = conj_t(b);
    let g = bh.dot(b);
    let scale: f64 = (0..g.nrows()).map(|i| g[[i, i]].re).product();
    let lu = Lu::new(&g);
    if lu.determinant().norm().partial_cmp(&(EXTENSION_DET_TOL * scale)) != Some(std::cmp::Ordering::Greater) {
        return Ok(None);
    }
    let c = lu.solve_matrix(&bh.dot(&h.dot(b)));
    let e = eig(&c)?;
    Ok(Some(
        (0..e.values.len())
            .map(|k| (e.values[k], b.dot(&e.vectors.column(k))))
            .collect(),
    ))
}

/// Dense solve of the sector in its orthonormal class-Fourier basis.
fn orthonormal_sector(h: &Array2<Complex64>, vs: &[Array1<Complex64>]) -> Result<Vec<(Complex64, Array1<Complex64>)>> {
    let dim = h.nrows();
    let normalized: Vec<_> = vs
        .iter()
        .map(|v| {
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.mapv(|z| z / n)
        })
        .collect();
    let b = columns(&normalized, dim);
    let a = conj_t(&b).dot(&h.dot(&b));
    let e = eig(&a)?;
    Ok((0..e.values.len())
        .map(|k| (e.values[k], b.dot(&e.vectors.column(k))))
        .collect())
}

/// Solves a block by the class-by-class mode reduction.
pub(crate) fn reduced_solve(block: &HamiltonianBlock, units: CouplingUnits) -> Result<EigenManifold> {
    let basis = &block.basis;
    let n = basis.n_sites();
    let dim = basis.len();
    let h = &block.matrix;
    let damping = Complex64::new(0.0, basis.excitations() as f64);
    let poly = extract_block_polynomials(block)?;
    let full: Vec<&OrbitClass> = basis.full_classes().collect();
    let short: Vec<&OrbitClass> = basis.short_classes().collect();
    let mut manifold = EigenManifold::new(basis.clone(), units);

    for mode in 1..=n {
        let compatible: Vec<&OrbitClass> = short.iter().copied().filter(|c| mode * c.size % n == 0).collect();
        let mut core = Vec::new();
        if !full.is_empty() {
            let e = eig(&poly.evaluate(mode))?;
            for k in 0..e.values.len() {
                let mut x = Array1::zeros(dim);
                for (i, class) in full.iter().enumerate() {
                    x.scaled_add(e.vectors[[i, k]], &class_vector(dim, n, class, mode));
                }
                core.push((e.values[k], x));
            }
        }
        if compatible.is_empty() {
            for (value, x) in core {
                manifold.push(value + damping, x, mode);
            }
            continue;
        }

        let mut trial: Vec<Array1<Complex64>> = core.into_iter().map(|(_, x)| x).collect();
        trial.extend(compatible.iter().map(|c| class_vector(dim, n, c, mode)));
        let solved = match generalized(h, &columns(&trial, dim))? {
            Some(list) => list,
            None => {
                manifold.flags.dense_fallback = true;
                let fourier: Vec<_> = full
                    .iter()
                    .chain(compatible.iter())
                    .map(|c| class_vector(dim, n, c, mode))
                    .collect();
                orthonormal_sector(h, &fourier)?
            }
        };
        for (value, x) in solved {
            manifold.push(value + damping, x, mode);
        }
    }
    manifold.finalize();
    Ok(manifold)
}
