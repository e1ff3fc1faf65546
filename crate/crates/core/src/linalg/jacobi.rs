// SPDX-License-Identifier: Apache-2.0

//! Cyclic Jacobi diagonalization of complex Hermitian matrices.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix.
///
/// Only the upper triangle's Hermitian part is trusted; the input is
/// symmetrized as (A + A^H)/2 first.
pub fn eigh(a: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh needs a square matrix");
    let mut m = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (a[[i, j]] + a[[j, i]].conj()));
    let mut v = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let total = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = f64::EPSILON * total;

    let off = |m: &Array2<Complex64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += m[[i, j]].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    while off(&m) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                dimension: n,
                converged: 0,
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let g = apq / mag;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let gb = g.conj();
                // A ← A W with W = [[c, s], [−s ḡ, c ḡ]] on (p, q).
                for i in 0..n {
                    let (x, y) = (m[[i, p]], m[[i, q]]);
                    m[[i, p]] = x * c - y * s * gb;
                    m[[i, q]] = x * s + y * c * gb;
                }
                for j in 0..n {
                    let (x, y) = (m[[p, j]], m[[q, j]]);
                    m[[p, j]] = x * c - y * s * g;
                    m[[q, j]] = x * s + y * c * g;
                }
                for i in 0..n {
                    let (x, y) = (v[[i, p]], v[[i, q]]);
                    v[[i, p]] = x * c - y * s * gb;
                    v[[i, q]] = x * s + y * c * gb;
                }
                m[[p, q]] = Complex64::new(0.0, 0.0);
                m[[q, p]] = Complex64::new(0.0, 0.0);
                m[[p, p]] = Complex64::new(m[[p, p]].re, 0.0);
                m[[q, q]] = Complex64::new(m[[q, q]].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].re.total_cmp(&m[[j, j]].re));
    let values = order.iter().map(|&i| m[[i, i]].re).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok((values, vectors))
}
