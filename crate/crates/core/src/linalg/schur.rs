// SPDX-License-Identifier: Apache-2.0

//! General complex eigensolver: Householder reduction to Hessenberg form,
//! single-shift QR iteration to Schur form, eigenvectors by triangular
//! back-substitution, and optional inverse-iteration polishing.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::lu::Lu;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigen-decomposition of a general complex matrix.
#[derive(Clone, Debug)]
pub struct Eig {
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors as columns, in the order of `values`.
    pub vectors: Array2<Complex64>,
    /// Total QR sweeps spent.
    pub iterations: usize,
}

pub fn frobenius(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO })
}

/// Reduces `h` to upper Hessenberg form in place, accumulating the unitary similarity into `z`.
fn hessenberg(h: &mut Array2<Complex64>, z: &mut Array2<Complex64>) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[[i, k]].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[[k + 1, k]];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[[i, k]]).collect();
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vn2 == 0.0 {
            continue;
        }
        let f = 2.0 / vn2;
        for j in k..n {
            let s: Complex64 = v.iter().enumerate().map(|(p, vp)| vp.conj() * h[[k + 1 + p, j]]).sum();
            for (p, vp) in v.iter().enumerate() {
                h[[k + 1 + p, j]] -= *vp * s * f;
            }
        }
        for m in [&mut *h, &mut *z] {
            for i in 0..n {
                let s: Complex64 = v.iter().enumerate().map(|(p, vp)| m[[i, k + 1 + p]] * vp).sum();
                for (p, vp) in v.iter().enumerate() {
                    m[[i, k + 1 + p]] -= s * vp.conj() * f;
                }
            }
        }
        h[[k + 1, k]] = alpha;
        for i in k + 2..n {
            h[[i, k]] = ZERO;
        }
    }
}

/// Rotation (c, s) with [[c, s], [−s̄, c]]·(x, y)ᵀ = (r, 0)ᵀ.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let (ax, ay) = (x.norm(), y.norm());
    if ay == 0.0 {
        (1.0, ZERO)
    } else if ax == 0.0 {
        (0.0, y.conj() / ay)
    } else {
        let r = ax.hypot(ay);
        (ax / r, (x / ax) * y.conj() / r)
    }
}

/// Eigenvalue of [[a, b], [c, d]] closest to d.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = 0.5 * (a - d);
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let (u, w) = (p + disc, p - disc);
    let den = if u.norm() >= w.norm() { u } else { w };
    if den.norm() == 0.0 {
        d
    } else {
        d - bc / den
    }
}

/// Drives the Hessenberg matrix `h` to upper triangular Schur form, accumulating into `z`.
fn schur(h: &mut Array2<Complex64>, z: &mut Array2<Complex64>, scale: f64) -> Result<usize> {
    let n = h.nrows();
    let eps = f64::EPSILON;
    let budget = 30 * n.max(10);
    let mut total = 0;
    let mut its = 0;
    let mut ihi = n as isize - 1;
    while ihi >= 0 {
        let hi = ihi as usize;
        let mut l = hi;
        while l > 0 {
            let mut s = h[[l - 1, l - 1]].norm() + h[[l, l]].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[[l, l - 1]].norm() <= eps * s {
                h[[l, l - 1]] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            ihi -= 1;
            its = 0;
            continue;
        }
        if total >= budget {
            return Err(Error::NoConvergence {
                dimension: n,
                converged: n - hi - 1,
                iterations: total,
            });
        }
        total += 1;
        its += 1;
        let mu = if its % 10 == 0 {
            h[[hi, hi]] + 0.75 * h[[hi, hi - 1]].norm()
        } else {
            wilkinson(h[[hi - 1, hi - 1]], h[[hi - 1, hi]], h[[hi, hi - 1]], h[[hi, hi]])
        };
        for k in l..hi {
            let (x, y) = if k == l {
                (h[[l, l]] - mu, h[[l + 1, l]])
            } else {
                (h[[k, k - 1]], h[[k + 1, k - 1]])
            };
            let (c, s) = givens(x, y);
            let first = if k == l { l } else { k - 1 };
            for j in first..n {
                let (a, b) = (h[[k, j]], h[[k + 1, j]]);
                h[[k, j]] = a * c + s * b;
                h[[k + 1, j]] = -s.conj() * a + b * c;
            }
            if k > l {
                h[[k + 1, k - 1]] = ZERO;
            }
            for i in 0..=(k + 2).min(hi) {
                let (a, b) = (h[[i, k]], h[[i, k + 1]]);
                h[[i, k]] = a * c + b * s.conj();
                h[[i, k + 1]] = -a * s + b * c;
            }
            for i in 0..n {
                let (a, b) = (z[[i, k]], z[[i, k + 1]]);
                z[[i, k]] = a * c + b * s.conj();
                z[[i, k + 1]] = -a * s + b * c;
            }
        }
    }
    Ok(total)
}

/// Eigenvectors of the upper triangular `t`, returned in Schur coordinates.
fn triangular_eigenvectors(t: &Array2<Complex64>, scale: f64) -> Array2<Complex64> {
    let n = t.nrows();
    let smallnum = f64::EPSILON * scale;
    let degenerate = 1e3 * smallnum;
    let mut out = Array2::zeros((n, n));
    for k in 0..n {
        let mut x = vec![ZERO; k + 1];
        x[k] = ONE;
        let mut xmax: f64 = 1.0;
        for i in (0..k).rev() {
            let sum: Complex64 = (i + 1..=k).map(|j| t[[i, j]] * x[j]).sum();
            let mut d = t[[i, i]] - t[[k, k]];
            if d.norm() < degenerate && sum.norm() < degenerate * xmax {
                x[i] = ZERO;
                continue;
            }
            if d.norm() < smallnum {
                d = Complex64::new(smallnum, 0.0);
            }
            x[i] = -sum / d;
            xmax = xmax.max(x[i].norm());
            if xmax > 1e100 {
                for e in x.iter_mut() {
                    *e /= xmax;
                }
                xmax = 1.0;
            }
        }
        for (i, e) in x.into_iter().enumerate() {
            out[[i, k]] = e;
        }
    }
    out
}

fn normalize(x: &mut Array1<Complex64>) {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        x.mapv_inplace(|z| z / n);
    }
}

/// ‖(A − λ)x‖₂ for unit x.
pub fn residual(a: &Array2<Complex64>, lambda: Complex64, x: &Array1<Complex64>) -> f64 {
    let ax = a.dot(x);
    ax.iter()
        .zip(x.iter())
        .map(|(p, q)| (p - lambda * q).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Full eigen-decomposition of a general complex square matrix.
pub fn eig(a: &Array2<Complex64>) -> Result<Eig> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Precondition(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Eig {
            values: vec![],
            vectors: Array2::zeros((0, 0)),
            iterations: 0,
        });
    }
    let norm = frobenius(a);
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let mut h = a.clone();
    let mut z = identity(n);
    hessenberg(&mut h, &mut z);
    let iterations = schur(&mut h, &mut z, scale)?;
    let values: Vec<Complex64> = (0..n).map(|i| h[[i, i]]).collect();
    let y = triangular_eigenvectors(&h, scale);
    let mut vectors = z.dot(&y);

    let polish_above = 1e-12 * scale;
    for k in 0..n {
        let mut x = vectors.column(k).to_owned();
        normalize(&mut x);
        let r = residual(a, values[k], &x);
        if r > polish_above {
            let shift = values[k] + Complex64::new(f64::EPSILON * scale, 0.0);
            let shifted = Array2::from_shape_fn((n, n), |(i, j)| if i == j { a[[i, j]] - shift } else { a[[i, j]] });
            let mut y = Lu::new(&shifted).solve(&x);
            normalize(&mut y);
            if y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && residual(a, values[k], &y) < r {
                x = y;
            }
        }
        vectors.column_mut(k).assign(&x);
    }
    Ok(Eig {
        values,
        vectors,
        iterations,
    })
}
