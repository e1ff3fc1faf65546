// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// LU factorization with partial pivoting, PA = LU, stored packed.
#[derive(Clone, Debug)]
pub struct Lu {
    packed: Array2<Complex64>,
    pivots: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Factorizes a square matrix. Exactly singular pivots are kept as zero;
    /// `solve` then replaces them by a tiny value so inverse iteration still works.
    pub fn new(a: &Array2<Complex64>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut m = a.clone();
        let mut pivots = Vec::with_capacity(n);
        let mut swaps = 0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| m[[i, k]].norm().total_cmp(&m[[j, k]].norm()))
                .unwrap();
            pivots.push(p);
            if p != k {
                swaps += 1;
                for j in 0..n {
                    m.swap([k, j], [p, j]);
                }
            }
            let d = m[[k, k]];
            if d.norm() == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = m[[i, k]] / d;
                m[[i, k]] = f;
                if f.norm() != 0.0 {
                    for j in k + 1..n {
                        let t = m[[k, j]];
                        m[[i, j]] -= f * t;
                    }
                }
            }
        }
        Lu {
            packed: m,
            pivots,
            swaps,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        let d = (0..self.packed.nrows()).fold(Complex64::new(1.0, 0.0), |acc, k| acc * self.packed[[k, k]]);
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &Array1<Complex64>) -> Array1<Complex64> {
        let n = self.packed.nrows();
        let scale = self.packed.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;
        let mut x = b.clone();
        for (k, &p) in self.pivots.iter().enumerate() {
            x.swap(k, p);
        }
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.packed[[i, j]] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.packed[[i, j]] * x[j];
            }
            let mut d = self.packed[[i, i]];
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            x[i] = s / d;
        }
        x
    }

    /// Solves AX = B column by column.
    pub fn solve_matrix(&self, b: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros(b.raw_dim());
        for (j, col) in b.columns().into_iter().enumerate() {
            out.column_mut(j).assign(&self.solve(&col.to_owned()));
        }
        out
    }
}
