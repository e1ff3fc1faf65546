// SPDX-License-Identifier: Apache-2.0

//! Eigenpairs of one excitation block together with their symmetry labels.

use std::f64::consts::PI;
use std::fmt;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{ExcitationBasis, HamiltonianBlock};
use crate::coupling::CouplingUnits;
use crate::error::{Error, Result};
use crate::linalg::{eig, frobenius, Lu};

/// Relative distance below which two eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Residual bound ‖(H − ε)x‖ ≤ RESIDUAL_TOL·‖H‖ every emitted pair satisfies.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryTag {
    /// Invariant under rotation (v = N).
    Symmetric,
    /// Changes sign under the half-turn rotation (v = N/2).
    Antisymmetric,
    Generic,
}

impl SymmetryTag {
    pub fn for_mode(n_sites: usize, mode: usize) -> Self {
        if mode == n_sites {
            SymmetryTag::Symmetric
        } else if 2 * mode == n_sites {
            SymmetryTag::Antisymmetric
        } else {
            SymmetryTag::Generic
        }
    }
}

/// How an eigenvector relates to its rotation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorForm {
    /// Eigenvector of the rotation with eigenvalue λ^v.
    Fourier,
    /// (U_v + U_{N−v})/2 of a degenerate pair.
    Cosine,
    /// (U_v − U_{N−v})/2i of a degenerate pair.
    Sine,
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    /// G + iF; F includes the free damping n (γ = 1).
    pub value: Complex64,
    /// Unit Euclidean norm over the block's basis.
    pub vector: Array1<Complex64>,
    /// Rotation mode v in 1..=N.
    pub mode: usize,
    /// 1-based index among the eigenpairs sharing `mode`, in manifold order.
    pub branch: usize,
    pub symmetry: SymmetryTag,
    /// Index of the degeneracy cluster this pair belongs to.
    pub group: usize,
    pub form: VectorForm,
}

impl Eigenpair {
    pub fn shift(&self) -> f64 {
        self.value.re
    }

    pub fn decay(&self) -> f64 {
        self.value.im
    }

    /// Compact label such as `v3.1`, `v1c.2` or `v4s.2`.
    pub fn label(&self) -> String {
        let form = match self.form {
            VectorForm::Fourier => "",
            VectorForm::Cosine => "c",
            VectorForm::Sine => "s",
        };
        format!("v{}{}.{}", self.mode, form, self.branch)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ManifoldFlags {
    /// Some sector (or the whole block) was solved by the dense oracle instead of the reduction.
    pub dense_fallback: bool,
    /// Unconjugated orthogonality between distinct eigenvalues failed.
    pub near_defective: bool,
}

/// Complete eigen-decomposition of one (N, n) block.
#[derive(Clone, Debug)]
pub struct EigenManifold {
    pub basis: ExcitationBasis,
    pub units: CouplingUnits,
    pub pairs: Vec<Eigenpair>,
    pub flags: ManifoldFlags,
}

impl fmt::Display for EigenManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N = {}, n = {}", self.n_sites(), self.excitations())?;
        for p in &self.pairs {
            writeln!(f, "  {:>8}  G = {:>12.6}  F = {:>10.6}", p.label(), p.shift(), p.decay())?;
        }
        Ok(())
    }
}

pub(crate) fn unit(mut x: Array1<Complex64>) -> Array1<Complex64> {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        x.mapv_inplace(|z| z / n);
    }
    x
}

/// λ^k for λ = e^{2πi/N}, reduced mod N so large exponents stay accurate.
pub fn root_power(n_sites: usize, k: i64) -> Complex64 {
    let r = k.rem_euclid(n_sites as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / n_sites as f64)
}

/// Coordinates of `x` in the sector-v Fourier basis: one coefficient per class
/// compatible with v (class size s with v·s ≡ 0 mod N), zero otherwise.
pub fn sector_coordinates(basis: &ExcitationBasis, mode: usize, x: &Array1<Complex64>) -> Vec<Complex64> {
    let n = basis.n_sites();
    basis
        .classes()
        .iter()
        .map(|c| {
            if !(mode * c.size).is_multiple_of(n) {
                return Complex64::new(0.0, 0.0);
            }
            let s: Complex64 = (0..c.size)
                .map(|p| root_power(n, -((mode * (p + 1)) as i64)) * x[c.start + p])
                .sum();
            s / c.size as f64
        })
        .collect()
}

/// Rotates the global phase so the largest sector coordinate is real and positive.
pub(crate) fn fix_phase(basis: &ExcitationBasis, mode: usize, x: &mut Array1<Complex64>) {
    let coords = sector_coordinates(basis, mode, x);
    let peak = coords.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let anchor = if peak > 1e-12 {
        coords.iter().find(|z| z.norm() >= peak * (1.0 - 1e-9)).copied()
    } else {
        x.iter().find(|z| z.norm() > 1e-12).copied()
    };
    if let Some(z) = anchor {
        let phase = z.conj() / z.norm();
        x.mapv_inplace(|e| e * phase);
    }
}

fn scale_of(values: impl Iterator<Item = Complex64>) -> f64 {
    values.fold(0.0f64, |m, z| m.max(z.norm())).max(1.0)
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= DEGENERACY_TOL * scale
}

impl EigenManifold {
    pub fn new(basis: ExcitationBasis, units: CouplingUnits) -> Self {
        EigenManifold {
            basis,
            units,
            pairs: Vec::new(),
            flags: ManifoldFlags::default(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn excitations(&self) -> usize {
        self.basis.excitations()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// Eigenvalues of the interaction alone (the free damping n removed).
    pub fn interaction_values(&self) -> Vec<Complex64> {
        let n = self.excitations() as f64;
        self.pairs.iter().map(|p| p.value - Complex64::new(0.0, n)).collect()
    }

    pub fn push(&mut self, value: Complex64, vector: Array1<Complex64>, mode: usize) {
        let n = self.n_sites();
        let mut vector = unit(vector);
        fix_phase(&self.basis, mode, &mut vector);
        self.pairs.push(Eigenpair {
            value,
            vector,
            mode,
            branch: 0,
            symmetry: SymmetryTag::for_mode(n, mode),
            group: 0,
            form: VectorForm::Fourier,
        });
    }

    /// Sorts by ascending real part; within a degeneracy cluster by imaginary
    /// part, then mode. Then assigns branch indices and degeneracy groups.
    pub fn finalize(&mut self) {
        let scale = scale_of(self.pairs.iter().map(|p| p.value));
        let tol = DEGENERACY_TOL * scale;
        self.pairs.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
        let mut start = 0;
        while start < self.pairs.len() {
            let mut end = start + 1;
            while end < self.pairs.len() && self.pairs[end].value.re - self.pairs[end - 1].value.re <= tol {
                end += 1;
            }
            self.pairs[start..end].sort_by(|a, b| {
                let im = if (a.value.im - b.value.im).abs() <= tol {
                    std::cmp::Ordering::Equal
                } else {
                    a.value.im.total_cmp(&b.value.im)
                };
                im.then(a.mode.cmp(&b.mode)).then(a.form_rank().cmp(&b.form_rank()))
            });
            start = end;
        }
        let mut counts = vec![0usize; self.n_sites() + 1];
        let mut group = 0;
        for k in 0..self.pairs.len() {
            if k > 0 && !close(self.pairs[k].value, self.pairs[k - 1].value, scale) {
                group += 1;
            }
            let p = &mut self.pairs[k];
            p.group = group;
            counts[p.mode] += 1;
            p.branch = counts[p.mode];
        }
    }

    /// Largest ‖(H − ε)x‖ over the manifold, with ε the interaction eigenvalue.
    pub fn max_residual(&self, block: &HamiltonianBlock) -> f64 {
        let n = self.excitations() as f64;
        self.pairs
            .iter()
            .map(|p| crate::linalg::residual(&block.matrix, p.value - Complex64::new(0.0, n), &p.vector))
            .fold(0.0, f64::max)
    }

    /// Checks pair count and the residual bound against `block`.
    pub fn verify(&self, block: &HamiltonianBlock) -> Result<f64> {
        if self.pairs.len() != block.dimension() {
            return Err(Error::Structure(format!(
                "{} eigenpairs for a block of dimension {}",
                self.pairs.len(),
                block.dimension()
            )));
        }
        let r = self.max_residual(block);
        let bound = RESIDUAL_TOL * frobenius(&block.matrix);
        if r > bound {
            return Err(Error::Residual {
                dimension: block.dimension(),
                residual: r,
                bound,
            });
        }
        Ok(r)
    }

    /// Largest |xᵢᵀxⱼ| between unit eigenvectors with clearly distinct eigenvalues.
    pub fn bilinear_defect(&self) -> f64 {
        let scale = scale_of(self.pairs.iter().map(|p| p.value));
        let mut worst: f64 = 0.0;
        for i in 0..self.pairs.len() {
            for j in i + 1..self.pairs.len() {
                let (a, b) = (&self.pairs[i], &self.pairs[j]);
                if (a.value - b.value).norm() <= 1e-6 * scale {
                    continue;
                }
                let s: Complex64 = a.vector.iter().zip(b.vector.iter()).map(|(x, y)| x * y).sum();
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// Determinant of the Gram matrix of the eigenvectors: near 0 means they fail to span the block.
    pub fn gram_determinant(&self) -> f64 {
        let d = self.pairs.len();
        let g = Array2::from_shape_fn((d, d), |(i, j)| {
            self.pairs[i]
                .vector
                .iter()
                .zip(self.pairs[j].vector.iter())
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
        });
        Lu::new(&g).determinant().norm()
    }
}

impl Eigenpair {
    fn form_rank(&self) -> u8 {
        match self.form {
            VectorForm::Fourier => 0,
            VectorForm::Cosine => 1,
            VectorForm::Sine => 2,
        }
    }
}

/// Assigns rotation modes to eigenvectors from a basis-agnostic solve.
///
/// Within each degeneracy cluster the rotation operator is diagonalized on
/// the span of the cluster's vectors, so the returned vectors are rotation
/// eigenvectors whenever the cluster spans a rotation-invariant subspace.
pub(crate) fn label_by_rotation(
    basis: &ExcitationBasis,
    values: &[Complex64],
    vectors: &Array2<Complex64>,
) -> Vec<(Complex64, Array1<Complex64>, usize)> {
    let n = basis.n_sites();
    let perm = basis.rotation_permutation();
    let rotate = |x: &Array1<Complex64>| Array1::from_shape_fn(x.len(), |k| x[perm[k]]);
    let mode_of = |z: Complex64| {
        let m = (z.arg() * n as f64 / (2.0 * PI)).round() as i64;
        let m = m.rem_euclid(n as i64) as usize;
        if m == 0 {
            n
        } else {
            m
        }
    };
    let scale = scale_of(values.iter().copied());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re).then(values[a].im.total_cmp(&values[b].im)));
    let mut used = vec![false; values.len()];
    let mut out = Vec::with_capacity(values.len());
    for &i in &order {
        if used[i] {
            continue;
        }
        let cluster: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&j| !used[j] && close(values[i], values[j], scale))
            .collect();
        for &j in &cluster {
            used[j] = true;
        }
        let k = cluster.len();
        let q = Array2::from_shape_fn((vectors.nrows(), k), |(r, c)| vectors[[r, cluster[c]]]);
        let tq = {
            let mut m = Array2::zeros(q.raw_dim());
            for c in 0..k {
                m.column_mut(c).assign(&rotate(&q.column(c).to_owned()));
            }
            m
        };
        let qh = q.t().mapv(|z| z.conj());
        let gram = qh.dot(&q);
        let r = Lu::new(&gram).solve_matrix(&qh.dot(&tq));
        let mean = cluster.iter().map(|&j| values[j]).sum::<Complex64>() / k as f64;
        match eig(&r) {
            Ok(e) if k > 1 => {
                for c in 0..k {
                    let x = q.dot(&e.vectors.column(c));
                    out.push((mean, unit(x), mode_of(e.values[c])));
                }
            }
            _ => {
                for (c, &j) in cluster.iter().enumerate() {
                    let x = q.column(c).to_owned();
                    let rq: Complex64 = x.iter().zip(rotate(&x).iter()).map(|(a, b)| a.conj() * b).sum();
                    out.push((values[j], x, mode_of(rq)));
                }
            }
        }
    }
    out
}
