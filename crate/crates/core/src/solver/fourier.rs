// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::manifold::root_power;

#[derive(Clone, Debug)]
pub struct FourierMode {
    pub mode: usize,
    /// λ^v.
    pub eigenvalue: Complex64,
    /// u_(v) = (λ^v, λ^{2v}, …, λ^{Nv}), unnormalized.
    pub vector: Array1<Complex64>,
}

#[derive(Clone, Debug)]
pub struct FourierModeSet {
    pub n_sites: usize,
    /// Primitive root e^{2πi/N}.
    pub lambda: Complex64,
    pub modes: Vec<FourierMode>,
}

pub fn fourier_modes(n_sites: usize) -> Result<FourierModeSet> {
    if n_sites < 2 {
        return Err(Error::Domain(format!("Fourier modes need N ≥ 2, got {n_sites}")));
    }
    let modes = (1..=n_sites)
        .map(|v| FourierMode {
            mode: v,
            eigenvalue: root_power(n_sites, v as i64),
            vector: Array1::from_shape_fn(n_sites, |p| root_power(n_sites, (v * (p + 1)) as i64)),
        })
        .collect();
    Ok(FourierModeSet {
        n_sites,
        lambda: root_power(n_sites, 1),
        modes,
    })
}

/// Cyclic shift P with (Pu)_p = u_{p+1}.
pub fn shift_matrix(n_sites: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n_sites, n_sites), |(i, j)| {
        if j == (i + 1) % n_sites {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

impl FourierModeSet {
    pub fn get(&self, mode: usize) -> &FourierMode {
        &self.modes[mode - 1]
    }
}
