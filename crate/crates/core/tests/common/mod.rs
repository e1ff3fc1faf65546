// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use num_complex::Complex64;
use qring::coupling::{CouplingSet, CouplingUnits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A complex number with both parts uniform in [-1, 1).
pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random γ-unit couplings, one per offset class.
pub fn random_couplings(rng: &mut ChaCha8Rng, n_sites: usize) -> CouplingSet {
    let values = (0..n_sites / 2).map(|_| random_complex(rng)).collect();
    CouplingSet::new(n_sites, values, CouplingUnits::Gamma).unwrap()
}

/// Largest distance after pairing each `got` value with its nearest unused `want` value.
pub fn multiset_distance(got: &[Complex64], want: &[Complex64]) -> f64 {
    assert_eq!(got.len(), want.len(), "multiset sizes differ");
    let mut used = vec![false; want.len()];
    let mut worst = 0.0f64;
    for g in got {
        let (k, d) = want
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, w)| (k, (g - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn max_norm(values: &[Complex64]) -> f64 {
    values.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Number of entries of `values` within `tol` of `target`.
pub fn count_near(values: &[Complex64], target: Complex64, tol: f64) -> usize {
    values.iter().filter(|z| (*z - target).norm() <= tol).count()
}
