// SPDX-License-Identifier: Apache-2.0

//! Decay constants along a sweep of the wavelength-to-separation ratio.

use serde::Serialize;

use crate::coupling::{coupling_set, Kernel, PolygonSpec};
use crate::error::{Error, Result};
use crate::manifold::EigenManifold;
use crate::solver::solve_auto;

/// Overlap below which a tracked assignment is reported as ambiguous.
pub const TRACKING_OVERLAP: f64 = 0.9;

#[derive(Clone, Debug, Serialize)]
pub struct TrackedDecay {
    /// Label of the state at the first sample; stable along the curve.
    pub label: String,
    /// F in units of γ.
    pub decay: f64,
    /// G in units of γ.
    pub shift: f64,
    /// |⟨previous|current⟩| with the previous sample's state (1 at the first sample).
    pub overlap: f64,
    /// Set when the assignment at this point was ambiguous.
    pub crossing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayCurvePoint {
    pub lambda_over_r: f64,
    pub states: Vec<TrackedDecay>,
}

fn overlap(a: &EigenManifold, i: usize, b: &EigenManifold, j: usize) -> f64 {
    a.pairs[i]
        .vector
        .iter()
        .zip(b.pairs[j].vector.iter())
        .map(|(x, y)| x.conj() * y)
        .sum::<num_complex::Complex64>()
        .norm()
}

/// Solves the (N, n) block at each λ/r (with k·r₁ = 2π/(λ/r)) and follows each
/// state by eigenvector overlap. Candidates are restricted to the same rotation
/// mode, which the geometry preserves along the whole sweep.
pub fn decay_sweep(n_sites: usize, excitations: usize, kernel: &Kernel, lambda_over_r: &[f64]) -> Result<Vec<DecayCurvePoint>> {
    if lambda_over_r.is_empty() {
        return Err(Error::Precondition("empty sweep".into()));
    }
    if lambda_over_r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Precondition("λ/r samples must be positive and finite".into()));
    }
    let increasing = lambda_over_r.windows(2).all(|w| w[1] > w[0]);
    let decreasing = lambda_over_r.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::Precondition("λ/r samples must be strictly monotone".into()));
    }
    if matches!(kernel, Kernel::Custom(_)) {
        return Err(Error::Unsupported("a custom table does not depend on distance".into()));
    }

    let manifolds = lambda_over_r
        .iter()
        .map(|&x| {
            let spec = PolygonSpec::new(n_sites, kernel.clone()).with_wavelength_ratio(x);
            solve_auto(n_sites, excitations, &coupling_set(&spec)?)
        })
        .collect::<Result<Vec<_>>>()?;

    let first = &manifolds[0];
    let labels: Vec<String> = first.pairs.iter().map(|p| p.label()).collect();
    // track t → index of its state in the current manifold
    let mut current: Vec<usize> = (0..first.len()).collect();
    let mut out = Vec::with_capacity(manifolds.len());
    let point = |m: &EigenManifold, idx: &[usize], ov: &[f64], flags: &[bool], x: f64| DecayCurvePoint {
        lambda_over_r: x,
        states: (0..idx.len())
            .map(|t| TrackedDecay {
                label: labels[t].clone(),
                decay: m.pairs[idx[t]].decay(),
                shift: m.pairs[idx[t]].shift(),
                overlap: ov[t],
                crossing: flags[t],
            })
            .collect(),
    };
    let ones = vec![1.0; first.len()];
    let none = vec![false; first.len()];
    out.push(point(first, &current, &ones, &none, lambda_over_r[0]));

    for s in 1..manifolds.len() {
        let (prev, next) = (&manifolds[s - 1], &manifolds[s]);
        let tracks = current.len();
        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for t in 0..tracks {
            let i = current[t];
            for j in 0..next.len() {
                if next.pairs[j].mode == prev.pairs[i].mode {
                    candidates.push((overlap(prev, i, next, j), t, j));
                }
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut assigned = vec![usize::MAX; tracks];
        let mut taken = vec![false; next.len()];
        let mut ov = vec![0.0; tracks];
        for &(o, t, j) in &candidates {
            if assigned[t] == usize::MAX && !taken[j] {
                assigned[t] = j;
                taken[j] = true;
                ov[t] = o;
            }
        }
        let mut flags = vec![false; tracks];
        for t in 0..tracks {
            if assigned[t] == usize::MAX {
                let j = (0..next.len()).find(|&j| !taken[j]).expect("same number of states");
                assigned[t] = j;
                taken[j] = true;
                flags[t] = true;
            }
            let runner_up = candidates
                .iter()
                .filter(|c| c.1 == t && c.2 != assigned[t])
                .map(|c| c.0)
                .fold(0.0, f64::max);
            if ov[t] < TRACKING_OVERLAP || runner_up > TRACKING_OVERLAP {
                flags[t] = true;
            }
        }
        // A flagged track marks every track that competed for its states.
        let snapshot = flags.clone();
        for t in 0..tracks {
            if snapshot[t] {
                for u in 0..tracks {
                    if next.pairs[assigned[u]].mode == next.pairs[assigned[t]].mode
                        && candidates.iter().any(|c| c.1 == t && c.2 == assigned[u] && c.0 > 0.1)
                    {
                        flags[u] = true;
                    }
                }
            }
        }
        current = assigned;
        out.push(point(next, &current, &ov, &flags, lambda_over_r[s]));
    }
    Ok(out)
}

/// `count` evenly spaced samples from `min` to `max` inclusive.
pub fn linear_samples(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![min],
        _ => (0..count)
            .map(|k| min + (max - min) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}
