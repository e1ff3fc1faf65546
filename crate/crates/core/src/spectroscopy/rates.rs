// SPDX-License-Identifier: Apache-2.0

//! Partial decay rates between adjacent excitation manifolds.

use ndarray::Array1;
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{ExcitationBasis, ExcitationSet};
use crate::coupling::CouplingSet;
use crate::error::{Error, Result};
use crate::manifold::{EigenManifold, Eigenpair};

/// Relative tolerance of the sum rule Σ_w Γ(u→w) = F_u.
pub const SUM_RULE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialRate {
    pub lower: String,
    /// Rate in units of γ.
    pub rate: f64,
}

/// S_i⁻|u⟩ expressed over the lower basis, for every vertex i.
fn lowered(upper: &Array1<Complex64>, upper_basis: &ExcitationBasis, lower_basis: &ExcitationBasis) -> Vec<Array1<Complex64>> {
    let n = upper_basis.n_sites();
    let mut out = vec![Array1::zeros(lower_basis.len()); n];
    for (a, state) in upper_basis.states().iter().enumerate() {
        for i in state.indices() {
            let b = ExcitationSet::from_vertices(
                &state.vertices().into_iter().filter(|&v| v != i + 1).collect::<Vec<_>>(),
            );
            let k = lower_basis.index_of(b).expect("lowering stays in the n − 1 block");
            out[i][k] += upper[a];
        }
    }
    out
}

/// Rates Γ(u→w) = Σ_ij F_ij c_i c̄_j with c_i = ⟨w|S_i⁻|u⟩, F_ii = 1 and
/// F_ij = Im Ω_ij, from `upper` (a state of `upper_manifold`) to every state
/// of `lower`.
///
/// Over a complete orthonormal lower manifold the rates add up to the upper
/// state's decay constant; a violation beyond 1e−8·max(F_u, 1) is reported as
/// a consistency error.
pub fn partial_decay_rates(
    upper: &Eigenpair,
    upper_manifold: &EigenManifold,
    lower: &EigenManifold,
    couplings: &CouplingSet,
) -> Result<Vec<PartialRate>> {
    let n = upper_manifold.n_sites();
    if lower.n_sites() != n || couplings.n_sites() != n {
        return Err(Error::Precondition("manifolds and couplings disagree on N".into()));
    }
    if upper_manifold.excitations() == 0 || lower.excitations() + 1 != upper_manifold.excitations() {
        return Err(Error::Precondition(format!(
            "decay runs from n to n − 1, got n = {} and {}",
            upper_manifold.excitations(),
            lower.excitations()
        )));
    }
    let s = lowered(&upper.vector, &upper_manifold.basis, &lower.basis);
    let damping = |i: usize, j: usize| if i == j { 1.0 } else { couplings.between(i, j).im };
    let rates: Vec<PartialRate> = lower
        .pairs
        .iter()
        .map(|w| {
            let c: Vec<Complex64> = s
                .iter()
                .map(|si| w.vector.iter().zip(si.iter()).map(|(x, y)| x.conj() * y).sum())
                .collect();
            let mut rate = 0.0;
            for i in 0..n {
                for j in 0..n {
                    rate += damping(i, j) * (c[i] * c[j].conj()).re;
                }
            }
            PartialRate {
                lower: w.label(),
                rate,
            }
        })
        .collect();
    let sum: f64 = rates.iter().map(|r| r.rate).sum();
    let decay = upper.decay();
    if (sum - decay).abs() > SUM_RULE_TOL * decay.abs().max(1.0) {
        return Err(Error::Consistency {
            state: upper.label(),
            sum,
            decay,
        });
    }
    Ok(rates)
}
