// SPDX-License-Identifier: Apache-2.0

//! Physical observables derived from the eigenmanifolds.

mod lines;
mod rates;
mod sweep;

use serde::Serialize;

pub use lines::{
    absorption_amplitude, biexciton_lines, biexciton_table, exciton_levels, exciton_line, lines_from_table,
    long_wavelength_manifolds, BiexcitonEntry, BiexcitonTable, ExcitonLevel, SpectralLine, StateRef, ACTIVE_INTENSITY,
};
pub use rates::{partial_decay_rates, PartialRate, SUM_RULE_TOL};
pub use sweep::{decay_sweep, linear_samples, DecayCurvePoint, TrackedDecay, TRACKING_OVERLAP};

use crate::manifold::EigenManifold;

pub const DEFAULT_RADIANCE_EPSILON: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Radiance {
    Dark,
    Subradiant,
    Normal,
    Superradiant,
}

/// Compares each decay constant F with the uncoupled value n (γ units).
///
/// The ground state is `Normal`; otherwise F < ε is `Dark`, |F − n| ≤ ε is
/// `Normal`, and the rest are sub- or superradiant.
pub fn classify_radiance(manifold: &EigenManifold, epsilon: f64) -> Vec<Radiance> {
    let n = manifold.excitations() as f64;
    manifold
        .pairs
        .iter()
        .map(|p| {
            let f = p.decay();
            if manifold.excitations() == 0 {
                Radiance::Normal
            } else if f < epsilon {
                Radiance::Dark
            } else if (f - n).abs() <= epsilon {
                Radiance::Normal
            } else if f < n {
                Radiance::Subradiant
            } else {
                Radiance::Superradiant
            }
        })
        .collect()
}
