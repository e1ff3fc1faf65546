// SPDX-License-Identifier: Apache-2.0

//! Long-wavelength level tables, absorption lines and absorption amplitudes.

use ndarray::Array1;
use num_complex::Complex64;
use serde::Serialize;

use crate::coupling::{coupling_set, Kernel, PolygonSpec};
use crate::error::{Error, Result};
use crate::manifold::{EigenManifold, DEGENERACY_TOL};
use crate::solver::{realize_degenerate_pairs, solve_auto};

/// Relative intensity below which a line counts as optically inactive.
pub const ACTIVE_INTENSITY: f64 = 1e-12;

/// One end of a transition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateRef {
    pub excitations: usize,
    pub label: String,
}

impl StateRef {
    pub fn ground() -> Self {
        StateRef {
            excitations: 0,
            label: "G".into(),
        }
    }
}

/// An absorption line between two collective states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralLine {
    pub upper: StateRef,
    pub lower: StateRef,
    /// Shift of the line centre from ω, in units of V_N.
    pub frequency_shift: f64,
    /// F_upper + F_lower, in units of γ.
    pub half_width: f64,
    pub relative_intensity: f64,
}

/// Long-wavelength manifolds n = 0…n_max of an N-gon, with degenerate pairs
/// combined into real vectors. Shifts are in V_N, decay constants in γ.
pub fn long_wavelength_manifolds(n_sites: usize, kernel: &Kernel, n_max: usize) -> Result<Vec<EigenManifold>> {
    if matches!(kernel, Kernel::Custom(_)) {
        return Err(Error::Unsupported("the long-wavelength limit needs a physical kernel".into()));
    }
    let couplings = coupling_set(&PolygonSpec::new(n_sites, kernel.clone()))?;
    (0..=n_max.min(n_sites))
        .map(|n| Ok(realize_degenerate_pairs(&solve_auto(n_sites, n, &couplings)?)))
        .collect()
}

fn symmetric_states(m: &EigenManifold) -> impl Iterator<Item = &crate::manifold::Eigenpair> {
    let n = m.n_sites();
    m.pairs.iter().filter(move |p| p.mode == n)
}

fn exciton_of(m1: &EigenManifold) -> &crate::manifold::Eigenpair {
    symmetric_states(m1).next().expect("the n = 1 block has exactly one symmetric state")
}

/// The single optically active n = 1 line, ground → u_(N).
pub fn exciton_line(n_sites: usize, kernel: &Kernel) -> Result<SpectralLine> {
    let ms = long_wavelength_manifolds(n_sites, kernel, 1)?;
    let e = exciton_of(&ms[1]);
    Ok(SpectralLine {
        upper: StateRef {
            excitations: 1,
            label: e.label(),
        },
        lower: StateRef::ground(),
        frequency_shift: e.shift(),
        half_width: e.decay(),
        relative_intensity: 1.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BiexcitonEntry {
    pub label: String,
    /// ΔG⁽²⁾ in units of V_N.
    pub shift: f64,
    /// F⁽²⁾ in units of γ.
    pub decay: f64,
    /// Unit-norm eigenvector over the n = 2 basis.
    #[serde(skip)]
    pub vector: Array1<Complex64>,
    /// The same vector scaled so its first component is 1, when that component is nonzero.
    #[serde(skip)]
    pub gauge_vector: Option<Array1<Complex64>>,
}

/// Exciton shift and the symmetric biexciton levels of one polygon.
#[derive(Clone, Debug, Serialize)]
pub struct BiexcitonTable {
    pub n_sites: usize,
    /// ΔG⁽¹⁾ of u_(N), in units of V_N.
    pub exciton_shift: f64,
    /// F⁽¹⁾ of u_(N), in units of γ.
    pub exciton_decay: f64,
    /// Symmetric n = 2 levels, highest shift first.
    pub entries: Vec<BiexcitonEntry>,
}

pub fn biexciton_table(n_sites: usize, kernel: &Kernel) -> Result<BiexcitonTable> {
    let ms = long_wavelength_manifolds(n_sites, kernel, 2)?;
    let exciton = exciton_of(&ms[1]);
    let mut entries: Vec<BiexcitonEntry> = symmetric_states(&ms[2])
        .map(|p| {
            let first = p.vector[0];
            let gauge_vector = (first.norm() > 1e-12).then(|| p.vector.mapv(|z| z / first));
            BiexcitonEntry {
                label: p.label(),
                shift: p.shift(),
                decay: p.decay(),
                vector: p.vector.clone(),
                gauge_vector,
            }
        })
        .collect();
    entries.sort_by(|a, b| b.shift.total_cmp(&a.shift));
    Ok(BiexcitonTable {
        n_sites,
        exciton_shift: exciton.shift(),
        exciton_decay: exciton.decay(),
        entries,
    })
}

/// Lines u_(N) → symmetric n = 2 states with nonzero intensity.
///
/// In the long-wavelength limit the relative intensity of each line is
/// F⁽²⁾ normalized over the active states.
pub fn biexciton_lines(n_sites: usize, kernel: &Kernel) -> Result<Vec<SpectralLine>> {
    if n_sites < 2 {
        return Err(Error::Precondition("biexcitons need N ≥ 2".into()));
    }
    let table = biexciton_table(n_sites, kernel)?;
    Ok(lines_from_table(&table))
}

/// Builds the absorption lines of a biexciton table.
pub fn lines_from_table(table: &BiexcitonTable) -> Vec<SpectralLine> {
    let total: f64 = table.entries.iter().map(|e| e.decay.max(0.0)).sum();
    let exciton = StateRef {
        excitations: 1,
        label: format!("v{}.1", table.n_sites),
    };
    table
        .entries
        .iter()
        .map(|e| SpectralLine {
            upper: StateRef {
                excitations: 2,
                label: e.label.clone(),
            },
            lower: exciton.clone(),
            frequency_shift: e.shift - table.exciton_shift,
            half_width: e.decay + table.exciton_decay,
            relative_intensity: if total > 0.0 { e.decay.max(0.0) / total } else { 0.0 },
        })
        .filter(|l| l.relative_intensity > ACTIVE_INTENSITY)
        .collect()
}

/// One row of the single-excitation level table: a level and the modes sharing it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcitonLevel {
    pub modes: Vec<usize>,
    /// Shift in units of V_N.
    pub shift: f64,
}

/// Long-wavelength n = 1 levels, degenerate (v, N−v) pairs merged, ordered by smallest mode.
pub fn exciton_levels(n_sites: usize, kernel: &Kernel, nearest_only: bool) -> Result<Vec<ExcitonLevel>> {
    if matches!(kernel, Kernel::Custom(_)) {
        return Err(Error::Unsupported("the long-wavelength limit needs a physical kernel".into()));
    }
    let mut couplings = coupling_set(&PolygonSpec::new(n_sites, kernel.clone()))?;
    if nearest_only {
        couplings = couplings.nearest_neighbour_only();
    }
    let m = solve_auto(n_sites, 1, &couplings)?;
    let mut levels: Vec<ExcitonLevel> = Vec::new();
    for v in 1..=n_sites {
        let partner = n_sites - v;
        if partner > 0 && partner < v {
            continue;
        }
        let mut modes = vec![v];
        if partner > v {
            modes.push(partner);
        }
        let p = m.pairs.iter().find(|p| p.mode == v).expect("every mode has one n = 1 state");
        levels.push(ExcitonLevel { modes, shift: p.shift() });
    }
    levels.sort_by_key(|l| if l.modes[0] == n_sites { usize::MAX } else { l.modes[0] });
    let scale = levels.iter().fold(1.0f64, |s, l| s.max(l.shift.abs()));
    for l in &mut levels {
        if l.shift.abs() < DEGENERACY_TOL * scale {
            l.shift = 0.0;
        }
    }
    Ok(levels)
}

/// |⟨state| Σ_i S_i⁺ (μ̂_i·ê) e^{ik·R_i} |G⟩|² for a state of the n = 1 block.
///
/// In the long-wavelength limit (k = 0 in `spec`) the phases are dropped.
pub fn absorption_amplitude(
    manifold: &EigenManifold,
    index: usize,
    spec: &PolygonSpec,
    wavevector: [f64; 3],
    polarization: [f64; 3],
) -> Result<f64> {
    if manifold.excitations() != 1 {
        return Err(Error::Precondition(format!(
            "absorption from the ground state reaches n = 1 only, got a state with n = {}",
            manifold.excitations()
        )));
    }
    if manifold.n_sites() != spec.n_sites {
        return Err(Error::Precondition("state and polygon disagree on N".into()));
    }
    let pair = manifold
        .pairs
        .get(index)
        .ok_or_else(|| Error::Precondition(format!("no eigenpair {index}")))?;
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut amp = Complex64::new(0.0, 0.0);
    for (k, state) in manifold.basis.states().iter().enumerate() {
        let i = state.vertices()[0];
        let proj = dot(spec.moment_direction(i), polarization);
        let phase = if spec.is_long_wavelength() {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, dot(wavevector, spec.vertex_position(i)))
        };
        amp += pair.vector[k].conj() * proj * phase;
    }
    Ok(amp.norm_sqr())
}
