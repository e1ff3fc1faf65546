// SPDX-License-Identifier: Apache-2.0

//! Polygon geometry and the pair couplings Ω(r) between emitters.
//!
//! All couplings are dimensionless: in units of the single-emitter damping γ
//! for finite wavenumbers, or, in the long-wavelength limit, with the real
//! part in units of the nearest-neighbour static energy V_N and the imaginary
//! part in units of γ (see [`CouplingUnits`]).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::hankel2;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Distance between two vertices `offset` steps apart on a regular N-gon.
pub fn pair_separation(n_sites: usize, offset: usize, radius: f64) -> Result<f64> {
    if n_sites < 2 || offset == 0 || offset > n_sites / 2 {
        return Err(Error::Domain(format!(
            "offset class {offset} out of range 1..={} for N = {n_sites}",
            n_sites / 2
        )));
    }
    Ok(2.0 * radius * (PI * offset as f64 / n_sites as f64).sin())
}

/// How a kernel is evaluated at a given kr.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    /// Exact retarded form through the spherical Hankel functions.
    Full,
    /// Leading static real term with the small-sample damping as imaginary part.
    StaticLimit,
}

fn positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("kr must be positive and finite, got {x}")))
    }
}

/// Dipoles perpendicular to the ring plane: Ω/γ = i[-h_2(x)/2 + h_0(x)].
pub fn dipole_perp_kernel(x: f64, evaluation: Evaluation) -> Result<Complex64> {
    positive(x)?;
    match evaluation {
        Evaluation::StaticLimit => Ok(Complex64::new(1.5 / (x * x * x), 1.0)),
        Evaluation::Full => Ok(I * (-0.5 * hankel2(2, x)? + hankel2(0, x)?)),
    }
}

/// Linear quadrupoles perpendicular to the ring plane, in units of γ_q.
///
/// Normalized so that the pair damping tends to γ_q as x → 0:
/// Ω/γ_q = 2i[-(9/28) h_4(x) + (5/28) h_2(x) + h_0(x)/2]. The leading static
/// term follows from y_4 → -105/x⁵: Re Ω/γ_q → 135/(2x⁵).
pub fn quad_perp_kernel(x: f64, evaluation: Evaluation) -> Result<Complex64> {
    positive(x)?;
    match evaluation {
        Evaluation::StaticLimit => Ok(Complex64::new(QUAD_STATIC_COEFF / x.powi(5), 1.0)),
        Evaluation::Full => {
            let bracket =
                -(9.0 / 28.0) * hankel2(4, x)? + (5.0 / 28.0) * hankel2(2, x)? + 0.5 * hankel2(0, x)?;
            Ok(2.0 * I * bracket)
        }
    }
}

/// Coefficient of x⁻⁵ in the static quadrupole coupling.
pub const QUAD_STATIC_COEFF: f64 = 135.0 / 2.0;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_unit(v: [f64; 3], name: &str) -> Result<()> {
    let norm = dot(v, v).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "{name} must be a unit vector (norm {norm})"
        )));
    }
    Ok(())
}

/// Dipoles with arbitrary orientations μ̂_i, μ̂_j separated along r̂:
/// Ω/γ = i[½{3(μ̂_i·r̂)(μ̂_j·r̂) − μ̂_i·μ̂_j} h_2(x) + (μ̂_i·μ̂_j) h_0(x)].
pub fn oriented_dipole_kernel(
    mu_i: [f64; 3],
    mu_j: [f64; 3],
    r_hat: [f64; 3],
    x: f64,
    evaluation: Evaluation,
) -> Result<Complex64> {
    check_unit(mu_i, "mu_i")?;
    check_unit(mu_j, "mu_j")?;
    check_unit(r_hat, "r_hat")?;
    positive(x)?;
    let parallel = dot(mu_i, mu_j);
    let angular = 3.0 * dot(mu_i, r_hat) * dot(mu_j, r_hat) - parallel;
    match evaluation {
        // y_2 → -3/x³ gives the static real part; only j_0 survives in the damping.
        Evaluation::StaticLimit => Ok(Complex64::new(-1.5 * angular / (x * x * x), parallel)),
        Evaluation::Full => Ok(I * (0.5 * angular * hankel2(2, x)? + parallel * hankel2(0, x)?)),
    }
}

/// Coupling values supplied directly per offset class, in γ units.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable {
    values: BTreeMap<usize, Complex64>,
}

impl KernelTable {
    pub fn new(values: BTreeMap<usize, Complex64>) -> Result<Self> {
        if values.keys().any(|&d| d == 0) {
            return Err(Error::Config("offset class 0 is not a valid key".into()));
        }
        Ok(KernelTable { values })
    }

    /// A table with the same value on every offset class up to `max_offset`.
    pub fn uniform(max_offset: usize, value: Complex64) -> Self {
        KernelTable {
            values: (1..=max_offset).map(|d| (d, value)).collect(),
        }
    }

    pub fn get(&self, offset: usize) -> Option<Complex64> {
        self.values.get(&offset).copied()
    }

    /// Parses `offset = [re, im]` entries from TOML, or `{"offset": [re, im]}` from JSON
    /// when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, [f64; 2]> = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)
                .map_err(|e| Error::Config(format!("kernel table: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("kernel table: {e}")))?
        };
        let mut values = BTreeMap::new();
        for (key, [re, im]) in raw {
            let offset: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("kernel table key {key:?} is not an integer")))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::Config(format!("kernel table entry {offset} is not finite")));
            }
            values.insert(offset, Complex64::new(re, im));
        }
        KernelTable::new(values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read kernel table {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// The physical exchange interaction between emitters.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    DipolePerpendicular,
    QuadrupolePerpendicular,
    /// Dipoles tilted by `tilt` radians out of the ring plane from the local tangent;
    /// a tilt of π/2 recovers [`Kernel::DipolePerpendicular`].
    OrientedDipole { tilt: f64 },
    Custom(KernelTable),
}

impl Kernel {
    pub fn name(&self) -> String {
        match self {
            Kernel::DipolePerpendicular => "dipole-perp".into(),
            Kernel::QuadrupolePerpendicular => "quad-perp".into(),
            Kernel::OrientedDipole { tilt } => format!("oriented:{}", tilt.to_degrees()),
            Kernel::Custom(_) => "custom".into(),
        }
    }
}

/// Geometry and interaction of one polygon of identical emitters.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonSpec {
    pub n_sites: usize,
    /// Circumradius R.
    pub radius: f64,
    /// Wavenumber k = 2π/λ; zero selects the long-wavelength limit.
    pub wavenumber: f64,
    pub kernel: Kernel,
    /// Single-emitter damping γ, the unit of every decay constant.
    pub free_decay: f64,
    /// Transition frequency ω; energies are reported relative to nω.
    pub transition_frequency: f64,
}

impl PolygonSpec {
    /// Unit circumradius in the long-wavelength limit.
    pub fn new(n_sites: usize, kernel: Kernel) -> Self {
        PolygonSpec {
            n_sites,
            radius: 1.0,
            wavenumber: 0.0,
            kernel,
            free_decay: 1.0,
            transition_frequency: 0.0,
        }
    }

    /// Sets k so that the nearest-neighbour separation satisfies k·r₁ = `kr`.
    pub fn with_nearest_neighbour_kr(mut self, kr: f64) -> Self {
        let r1 = 2.0 * self.radius * (PI / self.n_sites as f64).sin();
        self.wavenumber = kr / r1;
        self
    }

    /// Sets k from the ratio λ/r₁ of wavelength to nearest-neighbour separation.
    pub fn with_wavelength_ratio(self, lambda_over_r: f64) -> Self {
        self.with_nearest_neighbour_kr(2.0 * PI / lambda_over_r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::Precondition(format!(
                "a polygon needs at least 2 vertices, got {}",
                self.n_sites
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Precondition(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.wavenumber >= 0.0 && self.wavenumber.is_finite()) {
            return Err(Error::Precondition(format!(
                "wavenumber must be non-negative, got {}",
                self.wavenumber
            )));
        }
        if !(self.free_decay > 0.0 && self.free_decay.is_finite()) {
            return Err(Error::Precondition(format!(
                "free decay must be positive, got {}",
                self.free_decay
            )));
        }
        if let Kernel::OrientedDipole { tilt } = self.kernel {
            if !tilt.is_finite() {
                return Err(Error::Precondition("tilt angle must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn is_long_wavelength(&self) -> bool {
        self.wavenumber == 0.0
    }

    pub fn max_offset(&self) -> usize {
        self.n_sites / 2
    }

    /// Position of vertex `i` (1-based), at angle 2πi/N in the xy-plane.
    pub fn vertex_position(&self, i: usize) -> [f64; 3] {
        let phi = 2.0 * PI * i as f64 / self.n_sites as f64;
        [self.radius * phi.cos(), self.radius * phi.sin(), 0.0]
    }

    /// Transition-moment direction at vertex `i` (1-based).
    pub fn moment_direction(&self, i: usize) -> [f64; 3] {
        match self.kernel {
            Kernel::OrientedDipole { tilt } => {
                let phi = 2.0 * PI * i as f64 / self.n_sites as f64;
                let (st, ct) = tilt.sin_cos();
                [-ct * phi.sin(), ct * phi.cos(), st]
            }
            _ => [0.0, 0.0, 1.0],
        }
    }

    pub fn nearest_neighbour_separation(&self) -> f64 {
        2.0 * self.radius * (PI / self.n_sites as f64).sin()
    }
}

/// Units of the values held by a [`CouplingSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingUnits {
    /// Real and imaginary parts both in units of γ.
    Gamma,
    /// Long-wavelength limit V_N/γ → ∞: real parts in units of V_N, imaginary
    /// parts (pair dampings) in units of γ.
    LongWavelength,
}

/// The ⌊N/2⌋ characteristic couplings a, b, c, … of an N-gon, one per offset class.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSet {
    n_sites: usize,
    values: Vec<Complex64>,
    units: CouplingUnits,
}

impl CouplingSet {
    pub fn new(n_sites: usize, values: Vec<Complex64>, units: CouplingUnits) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::Precondition(format!("N = {n_sites} is below 2")));
        }
        if values.len() != n_sites / 2 {
            return Err(Error::Precondition(format!(
                "N = {n_sites} needs {} couplings, got {}",
                n_sites / 2,
                values.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Precondition("couplings must be finite".into()));
        }
        Ok(CouplingSet {
            n_sites,
            values,
            units,
        })
    }

    /// Same complex value on every offset class, γ units.
    pub fn uniform(n_sites: usize, value: Complex64) -> Result<Self> {
        Self::new(n_sites, vec![value; n_sites / 2], CouplingUnits::Gamma)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn units(&self) -> CouplingUnits {
        self.units
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Coupling of offset class `offset` (1-based: 1 = nearest neighbours).
    pub fn get(&self, offset: usize) -> Complex64 {
        self.values[offset - 1]
    }

    /// Coupling between vertices `i` and `j` (any indexing convention modulo N).
    pub fn between(&self, i: usize, j: usize) -> Complex64 {
        let d = offset_class(self.n_sites, i, j);
        self.values[d - 1]
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    /// Keeps only the nearest-neighbour energy; pair dampings are untouched.
    pub fn nearest_neighbour_only(&self) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, z)| if k == 0 { *z } else { Complex64::new(0.0, z.im) })
            .collect();
        CouplingSet {
            values,
            ..self.clone()
        }
    }
}

/// Offset class min(|i−j|, N−|i−j|) of a vertex pair.
pub fn offset_class(n_sites: usize, i: usize, j: usize) -> usize {
    let d = (i % n_sites + n_sites - j % n_sites) % n_sites;
    d.min(n_sites - d)
}

fn oriented_pair(spec: &PolygonSpec, offset: usize) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let n = spec.n_sites;
    let ri = spec.vertex_position(n);
    let rj = spec.vertex_position(offset);
    let diff = [rj[0] - ri[0], rj[1] - ri[1], rj[2] - ri[2]];
    let len = dot(diff, diff).sqrt();
    let r_hat = [diff[0] / len, diff[1] / len, diff[2] / len];
    (spec.moment_direction(n), spec.moment_direction(offset), r_hat)
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = dot(v, v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn kernel_value(spec: &PolygonSpec, offset: usize, x: f64, evaluation: Evaluation) -> Result<Complex64> {
    match &spec.kernel {
        Kernel::DipolePerpendicular => dipole_perp_kernel(x, evaluation),
        Kernel::QuadrupolePerpendicular => quad_perp_kernel(x, evaluation),
        Kernel::OrientedDipole { .. } => {
            let (mi, mj, r_hat) = oriented_pair(spec, offset);
            oriented_dipole_kernel(normalize3(mi), normalize3(mj), normalize3(r_hat), x, evaluation)
        }
        Kernel::Custom(_) => unreachable!("custom tables are not evaluated at kr"),
    }
}

/// Evaluates the spec's kernel on every offset class.
///
/// Finite wavenumbers give γ-unit couplings. At k = 0 the static limit is
/// taken analytically and normalized so that Re a = 1 (units of V_N); custom
/// tables are always taken as γ-unit values.
pub fn coupling_set(spec: &PolygonSpec) -> Result<CouplingSet> {
    spec.validate()?;
    let n = spec.n_sites;
    let max = spec.max_offset();
    if let Kernel::Custom(table) = &spec.kernel {
        let values = (1..=max)
            .map(|d| {
                table.get(d).ok_or_else(|| {
                    Error::Config(format!("custom kernel table has no entry for offset class {d}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return CouplingSet::new(n, values, CouplingUnits::Gamma);
    }
    if spec.is_long_wavelength() {
        // Any finite reference kr gives the same ratios; unit separation keeps it simple.
        let raw = (1..=max)
            .map(|d| {
                let r = pair_separation(n, d, spec.radius)? / spec.nearest_neighbour_separation();
                kernel_value(spec, d, r, Evaluation::StaticLimit)
            })
            .collect::<Result<Vec<_>>>()?;
        let v_n = raw[0].re;
        if v_n.abs() < 1e-300 || !v_n.is_finite() {
            return Err(Error::Unsupported(
                "nearest-neighbour static energy vanishes for this orientation".into(),
            ));
        }
        let values = raw.iter().map(|z| Complex64::new(z.re / v_n, z.im)).collect();
        return CouplingSet::new(n, values, CouplingUnits::LongWavelength);
    }
    let values = (1..=max)
        .map(|d| {
            let x = spec.wavenumber * pair_separation(n, d, spec.radius)?;
            kernel_value(spec, d, x, Evaluation::Full)
        })
        .collect::<Result<Vec<_>>>()?;
    CouplingSet::new(n, values, CouplingUnits::Gamma)
}

/// Static nearest-neighbour interaction energy V_N in γ units at the spec's k·r₁.
pub fn static_nn_energy(spec: &PolygonSpec) -> Result<f64> {
    spec.validate()?;
    if matches!(spec.kernel, Kernel::Custom(_)) {
        return Err(Error::Unsupported(
            "V_N is not defined for a custom kernel table; supply it directly".into(),
        ));
    }
    if spec.is_long_wavelength() {
        return Err(Error::Domain(
            "V_N diverges at k = 0; long-wavelength couplings are already in V_N units".into(),
        ));
    }
    let x = spec.wavenumber * spec.nearest_neighbour_separation();
    Ok(kernel_value(spec, 1, x, Evaluation::StaticLimit)?.re)
}
