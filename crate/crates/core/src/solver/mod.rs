// SPDX-License-Identifier: Apache-2.0

//! Symmetry-reduced diagonalization of the excitation blocks.

mod fourier;
mod polynomials;
mod sectors;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub use fourier::{fourier_modes, shift_matrix, FourierMode, FourierModeSet};
pub use polynomials::{extract_block_polynomials, BlockPolynomials};

use crate::basis::{build_basis, build_hamiltonian_block, particle_hole_map, HamiltonianBlock};
use crate::coupling::{CouplingSet, CouplingUnits};
use crate::error::{Error, Result};
use crate::linalg::{eigh, frobenius};
use crate::manifold::{root_power, unit, EigenManifold, VectorForm, DEGENERACY_TOL, RESIDUAL_TOL};
use crate::oracle::dense_manifold;

/// Largest |xᵢᵀxⱼ| tolerated between eigenvectors of distinct eigenvalues.
pub const BILINEAR_TOL: f64 = 1e-8;

/// Route `solve_auto` takes for a given (N, n).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverPath {
    /// n = 0 or n = N: a single state.
    Trivial,
    SingleExcitation,
    /// Solved through the complementary block N − n.
    ParticleHole,
    PairOdd,
    PairEven,
    Triple,
    Dense,
}

/// Which path `solve_auto` takes for (N, n).
pub fn route(n_sites: usize, excitations: usize) -> SolverPath {
    let (n, k) = (n_sites, excitations);
    if k == 0 || k == n {
        SolverPath::Trivial
    } else if k == 1 {
        SolverPath::SingleExcitation
    } else if 2 * k > n && route(n, n - k) != SolverPath::Dense {
        SolverPath::ParticleHole
    } else if k == 2 {
        if n % 2 == 1 {
            SolverPath::PairOdd
        } else {
            SolverPath::PairEven
        }
    } else if k == 3 && (n == 6 || n == 7) {
        SolverPath::Triple
    } else {
        SolverPath::Dense
    }
}

fn check_couplings(couplings: &CouplingSet, n_sites: usize) -> Result<()> {
    if couplings.n_sites() != n_sites {
        return Err(Error::Precondition(format!(
            "couplings are for N = {}, solver asked for N = {n_sites}",
            couplings.n_sites()
        )));
    }
    Ok(())
}

/// n = 1: the circulant block is diagonalized by the Fourier modes directly,
/// with eigenvalue M(λ^v) = Σ_d c_d (λ^{vd} + λ^{v(N−d)}), the d = N/2 term once.
pub fn solve_n1(couplings: &CouplingSet) -> Result<EigenManifold> {
    let n = couplings.n_sites();
    let basis = build_basis(n, 1)?;
    let mut manifold = EigenManifold::new(basis, couplings.units());
    for mode in 1..=n {
        let mut m = Complex64::new(0.0, 0.0);
        for (k, &c) in couplings.values().iter().enumerate() {
            let d = k + 1;
            m += c * root_power(n, (mode * d) as i64);
            if 2 * d != n {
                m += c * root_power(n, (mode * (n - d)) as i64);
            }
        }
        let u = Array1::from_shape_fn(n, |p| root_power(n, (mode * (p + 1)) as i64));
        manifold.push(m + Complex64::new(0.0, 1.0), u, mode);
    }
    manifold.finalize();
    Ok(manifold)
}

/// Runs the sector reduction, then falls back to a dense solve of the whole
/// block if the result fails the bilinear orthogonality or residual checks.
fn reduced_or_dense(block: &HamiltonianBlock, units: CouplingUnits) -> Result<EigenManifold> {
    let reduced = sectors::reduced_solve(block, units)?;
    let defective = reduced.bilinear_defect() > BILINEAR_TOL;
    if !defective && reduced.verify(block).is_ok() {
        return Ok(reduced);
    }
    let mut dense = dense_manifold(block, units)?;
    dense.flags.dense_fallback = true;
    dense.flags.near_defective = defective;
    Ok(dense)
}

pub fn solve_n2_odd(couplings: &CouplingSet, n_sites: usize) -> Result<EigenManifold> {
    check_couplings(couplings, n_sites)?;
    if n_sites.is_multiple_of(2) || n_sites < 3 {
        return Err(Error::Precondition(format!("odd-N pair solver needs odd N ≥ 3, got {n_sites}")));
    }
    let block = build_hamiltonian_block(&build_basis(n_sites, 2)?, couplings)?;
    reduced_or_dense(&block, couplings.units())
}

pub fn solve_n2_even(couplings: &CouplingSet, n_sites: usize) -> Result<EigenManifold> {
    check_couplings(couplings, n_sites)?;
    if n_sites % 2 == 1 || n_sites < 4 {
        return Err(Error::Precondition(format!("even-N pair solver needs even N ≥ 4, got {n_sites}")));
    }
    let block = build_hamiltonian_block(&build_basis(n_sites, 2)?, couplings)?;
    reduced_or_dense(&block, couplings.units())
}

pub fn solve_n3(couplings: &CouplingSet, n_sites: usize) -> Result<EigenManifold> {
    check_couplings(couplings, n_sites)?;
    if n_sites != 6 && n_sites != 7 {
        return Err(Error::Precondition(format!("three-excitation solver covers N = 6, 7, got {n_sites}")));
    }
    let block = build_hamiltonian_block(&build_basis(n_sites, 3)?, couplings)?;
    reduced_or_dense(&block, couplings.units())
}

/// Transfers a manifold of the complementary block onto block n.
fn from_complement(inner: &EigenManifold, excitations: usize) -> Result<EigenManifold> {
    let n = inner.n_sites();
    let basis = build_basis(n, excitations)?;
    let (_, map) = particle_hole_map(&basis)?;
    let shift = Complex64::new(0.0, excitations as f64 - inner.excitations() as f64);
    let mut out = EigenManifold::new(basis, inner.units);
    out.flags = inner.flags;
    for p in &inner.pairs {
        let x = Array1::from_shape_fn(map.len(), |k| p.vector[map[k]]);
        out.push(p.value + shift, x, p.mode);
    }
    out.finalize();
    Ok(out)
}

fn trivial(n_sites: usize, excitations: usize, units: CouplingUnits) -> Result<EigenManifold> {
    let basis = build_basis(n_sites, excitations)?;
    let mut m = EigenManifold::new(basis, units);
    m.push(Complex64::new(0.0, excitations as f64), Array1::from_elem(1, Complex64::new(1.0, 0.0)), n_sites);
    m.finalize();
    Ok(m)
}

fn solve_physical(n_sites: usize, excitations: usize, couplings: &CouplingSet) -> Result<EigenManifold> {
    let units = couplings.units();
    match route(n_sites, excitations) {
        SolverPath::Trivial => trivial(n_sites, excitations, units),
        SolverPath::SingleExcitation => solve_n1(couplings),
        SolverPath::ParticleHole => from_complement(&solve_physical(n_sites, n_sites - excitations, couplings)?, excitations),
        SolverPath::PairOdd => solve_n2_odd(couplings, n_sites),
        SolverPath::PairEven => solve_n2_even(couplings, n_sites),
        SolverPath::Triple => solve_n3(couplings, n_sites),
        SolverPath::Dense => {
            let block = build_hamiltonian_block(&build_basis(n_sites, excitations)?, couplings)?;
            dense_manifold(&block, units)
        }
    }
}

/// Solves block (N, n) along the cheapest available path and verifies the result.
///
/// Couplings in long-wavelength units are solved in the static limit: real
/// parts (in V_N) fix the eigenvectors and shifts, and the imaginary parts
/// give the decay constants by degenerate perturbation theory.
pub fn solve_auto(n_sites: usize, excitations: usize, couplings: &CouplingSet) -> Result<EigenManifold> {
    check_couplings(couplings, n_sites)?;
    if excitations > n_sites {
        return Err(Error::Domain(format!("n = {excitations} exceeds N = {n_sites}")));
    }
    if couplings.units() == CouplingUnits::LongWavelength {
        return solve_long_wavelength_with(n_sites, excitations, couplings, |block, units| {
            solve_physical(block.basis.n_sites(), block.basis.excitations(), &real_part_set(block.basis.n_sites(), units, couplings)?)
        });
    }
    let manifold = solve_physical(n_sites, excitations, couplings)?;
    let block = build_hamiltonian_block(&manifold.basis, couplings)?;
    manifold.verify(&block)?;
    Ok(manifold)
}

fn real_part_set(n_sites: usize, units: CouplingUnits, couplings: &CouplingSet) -> Result<CouplingSet> {
    CouplingSet::new(n_sites, couplings.values().iter().map(|z| Complex64::new(z.re, 0.0)).collect(), units)
}

fn imag_part_set(n_sites: usize, couplings: &CouplingSet) -> Result<CouplingSet> {
    CouplingSet::new(
        n_sites,
        couplings.values().iter().map(|z| Complex64::new(z.im, 0.0)).collect(),
        CouplingUnits::Gamma,
    )
}

/// Static-limit solve with a caller-chosen solver for the real-part block.
pub(crate) fn solve_long_wavelength_with<F>(
    n_sites: usize,
    excitations: usize,
    couplings: &CouplingSet,
    inner: F,
) -> Result<EigenManifold>
where
    F: Fn(&HamiltonianBlock, CouplingUnits) -> Result<EigenManifold>,
{
    let basis = build_basis(n_sites, excitations)?;
    let real = real_part_set(n_sites, CouplingUnits::Gamma, couplings)?;
    let real_block = build_hamiltonian_block(&basis, &real)?;
    let imag_block = build_hamiltonian_block(&basis, &imag_part_set(n_sites, couplings)?)?;
    let shifts = inner(&real_block, CouplingUnits::Gamma)?;

    let scale = shifts.pairs.iter().fold(1.0f64, |m, p| m.max(p.value.re.abs()));
    let mut out = EigenManifold::new(basis, CouplingUnits::LongWavelength);
    out.flags = shifts.flags;
    let mut used = vec![false; shifts.pairs.len()];
    for i in 0..shifts.pairs.len() {
        if used[i] {
            continue;
        }
        let lead = &shifts.pairs[i];
        let cluster: Vec<usize> = (i..shifts.pairs.len())
            .filter(|&j| {
                !used[j]
                    && shifts.pairs[j].mode == lead.mode
                    && (shifts.pairs[j].value.re - lead.value.re).abs() <= DEGENERACY_TOL * scale
            })
            .collect();
        for &j in &cluster {
            used[j] = true;
        }
        let q = orthonormalize(cluster.iter().map(|&j| shifts.pairs[j].vector.clone()).collect())?;
        let qh = q.t().mapv(|z| z.conj());
        let projected = qh.dot(&imag_block.matrix.dot(&q));
        let (f, w) = eigh(&projected)?;
        let g = cluster.iter().map(|&j| shifts.pairs[j].value.re).sum::<f64>() / cluster.len() as f64;
        for (k, fk) in f.iter().enumerate() {
            let x = q.dot(&w.column(k));
            out.push(Complex64::new(g, excitations as f64 + fk), x, lead.mode);
        }
    }
    out.finalize();
    verify_long_wavelength(&out, &real_block, &imag_block)?;
    Ok(out)
}

/// Modified Gram-Schmidt on the conjugated inner product.
fn orthonormalize(vs: Vec<Array1<Complex64>>) -> Result<Array2<Complex64>> {
    let dim = vs.first().map_or(0, |v| v.len());
    let mut out: Vec<Array1<Complex64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for q in &out {
            let s: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            v.scaled_add(-s, q);
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-8 {
            return Err(Error::Structure("degenerate eigenvectors are linearly dependent".into()));
        }
        out.push(v.mapv(|z| z / n));
    }
    Ok(Array2::from_shape_fn((dim, out.len()), |(r, c)| out[c][r]))
}

fn verify_long_wavelength(m: &EigenManifold, real: &HamiltonianBlock, imag: &HamiltonianBlock) -> Result<()> {
    let n = m.excitations() as f64;
    let bound_r = RESIDUAL_TOL * frobenius(&real.matrix);
    let bound_i = RESIDUAL_TOL * frobenius(&imag.matrix).max(1.0);
    let mut worst: f64 = 0.0;
    let mut violated = false;
    for p in &m.pairs {
        let r = crate::linalg::residual(&real.matrix, Complex64::new(p.value.re, 0.0), &p.vector);
        let hx = imag.matrix.dot(&p.vector);
        let f: Complex64 = p.vector.iter().zip(hx.iter()).map(|(a, b)| a.conj() * b).sum();
        let df = (f.re + n - p.value.im).abs();
        worst = worst.max(r);
        violated |= r > bound_r || df > bound_i;
    }
    if violated || m.pairs.len() != real.dimension() {
        return Err(Error::Residual {
            dimension: real.dimension(),
            residual: worst,
            bound: bound_r,
        });
    }
    Ok(())
}

/// Replaces each degenerate (v, N−v) pair of Fourier-form eigenvectors by the
/// combinations RU = (U_v + U_{N−v})/2 and IU = (U_v − U_{N−v})/2i.
///
/// U_{N−v} is first given the phase that makes U_vᵀU_{N−v} real and positive,
/// which for real couplings means U_{N−v} = conj(U_v). RU keeps label v and
/// IU takes N − v. Pairs without a degenerate partner are left unchanged.
pub fn realize_degenerate_pairs(manifold: &EigenManifold) -> EigenManifold {
    let mut out = manifold.clone();
    let n = out.n_sites();
    let scale = out.pairs.iter().fold(1.0f64, |m, p| m.max(p.value.norm()));
    let half = Complex64::new(0.5, 0.0);
    for v in 1..n {
        if 2 * v >= n {
            break;
        }
        let mut taken = vec![false; out.pairs.len()];
        let lower: Vec<usize> = (0..out.pairs.len())
            .filter(|&k| out.pairs[k].mode == v && out.pairs[k].form == VectorForm::Fourier)
            .collect();
        for i in lower {
            let partner = (0..out.pairs.len()).find(|&j| {
                !taken[j]
                    && out.pairs[j].mode == n - v
                    && out.pairs[j].form == VectorForm::Fourier
                    && (out.pairs[j].value - out.pairs[i].value).norm() <= DEGENERACY_TOL * scale
            });
            let Some(j) = partner else { continue };
            let u = out.pairs[i].vector.clone();
            let w = out.pairs[j].vector.clone();
            let overlap: Complex64 = u.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            if overlap.norm() < 1e-8 {
                continue;
            }
            taken[j] = true;
            let w = w.mapv(|z| z * overlap.conj() / overlap.norm());
            let ru = (&u + &w).mapv(|z| z * half);
            let iu = (&u - &w).mapv(|z| z * half / Complex64::i());
            out.pairs[i].vector = unit(ru);
            out.pairs[i].form = VectorForm::Cosine;
            out.pairs[j].vector = unit(iu);
            out.pairs[j].form = VectorForm::Sine;
        }
    }
    out.finalize();
    out
}
