// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;
use num_complex::Complex64;

use crate::coupling::{coupling_set, static_nn_energy, CouplingSet, Kernel, PolygonSpec};
use crate::error::{Error, Result};
use crate::manifold::EigenManifold;
use crate::solver::{realize_degenerate_pairs, solve_auto};
use crate::spectroscopy::{
    biexciton_table, classify_radiance, decay_sweep, exciton_levels, lines_from_table, linear_samples,
    partial_decay_rates, absorption_amplitude, DEFAULT_RADIANCE_EPSILON,
};
pub use config::{Cli, CommandKind, Distance, Excitations, RunConfig, Units};
pub use output::{format_number, write_table, Cell, Format, Table};

/// Process exit code for an error: 2 configuration, 3 solver, 4 physical consistency.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Consistency { .. } => 4,
        e if e.is_solver_failure() => 3,
        _ => 2,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_cli(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qring: {e}");
            exit_code(&e)
        }
    }
}

fn run_cli(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => Some((config::load_file(p)?, p.clone())),
        None => None,
    };
    let (kind, flags) = cli.command.split();
    let cfg = config::resolve(kind, flags, file)?;
    let tables = execute(&cfg)?;
    emit(&cfg, &tables)
}

/// Computes every table the configured command produces.
pub fn execute(cfg: &RunConfig) -> Result<Vec<Table>> {
    match cfg.command {
        CommandKind::Spectrum => spectrum(cfg).map(|t| vec![t]),
        CommandKind::Tables => tables(cfg),
        CommandKind::Sweep => sweep(cfg).map(|t| vec![t]),
        CommandKind::Rates => rates(cfg).map(|t| vec![t]),
        CommandKind::Absorption => absorption(cfg).map(|t| vec![t]),
    }
}

fn emit(cfg: &RunConfig, tables: &[Table]) -> Result<()> {
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match (&cfg.out, cfg.command) {
        (Some(dir), CommandKind::Tables) => {
            fs::create_dir_all(dir)?;
            for t in tables {
                let mut f = fs::File::create(dir.join(format!("{}.{ext}", t.name)))?;
                write_table(t, cfg.format, cfg.digits, &mut f)?;
            }
            Ok(())
        }
        (Some(path), _) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let mut f = fs::File::create(path)?;
            write_all(tables, cfg, &mut f)
        }
        (None, _) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_all(tables, cfg, &mut lock)
        }
    }
}

fn write_all(tables: &[Table], cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    match cfg.format {
        Format::Json if tables.len() > 1 => {
            let all: Vec<_> = tables.iter().map(|t| output::table_json(t, cfg.digits)).collect();
            let text = serde_json::to_string_pretty(&all).map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writeln!(out, "{text}")?;
        }
        _ => {
            for (k, t) in tables.iter().enumerate() {
                if k > 0 {
                    writeln!(out)?;
                }
                write_table(t, cfg.format, cfg.digits, out)?;
            }
        }
    }
    Ok(())
}

/// Couplings of one polygon with the unit factor that converts G to the
/// requested unit, and that unit's name.
struct Setup {
    spec: PolygonSpec,
    couplings: CouplingSet,
    shift_scale: f64,
    shift_unit: &'static str,
}

fn setup(cfg: &RunConfig, n_sites: usize) -> Result<Setup> {
    let mut spec = PolygonSpec::new(n_sites, cfg.kernel.clone());
    if let Distance::Kr(kr) = cfg.distance {
        spec = spec.with_nearest_neighbour_kr(kr);
    }
    let couplings = coupling_set(&spec)?;
    let custom = matches!(cfg.kernel, Kernel::Custom(_));
    let (shift_scale, shift_unit) = if custom {
        (1.0, "gamma")
    } else if spec.is_long_wavelength() {
        (1.0, "V_N")
    } else if cfg.units == Some(Units::Vn) {
        (static_nn_energy(&spec)?, "V_N")
    } else {
        (1.0, "gamma")
    };
    Ok(Setup {
        spec,
        couplings,
        shift_scale,
        shift_unit,
    })
}

fn distance_text(cfg: &RunConfig) -> String {
    match cfg.distance {
        Distance::Static => "static".into(),
        Distance::Kr(kr) => format!("kr={kr}"),
        Distance::Sweep { min, max, count } => format!("lambda/r={min}:{max}:{count}"),
    }
}

fn excitation_range(cfg: &RunConfig, n_sites: usize) -> Vec<usize> {
    match cfg.excitations {
        Excitations::All => (0..=n_sites).collect(),
        Excitations::One(n) => vec![n],
    }
}

/// Display threshold for round-off in unit-norm vector components.
const VECTOR_CHOP: f64 = 1e-13;
/// Display threshold for round-off in shifts, relative to the block's largest |G|.
const SHIFT_CHOP: f64 = 1e-12;

fn chop(x: f64, tol: f64) -> f64 {
    if x.abs() < tol {
        0.0
    } else {
        x
    }
}

fn complex_text(z: Complex64, digits: usize) -> String {
    let re = format_number(chop(z.re, VECTOR_CHOP), digits);
    let im = format_number(chop(z.im, VECTOR_CHOP), digits);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn solve(setup: &Setup, n_sites: usize, n: usize) -> Result<EigenManifold> {
    if n > n_sites {
        return Err(Error::Config(format!("excitations: n = {n} exceeds N = {n_sites}")));
    }
    Ok(realize_degenerate_pairs(&solve_auto(n_sites, n, &setup.couplings)?))
}

fn spectrum(cfg: &RunConfig) -> Result<Table> {
    let first = setup(cfg, cfg.n_qubits[0])?;
    let g_col = format!("G [{}]", first.shift_unit);
    let mut t = Table::new(
        "spectrum",
        &["N", "n", "label", "mode", "branch", "symmetry", "group", &g_col, "F [gamma]", "radiance", "basis", "vector"],
    )
    .meta("kernel", cfg.kernel.name())
    .meta("distance", distance_text(cfg))
    .meta("G", format!("energy shift from n*omega in {} units", first.shift_unit))
    .meta("F", "decay constant in gamma units, including the free decay n")
    .meta("vector", "components over the basis column, re+im i, separated by ';'");
    for &n_sites in &cfg.n_qubits {
        let s = setup(cfg, n_sites)?;
        for n in excitation_range(cfg, n_sites) {
            let m = solve(&s, n_sites, n)?;
            let radiance = classify_radiance(&m, DEFAULT_RADIANCE_EPSILON);
            let g_tol = SHIFT_CHOP * m.pairs.iter().fold(1.0f64, |a, p| a.max(p.shift().abs()));
            let basis = m.basis.states().iter().map(|st| st.to_string()).collect::<Vec<_>>().join(";");
            for (p, r) in m.pairs.iter().zip(radiance) {
                let vector = p
                    .vector
                    .iter()
                    .map(|&z| complex_text(z, cfg.digits))
                    .collect::<Vec<_>>()
                    .join(";");
                t.push(vec![
                    n_sites.into(),
                    n.into(),
                    p.label().into(),
                    p.mode.into(),
                    p.branch.into(),
                    format!("{:?}", p.symmetry).to_lowercase().into(),
                    p.group.into(),
                    (chop(p.shift(), g_tol) / s.shift_scale).into(),
                    p.decay().into(),
                    format!("{r:?}").to_lowercase().into(),
                    basis.clone().into(),
                    vector.into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn tables(cfg: &RunConfig) -> Result<Vec<Table>> {
    let mut shifts = Table::new(
        "exciton_shifts",
        &["N", "modes", "nearest-only [V_N]", "dipole-perp [V_N]", "quad-perp [V_N]"],
    )
    .meta("content", "long-wavelength single-excitation shifts, degenerate modes merged")
    .meta("units", "V_N");
    for &n_sites in &cfg.n_qubits {
        let nn = exciton_levels(n_sites, &Kernel::DipolePerpendicular, true)?;
        let dip = exciton_levels(n_sites, &Kernel::DipolePerpendicular, false)?;
        let quad = exciton_levels(n_sites, &Kernel::QuadrupolePerpendicular, false)?;
        for ((a, b), c) in nn.iter().zip(&dip).zip(&quad) {
            let modes = a.modes.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("/");
            shifts.push(vec![n_sites.into(), modes.into(), a.shift.into(), b.shift.into(), c.shift.into()]);
        }
    }

    let kernel = cfg.kernel.name();
    let mut levels = Table::new(
        "biexciton_levels",
        &["N", "dG1 [V_N]", "F1 [gamma]", "label", "dG2 [V_N]", "F2 [gamma]"],
    )
    .meta("content", "symmetric exciton and biexciton levels in the long-wavelength limit")
    .meta("kernel", kernel.clone())
    .meta("units", "shifts V_N, decay constants gamma");
    let mut lines = Table::new(
        "biexciton_lines",
        &["N", "upper", "shift [V_N]", "half-width [gamma]", "relative intensity"],
    )
    .meta("content", "exciton to biexciton absorption lines")
    .meta("kernel", kernel)
    .meta("units", "shift V_N, half-width gamma");
    for &n_sites in &cfg.n_qubits {
        let table = biexciton_table(n_sites, &cfg.kernel)?;
        for e in &table.entries {
            levels.push(vec![
                n_sites.into(),
                table.exciton_shift.into(),
                table.exciton_decay.into(),
                e.label.clone().into(),
                e.shift.into(),
                e.decay.into(),
            ]);
        }
        for l in lines_from_table(&table) {
            lines.push(vec![
                n_sites.into(),
                l.upper.label.into(),
                l.frequency_shift.into(),
                l.half_width.into(),
                l.relative_intensity.into(),
            ]);
        }
    }
    Ok(vec![shifts, levels, lines])
}

fn sweep(cfg: &RunConfig) -> Result<Table> {
    let Distance::Sweep { min, max, count } = cfg.distance else {
        return Err(Error::Config("sweep: no λ/r range given".into()));
    };
    let Excitations::One(n) = cfg.excitations else {
        return Err(Error::Config("excitations: sweep takes a single n".into()));
    };
    let n_sites = cfg.n_qubits[0];
    let samples = linear_samples(min, max, count);
    let points = decay_sweep(n_sites, n, &cfg.kernel, &samples)?;
    let vn = cfg.units == Some(Units::Vn);
    let g_col = if vn { "G [V_N]" } else { "G [gamma]" };
    let mut t = Table::new(
        "decay_sweep",
        &["lambda/r", "label", "F [gamma]", g_col, "overlap", "crossing"],
    )
    .meta("kernel", cfg.kernel.name())
    .meta("N", n_sites.to_string())
    .meta("n", n.to_string())
    .meta("lambda/r", "wavelength over nearest-neighbour separation");
    for p in points {
        let scale = if vn {
            static_nn_energy(&PolygonSpec::new(n_sites, cfg.kernel.clone()).with_wavelength_ratio(p.lambda_over_r))?
        } else {
            1.0
        };
        for s in p.states {
            t.push(vec![
                p.lambda_over_r.into(),
                s.label.into(),
                s.decay.into(),
                (s.shift / scale).into(),
                s.overlap.into(),
                s.crossing.into(),
            ]);
        }
    }
    Ok(t)
}

fn rates(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new("decay_rates", &["kind", "N", "n", "upper", "lower", "rate [gamma]"])
        .meta("kernel", cfg.kernel.name())
        .meta("distance", distance_text(cfg))
        .meta("kind", "partial: upper to one lower state; total: sum over lower states")
        .meta("units", "gamma");
    for &n_sites in &cfg.n_qubits {
        let s = setup(cfg, n_sites)?;
        let uppers: Vec<usize> = match cfg.excitations {
            Excitations::All => (1..=n_sites).collect(),
            Excitations::One(0) => {
                return Err(Error::Config("excitations: the ground state does not decay".into()));
            }
            Excitations::One(n) => vec![n],
        };
        for n in uppers {
            let upper = solve(&s, n_sites, n)?;
            let lower = solve(&s, n_sites, n - 1)?;
            for p in &upper.pairs {
                let rs = partial_decay_rates(p, &upper, &lower, &s.couplings)?;
                let total: f64 = rs.iter().map(|r| r.rate).sum();
                for r in rs {
                    t.push(vec!["partial".into(), n_sites.into(), n.into(), p.label().into(), r.lower.into(), r.rate.into()]);
                }
                t.push(vec!["total".into(), n_sites.into(), n.into(), p.label().into(), "".into(), total.into()]);
            }
        }
    }
    Ok(t)
}

fn absorption(cfg: &RunConfig) -> Result<Table> {
    if let Excitations::One(n) = cfg.excitations {
        if n != 1 {
            return Err(Error::Config("excitations: absorption from the ground state reaches n = 1 only".into()));
        }
    }
    let first = setup(cfg, cfg.n_qubits[0])?;
    let g_col = format!("G [{}]", first.shift_unit);
    let p = cfg.polarization;
    let d = cfg.direction;
    let mut t = Table::new("absorption", &["N", "label", "mode", &g_col, "F [gamma]", "intensity"])
        .meta("kernel", cfg.kernel.name())
        .meta("distance", distance_text(cfg))
        .meta("polarization", format!("{},{},{}", p[0], p[1], p[2]))
        .meta("direction", format!("{},{},{}", d[0], d[1], d[2]))
        .meta("intensity", "squared transition amplitude from the ground state");
    for &n_sites in &cfg.n_qubits {
        let s = setup(cfg, n_sites)?;
        let m = solve(&s, n_sites, 1)?;
        let k = s.spec.wavenumber;
        let wavevector = [k * d[0], k * d[1], k * d[2]];
        for (i, pair) in m.pairs.iter().enumerate() {
            let a = absorption_amplitude(&m, i, &s.spec, wavevector, p)?;
            t.push(vec![
                n_sites.into(),
                pair.label().into(),
                pair.mode.into(),
                (pair.shift() / s.shift_scale).into(),
                pair.decay().into(),
                a.into(),
            ]);
        }
    }
    Ok(t)
}

