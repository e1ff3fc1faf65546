// SPDX-License-Identifier: Apache-2.0

//! Run configuration: command-line flags merged over an optional TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use super::output::Format;
use crate::coupling::{Kernel, KernelTable};
use crate::error::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "qring", version, about = "Spectra of exchange-coupled qubits on regular polygons")]
pub struct Cli {
    /// TOML file with default values for any of the flags below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Tables,
    Sweep,
    Rates,
    Absorption,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues and eigenvectors of one or more (N, n) blocks.
    Spectrum(Flags),
    /// Long-wavelength level and line tables for a range of N.
    Tables(Flags),
    /// Decay constants against λ/r (long format, one row per state and sample).
    Sweep(Flags),
    /// Partial decay rates between adjacent manifolds, with per-state totals.
    Rates(Flags),
    /// Relative absorption probabilities of the single-excitation states.
    Absorption(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Spectrum(f) => (CommandKind::Spectrum, f),
            Command::Tables(f) => (CommandKind::Tables, f),
            Command::Sweep(f) => (CommandKind::Sweep, f),
            Command::Rates(f) => (CommandKind::Rates, f),
            Command::Absorption(f) => (CommandKind::Absorption, f),
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Polygon sizes: `5`, `2..9`, `2-9` or `5,6`.
    #[arg(long)]
    pub n_qubits: Option<String>,
    /// Excitation number, or `all`.
    #[arg(long)]
    pub excitations: Option<String>,
    /// dipole-perp | quad-perp | oriented:<tilt degrees> | custom:<path>
    #[arg(long)]
    pub kernel: Option<String>,
    /// Long-wavelength limit (default).
    #[arg(long = "static", conflicts_with_all = ["kr", "sweep"])]
    pub static_limit: bool,
    /// Nearest-neighbour separation in units of 1/k, i.e. k·r₁.
    #[arg(long, conflicts_with = "sweep")]
    pub kr: Option<f64>,
    /// λ/r range `<min>:<max>:<count>`, evenly spaced.
    #[arg(long)]
    pub sweep: Option<String>,
    /// gamma | vn
    #[arg(long)]
    pub units: Option<String>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Output file (a directory for `tables`); standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits in printed numbers.
    #[arg(long)]
    pub digits: Option<usize>,
    /// Polarization unit vector `x,y,z` for `absorption`.
    #[arg(long)]
    pub polarization: Option<String>,
    /// Propagation direction `x,y,z` for `absorption`; its length is set by k.
    #[arg(long)]
    pub direction: Option<String>,
}

/// The same keys as the flags, all optional.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n_qubits: Option<toml::Value>,
    pub excitations: Option<toml::Value>,
    pub kernel: Option<String>,
    #[serde(rename = "static")]
    pub static_limit: Option<bool>,
    pub kr: Option<f64>,
    pub sweep: Option<String>,
    pub units: Option<String>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub digits: Option<usize>,
    pub polarization: Option<String>,
    pub direction: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Distance {
    Static,
    Kr(f64),
    Sweep { min: f64, max: f64, count: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Units {
    Gamma,
    Vn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Excitations {
    All,
    One(usize),
}

/// Fully validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n_qubits: Vec<usize>,
    pub excitations: Excitations,
    pub kernel: Kernel,
    pub distance: Distance,
    /// None lets each command pick the natural unit.
    pub units: Option<Units>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub digits: usize,
    pub polarization: [f64; 3],
    pub direction: [f64; 3],
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let bad = |m: &str| config_err("n-qubits", format!("{m} in `{text}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("not an integer"));
    let t = text.trim();
    let mut sizes = if let Some((a, b)) = t.split_once("..").or_else(|| t.split_once('-')) {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad("empty range"));
        }
        (a..=b).collect::<Vec<_>>()
    } else {
        t.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    sizes.dedup();
    if sizes.iter().any(|&n| n < 2) {
        return Err(bad("N must be at least 2"));
    }
    if sizes.iter().any(|&n| n > 16) {
        return Err(bad("N above 16 is outside the supported range"));
    }
    Ok(sizes)
}

pub fn parse_kernel(text: &str, base: &Path) -> Result<Kernel> {
    let t = text.trim();
    match t {
        "dipole-perp" => Ok(Kernel::DipolePerpendicular),
        "quad-perp" => Ok(Kernel::QuadrupolePerpendicular),
        _ => {
            if let Some(deg) = t.strip_prefix("oriented:") {
                let deg: f64 = deg
                    .trim()
                    .parse()
                    .map_err(|_| config_err("kernel", format!("bad tilt angle `{deg}`")))?;
                if !deg.is_finite() {
                    return Err(config_err("kernel", "tilt angle must be finite"));
                }
                Ok(Kernel::OrientedDipole { tilt: deg.to_radians() })
            } else if let Some(path) = t.strip_prefix("custom:") {
                let p = Path::new(path.trim());
                let p = if p.is_relative() { base.join(p) } else { p.to_path_buf() };
                Ok(Kernel::Custom(KernelTable::load(&p)?))
            } else {
                Err(config_err(
                    "kernel",
                    format!("unknown kernel `{t}` (dipole-perp, quad-perp, oriented:<deg>, custom:<path>)"),
                ))
            }
        }
    }
}

fn parse_sweep(text: &str) -> Result<Distance> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || config_err("sweep", format!("expected <min>:<max>:<count>, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(min > 0.0 && max.is_finite() && min.is_finite()) || count == 0 || (count > 1 && max <= min) {
        return Err(config_err("sweep", "need 0 < min < max and count ≥ 1"));
    }
    Ok(Distance::Sweep { min, max, count })
}

fn parse_vector(text: &str, field: &str) -> Result<[f64; 3]> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| config_err(field, format!("expected x,y,z, got `{text}`")))?;
    if vals.len() != 3 || vals.iter().any(|v| !v.is_finite()) {
        return Err(config_err(field, format!("expected three finite numbers, got `{text}`")));
    }
    let n = (vals[0] * vals[0] + vals[1] * vals[1] + vals[2] * vals[2]).sqrt();
    if n == 0.0 {
        return Err(config_err(field, "vector must be nonzero"));
    }
    Ok([vals[0] / n, vals[1] / n, vals[2] / n])
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err("config", format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| config_err("config", e.message().to_string()))
}

/// Merges flags over the file (flags win) and validates everything.
pub fn resolve(command: CommandKind, flags: Flags, file: Option<(FileConfig, PathBuf)>) -> Result<RunConfig> {
    let (file, base) = match file {
        Some((f, p)) => (f, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (FileConfig::default(), PathBuf::new()),
    };

    let sizes_text = flags.n_qubits.or_else(|| file.n_qubits.as_ref().map(value_text));
    let n_qubits = match (sizes_text, command) {
        (Some(t), _) => parse_sizes(&t)?,
        (None, CommandKind::Tables) => (2..=9).collect(),
        (None, _) => return Err(config_err("n-qubits", "required")),
    };

    let exc_text = flags.excitations.or_else(|| file.excitations.as_ref().map(value_text));
    let excitations = match exc_text.as_deref().map(str::trim) {
        None | Some("all") => Excitations::All,
        Some(t) => Excitations::One(
            t.parse()
                .map_err(|_| config_err("excitations", format!("expected an integer or `all`, got `{t}`")))?,
        ),
    };
    if let Excitations::One(n) = excitations {
        if let Some(&max) = n_qubits.iter().max() {
            if n > n_qubits.iter().copied().min().unwrap_or(max) {
                return Err(config_err("excitations", format!("n = {n} exceeds N")));
            }
        }
    }

    let kernel = match flags.kernel.as_deref() {
        Some(k) => parse_kernel(k, Path::new(""))?,
        None => match file.kernel.as_deref() {
            Some(k) => parse_kernel(k, &base)?,
            None => Kernel::DipolePerpendicular,
        },
    };

    let distance = if flags.static_limit {
        Distance::Static
    } else if let Some(kr) = flags.kr {
        Distance::Kr(kr)
    } else if let Some(s) = &flags.sweep {
        parse_sweep(s)?
    } else {
        let chosen = [file.static_limit == Some(true), file.kr.is_some(), file.sweep.is_some()];
        if chosen.iter().filter(|&&c| c).count() > 1 {
            return Err(config_err("distance", "choose one of static, kr, sweep"));
        }
        match (file.kr, &file.sweep) {
            (Some(kr), _) => Distance::Kr(kr),
            (None, Some(s)) => parse_sweep(s)?,
            _ => Distance::Static,
        }
    };
    if let Distance::Kr(kr) = distance {
        if !(kr >= 0.0 && kr.is_finite()) {
            return Err(config_err("kr", "must be a non-negative number"));
        }
    }

    let units = match flags.units.or(file.units).as_deref() {
        None => None,
        Some("gamma") => Some(Units::Gamma),
        Some("vn") => Some(Units::Vn),
        Some(u) => return Err(config_err("units", format!("expected gamma or vn, got `{u}`"))),
    };
    let format = match flags.format.or(file.format).as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(f) => return Err(config_err("format", format!("expected csv or json, got `{f}`"))),
    };
    let digits = flags.digits.or(file.digits).unwrap_or(6);
    if !(1..=17).contains(&digits) {
        return Err(config_err("digits", "must be between 1 and 17"));
    }
    let out = flags.out.or_else(|| file.out.map(|p| if p.is_relative() { base.join(p) } else { p }));
    let polarization = match flags.polarization.or(file.polarization) {
        Some(t) => parse_vector(&t, "polarization")?,
        None => [0.0, 0.0, 1.0],
    };
    let direction = match flags.direction.or(file.direction) {
        Some(t) => parse_vector(&t, "direction")?,
        None => [0.0, 0.0, 1.0],
    };

    let config = RunConfig {
        command,
        n_qubits,
        excitations,
        kernel,
        distance,
        units,
        format,
        out,
        digits,
        polarization,
        direction,
    };
    check_combination(&config)?;
    Ok(config)
}

fn check_combination(c: &RunConfig) -> Result<()> {
    let custom = matches!(c.kernel, Kernel::Custom(_));
    let is_static = c.distance == Distance::Static || c.distance == Distance::Kr(0.0);
    match c.command {
        CommandKind::Sweep => {
            if !matches!(c.distance, Distance::Sweep { .. }) {
                return Err(config_err("sweep", "the sweep command needs --sweep <min>:<max>:<count>"));
            }
            if custom {
                return Err(config_err("kernel", "a custom table has no distance dependence to sweep"));
            }
            if c.n_qubits.len() != 1 {
                return Err(config_err("n-qubits", "sweep takes a single N"));
            }
            if c.excitations == Excitations::All {
                return Err(config_err("excitations", "sweep takes a single n"));
            }
        }
        CommandKind::Tables => {
            if !is_static || custom {
                return Err(config_err("distance", "tables are defined in the long-wavelength limit of a physical kernel"));
            }
            if c.units == Some(Units::Gamma) {
                return Err(config_err("units", "table shifts are in V_N units"));
            }
        }
        CommandKind::Rates => {
            if c.n_qubits.iter().any(|&n| n > 7) {
                return Err(config_err("n-qubits", "rates are limited to N ≤ 7"));
            }
            if matches!(c.distance, Distance::Kr(kr) if kr > 0.0) {
                return Err(config_err("kr", "rates need static or custom couplings"));
            }
        }
        CommandKind::Spectrum | CommandKind::Absorption => {}
    }
    if matches!(c.distance, Distance::Sweep { .. }) && c.command != CommandKind::Sweep {
        return Err(config_err("sweep", "only the sweep command takes a λ/r range"));
    }
    if custom && matches!(c.distance, Distance::Kr(_)) {
        return Err(config_err("kr", "a custom table already fixes the couplings"));
    }
    if custom && c.units == Some(Units::Vn) {
        return Err(config_err("units", "V_N is undefined for a custom kernel"));
    }
    if is_static && !custom && c.units == Some(Units::Gamma) && c.command != CommandKind::Sweep {
        return Err(config_err("units", "long-wavelength shifts diverge in γ units; use vn"));
    }
    Ok(())
}
