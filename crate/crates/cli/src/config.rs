//! Run configuration: a JSON file overlaid with command-line flags.
//!
//! Every field is optional in both sources; flags win. After merging, each
//! command fills in its defaults and the resolved configuration is embedded in
//! every output file (minus the output directory, so runs in different
//! directories stay byte-identical).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use floquet_synth::grape::{DriveKind, Objective};
use floquet_synth::floquet::Schedule;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "FLOQUET_SYNTH_OUT";

/// A chain length or an inclusive range of lengths, `9` or `5..10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sites {
    pub lo: usize,
    pub hi: usize,
}

impl Sites {
    pub fn single(self) -> Result<usize, CliError> {
        if self.lo == self.hi {
            Ok(self.lo)
        } else {
            Err(CliError::config(format!("expected a single chain length, got the range {self}")))
        }
    }
}

impl fmt::Display for Sites {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl FromStr for Sites {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad chain length {t:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
            None => {
                let n = num(s)?;
                (n, n)
            }
        };
        if lo == 0 || hi < lo {
            return Err(format!("chain length range {s:?} must be non-empty and start at 1 or more"));
        }
        Ok(Self { lo, hi })
    }
}

impl Serialize for Sites {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.lo == self.hi {
            s.serialize_u64(self.lo as u64)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Sites {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(n) => Sites::from_str(&n.to_string()),
            Raw::Text(t) => Sites::from_str(&t),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticsArg {
    Hardcore,
    Bosonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    Star,
    AllToAll,
    Ring,
    Chain,
    Lih,
    /// Cost operator of a clause file, on the single-excitation sector.
    Clauses,
    /// Real/imaginary CSV pair.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DriveArg {
    /// Onsite energies only.
    G,
    /// Onsite energies and couplings.
    Gj,
}

impl From<DriveArg> for DriveKind {
    fn from(d: DriveArg) -> Self {
        match d {
            DriveArg::G => DriveKind::Onsite,
            DriveArg::Gj => DriveKind::OnsiteAndHopping,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveArg {
    AbsTrace,
    RealTrace,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::AbsTrace => Objective::AbsTrace,
            ObjectiveArg::RealTrace => Objective::RealTrace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleArg {
    Linear,
    Smoothstep,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Linear => Schedule::Linear,
            ScheduleArg::Smoothstep => Schedule::Smoothstep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Best fidelity on a (T, N) grid.
    Grid,
    /// Least `T = N τ` reaching the threshold, per chain length, plus a linear fit.
    Tmin,
}

/// Every knob of every command. JSON keys equal the long flag names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Chain length, or a range `lo..hi` for `sweep --mode tmin`.
    #[arg(long = "L", value_name = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub sites: Option<Sites>,
    /// Number of excitations.
    #[arg(long = "M", value_name = "M")]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub excitations: Option<usize>,
    /// Particle statistics; bosonic when `--U` is given, else hardcore.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistics: Option<StatisticsArg>,
    /// Onsite interaction of bosonic sectors (units of J).
    #[arg(long = "U", value_name = "U")]
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub interaction: Option<f64>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetKind>,
    /// Hub site of the star target (1-based); default the middle site.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hub: Option<usize>,
    /// Coupling strength of graph targets.
    #[arg(long = "K", value_name = "K")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    /// Real part of a matrix target (CSV).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_re: Option<PathBuf>,
    /// Imaginary part of a matrix target (CSV).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_im: Option<PathBuf>,
    /// Clause file (`1 = a2 + a3 + a1*a3` per line).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clauses: Option<PathBuf>,
    /// Energy scale of clause Hamiltonians.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveArg>,
    /// Onsite control bound, `|g| <= gmax`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gmax: Option<f64>,
    /// Coupling control bound, `|J_l| <= jmax`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jmax: Option<f64>,
    /// Static nearest-neighbour coupling of the onsite-only drive.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hopping: Option<f64>,
    /// Time steps per period.
    #[arg(long = "N", value_name = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Drive period (units of 1/J).
    #[arg(long = "T", value_name = "T")]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Control sequence CSV to replay (`evolve`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controls: Option<PathBuf>,
    /// Number of stroboscopic periods (`evolve`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periods: Option<usize>,
    /// Initially excited basis state, 1-based (`evolve`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<usize>,

    /// Deformation cycles (`adiabatic`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    /// Minimum per-cycle synthesis fidelity (`adiabatic`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_floor: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleArg>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SweepMode>,
    /// Step length of `tmin` sweeps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Fidelity a `tmin` sweep must exceed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Largest period tried by a `tmin` sweep.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Periods of a grid sweep, comma separated.
    #[arg(long = "T-grid", value_name = "T,..", value_delimiter = ',')]
    #[serde(rename = "T-grid", skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    /// Step counts of a grid sweep, comma separated.
    #[arg(long = "N-grid", value_name = "N,..", value_delimiter = ',')]
    #[serde(rename = "N-grid", skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    /// Worker threads of the sweep pool; default all cores.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    /// Output directory; default `$FLOQUET_SYNTH_OUT`, else the current directory.
    #[arg(long = "out", value_name = "DIR")]
    #[serde(rename = "out", skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    /// `file` overlaid with every flag that was set.
    pub fn merged(file: Option<&Path>, flags: &RunConfig) -> Result<Self, CliError> {
        let Some(path) = file else {
            return Ok(flags.clone());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut base: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))?;
        let overlay = serde_json::to_value(flags).expect("config serializes");
        match (&mut base, overlay) {
            (Value::Object(b), Value::Object(o)) => b.extend(o),
            _ => return Err(CliError::config(format!("config {} must hold a JSON object", path.display()))),
        }
        serde_json::from_value(base).map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
    }

    /// The configuration embedded in output headers.
    pub fn header(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(m) = &mut v {
            m.remove("out");
        }
        v
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// `field.get_or_insert(default)` with a shorter name at call sites.
pub fn or<T: Clone>(field: &mut Option<T>, default: T) -> T {
    field.get_or_insert(default).clone()
}

pub fn require<T: Clone>(field: &Option<T>, flag: &str) -> Result<T, CliError> {
    field.clone().ok_or_else(|| CliError::config(format!("missing required setting --{flag}")))
}
