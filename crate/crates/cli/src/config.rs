//! Run configuration: one TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Integer sizes: `100`, `10,50,200` or `20..200` (inclusive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSizes", into = "String")]
pub enum Sizes {
    List(Vec<u64>),
    Range(u64, u64),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSizes {
    One(u64),
    Many(Vec<u64>),
    Text(String),
}

impl TryFrom<RawSizes> for Sizes {
    type Error = String;
    fn try_from(raw: RawSizes) -> Result<Self, String> {
        match raw {
            RawSizes::One(n) => Ok(Sizes::List(vec![n])),
            RawSizes::Many(v) if !v.is_empty() => Ok(Sizes::List(v)),
            RawSizes::Many(_) => Err("empty size list".into()),
            RawSizes::Text(s) => s.parse(),
        }
    }
}

impl From<Sizes> for String {
    fn from(s: Sizes) -> String {
        match s {
            Sizes::List(v) => v.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            Sizes::Range(a, b) => format!("{a}..{b}"),
        }
    }
}

impl std::str::FromStr for Sizes {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}"));
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            return Ok(Sizes::Range(a, b));
        }
        let v = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
        Ok(Sizes::List(v))
    }
}

impl Sizes {
    /// Expand a range geometrically with `points` samples, or arithmetically with `step`.
    pub fn expand(&self, points: Option<usize>, step: usize) -> Vec<u64> {
        match *self {
            Sizes::List(ref v) => v.clone(),
            Sizes::Range(a, b) => match points {
                Some(p) if p >= 2 && a > 0 => {
                    let mut v: Vec<u64> = (0..p)
                        .map(|i| {
                            (a as f64 * (b as f64 / a as f64).powf(i as f64 / (p - 1) as f64))
                                .round() as u64
                        })
                        .collect();
                    v.dedup();
                    v
                }
                Some(_) => vec![a, b],
                None => (a..=b).step_by(step.max(1)).collect(),
            },
        }
    }
}

/// Physical and numerical inputs shared by all subcommands. Every field is
/// optional so that file values and flags can be merged; each subcommand
/// supplies its own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// Atom numbers: 100, 10,50,200 or 20..200
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub atoms: Option<Sizes>,
    /// Rydberg principal quantum numbers, same syntax as --N
    #[arg(long = "n", global = true)]
    #[serde(rename = "n")]
    pub level: Option<Sizes>,
    /// Geometric sample count for an atom-number range
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Stride for a principal-number range
    #[arg(long, global = true)]
    pub step: Option<usize>,
    /// Temperatures in kelvin, comma separated
    #[arg(long = "T", global = true, value_delimiter = ',')]
    #[serde(rename = "T")]
    pub temperature: Option<Vec<f64>>,
    /// Dressing ratio Omega_r / (2 Delta)
    #[arg(long, global = true)]
    pub w: Option<f64>,
    /// Spectrum: exact or kerr
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Target F_nl for fnl-scan
    #[arg(long, global = true)]
    pub target: Option<f64>,
    /// F_nl budget in catsize
    #[arg(long, global = true)]
    pub budget_nl: Option<f64>,
    /// F_IH budget in catsize
    #[arg(long, global = true)]
    pub budget_ih: Option<f64>,
    /// Decay-fidelity budget in catsize
    #[arg(long, global = true)]
    pub fdc: Option<f64>,
    /// Rydberg Rabi frequency Omega_r / 2pi, MHz
    #[arg(long, global = true)]
    pub rabi_mhz: Option<f64>,
    /// Rydberg detuning Delta / 2pi, MHz
    #[arg(long, global = true)]
    pub detuning_mhz: Option<f64>,
    /// Final time of cat-evolve in units of tau_c
    #[arg(long, global = true)]
    pub x_max: Option<f64>,
    /// Number of samples in cat-evolve
    #[arg(long, global = true)]
    pub time_points: Option<usize>,
    /// Cube side (atoms per edge)
    #[arg(long, global = true)]
    pub side: Option<usize>,
    /// Lattice spacing, nm
    #[arg(long, global = true)]
    pub spacing_nm: Option<f64>,
    /// D / R_b values, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub ratio: Option<Vec<f64>>,
    /// Minimum S character of the dressed Rydberg state
    #[arg(long, global = true)]
    pub s_character: Option<f64>,
    /// Sizes in the w* interpolation table of catsize
    #[arg(long, global = true)]
    pub table_points: Option<usize>,
    /// Trap loss rate, 1/s
    #[arg(long, global = true)]
    pub loss_rate: Option<f64>,
    /// Correlated clock-laser linewidth, Hz
    #[arg(long, global = true)]
    pub linewidth_hz: Option<f64>,
    /// Uncorrelated per-atom linewidth, Hz
    #[arg(long, global = true)]
    pub uncorrelated_hz: Option<f64>,
    /// Clock transition energy, eV
    #[arg(long, global = true)]
    pub delta_e_ev: Option<f64>,
    /// Waiting-time policy: baseline or inverse-n
    #[arg(long, global = true)]
    pub policy: Option<String>,
    /// Husimi state: cat or css
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Husimi polar grid size (azimuthal grid is twice this)
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Clock Rabi frequency Omega_e / 2pi, Hz
    #[arg(long, global = true)]
    pub clock_rabi_hz: Option<f64>,
    /// Lamb-Dicke parameter (below 0.3)
    #[arg(long, global = true)]
    pub lamb_dicke: Option<f64>,
    /// Trap frequency omega_tr / 2pi, Hz
    #[arg(long, global = true)]
    pub trap_hz: Option<f64>,
    /// Output format
    #[arg(long, global = true)]
    pub format: Option<Format>,
}

macro_rules! merge_fields {
    ($flags:ident, $file:ident; $($f:ident),*) => {
        Params { $($f: $flags.$f.or($file.$f)),* }
    };
}

impl Params {
    /// Flag values win over file values.
    pub fn merged(flags: Params, file: Params) -> Params {
        merge_fields!(flags, file; atoms, level, points, step, temperature, w, model, target,
            budget_nl, budget_ih, fdc, rabi_mhz, detuning_mhz, x_max, time_points, side,
            spacing_nm, ratio, s_character, table_points, loss_rate, linewidth_hz,
            uncorrelated_hz, delta_e_ev, policy, state, grid, clock_rabi_hz, lamb_dicke,
            trap_hz, format)
    }
}

/// Contents of the TOML config file: `data-dir`, `output` and any [`Params`] key.
#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    pub data_dir: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub params: Params,
}

impl std::str::FromStr for FileConfig {
    type Err = String;
    fn from_str(text: &str) -> Result<Self, String> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        let mut path = |key: &str| -> Result<Option<PathBuf>, String> {
            match table.remove(key) {
                None => Ok(None),
                Some(toml::Value::String(s)) => Ok(Some(PathBuf::from(s))),
                Some(v) => Err(format!("`{key}` must be a string, got {v}")),
            }
        };
        let data_dir = path("data-dir")?;
        let output = path("output")?;
        let params = Params::deserialize(toml::Value::Table(table)).map_err(|e| e.to_string())?;
        Ok(Self {
            data_dir,
            output,
            params,
        })
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation("config", format!("{}: {e}", path.display())))?;
    text.parse()
        .map_err(|e| Failure::validation("config", format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_syntax() {
        assert_eq!("100".parse::<Sizes>().unwrap(), Sizes::List(vec![100]));
        assert_eq!(
            "10,50,200".parse::<Sizes>().unwrap(),
            Sizes::List(vec![10, 50, 200])
        );
        assert_eq!("20..200".parse::<Sizes>().unwrap(), Sizes::Range(20, 200));
        assert!("200..20".parse::<Sizes>().is_err());
        assert!("abc".parse::<Sizes>().is_err());
        assert_eq!(
            Sizes::Range(40, 100).expand(None, 20),
            vec![40, 60, 80, 100]
        );
        let g = Sizes::Range(20, 200).expand(Some(3), 1);
        assert_eq!(g, vec![20, 63, 200]);
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = "N = \"10..20\"\nw = 0.1\nT = [300.0, 3.0]\ndata-dir = \"x\""
            .parse()
            .unwrap();
        assert_eq!(file.params.atoms, Some(Sizes::Range(10, 20)));
        let flags = Params {
            w: Some(0.2),
            ..Default::default()
        };
        let m = Params::merged(flags, file.params);
        assert_eq!(m.w, Some(0.2));
        assert_eq!(m.temperature, Some(vec![300.0, 3.0]));
        assert_eq!(file.data_dir, Some(PathBuf::from("x")));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!("bogus = 1".parse::<FileConfig>().is_err());
        assert!("N = 12\nlevel = 3".parse::<FileConfig>().is_err());
    }
}
