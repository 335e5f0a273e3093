//! Plain-text atomic data: quantum-defect series, strontium constants and
//! level overrides, and the C6 table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub const QUANTUM_DEFECTS_FILE: &str = "quantum_defects.dat";
pub const CONSTANTS_FILE: &str = "constants_overrides.dat";
pub const C6_FILE: &str = "c6.dat";

/// Files read by [`DataSet::load_dir`], in a fixed order.
pub const DATA_FILES: [&str; 3] = [QUANTUM_DEFECTS_FILE, CONSTANTS_FILE, C6_FILE];

const EMBEDDED: [(&str, &str); 3] = [
    (
        QUANTUM_DEFECTS_FILE,
        include_str!("../../../data/quantum_defects.dat"),
    ),
    (
        CONSTANTS_FILE,
        include_str!("../../../data/constants_overrides.dat"),
    ),
    (C6_FILE, include_str!("../../../data/c6.dat")),
];

/// Exponent of the C6 scaling with principal quantum number.
pub const C6_EXPONENT: i32 = 11;

/// One Rydberg series in modified Rydberg-Ritz form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectSeries {
    pub name: String,
    pub l: u32,
    pub s_total: u32,
    pub l_total: u32,
    pub j_total: u32,
    pub d0: f64,
    pub d2: f64,
    pub d4: f64,
}

impl DefectSeries {
    /// delta(n) = d0 + d2/(n - d0)^2 + d4/(n - d0)^4.
    pub fn defect(&self, n: u32) -> f64 {
        let m = n as f64 - self.d0;
        self.d0 + self.d2 / (m * m) + self.d4 / m.powi(4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomData {
    pub rydberg_cm: f64,
    pub ionization_cm: f64,
    pub series: Vec<DefectSeries>,
    /// Measured level energies above the ground state, cm^-1, keyed by (series, n).
    pub levels: BTreeMap<(String, u32), f64>,
    /// Measured lifetimes, seconds, keyed by (series, n).
    pub lifetimes: BTreeMap<(String, u32), f64>,
    /// (n, C6 / 2 pi in Hz um^6), sorted by n.
    pub c6_table: Vec<(u32, f64)>,
}

impl AtomData {
    pub fn series(&self, name: &str) -> Result<&DefectSeries> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::Data {
                file: QUANTUM_DEFECTS_FILE.into(),
                reason: format!("no series {name}"),
            })
    }

    /// C6 in rad/s m^6 scaled from the nearest tabulated n.
    pub fn c6(&self, n: u32) -> Result<f64> {
        let &(n_ref, hz_um6) = self
            .c6_table
            .iter()
            .min_by_key(|(m, _)| (*m as i64 - n as i64).abs())
            .ok_or_else(|| Error::Data {
                file: C6_FILE.into(),
                reason: "empty table".into(),
            })?;
        Ok(2.0
            * std::f64::consts::PI
            * hz_um6
            * 1e-36
            * (n as f64 / n_ref as f64).powi(C6_EXPONENT))
    }
}

/// Parsed data plus the raw file texts (for checksums).
#[derive(Debug, Clone)]
pub struct DataSet {
    pub atom: AtomData,
    pub raw: Vec<(String, String)>,
}

impl DataSet {
    /// The data files shipped with the crate.
    pub fn embedded() -> Self {
        let raw: Vec<(String, String)> = EMBEDDED
            .iter()
            .map(|(n, t)| (n.to_string(), t.to_string()))
            .collect();
        Self::from_texts(raw).expect("embedded data files parse")
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut raw = Vec::new();
        for name in DATA_FILES {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Data {
                file: path.display().to_string(),
                reason: e.to_string(),
            })?;
            raw.push((name.to_string(), text));
        }
        Self::from_texts(raw)
    }

    fn from_texts(raw: Vec<(String, String)>) -> Result<Self> {
        let text = |name: &str| {
            raw.iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t.as_str())
                .unwrap_or("")
        };
        let series = parse_defects(text(QUANTUM_DEFECTS_FILE))?;
        let (rydberg_cm, ionization_cm, levels, lifetimes) = parse_constants(text(CONSTANTS_FILE))?;
        let c6_table = parse_c6(text(C6_FILE))?;
        Ok(Self {
            atom: AtomData {
                rydberg_cm,
                ionization_cm,
                series,
                levels,
                lifetimes,
                c6_table,
            },
            raw,
        })
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            (
                i + 1,
                l.split('#')
                    .next()
                    .unwrap_or("")
                    .split_whitespace()
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|(_, f)| !f.is_empty())
}

fn bad(file: &str, line: usize, reason: impl std::fmt::Display) -> Error {
    Error::Data {
        file: file.into(),
        reason: format!("line {line}: {reason}"),
    }
}

fn num<T: std::str::FromStr>(file: &str, line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| bad(file, line, format!("cannot parse `{field}`")))
}

fn parse_defects(text: &str) -> Result<Vec<DefectSeries>> {
    let f = QUANTUM_DEFECTS_FILE;
    let mut out = Vec::new();
    for (line, c) in data_lines(text) {
        if c.len() != 8 {
            return Err(bad(f, line, "expected 8 columns"));
        }
        out.push(DefectSeries {
            name: c[0].to_string(),
            l: num(f, line, c[1])?,
            s_total: num(f, line, c[2])?,
            l_total: num(f, line, c[3])?,
            j_total: num(f, line, c[4])?,
            d0: num(f, line, c[5])?,
            d2: num(f, line, c[6])?,
            d4: num(f, line, c[7])?,
        });
    }
    if out.is_empty() {
        return Err(bad(f, 0, "no series"));
    }
    Ok(out)
}

type Constants = (
    f64,
    f64,
    BTreeMap<(String, u32), f64>,
    BTreeMap<(String, u32), f64>,
);

fn parse_constants(text: &str) -> Result<Constants> {
    let f = CONSTANTS_FILE;
    let (mut ry, mut ip) = (None, None);
    let mut levels = BTreeMap::new();
    let mut lifetimes = BTreeMap::new();
    for (line, c) in data_lines(text) {
        match (c[0], c.len()) {
            ("rydberg_sr_cm", 2) => ry = Some(num(f, line, c[1])?),
            ("ionization_limit_cm", 2) => ip = Some(num(f, line, c[1])?),
            ("level", 4) => {
                levels.insert((c[1].to_string(), num(f, line, c[2])?), num(f, line, c[3])?);
            }
            ("lifetime", 4) => {
                lifetimes.insert((c[1].to_string(), num(f, line, c[2])?), num(f, line, c[3])?);
            }
            _ => {
                return Err(bad(
                    f,
                    line,
                    format!("unrecognized entry `{}`", c.join(" ")),
                ))
            }
        }
    }
    let ry = ry.ok_or_else(|| bad(f, 0, "missing rydberg_sr_cm"))?;
    let ip = ip.ok_or_else(|| bad(f, 0, "missing ionization_limit_cm"))?;
    Ok((ry, ip, levels, lifetimes))
}

fn parse_c6(text: &str) -> Result<Vec<(u32, f64)>> {
    let f = C6_FILE;
    let mut out = Vec::new();
    for (line, c) in data_lines(text) {
        if c.len() != 2 {
            return Err(bad(f, line, "expected 2 columns"));
        }
        out.push((num(f, line, c[0])?, num(f, line, c[1])?));
    }
    if out.is_empty() {
        return Err(bad(f, 0, "no rows"));
    }
    out.sort_by_key(|r| r.0);
    Ok(out)
}
