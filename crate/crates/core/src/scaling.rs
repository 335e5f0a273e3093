//! Maximum cat size versus principal number under fidelity budgets, the
//! level-spacing detuning cap and scaling-exponent fits.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::atomic::{AtomModel, RydbergLevel};
use crate::constants::C_LIGHT;
use crate::error::{invalid, require_positive, Error, Result};
use crate::inhomogeneity::{build_interactions_with, f_ih_perturbative, Lattice, DEFAULT_SPACING};
use crate::kerr::{f_nl, w_for_target_fnl};
use crate::quad::{linear_fit, log_log_interp};

/// Principal numbers for which the quantum-defect series are trusted.
pub const VALID_N: std::ops::RangeInclusive<u32> = 10..=200;

/// Largest cat size searched.
pub const N_CEILING: f64 = 1000.0;

/// Smallest cat size searched (lower end of the w* table).
pub const N_FLOOR: f64 = 20.0;

/// Target series and the neighbouring series used for the detuning cap.
pub const TARGET_SERIES: &str = "3S1";
pub const NEIGHBOUR_SERIES: &str = "3D1";
/// Intermediate level of the dressing laser (5s5p 3P0).
pub const INTERMEDIATE: (&str, u32) = ("3P0", 5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DetuningCap {
    Bounded(f64),
    Unconstrained,
}

impl DetuningCap {
    pub fn value(&self) -> f64 {
        match self {
            DetuningCap::Bounded(x) => *x,
            DetuningCap::Unconstrained => f64::INFINITY,
        }
    }
}

/// Largest detuning for which the off-resonant neighbour's amplitude stays within
/// the allowed admixture: r Delta / (S - Delta) <= (1 - s)/s, with r the ratio of
/// the neighbour's to the target's coupling and S the level spacing.
pub fn two_level_cap(spacing: f64, coupling_ratio: f64, s_character: f64) -> Result<DetuningCap> {
    if !(s_character > 0.5 && s_character < 1.0) {
        return Err(invalid(
            "s_character",
            format!("{s_character} outside (0.5, 1)"),
        ));
    }
    if spacing.is_infinite() {
        return Ok(DetuningCap::Unconstrained);
    }
    require_positive("spacing", spacing)?;
    if !(coupling_ratio >= 0.0) {
        return Err(invalid("coupling_ratio", "must be non-negative"));
    }
    if coupling_ratio == 0.0 {
        return Ok(DetuningCap::Unconstrained);
    }
    let q = (1.0 - s_character) / s_character;
    Ok(DetuningCap::Bounded(spacing * q / (coupling_ratio + q)))
}

#[derive(Debug, Clone, Serialize)]
pub struct CapDetails {
    pub cap: DetuningCap,
    pub neighbour: RydbergLevel,
    pub spacing: f64,
    pub coupling_ratio: f64,
}

/// Detuning cap of the n 3S1 target from the nearest 3D1 level.
pub fn detuning_cap(model: &AtomModel, n: u32, s_character: f64) -> Result<CapDetails> {
    if !VALID_N.contains(&n) {
        return Err(invalid(
            "n",
            format!("{n} outside the tabulated range {VALID_N:?}"),
        ));
    }
    let target = model.level(TARGET_SERIES, n)?;
    let mut best: Option<RydbergLevel> = None;
    for m in n - 3..=n + 2 {
        let d = model.level(NEIGHBOUR_SERIES, m)?;
        if best
            .as_ref()
            .is_none_or(|b| (d.n_star - target.n_star).abs() < (b.n_star - target.n_star).abs())
        {
            best = Some(d);
        }
    }
    let neighbour = best.expect("nonempty search");
    let rydberg_cm = model.data().rydberg_cm;
    let spacing = (rydberg_cm
        * 100.0
        * C_LIGHT
        * (1.0 / neighbour.n_star.powi(2) - 1.0 / target.n_star.powi(2)))
    .abs()
        * 2.0
        * PI;
    let p = model.level(INTERMEDIATE.0, INTERMEDIATE.1)?;
    let r_s = model.radial_matrix_element(&target, &p)?;
    let r_d = model.radial_matrix_element(&neighbour, &p)?;
    // 3P0 -> 3D1 and 3P0 -> 3S1 angular factors are 2/9 and 1/9
    let coupling_ratio = 2f64.sqrt() * (r_d / r_s).abs();
    Ok(CapDetails {
        cap: two_level_cap(spacing, coupling_ratio, s_character)?,
        neighbour,
        spacing,
        coupling_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityBudget {
    pub f_nl_target: f64,
    pub f_ih_target: f64,
    pub f_dc_target: f64,
    pub temperature: f64,
}

impl FidelityBudget {
    pub fn new(
        f_nl_target: f64,
        f_ih_target: f64,
        f_dc_target: f64,
        temperature: f64,
    ) -> Result<Self> {
        for (f, v) in [
            ("f_nl_target", f_nl_target),
            ("f_ih_target", f_ih_target),
            ("f_dc_target", f_dc_target),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(f, format!("{v} outside (0, 1)")));
            }
        }
        if !(temperature >= 0.0) {
            return Err(invalid("temperature", "must be non-negative"));
        }
        Ok(Self {
            f_nl_target,
            f_ih_target,
            f_dc_target,
            temperature,
        })
    }
}

/// w*(N) memoized on a geometric grid and interpolated log-log.
#[derive(Debug, Clone, Serialize)]
pub struct WStarTable {
    pub f_target: f64,
    pub sizes: Vec<f64>,
    pub w: Vec<f64>,
}

impl WStarTable {
    pub fn build(f_target: f64, n_min: f64, n_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(n_min >= 2.0 && n_max > n_min) {
            return Err(invalid(
                "points",
                "need at least two grid points on 2 <= n_min < n_max",
            ));
        }
        let mut sizes: Vec<f64> = (0..points)
            .map(|i| (n_min * (n_max / n_min).powf(i as f64 / (points - 1) as f64)).round())
            .collect();
        sizes.dedup();
        let w = sizes
            .par_iter()
            .map(|&n| w_for_target_fnl(n as usize, f_target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { f_target, sizes, w })
    }

    pub fn w(&self, n: f64) -> f64 {
        log_log_interp(&self.sizes, &self.w, n)
    }
}

/// Mapping from cat size to the geometry that sets the inhomogeneity-limited detuning.
#[derive(Debug, Clone, Serialize)]
pub enum GeometryPolicy {
    /// D(N) = sqrt(3) a N^(1/3) and R_b = D / x_star.
    FixedFraction { spacing: f64, x_star: f64 },
    /// Smallest R_b keeping the N-site cluster at the F_IH target, tabulated on sizes.
    PerSizeThreshold {
        spacing: f64,
        sizes: Vec<f64>,
        r_b_min: Vec<f64>,
    },
}

/// Extent of an N-atom cubic block, sqrt(3) a N^(1/3).
pub fn cube_extent(n: f64, spacing: f64) -> f64 {
    3f64.sqrt() * spacing * n.cbrt()
}

fn cluster_f_ih(n: usize, spacing: f64, r_b: f64) -> Result<f64> {
    let lattice = Lattice::cluster(n, spacing)?;
    let m = build_interactions_with(&lattice, 1.0, r_b)?;
    Ok(f_ih_perturbative(&m, PI, 3)?.fidelity)
}

impl GeometryPolicy {
    /// Calibrate x_star from the first cluster size whose F_IH at `r_b` drops below `f_ih_target`.
    pub fn calibrate_fixed_fraction(spacing: f64, r_b: f64, f_ih_target: f64) -> Result<Self> {
        for n in 2..=2000 {
            if cluster_f_ih(n, spacing, r_b)? < f_ih_target {
                return Ok(GeometryPolicy::FixedFraction {
                    spacing,
                    x_star: cube_extent(n as f64, spacing) / r_b,
                });
            }
        }
        Err(Error::NotConverged {
            op: "calibrate_fixed_fraction",
            reason: "F_IH target not crossed below 2000 atoms".into(),
        })
    }

    pub fn per_size_threshold(spacing: f64, f_ih_target: f64, sizes: &[f64]) -> Result<Self> {
        let r_b_min = sizes
            .par_iter()
            .map(|&n| {
                let lattice = Lattice::cluster(n as usize, spacing)?;
                let d = lattice.diameter();
                let f = |x: f64| -> Result<f64> {
                    let m = build_interactions_with(&lattice, 1.0, d / x)?;
                    Ok(f_ih_perturbative(&m, PI, 3)?.fidelity)
                };
                let (mut lo, mut hi) = (1e-3, 4.0);
                if f(hi)? >= f_ih_target {
                    return Ok(d / hi);
                }
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid)? >= f_ih_target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(d / lo)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GeometryPolicy::PerSizeThreshold {
            spacing,
            sizes: sizes.to_vec(),
            r_b_min,
        })
    }

    /// (smallest allowed R_b, atom-cloud extent D) for N atoms.
    pub fn geometry(&self, n: f64) -> (f64, f64) {
        match self {
            GeometryPolicy::FixedFraction { spacing, x_star } => {
                let d = cube_extent(n, *spacing);
                (d / x_star, d)
            }
            GeometryPolicy::PerSizeThreshold {
                spacing,
                sizes,
                r_b_min,
            } => (log_log_interp(sizes, r_b_min, n), cube_extent(n, *spacing)),
        }
    }
}

/// Decay rates of the target Rydberg level.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelRates {
    pub n: u32,
    pub gamma_s: f64,
    pub gamma_bbr: f64,
}

pub fn level_rates(model: &AtomModel, n: u32, temperature: f64) -> Result<LevelRates> {
    let level = model.level(TARGET_SERIES, n)?;
    let table = model.channel_table(&level)?;
    Ok(LevelRates {
        n,
        gamma_s: crate::atomic::lifetime_from(&table)?.gamma,
        gamma_bbr: crate::atomic::bbr_from(&table, temperature)?.gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    InhomogeneityDelta,
    LevelSpacingDelta,
}

impl Binding {
    pub fn label(&self) -> &'static str {
        match self {
            Binding::InhomogeneityDelta => "inhomogeneity-delta",
            Binding::LevelSpacingDelta => "level-spacing-delta",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SizeResult {
    pub n: u32,
    /// Root of the decay budget (continuous).
    pub n_root: f64,
    pub n_max: usize,
    pub delta: f64,
    pub w: f64,
    pub tau_c: f64,
    pub r_b: f64,
    pub d: f64,
    pub gamma_s: f64,
    pub gamma_bbr: f64,
    pub binding: Binding,
    pub unconstrained: bool,
    pub temperature: f64,
}

/// Shared inputs of a cat-size scan.
#[derive(Debug, Clone)]
pub struct SizeProblem<'a> {
    pub budget: FidelityBudget,
    pub w_table: &'a WStarTable,
    pub geometry: &'a GeometryPolicy,
    /// C6(n) in rad/s m^6.
    pub c6: f64,
    pub cap: DetuningCap,
    pub rates: LevelRates,
}

struct Evaluation {
    lambda: f64,
    delta: f64,
    w: f64,
    tau_c: f64,
    r_b: f64,
    d: f64,
    binding: Binding,
}

impl SizeProblem<'_> {
    fn evaluate(&self, n_atoms: f64) -> Evaluation {
        let w = self.w_table.w(n_atoms);
        let (r_b_min, d) = self.geometry.geometry(n_atoms);
        let delta_ih = self.c6 / (2.0 * r_b_min.powi(6));
        let cap = self.cap.value();
        let (delta, binding) = if delta_ih < cap {
            (delta_ih, Binding::InhomogeneityDelta)
        } else {
            (cap, Binding::LevelSpacingDelta)
        };
        let tau_c = PI / (2.0 * w.powi(4) * delta);
        let gamma = self.rates.gamma_s + self.rates.gamma_bbr;
        let lambda = 0.95 * n_atoms / 2.0 * tau_c * gamma * w * w;
        Evaluation {
            lambda,
            delta,
            w,
            tau_c,
            r_b: (self.c6 / (2.0 * delta)).powf(1.0 / 6.0),
            d,
            binding,
        }
    }

    /// Largest N with exp(-lambda(N)) >= f_dc_target, by geometric bisection on [N_FLOOR, N_CEILING].
    pub fn solve(&self) -> Result<SizeResult> {
        let target = (1.0 / self.budget.f_dc_target).ln();
        let (mut lo, mut hi) = (N_FLOOR, N_CEILING);
        let mut unconstrained = false;
        if self.evaluate(hi).lambda <= target {
            lo = hi;
            unconstrained = true;
        } else if self.evaluate(lo).lambda > target {
            return Err(Error::NotConverged {
                op: "max_cat_size",
                reason: format!(
                    "decay budget already exceeded at N = {N_FLOOR} for n = {}",
                    self.rates.n
                ),
            });
        } else {
            let mut iterations = 0;
            while hi / lo > 1.0 + 1e-12 {
                iterations += 1;
                if iterations > 100 {
                    return Err(Error::NotConverged {
                        op: "max_cat_size",
                        reason: format!("bisection stalled in [{lo}, {hi}]"),
                    });
                }
                let mid = (lo * hi).sqrt();
                if self.evaluate(mid).lambda <= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let e = self.evaluate(lo);
        Ok(SizeResult {
            n: self.rates.n,
            n_root: lo,
            n_max: lo.floor() as usize,
            delta: e.delta,
            w: e.w,
            tau_c: e.tau_c,
            r_b: e.r_b,
            d: e.d,
            gamma_s: self.rates.gamma_s,
            gamma_bbr: self.rates.gamma_bbr,
            binding: e.binding,
            unconstrained,
            temperature: self.budget.temperature,
        })
    }
}

/// N_max for principal number n.
pub fn max_cat_size(
    model: &AtomModel,
    n: u32,
    budget: &FidelityBudget,
    w_table: &WStarTable,
    geometry: &GeometryPolicy,
    s_character: f64,
) -> Result<SizeResult> {
    if (w_table.f_target - budget.f_nl_target).abs() > 1e-12 {
        return Err(invalid("w_table", "built for a different F_nl target"));
    }
    let problem = SizeProblem {
        budget: *budget,
        w_table,
        geometry,
        c6: model.data().c6(n)?,
        cap: detuning_cap(model, n, s_character)?.cap,
        rates: level_rates(model, n, budget.temperature)?,
    };
    problem.solve()
}

/// Re-evaluated fidelity factors of a result, for round-trip checks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BudgetCheck {
    pub f_nl: f64,
    pub f_ih: f64,
    pub f_dc: f64,
}

pub fn check_budget(result: &SizeResult, spacing: f64) -> Result<BudgetCheck> {
    let n = result.n_max.max(2);
    let f_nl = f_nl(n, result.w)?.fidelity;
    let f_ih = cluster_f_ih(n, spacing, result.r_b)?;
    let lambda = 0.95 * n as f64 / 2.0
        * result.tau_c
        * (result.gamma_s + result.gamma_bbr)
        * result.w
        * result.w;
    Ok(BudgetCheck {
        f_nl,
        f_ih,
        f_dc: (-lambda).exp(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingExponents {
    /// d ln N_max / d ln n on the inhomogeneity-limited branch.
    pub pre_transition: f64,
    /// Least-squares dN_max/dn on the spacing-limited branch.
    pub post_transition_slope: f64,
    pub pre_points: usize,
    pub post_points: usize,
}

pub const MIN_FIT_POINTS: usize = 6;

pub fn scaling_exponents(results: &[SizeResult]) -> Result<ScalingExponents> {
    let pre: Vec<&SizeResult> = results
        .iter()
        .filter(|r| r.binding == Binding::InhomogeneityDelta)
        .collect();
    let post: Vec<&SizeResult> = results
        .iter()
        .filter(|r| r.binding == Binding::LevelSpacingDelta)
        .collect();
    if pre.len() < MIN_FIT_POINTS || post.len() < MIN_FIT_POINTS {
        return Err(invalid(
            "results",
            format!(
                "need {MIN_FIT_POINTS} points per regime, got {} and {}",
                pre.len(),
                post.len()
            ),
        ));
    }
    let lx: Vec<f64> = pre.iter().map(|r| (r.n as f64).ln()).collect();
    let ly: Vec<f64> = pre.iter().map(|r| r.n_root.ln()).collect();
    let x: Vec<f64> = post.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = post.iter().map(|r| r.n_root).collect();
    Ok(ScalingExponents {
        pre_transition: linear_fit(&lx, &ly).0,
        post_transition_slope: linear_fit(&x, &y).0,
        pre_points: pre.len(),
        post_points: post.len(),
    })
}

/// First n whose N_max is within `tolerance` (relative) of the scan maximum.
pub fn peak(results: &[SizeResult], tolerance: f64) -> Option<&SizeResult> {
    let max = results
        .iter()
        .map(|r| r.n_root)
        .fold(f64::NEG_INFINITY, f64::max);
    results.iter().find(|r| r.n_root >= max * (1.0 - tolerance))
}

/// Rises to the maximum and never climbs back by more than `tolerance` after falling.
pub fn is_single_peaked(results: &[SizeResult], tolerance: f64) -> bool {
    let mut running_max = f64::NEG_INFINITY;
    let mut fell = false;
    for r in results {
        if r.n_root < running_max * (1.0 - tolerance) {
            fell = true;
        } else if fell && r.n_root > running_max * (1.0 + tolerance) {
            return false;
        }
        running_max = running_max.max(r.n_root);
    }
    true
}

/// Default geometry: spacing 200 nm, calibrated at R_b = 3.6 um.
pub const CALIBRATION_R_B: f64 = 3.6e-6;

pub fn default_geometry(f_ih_target: f64) -> Result<GeometryPolicy> {
    GeometryPolicy::calibrate_fixed_fraction(DEFAULT_SPACING, CALIBRATION_R_B, f_ih_target)
}
