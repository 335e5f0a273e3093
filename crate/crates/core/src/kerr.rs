//! Cat-state generation by the dressing-induced light shift: exact and
//! truncated (Kerr) evolution, the nonlinearity fidelity F_nl and its
//! optimizer, revivals and the timing tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dressing::{light_shift_exact, DressingParams};
use crate::error::{invalid, require_positive, Error, Result};
use crate::optim::{golden_max, nelder_mead, NelderMeadOptions};
use crate::spinsim::{css_state, wrap_angle, CollectiveState, CssParams, IdealCatParams};

/// Spectrum used for the diagonal evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Full light shift of the dressed ground state.
    Exact,
    /// Quadratic truncation (N_e^2 - N_e/w^2) chi_0 / 2.
    Kerr,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Model::Exact),
            "kerr" => Ok(Model::Kerr),
            _ => Err(invalid("model", format!("expected exact or kerr, got {s}"))),
        }
    }
}

/// Energy of the N_e-excitation Dicke state in units of delta.
fn energy_over_delta(model: Model, n_e: usize, w: f64) -> f64 {
    match model {
        Model::Exact => light_shift_exact(n_e, w, 1.0),
        Model::Kerr => {
            let x = n_e as f64 * w * w;
            x * x - x
        }
    }
}

/// Phase E(N_e) t for t = x tau_c, which depends on w only.
pub fn phase_at_cat_units(model: Model, n_e: usize, w: f64, x: f64) -> f64 {
    energy_over_delta(model, n_e, w) * PI * x / (2.0 * w.powi(4))
}

/// Diagonal evolution c_k -> exp(-i E(k) t) c_k.
pub fn evolve(
    state: &CollectiveState,
    params: &DressingParams,
    t: f64,
    model: Model,
) -> CollectiveState {
    let (w, delta) = (params.w(), params.delta());
    state.apply_phases(|k| energy_over_delta(model, k, w) * delta * t)
}

/// Evolution to t = x tau_c expressed through w alone.
pub fn evolve_cat_units(state: &CollectiveState, w: f64, x: f64, model: Model) -> CollectiveState {
    state.apply_phases(|k| phase_at_cat_units(model, k, w, x))
}

/// Ideal cat reached from an equatorial CSS after pure Kerr evolution to tau_c.
pub fn yurke_stoler_target(start: &CssParams, params: &DressingParams) -> Result<IdealCatParams> {
    if (start.theta() - PI / 2.0).abs() > 1e-12 {
        return Err(invalid(
            "theta",
            "Kerr evolution yields an antipodal cat only on the equator",
        ));
    }
    let w = params.w();
    IdealCatParams::new(PI / 2.0, start.phi() - PI / (2.0 * w * w), PI / 2.0)
}

/// Optimal parameters found by [`f_nl`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FnlResult {
    pub fidelity: f64,
    pub cat: IdealCatParams,
    /// Optimal interaction time in units of tau_c = pi / chi_0.
    pub time_factor: f64,
    pub converged: bool,
    /// Whether the optimal time lies strictly inside the searched window.
    pub interior: bool,
}

/// Seed-grid resolution for [`f_nl_with`].
#[derive(Debug, Clone, Copy)]
pub struct FnlGrid {
    pub time_points: usize,
    pub phi_points: usize,
    /// Half-width of the time window relative to its center.
    pub window: f64,
}

impl Default for FnlGrid {
    fn default() -> Self {
        Self {
            time_points: 21,
            phi_points: 1024,
            window: 0.1,
        }
    }
}

/// Center of the time search window: the exact spectrum's quadratic
/// coefficient is reduced by (1 + 2 N w^2)^(-3/2) around N_e = N/2.
pub fn time_window_center(n: usize, w: f64) -> f64 {
    (1.0 + 2.0 * n as f64 * w * w).powf(1.5)
}

/// Overlap-derived fidelity with the best ideal cat along (theta, phi), maximized over alpha.
fn cat_fidelity(psi: &CollectiveState, theta: f64, phi: f64) -> (f64, f64) {
    let n = psi.n_atoms();
    let Ok(p) = CssParams::folded(theta, phi) else {
        return (0.0, 0.0);
    };
    let a_state = css_state(n, &p).expect("n >= 1");
    let b_state = css_state(n, &p.antipode()).expect("n >= 1");
    let a = a_state.inner(psi).expect("same n");
    let b = b_state.inner(psi).expect("same n");
    ((a.norm() + b.norm()).powi(2) / 2.0, b.arg() - a.arg())
}

/// F_nl(N, w) with the default seed grid.
pub fn f_nl(n: usize, w: f64) -> Result<FnlResult> {
    f_nl_with(n, w, &FnlGrid::default())
}

/// Nonlinearity fidelity: overlap of the exactly evolved |eta = 1> with the
/// closest ideal cat, maximized over (theta, phi, alpha) and the interaction time.
pub fn f_nl_with(n: usize, w: f64, grid: &FnlGrid) -> Result<FnlResult> {
    if n < 2 {
        return Err(invalid("n_atoms", "F_nl needs N >= 2"));
    }
    require_positive("w", w)?;
    if w >= 0.5 {
        return Err(invalid("w", format!("{w} outside (0, 0.5)")));
    }
    let start = css_state(n, &CssParams::new(PI / 2.0, 0.0)?)?;
    let mags: Vec<f64> = start.amplitudes().iter().map(|c| c.re).collect();
    let center = time_window_center(n, w);
    let (lo, hi) = (center * (1.0 - grid.window), center * (1.0 + grid.window));
    let m = grid.phi_points.max((4 * (n + 1)).next_power_of_two());

    let times: Vec<f64> = (0..grid.time_points)
        .map(|i| lo + (hi - lo) * i as f64 / (grid.time_points - 1).max(1) as f64)
        .collect();
    let seeds: Vec<(f64, f64, f64)> = times
        .par_iter()
        .map(|&x| {
            let mut planner = FftPlanner::<f64>::new();
            let fft = planner.plan_fft_inverse(m);
            let mut a = vec![Complex64::new(0.0, 0.0); m];
            for (k, (&mk, c)) in mags.iter().zip(start.amplitudes()).enumerate() {
                a[k] =
                    mk * c * Complex64::from_polar(1.0, -phase_at_cat_units(Model::Exact, k, w, x));
            }
            let mut b: Vec<Complex64> = a
                .iter()
                .enumerate()
                .map(|(k, v)| if k % 2 == 1 { -v } else { *v })
                .collect();
            fft.process(&mut a);
            fft.process(&mut b);
            let (mut best, mut best_j) = (f64::NEG_INFINITY, 0);
            for j in 0..m {
                let f = (a[j].norm() + b[j].norm()).powi(2) / 2.0;
                if f > best {
                    best = f;
                    best_j = j;
                }
            }
            (best, 2.0 * PI * best_j as f64 / m as f64, x)
        })
        .collect();
    let seed = seeds
        .iter()
        .cloned()
        .fold((f64::NEG_INFINITY, 0.0, center), |acc, s| {
            if s.0 > acc.0 {
                s
            } else {
                acc
            }
        });

    let objective = |v: &[f64]| {
        let psi = evolve_cat_units(&start, w, v[2], Model::Exact);
        -cat_fidelity(&psi, v[0], v[1]).0
    };
    let x0 = [PI / 2.0, seed.1, seed.2];
    let step = [
        0.05 * x0[0],
        if x0[1] != 0.0 { 0.05 * x0[1] } else { 2.5e-4 },
        0.05 * x0[2],
    ];
    let opt = nelder_mead(objective, &x0, &step, &NelderMeadOptions::default());
    let (x, fid) = if -opt.f >= seed.0 {
        (opt.x.clone(), -opt.f)
    } else {
        (x0.to_vec(), seed.0)
    };
    let psi = evolve_cat_units(&start, w, x[2], Model::Exact);
    let (_, alpha) = cat_fidelity(&psi, x[0], x[1]);
    let dir = CssParams::folded(x[0], x[1])?;
    Ok(FnlResult {
        fidelity: fid.min(1.0),
        cat: IdealCatParams::new(dir.theta(), dir.phi(), alpha)?,
        time_factor: x[2],
        converged: opt.converged,
        interior: x[2] > lo && x[2] < hi,
    })
}

/// Lower end of the w bracket searched by [`w_for_target_fnl`].
pub const W_BRACKET: (f64, f64) = (1e-3, 0.45);

/// Largest w keeping F_nl(N, w) at `f_target`, by geometric bisection.
pub fn w_for_target_fnl(n: usize, f_target: f64) -> Result<f64> {
    if !(f_target > 0.5 && f_target < 1.0) {
        return Err(invalid("f_target", format!("{f_target} outside (0.5, 1)")));
    }
    let (mut lo, mut hi) = W_BRACKET;
    let f_lo = f_nl(n, lo)?.fidelity;
    let f_hi = f_nl(n, hi)?.fidelity;
    if f_lo < f_target || f_hi > f_target {
        return Err(Error::NotConverged {
            op: "w_for_target_fnl",
            reason: format!(
                "target {f_target} not bracketed for N = {n}: F_nl({lo}) = {f_lo}, F_nl({hi}) = {f_hi}"
            ),
        });
    }
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        if f_nl(n, mid)?.fidelity > f_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Best z rotation: max_beta |<target| R_z(beta) |psi>|^2, by FFT scan and golden refinement.
pub fn best_z_rotation(target: &CollectiveState, psi: &CollectiveState) -> Result<(f64, f64)> {
    let n = psi.n_atoms();
    if target.n_atoms() != n {
        return Err(invalid("state", "atom numbers differ"));
    }
    let p: Vec<Complex64> = target
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(t, s)| t.conj() * s)
        .collect();
    let value = |beta: f64| {
        p.iter()
            .enumerate()
            .map(|(k, v)| v * Complex64::from_polar(1.0, -beta * k as f64))
            .sum::<Complex64>()
            .norm_sqr()
    };
    let m = (8 * (n + 1)).next_power_of_two().max(256);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[..p.len()].copy_from_slice(&p);
    FftPlanner::<f64>::new()
        .plan_fft_forward(m)
        .process(&mut buf);
    let (j, _) = buf
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.norm_sqr()))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let h = 2.0 * PI / m as f64;
    let centre = j as f64 * h;
    let (beta, f) = golden_max(value, centre - h, centre + h, 1e-13);
    Ok((wrap_angle(beta), f.min(1.0)))
}

/// Overlap with |eta = 1> after evolving the exact model to `time_factor` tau_c,
/// maximized over a z rotation.
pub fn revival_fidelity_at(n: usize, w: f64, time_factor: f64) -> Result<f64> {
    let start = css_state(n, &CssParams::new(PI / 2.0, 0.0)?)?;
    let psi = evolve_cat_units(&start, w, time_factor, Model::Exact);
    Ok(best_z_rotation(&start, &psi)?.1)
}

/// Revival of the initial CSS at twice the F_nl-optimal cat time.
pub fn revival_fidelity(n: usize, w: f64) -> Result<f64> {
    let cat = f_nl(n, w)?;
    revival_fidelity_at(n, w, 2.0 * cat.time_factor)
}

/// Overlap with |eta = 1> at `time_factor` tau_c without any rotation.
pub fn return_overlap(n: usize, w: f64, time_factor: f64) -> Result<f64> {
    let start = css_state(n, &CssParams::new(PI / 2.0, 0.0)?)?;
    let psi = evolve_cat_units(&start, w, time_factor, Model::Exact);
    crate::spinsim::fidelity(&start, &psi)
}

/// Required timing precision delta tau_c = 2 w^2 delta_phi / chi_0, with
/// delta_phi = 1/(5 sqrt N) by default.
pub fn timing_tolerance(
    n: usize,
    params: &DressingParams,
    phase_error: Option<f64>,
) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n_atoms", "must be at least 1"));
    }
    let dphi = phase_error.unwrap_or(1.0 / (5.0 * (n as f64).sqrt()));
    require_positive("phase_error", dphi)?;
    Ok(2.0 * params.w().powi(2) * dphi / params.chi0())
}
