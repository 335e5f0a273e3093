//! Quantities fixed by the dressing laser: dressed-state energies, Kerr
//! coefficients, adiabaticity of switching ramps and the blockade radius.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, require_non_negative, require_positive, Result};

/// Weak-dressing guard threshold for sqrt(N) w.
pub const WEAK_DRESSING_LIMIT: f64 = 0.3;

/// Dressing-laser parameters and the quantities derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DressingParams {
    omega_r: f64,
    delta: f64,
    n: u32,
    c6: f64,
}

impl DressingParams {
    /// `omega_r`, `delta` in rad/s; `c6` in rad/s m^6. The sign of the detuning is dropped.
    pub fn new(omega_r: f64, delta: f64, n: u32, c6: f64) -> Result<Self> {
        require_positive("omega_r", omega_r)?;
        if !delta.is_finite() || delta == 0.0 {
            return Err(invalid("delta", "must be finite and nonzero"));
        }
        if !c6.is_finite() || c6 == 0.0 {
            return Err(invalid("c6", "must be finite and nonzero"));
        }
        Ok(Self {
            omega_r,
            delta: delta.abs(),
            n,
            c6: c6.abs(),
        })
    }

    /// Parameters from the dressing ratio w = omega_r / (2 delta).
    pub fn from_w(w: f64, delta: f64, n: u32, c6: f64) -> Result<Self> {
        require_positive("w", w)?;
        Self::new(2.0 * w * delta.abs(), delta, n, c6)
    }

    pub fn omega_r(&self) -> f64 {
        self.omega_r
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn principal_number(&self) -> u32 {
        self.n
    }

    pub fn c6(&self) -> f64 {
        self.c6
    }

    /// w = omega_r / (2 delta).
    pub fn w(&self) -> f64 {
        self.omega_r / (2.0 * self.delta)
    }

    /// Plateau interaction chi_0 = 2 w^4 delta, rad/s.
    pub fn chi0(&self) -> f64 {
        2.0 * self.w().powi(4) * self.delta
    }

    /// Cat creation time pi / chi_0.
    pub fn tau_c(&self) -> f64 {
        PI / self.chi0()
    }

    /// Blockade radius |C6 / (2 delta)|^(1/6), m.
    pub fn r_b(&self) -> f64 {
        (self.c6 / (2.0 * self.delta)).powf(1.0 / 6.0)
    }

    /// Returns a message when sqrt(N) w exceeds the weak-dressing limit.
    pub fn weak_dressing_warning(&self, n_atoms: usize) -> Option<String> {
        let x = (n_atoms as f64).sqrt() * self.w();
        (x > WEAK_DRESSING_LIMIT)
            .then(|| format!("sqrt(N) w = {x:.3} exceeds {WEAK_DRESSING_LIMIT} for N = {n_atoms}"))
    }

    /// Logs the weak-dressing warning, if any, and returns self.
    pub fn checked_for(self, n_atoms: usize) -> Self {
        if let Some(msg) = self.weak_dressing_warning(n_atoms) {
            log::warn!("{msg}");
        }
        self
    }
}

/// Dressed energies (E_-, E_+) of the collective two-level system with N_e
/// excitations, in rad/s.
pub fn dressed_energies(n_e: usize, omega_r: f64, delta: f64) -> Result<(f64, f64)> {
    if !delta.is_finite() || delta == 0.0 {
        return Err(invalid(
            "delta",
            "resonant dressing (delta = 0) is unsupported",
        ));
    }
    require_non_negative("omega_r", omega_r.abs())?;
    let u = n_e as f64 * omega_r * omega_r / (delta * delta);
    let root = (1.0 + u).sqrt();
    Ok((-0.5 * delta * u / (1.0 + root), 0.5 * delta * (1.0 + root)))
}

/// Light shift E_- through fourth order in w: (N_e^2 w^4 - N_e w^2) delta.
pub fn light_shift_quartic(n_e: usize, w: f64, delta: f64) -> f64 {
    let x = n_e as f64 * w * w;
    (x * x - x) * delta
}

/// Exact light shift E_- as a function of (N_e, w, delta), free of cancellation.
pub fn light_shift_exact(n_e: usize, w: f64, delta: f64) -> f64 {
    let u = 4.0 * n_e as f64 * w * w;
    -0.5 * delta * u / (1.0 + (1.0 + u).sqrt())
}

/// Phase (N_e^2 - N_e/w^2)(chi_0/2) t accumulated under the Kerr Hamiltonian.
pub fn kerr_hamiltonian_phase(n_e: usize, params: &DressingParams, t: f64) -> f64 {
    let k = n_e as f64;
    let w = params.w();
    (k * k - k / (w * w)) * params.chi0() / 2.0 * t
}

/// |C6 / (2 delta)|^(1/6).
pub fn blockade_radius(c6: f64, delta: f64) -> Result<f64> {
    if !c6.is_finite() || c6 == 0.0 {
        return Err(invalid("c6", "must be finite and nonzero"));
    }
    if !delta.is_finite() || delta == 0.0 {
        return Err(invalid("delta", "must be finite and nonzero"));
    }
    Ok((c6 / (2.0 * delta)).abs().powf(1.0 / 6.0))
}

/// Minimum number of samples in a ramp grid.
pub const MIN_RAMP_POINTS: usize = 1000;

/// Time profile of the dressing Rabi frequency and detuning on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RampProfile {
    duration: f64,
    omega_r: Vec<f64>,
    delta: Vec<f64>,
}

impl RampProfile {
    /// Sampled profile; `omega_r[i]`, `delta[i]` at t = i duration / (len - 1).
    pub fn sampled(duration: f64, omega_r: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        require_positive("duration", duration)?;
        if omega_r.len() != delta.len() {
            return Err(invalid("ramp", "omega_r and delta grids differ in length"));
        }
        if omega_r.len() < MIN_RAMP_POINTS {
            return Err(invalid(
                "ramp",
                format!("grid needs at least {MIN_RAMP_POINTS} points"),
            ));
        }
        if omega_r.iter().chain(&delta).any(|v| !v.is_finite()) {
            return Err(invalid("ramp", "non-finite sample"));
        }
        if delta.contains(&0.0) {
            return Err(invalid("ramp", "detuning crosses zero"));
        }
        Ok(Self {
            duration,
            omega_r,
            delta,
        })
    }

    /// Profile from closed-form functions of time.
    pub fn from_fns(
        duration: f64,
        points: usize,
        omega_r: impl Fn(f64) -> f64,
        delta: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        require_positive("duration", duration)?;
        let points = points.max(2);
        let ts = (0..points).map(|i| duration * i as f64 / (points - 1) as f64);
        let (o, d) = ts.map(|t| (omega_r(t), delta(t))).unzip();
        Self::sampled(duration, o, d)
    }

    /// Omega_r rising linearly from 0 to `omega_max` at fixed detuning.
    pub fn linear_switch_on(
        duration: f64,
        omega_max: f64,
        delta: f64,
        points: usize,
    ) -> Result<Self> {
        require_positive("duration", duration)?;
        Self::from_fns(duration, points, |t| omega_max * t / duration, |_| delta)
    }

    /// Omega_r rising as sin^2(pi t / 2T) at fixed detuning.
    pub fn sin2_switch_on(
        duration: f64,
        omega_max: f64,
        delta: f64,
        points: usize,
    ) -> Result<Self> {
        require_positive("duration", duration)?;
        Self::from_fns(
            duration,
            points,
            |t| omega_max * (PI * t / (2.0 * duration)).sin().powi(2),
            |_| delta,
        )
    }

    /// Linear switch-on, constant hold and mirrored switch-off.
    pub fn linear_on_hold_off(
        ramp: f64,
        hold: f64,
        omega_max: f64,
        delta: f64,
        points: usize,
    ) -> Result<Self> {
        require_positive("ramp", ramp)?;
        require_non_negative("hold", hold)?;
        let total = 2.0 * ramp + hold;
        Self::from_fns(
            total,
            points,
            |t| {
                let rise = (t / ramp).min(1.0);
                let fall = ((total - t) / ramp).min(1.0);
                omega_max * rise.min(fall).max(0.0)
            },
            |_| delta,
        )
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn len(&self) -> usize {
        self.omega_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_r.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.duration / (self.len() - 1) as f64
    }

    pub fn omega_r_samples(&self) -> &[f64] {
        &self.omega_r
    }

    pub fn delta_samples(&self) -> &[f64] {
        &self.delta
    }

    /// Linear interpolation of (omega_r, delta) at time t.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let s = (t / self.dt()).clamp(0.0, (self.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.len() - 2);
        let f = s - i as f64;
        (
            self.omega_r[i] + f * (self.omega_r[i + 1] - self.omega_r[i]),
            self.delta[i] + f * (self.delta[i + 1] - self.delta[i]),
        )
    }

    /// Second-order finite-difference derivative of a sampled series.
    fn derivative(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let h = self.dt();
        (0..n)
            .map(|i| match i {
                0 => (3.0 * (v[1] - v[0]) - (v[2] - v[1])) / (2.0 * h),
                _ if i == n - 1 => {
                    (3.0 * (v[n - 1] - v[n - 2]) - (v[n - 2] - v[n - 3])) / (2.0 * h)
                }
                _ => (v[i + 1] - v[i - 1]) / (2.0 * h),
            })
            .collect()
    }

    /// Mixing-angle rate theta_dot = sqrt(N_e)(Omega Delta_dot - Delta Omega_dot)/(N_e Omega^2 + Delta^2) on the grid.
    pub fn theta_dot(&self, n_e: usize) -> Vec<f64> {
        let s = (n_e as f64).sqrt();
        let od = self.derivative(&self.omega_r);
        let dd = self.derivative(&self.delta);
        (0..self.len())
            .map(|i| {
                let (o, d) = (self.omega_r[i], self.delta[i]);
                s * (o * dd[i] - d * od[i]) / (n_e as f64 * o * o + d * d)
            })
            .collect()
    }
}

/// Largest ratio of the dressed-basis coupling |theta_dot|/2 to E_+ over the ramp.
pub fn adiabaticity_ratio(ramp: &RampProfile, n_e: usize) -> Result<f64> {
    require_positive("duration", ramp.duration)?;
    let td = ramp.theta_dot(n_e);
    let mut worst: f64 = 0.0;
    for (i, t) in td.iter().enumerate() {
        let (_, ep) = dressed_energies(n_e, ramp.omega_r[i], ramp.delta[i])?;
        worst = worst.max(0.5 * t.abs() / ep.abs());
    }
    Ok(worst)
}

/// 1 - ratio^2, the perturbative estimate of the ground-return probability.
pub fn perturbative_ground_return(ramp: &RampProfile, n_e: usize) -> Result<f64> {
    let r = adiabaticity_ratio(ramp, n_e)?;
    Ok(1.0 - r * r)
}

#[derive(Clone, Copy)]
struct Amp2 {
    g: (f64, f64),
    r: (f64, f64),
}

/// i d/dt (a, b) = [[0, c/2], [c/2, delta]] (a, b), returned as d/dt.
fn rhs(psi: Amp2, c: f64, delta: f64) -> Amp2 {
    // -i * (h psi)
    let ha = (0.5 * c * psi.r.0, 0.5 * c * psi.r.1);
    let hb = (
        0.5 * c * psi.g.0 + delta * psi.r.0,
        0.5 * c * psi.g.1 + delta * psi.r.1,
    );
    Amp2 {
        g: (ha.1, -ha.0),
        r: (hb.1, -hb.0),
    }
}

fn axpy(a: Amp2, s: f64, b: Amp2) -> Amp2 {
    Amp2 {
        g: (a.g.0 + s * b.g.0, a.g.1 + s * b.g.1),
        r: (a.r.0 + s * b.r.0, a.r.1 + s * b.r.1),
    }
}

fn integrate_ramp(ramp: &RampProfile, n_e: usize, steps: usize) -> Amp2 {
    let s = (n_e as f64).sqrt();
    let h = ramp.duration / steps as f64;
    let mut psi = Amp2 {
        g: (1.0, 0.0),
        r: (0.0, 0.0),
    };
    let field = |t: f64| {
        let (o, d) = ramp.at(t);
        (s * o, d)
    };
    for i in 0..steps {
        let t = i as f64 * h;
        let (c1, d1) = field(t);
        let (c2, d2) = field(t + 0.5 * h);
        let (c3, d3) = field(t + h);
        let k1 = rhs(psi, c1, d1);
        let k2 = rhs(axpy(psi, 0.5 * h, k1), c2, d2);
        let k3 = rhs(axpy(psi, 0.5 * h, k2), c2, d2);
        let k4 = rhs(axpy(psi, h, k3), c3, d3);
        let mut next = axpy(psi, h / 6.0, k1);
        next = axpy(next, h / 3.0, k2);
        next = axpy(next, h / 3.0, k3);
        psi = axpy(next, h / 6.0, k4);
    }
    psi
}

fn project_on_dressed_ground(psi: Amp2, coupling: f64, delta: f64) -> f64 {
    // eigenvector of [[0, b], [b, delta]] on the branch connected to |g>: (b, E_-)
    let b = 0.5 * coupling;
    let e_minus = dressed_energies(1, coupling, delta)
        .map(|e| e.0)
        .unwrap_or(0.0);
    let (x, y) = if b == 0.0 { (1.0, 0.0) } else { (b, e_minus) };
    let n = x.hypot(y);
    let (x, y) = (x / n, y / n);
    let re = x * psi.g.0 + y * psi.r.0;
    let im = x * psi.g.1 + y * psi.r.1;
    re * re + im * im
}

/// Population left in the dressed ground state at the end of the ramp.
///
/// The two-level Schrodinger equation is integrated by fixed-step RK4 in the
/// bare basis; the step count is doubled until the result changes by less
/// than 1e-6.
pub fn ground_return_probability(ramp: &RampProfile, n_e: usize) -> Result<f64> {
    require_positive("duration", ramp.duration)?;
    let s = (n_e as f64).sqrt();
    let scale = ramp
        .omega_r
        .iter()
        .zip(&ramp.delta)
        .map(|(o, d)| (s * o).hypot(*d))
        .fold(0.0, f64::max);
    let mut steps = ((ramp.duration * scale / 0.05).ceil() as usize).max(ramp.len() - 1);
    let (c_end, d_end) = (s * ramp.omega_r[ramp.len() - 1], ramp.delta[ramp.len() - 1]);
    let mut prev = project_on_dressed_ground(integrate_ramp(ramp, n_e, steps), c_end, d_end);
    for _ in 0..12 {
        steps *= 2;
        let p = project_on_dressed_ground(integrate_ramp(ramp, n_e, steps), c_end, d_end);
        if (p - prev).abs() < 1e-6 {
            return Ok(p.clamp(0.0, 1.0));
        }
        prev = p;
    }
    Err(crate::error::numerical(
        "ground_return_probability",
        "RK4 step refinement did not settle",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MHZ: f64 = 2.0 * PI * 1e6;

    fn realization_params() -> DressingParams {
        DressingParams::new(15.0 * MHZ, 270.0 * MHZ, 80, 1.0e-30).unwrap()
    }

    #[test]
    fn derived_quantities_consistent() {
        let p = realization_params();
        assert_relative_eq!(p.w(), 15.0 / 540.0, max_relative = 1e-12);
        assert_relative_eq!(p.chi0() * p.tau_c(), PI, max_relative = 1e-14);
        assert_relative_eq!(
            p.r_b(),
            blockade_radius(p.c6(), p.delta()).unwrap(),
            max_relative = 1e-12
        );
        assert!(p.weak_dressing_warning(100).is_none());
        assert!(p.weak_dressing_warning(165).is_some());
        assert!(DressingParams::new(1.0, 0.0, 80, 1.0).is_err());
        assert_eq!(
            DressingParams::new(1.0, -3.0, 80, 1.0).unwrap().delta(),
            3.0
        );
    }

    #[test]
    fn dressed_energy_examples() {
        let (m, p) = dressed_energies(0, 5.0, 2.0).unwrap();
        assert_eq!((m, p), (0.0, 2.0));
        let d = 3.0;
        let (m, _) = dressed_energies(1, d, d).unwrap();
        assert_relative_eq!(m, d * (1.0 - 2f64.sqrt()) / 2.0, max_relative = 1e-14);
        let (m, _) = dressed_energies(1, 2.0 * d, d).unwrap();
        assert_relative_eq!(m, d * (1.0 - 5f64.sqrt()) / 2.0, max_relative = 1e-14);
        let (m, p) = dressed_energies(17, 1.3, 0.7).unwrap();
        assert_relative_eq!(m * p, -17.0 * 1.3 * 1.3 / 4.0, max_relative = 1e-13);
        assert!(m <= 0.0 && p >= 0.0);
        assert!(dressed_energies(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn quartic_expansion_at_small_dressing() {
        let n_e = 25;
        let w = 0.01 / 5.0;
        let delta = 2.0 * PI * 1e8;
        let exact = dressed_energies(n_e, 2.0 * w * delta, delta).unwrap().0;
        let quartic = light_shift_quartic(n_e, w, delta);
        assert!(((exact - quartic) / exact).abs() < 1e-6);
        assert_relative_eq!(
            exact,
            light_shift_exact(n_e, w, delta),
            max_relative = 1e-14
        );
    }

    #[test]
    fn kerr_phase_examples() {
        let p = DressingParams::from_w(0.05, 2.0 * PI * 1e8, 80, 1.0).unwrap();
        assert_eq!(kerr_hamiltonian_phase(0, &p, 1e-3), 0.0);
        let t = 1e-3;
        let kerr = kerr_hamiltonian_phase(2, &p, t);
        let exact = light_shift_exact(2, p.w(), p.delta()) * t;
        assert!(((kerr - exact) / exact).abs() <= p.w() * p.w());
        // at tau_c, after removing the linear term the even/odd coefficients are 1 and -i
        let q = DressingParams::from_w(0.05, 1.0, 80, 1.0).unwrap();
        for k in 0..6usize {
            let linear = -(k as f64) / (q.w() * q.w()) * q.chi0() / 2.0 * q.tau_c();
            let phase = kerr_hamiltonian_phase(k, &q, q.tau_c()) - linear;
            let c = num_complex::Complex64::from_polar(1.0, -phase);
            let want = if k % 2 == 0 {
                num_complex::Complex64::new(1.0, 0.0)
            } else {
                num_complex::Complex64::new(0.0, -1.0)
            };
            assert!((c - want).norm() < 1e-12);
        }
    }

    #[test]
    fn blockade_scaling() {
        let delta = 2.0 * PI * 270e6;
        let c6 = 2.0 * delta * 3.6e-6f64.powi(6);
        assert_relative_eq!(
            blockade_radius(c6, delta).unwrap(),
            3.6e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            blockade_radius(64.0 * c6, delta).unwrap(),
            7.2e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            blockade_radius(c6, 64.0 * delta).unwrap(),
            1.8e-6,
            max_relative = 1e-12
        );
        assert!(blockade_radius(0.0, delta).is_err());
    }

    #[test]
    fn constant_profile_is_adiabatic() {
        let r = RampProfile::from_fns(1e-8, 2000, |_| 15.0 * MHZ, |_| 270.0 * MHZ).unwrap();
        assert_eq!(adiabaticity_ratio(&r, 165).unwrap(), 0.0);
        assert!(RampProfile::from_fns(0.0, 2000, |_| 1.0, |_| 1.0).is_err());
        assert!(RampProfile::sampled(1.0, vec![0.0; 10], vec![1.0; 10]).is_err());
    }

    #[test]
    fn linear_ramp_ratio_scales_with_inverse_duration() {
        let long = RampProfile::linear_switch_on(18e-9, 15.0 * MHZ, 270.0 * MHZ, 4000).unwrap();
        let short = RampProfile::linear_switch_on(1.8e-9, 15.0 * MHZ, 270.0 * MHZ, 4000).unwrap();
        let a = adiabaticity_ratio(&long, 165).unwrap();
        let b = adiabaticity_ratio(&short, 165).unwrap();
        assert!((a - 0.01).abs() < 0.002, "{a}");
        assert_relative_eq!(b / a, 10.0, max_relative = 1e-9);
        let fine = RampProfile::linear_switch_on(18e-9, 15.0 * MHZ, 270.0 * MHZ, 8000).unwrap();
        assert!((adiabaticity_ratio(&fine, 165).unwrap() / a - 1.0).abs() < 0.01);
    }

    #[test]
    fn sudden_quench_projection() {
        let (om, d, n_e) = (15.0 * MHZ, 270.0 * MHZ, 165);
        let quench = RampProfile::linear_switch_on(1e-15, om, d, 1000).unwrap();
        let p = ground_return_probability(&quench, n_e).unwrap();
        let theta = ((n_e as f64).sqrt() * om / d).atan();
        assert!(
            (p - (1.0 - (theta / 2.0).sin().powi(2))).abs() < 1e-6,
            "{p}"
        );
    }

    #[test]
    fn return_improves_with_slower_ramps() {
        let (om, d, n_e) = (15.0 * MHZ, 270.0 * MHZ, 165);
        let mut last = 0.0;
        for t in [2e-9, 4e-9, 8e-9, 16e-9, 32e-9, 64e-9] {
            let r = RampProfile::sin2_switch_on(t, om, d, 2000).unwrap();
            let p = ground_return_probability(&r, n_e).unwrap();
            assert!(p > last, "{t}: {p} <= {last}");
            last = p;
        }
    }

    #[test]
    fn integrator_matches_perturbative_estimate() {
        let (om, d, n_e) = (15.0 * MHZ, 270.0 * MHZ, 165);
        for t in [10e-9, 18e-9, 30e-9] {
            let r = RampProfile::linear_switch_on(t, om, d, 2000).unwrap();
            let ratio = adiabaticity_ratio(&r, n_e).unwrap();
            assert!(ratio < 0.03);
            let loss = 1.0 - ground_return_probability(&r, n_e).unwrap();
            let est = 1.0 - perturbative_ground_return(&r, n_e).unwrap();
            assert!(loss < 3.0 * est && loss > est / 3.0, "{t}: {loss} vs {est}");
        }
    }

    #[test]
    fn on_hold_off_returns_to_ground() {
        let r =
            RampProfile::linear_on_hold_off(40e-9, 5e-9, 15.0 * MHZ, 270.0 * MHZ, 4000).unwrap();
        assert_eq!(r.omega_r_samples()[r.len() - 1], 0.0);
        let p = ground_return_probability(&r, 165).unwrap();
        assert!(p > 0.999 && p <= 1.0);
    }
}
