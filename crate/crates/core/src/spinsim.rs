//! Collective spin states of N two-level atoms in the symmetric Dicke basis.
//!
//! Index `k` of an amplitude vector counts excited atoms (k = N_e = J + M), so
//! `k = 0` is the all-ground state. Spin operators are the factor-1/2 Pauli
//! operators with `e` as spin up.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Result};
use crate::quad;

/// Tolerance used when validating externally supplied amplitude vectors.
pub const NORM_TOL: f64 = 1e-10;

/// Amplitudes over the Dicke states |N; N_e>, N_e = 0..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveState {
    n_atoms: usize,
    amps: Vec<Complex64>,
}

impl CollectiveState {
    /// Build a state from amplitudes that are already normalized.
    pub fn new(n_atoms: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_atoms == 0 {
            return Err(invalid("n_atoms", "must be at least 1"));
        }
        if amps.len() != n_atoms + 1 {
            return Err(invalid(
                "amplitudes",
                format!("expected {} entries, got {}", n_atoms + 1, amps.len()),
            ));
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("amplitudes", "non-finite entry"));
        }
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid("amplitudes", format!("norm {norm} is not 1")));
        }
        Ok(Self { n_atoms, amps })
    }

    /// Build a state from arbitrary nonzero amplitudes, rescaling to unit norm.
    pub fn normalized(n_atoms: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amps).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("amplitudes", "zero or non-finite norm"));
        }
        for c in &mut amps {
            *c /= norm;
        }
        Self::new(n_atoms, amps)
    }

    /// The Dicke state with exactly `n_e` excitations.
    pub fn dicke(n_atoms: usize, n_e: usize) -> Result<Self> {
        if n_e > n_atoms {
            return Err(invalid("n_e", format!("{n_e} exceeds N = {n_atoms}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n_atoms + 1];
        amps[n_e] = Complex64::new(1.0, 0.0);
        Self::new(n_atoms, amps)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Populations |c_k|^2.
    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n_atoms != other.n_atoms {
            return Err(invalid(
                "state",
                format!("atom numbers differ: {} vs {}", self.n_atoms, other.n_atoms),
            ));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// Multiply each amplitude by exp(-i phase(k)). Norm-preserving.
    pub fn apply_phases(&self, phase: impl Fn(usize) -> f64) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -phase(k)))
            .collect();
        Self {
            n_atoms: self.n_atoms,
            amps,
        }
    }

    /// Excited-state population expectation <N_e>.
    pub fn mean_excitation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c.norm_sqr())
            .sum()
    }
}

impl Serialize for CollectiveState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n_atoms: usize,
            amplitudes: &'a [(f64, f64)],
        }
        let pairs: Vec<(f64, f64)> = self.amps.iter().map(|c| (c.re, c.im)).collect();
        Repr {
            n_atoms: self.n_atoms,
            amplitudes: &pairs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CollectiveState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n_atoms: usize,
            amplitudes: Vec<(f64, f64)>,
        }
        let r = Repr::deserialize(d)?;
        let amps = r
            .amplitudes
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        CollectiveState::new(r.n_atoms, amps).map_err(serde::de::Error::custom)
    }
}

/// Bloch-sphere direction of a coherent spin state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CssParams {
    theta: f64,
    phi: f64,
}

impl CssParams {
    /// `theta` in [0, pi]; `phi` is reduced to [0, 2 pi).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        require_finite("theta", theta)?;
        require_finite("phi", phi)?;
        if !(0.0..=PI).contains(&theta) {
            return Err(invalid("theta", format!("{theta} outside [0, pi]")));
        }
        Ok(Self {
            theta,
            phi: wrap_angle(phi),
        })
    }

    /// Direction for an arbitrary polar angle, folded back onto [0, pi].
    pub fn folded(theta: f64, phi: f64) -> Result<Self> {
        require_finite("theta", theta)?;
        require_finite("phi", phi)?;
        let t = wrap_angle(theta);
        if t <= PI {
            Self::new(t, phi)
        } else {
            Self::new(2.0 * PI - t, phi + PI)
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// eta = tan(theta/2) exp(-i phi).
    pub fn eta(&self) -> Complex64 {
        Complex64::from_polar((self.theta / 2.0).tan(), -self.phi)
    }

    /// The diametrically opposite direction.
    pub fn antipode(&self) -> Self {
        Self {
            theta: PI - self.theta,
            phi: wrap_angle(self.phi + PI),
        }
    }
}

/// Two antipodal coherent states and their relative phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealCatParams {
    pub direction: CssParams,
    alpha: f64,
}

impl IdealCatParams {
    pub fn new(theta: f64, phi: f64, alpha: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        Ok(Self {
            direction: CssParams::new(theta, phi)?,
            alpha: wrap_angle(alpha),
        })
    }

    pub fn theta(&self) -> f64 {
        self.direction.theta
    }

    pub fn phi(&self) -> f64 {
        self.direction.phi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Reduce an angle to [0, 2 pi).
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// ln C(n, k).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("n_atoms", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Magnitudes sqrt(C(N,k)) cos^{N-k}(theta/2) sin^k(theta/2), assembled in log space.
fn css_magnitudes(n: usize, theta: f64) -> Vec<f64> {
    let (lc, ls) = (
        (theta / 2.0).cos().abs().ln(),
        (theta / 2.0).sin().abs().ln(),
    );
    let log_term = |power: usize, ln_x: f64| if power == 0 { 0.0 } else { power as f64 * ln_x };
    let logs: Vec<f64> = (0..=n)
        .map(|k| 0.5 * ln_binomial(n, k) + log_term(n - k, lc) + log_term(k, ls))
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut mags: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let norm = mags.iter().map(|m| m * m).sum::<f64>().sqrt();
    for m in &mut mags {
        *m /= norm;
    }
    mags
}

/// Coherent spin state |theta, phi>.
pub fn css_state(n: usize, p: &CssParams) -> Result<CollectiveState> {
    check_n(n)?;
    let mags = css_magnitudes(n, p.theta);
    let amps = mags
        .iter()
        .enumerate()
        .map(|(k, &m)| Complex64::from_polar(m, -(k as f64) * p.phi))
        .collect();
    CollectiveState::new(n, amps)
}

/// |<theta1,phi1|theta2,phi2>|^2 for N spins from the single-spin overlap.
pub fn css_overlap_sqr(n: usize, a: &CssParams, b: &CssParams) -> f64 {
    let single = |p: &CssParams| {
        (
            Complex64::new((p.theta / 2.0).cos(), 0.0),
            Complex64::from_polar((p.theta / 2.0).sin(), -p.phi),
        )
    };
    let (ga, ea) = single(a);
    let (gb, eb) = single(b);
    let s = ga.conj() * gb + ea.conj() * eb;
    s.norm_sqr().powi(n as i32)
}

/// (|theta,phi> + e^{i alpha}|pi-theta, phi+pi>), normalized including the CSS overlap.
pub fn ideal_cat(n: usize, p: &IdealCatParams) -> Result<CollectiveState> {
    check_n(n)?;
    let a = css_state(n, &p.direction)?;
    let b = css_state(n, &p.direction.antipode())?;
    let ph = Complex64::from_polar(1.0, p.alpha);
    let amps: Vec<Complex64> = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x + ph * y)
        .collect();
    CollectiveState::normalized(n, amps)
}

/// |<a|b>|^2.
pub fn fidelity(a: &CollectiveState, b: &CollectiveState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// exp(-i angle S_z).
pub fn rotate_z(state: &CollectiveState, angle: f64) -> CollectiveState {
    let half = state.n_atoms as f64 / 2.0;
    state.apply_phases(|k| angle * (k as f64 - half))
}

/// Eigendecomposition of S_x for N spins; eigenvalues are snapped to the exact ladder -N/2..N/2.
fn sx_eigen(n: usize) -> (DMatrix<f64>, Vec<f64>) {
    let dim = n + 1;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..n {
        let v = 0.5 * (((n - k) * (k + 1)) as f64).sqrt();
        m[(k + 1, k)] = v;
        m[(k, k + 1)] = v;
    }
    let eig = SymmetricEigen::new(m);
    let exact: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| (l + n as f64 / 2.0).round() - n as f64 / 2.0)
        .collect();
    (eig.eigenvectors, exact)
}

/// exp(-i angle S_x), a rotation about the x axis of the collective Bloch sphere.
pub fn rotate_x(state: &CollectiveState, angle: f64) -> CollectiveState {
    let n = state.n_atoms;
    let (v, lambda) = sx_eigen(n);
    let dim = n + 1;
    let mut proj = vec![Complex64::new(0.0, 0.0); dim];
    for (j, p) in proj.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..dim {
            s += v[(k, j)] * state.amps[k];
        }
        *p = s * Complex64::from_polar(1.0, -angle * lambda[j]);
    }
    let amps = (0..dim)
        .map(|k| (0..dim).map(|j| v[(k, j)] * proj[j]).sum())
        .collect();
    CollectiveState { n_atoms: n, amps }
}

/// exp(-i angle S_y), using S_y = R_z(pi/2) S_x R_z(-pi/2).
pub fn rotate_y(state: &CollectiveState, angle: f64) -> CollectiveState {
    rotate_z(&rotate_x(&rotate_z(state, -PI / 2.0), angle), PI / 2.0)
}

/// Husimi Q function (N+1)/(4 pi) |<theta,phi|psi>|^2.
pub fn husimi_q(state: &CollectiveState, theta: f64, phi: f64) -> Result<f64> {
    let p = CssParams::folded(theta, phi)?;
    let probe = css_state(state.n_atoms, &p)?;
    let n = state.n_atoms as f64;
    Ok((n + 1.0) / (4.0 * PI) * fidelity(&probe, state)?)
}

/// Q on a product grid of `n_theta` Gauss-Legendre nodes in cos(theta) and
/// `n_phi` uniform azimuths. Returns (theta, phi, weight, Q) tuples; the
/// weights integrate over the unit sphere.
pub fn husimi_grid(
    state: &CollectiveState,
    n_theta: usize,
    n_phi: usize,
) -> Result<Vec<(f64, f64, f64, f64)>> {
    if n_theta == 0 || n_phi == 0 {
        return Err(invalid("grid", "needs at least one point per axis"));
    }
    let nodes = quad::gauss_legendre(n_theta, -1.0, 1.0);
    let dphi = 2.0 * PI / n_phi as f64;
    let n = state.n_atoms;
    let pref = (n as f64 + 1.0) / (4.0 * PI);
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for &(x, wx) in &nodes {
        let theta = x.clamp(-1.0, 1.0).acos();
        let mags = css_magnitudes(n, theta);
        // <theta,phi|psi> = sum_k mags_k e^{+i k phi} c_k, evaluated for every phi.
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let mut s = Complex64::new(0.0, 0.0);
            for (k, (&m, c)) in mags.iter().zip(&state.amps).enumerate() {
                s += m * Complex64::from_polar(1.0, k as f64 * phi) * c;
            }
            out.push((theta, phi, wx * dphi, pref * s.norm_sqr()));
        }
    }
    Ok(out)
}

/// Integral of Q over the sphere on the default 2(N+1) x 2(N+1) grid.
pub fn husimi_normalization(state: &CollectiveState) -> Result<f64> {
    let m = 2 * (state.n_atoms + 1);
    Ok(husimi_grid(state, m, m)?.iter().map(|p| p.2 * p.3).sum())
}

impl From<CollectiveState> for Vec<Complex64> {
    fn from(s: CollectiveState) -> Self {
        s.amps
    }
}
