//! Detection of energy decoherence with the cat (decay rate, Ramsey
//! visibility, minimum detectable sigma) and the motional leakage check.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::constants::{EV, HBAR};
use crate::error::{invalid, require_non_negative, require_positive, Error, Result};

/// Per-atom energy splitting of the clock transition, joules.
pub const DEFAULT_DELTA_E: f64 = 1.8 * EV;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCatSpec {
    pub n_atoms: usize,
    pub delta_e: f64,
}

impl EnergyCatSpec {
    pub fn new(n_atoms: usize, delta_e: f64) -> Result<Self> {
        if n_atoms == 0 {
            return Err(invalid("n_atoms", "must be at least 1"));
        }
        require_positive("delta_e", delta_e)?;
        Ok(Self { n_atoms, delta_e })
    }

    pub fn total_energy(&self) -> f64 {
        self.n_atoms as f64 * self.delta_e
    }

    /// N Delta E / hbar, rad/s.
    pub fn splitting(&self) -> f64 {
        self.total_energy() / HBAR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    /// Trap loss rate, 1/s.
    pub trap_loss_gamma: f64,
    /// Correlated (common-mode) laser linewidth, rad/s.
    pub correlated_linewidth: f64,
    /// Uncorrelated (per-atom) linewidth, rad/s.
    pub uncorrelated_linewidth: f64,
    /// Energy-decoherence time scale sigma, s.
    pub sigma: f64,
}

impl NoiseModel {
    pub fn new(
        trap_loss_gamma: f64,
        correlated_linewidth: f64,
        uncorrelated_linewidth: f64,
        sigma: f64,
    ) -> Result<Self> {
        require_non_negative("trap_loss_gamma", trap_loss_gamma)?;
        require_non_negative("correlated_linewidth", correlated_linewidth)?;
        require_non_negative("uncorrelated_linewidth", uncorrelated_linewidth)?;
        require_non_negative("sigma", sigma)?;
        Ok(Self {
            trap_loss_gamma,
            correlated_linewidth,
            uncorrelated_linewidth,
            sigma,
        })
    }

    pub fn quiet() -> Self {
        Self {
            trap_loss_gamma: 0.0,
            correlated_linewidth: 0.0,
            uncorrelated_linewidth: 0.0,
            sigma: 0.0,
        }
    }
}

/// gamma_E = sigma (N Delta E / hbar)^2.
pub fn energy_decoherence_rate(spec: &EnergyCatSpec, sigma: f64) -> Result<f64> {
    require_non_negative("sigma", sigma)?;
    Ok(sigma * spec.splitting().powi(2))
}

/// Exponent of the visibility loss from everything except energy decoherence.
fn baseline_exponent(spec: &EnergyCatSpec, noise: &NoiseModel, t: f64) -> f64 {
    let n = spec.n_atoms as f64;
    n * noise.trap_loss_gamma * t
        + (n * n * noise.correlated_linewidth.powi(2) + n * noise.uncorrelated_linewidth.powi(2))
            * t
            * t
}

pub fn ramsey_visibility(spec: &EnergyCatSpec, noise: &NoiseModel, t: f64) -> Result<f64> {
    require_non_negative("t", t)?;
    let gamma_e = energy_decoherence_rate(spec, noise.sigma)?;
    Ok((-(gamma_e * t) - baseline_exponent(spec, noise, t)).exp())
}

/// Chooses the Ramsey waiting time at which sigma is inferred.
pub trait WaitingTimePolicy {
    /// None when no noise limits the waiting time.
    fn waiting_time(&self, spec: &EnergyCatSpec, noise: &NoiseModel) -> Result<Option<f64>>;
}

/// Longest time keeping the baseline visibility at 1/e.
#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineOneOverE;

impl WaitingTimePolicy for BaselineOneOverE {
    fn waiting_time(&self, spec: &EnergyCatSpec, noise: &NoiseModel) -> Result<Option<f64>> {
        let n = spec.n_atoms as f64;
        let a =
            n * n * noise.correlated_linewidth.powi(2) + n * noise.uncorrelated_linewidth.powi(2);
        let b = n * noise.trap_loss_gamma;
        if a == 0.0 && b == 0.0 {
            return Ok(None);
        }
        let t = if a == 0.0 {
            1.0 / b
        } else {
            2.0 / (b + (b * b + 4.0 * a).sqrt())
        };
        Ok(Some(t))
    }
}

/// t = t_ref N_ref / N, keeping loss and correlated phase diffusion fixed as N changes.
#[derive(Debug, Clone, Copy)]
pub struct InverseN {
    pub n_ref: usize,
    pub t_ref: f64,
}

impl WaitingTimePolicy for InverseN {
    fn waiting_time(&self, spec: &EnergyCatSpec, _noise: &NoiseModel) -> Result<Option<f64>> {
        require_positive("t_ref", self.t_ref)?;
        Ok(Some(self.t_ref * self.n_ref as f64 / spec.n_atoms as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SigmaBound {
    Bounded {
        t_star: f64,
        sigma_min: f64,
        baseline_visibility: f64,
        loss_exponent: f64,
        correlated_exponent: f64,
        uncorrelated_exponent: f64,
    },
    /// No competing noise: any sigma > 0 is detectable.
    Unbounded,
}

impl SigmaBound {
    pub fn sigma_min(&self) -> Option<f64> {
        match self {
            SigmaBound::Bounded { sigma_min, .. } => Some(*sigma_min),
            SigmaBound::Unbounded => None,
        }
    }
}

/// Smallest sigma whose damping factor reaches 1/e at the policy's waiting time.
pub fn min_detectable_sigma(
    spec: &EnergyCatSpec,
    noise: &NoiseModel,
    policy: &dyn WaitingTimePolicy,
) -> Result<SigmaBound> {
    let Some(t) = policy.waiting_time(spec, noise)? else {
        return Ok(SigmaBound::Unbounded);
    };
    require_positive("t_star", t)?;
    let base = baseline_exponent(spec, noise, t);
    if base > 1.0 + 1e-12 {
        return Err(invalid(
            "noise",
            format!("baseline visibility exp(-{base:.3}) below 1/e at the chosen waiting time"),
        ));
    }
    let n = spec.n_atoms as f64;
    Ok(SigmaBound::Bounded {
        t_star: t,
        sigma_min: 1.0 / (spec.splitting().powi(2) * t),
        baseline_visibility: (-base).exp(),
        loss_exponent: n * noise.trap_loss_gamma * t,
        correlated_exponent: (n * noise.correlated_linewidth * t).powi(2),
        uncorrelated_exponent: n * (noise.uncorrelated_linewidth * t).powi(2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotionParams {
    /// Rabi frequency of the clock rotation, rad/s.
    pub omega_e: f64,
    pub lamb_dicke: f64,
    /// Trap frequency, rad/s.
    pub omega_tr: f64,
}

/// Lamb-Dicke regime bound for [`phonon_leakage`].
pub const MAX_LAMB_DICKE: f64 = 0.3;

impl MotionParams {
    pub fn new(omega_e: f64, lamb_dicke: f64, omega_tr: f64) -> Result<Self> {
        require_positive("omega_e", omega_e)?;
        require_non_negative("lamb_dicke", lamb_dicke)?;
        require_positive("omega_tr", omega_tr)?;
        if lamb_dicke >= MAX_LAMB_DICKE {
            return Err(invalid(
                "lamb_dicke",
                format!("{lamb_dicke} outside the Lamb-Dicke regime"),
            ));
        }
        Ok(Self {
            omega_e,
            lamb_dicke,
            omega_tr,
        })
    }

    /// eta = k s / sqrt(2) from a wavevector and the ground-state spread.
    pub fn from_wavevector(
        omega_e: f64,
        wavevector: f64,
        spread: f64,
        omega_tr: f64,
    ) -> Result<Self> {
        require_positive("wavevector", wavevector)?;
        require_positive("spread", spread)?;
        Self::new(omega_e, wavevector * spread / 2f64.sqrt(), omega_tr)
    }

    /// Rotation Hamiltonian on (|g,0>, |e,0>, |e,1>).
    pub fn hamiltonian(&self) -> Matrix3<f64> {
        let (o, eo) = (self.omega_e, self.lamb_dicke * self.omega_e);
        Matrix3::new(0.0, o, eo, o, 0.0, 0.0, eo, 0.0, self.omega_tr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhononLeakage {
    /// |c(e,1)|^2 / |c(g,0)|^2 in the dressed eigenstates carrying the |g,0> weight.
    pub exact: f64,
    /// (eta Omega_e / omega_tr)^2.
    pub perturbative: f64,
    /// Long-time average of P(e,1) / P(g,0) after a sudden switch-on from |g,0>.
    pub sudden_switch: f64,
}

pub fn phonon_leakage(m: &MotionParams) -> Result<PhononLeakage> {
    let eig = SymmetricEigen::new(m.hamiltonian());
    let v = eig.eigenvectors;
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        v[(0, b)]
            .abs()
            .partial_cmp(&v[(0, a)].abs())
            .expect("finite eigenvectors")
    });
    let exact = order[..2]
        .iter()
        .map(|&j| (v[(2, j)] / v[(0, j)]).powi(2))
        .sum::<f64>()
        / 2.0;
    if !exact.is_finite() {
        return Err(Error::Numerical {
            op: "phonon_leakage",
            reason: "degenerate eigenvectors".into(),
        });
    }
    let avg_e1: f64 = (0..3).map(|j| (v[(2, j)] * v[(0, j)]).powi(2)).sum();
    let avg_g0: f64 = (0..3).map(|j| v[(0, j)].powi(4)).sum();
    Ok(PhononLeakage {
        exact,
        perturbative: (m.lamb_dicke * m.omega_e / m.omega_tr).powi(2),
        sudden_switch: avg_e1 / avg_g0,
    })
}
