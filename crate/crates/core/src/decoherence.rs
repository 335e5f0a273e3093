//! Rydberg-decay decoherence of the cat state: event probabilities, the
//! decay fidelity F_dc, de-excitation dephasing F_de, the dephasing branch
//! and blackbody survival.

use num_complex::Complex64;
use serde::Serialize;

use crate::dressing::{light_shift_quartic, DressingParams};
use crate::error::{invalid, require_non_negative, require_positive, Result};
use crate::quad::composite_gauss_legendre;
use crate::spinsim::{css_state, rotate_y, CollectiveState, CssParams};

/// Above this combined loss + de-excitation mean the single-event picture is flagged.
pub const SINGLE_EVENT_LIMIT: f64 = 0.5;

/// How a decaying Rydberg admixture ends up: lost from the trap, returned to
/// the ground level, or dephased within the qubit manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchingModel {
    pub loss_fraction: f64,
    pub deexcitation_fraction: f64,
    pub dephasing_fraction: f64,
}

impl Default for BranchingModel {
    fn default() -> Self {
        Self {
            loss_fraction: 0.60,
            deexcitation_fraction: 0.35,
            dephasing_fraction: 0.05,
        }
    }
}

impl BranchingModel {
    pub fn new(loss: f64, deexcitation: f64, dephasing: f64) -> Result<Self> {
        for (f, v) in [
            ("loss_fraction", loss),
            ("deexcitation_fraction", deexcitation),
            ("dephasing_fraction", dephasing),
        ] {
            require_non_negative(f, v)?;
        }
        if (loss + deexcitation + dephasing - 1.0).abs() > 1e-12 {
            return Err(invalid("branching", "fractions must sum to 1"));
        }
        Ok(Self {
            loss_fraction: loss,
            deexcitation_fraction: deexcitation,
            dephasing_fraction: dephasing,
        })
    }

    /// Share of decays that remove an atom from the qubit manifold.
    pub fn destructive_fraction(&self) -> f64 {
        self.loss_fraction + self.deexcitation_fraction
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayParams {
    /// Bare Rydberg depopulation rate, 1/s.
    pub gamma_r: f64,
    pub w: f64,
    pub tau_c: f64,
    pub n_atoms: usize,
}

impl DecayParams {
    pub fn new(gamma_r: f64, w: f64, tau_c: f64, n_atoms: usize) -> Result<Self> {
        require_non_negative("gamma_r", gamma_r)?;
        require_positive("w", w)?;
        require_positive("tau_c", tau_c)?;
        if n_atoms == 0 {
            return Err(invalid("n_atoms", "must be at least 1"));
        }
        Ok(Self {
            gamma_r,
            w,
            tau_c,
            n_atoms,
        })
    }

    /// Decay rate of the dressed level, gamma_r w^2.
    pub fn gamma_dressed(&self) -> f64 {
        self.gamma_r * self.w * self.w
    }

    /// Mean number of decays of `fraction` over tau_c, with N/2 atoms excited on average.
    pub fn lambda(&self, fraction: f64) -> f64 {
        fraction * self.gamma_dressed() * self.n_atoms as f64 / 2.0 * self.tau_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventProbabilities {
    pub p0: f64,
    pub p_loss: f64,
    pub p_deexcitation: f64,
    /// Whether lambda_loss + lambda_deexcitation stays inside the single-event regime.
    pub single_event: bool,
}

/// P_k = lambda_k exp(-lambda_k) and P_0 = 1 - P_loss - P_deexcitation.
pub fn event_probabilities(p: &DecayParams, b: &BranchingModel) -> EventProbabilities {
    let ll = p.lambda(b.loss_fraction);
    let ld = p.lambda(b.deexcitation_fraction);
    let single_event = ll + ld <= SINGLE_EVENT_LIMIT;
    if !single_event {
        log::warn!(
            "mean decay count {:.3} leaves the single-event regime",
            ll + ld
        );
    }
    let p_loss = ll * (-ll).exp();
    let p_deexcitation = ld * (-ld).exp();
    EventProbabilities {
        p0: (1.0 - p_loss - p_deexcitation).clamp(0.0, 1.0),
        p_loss,
        p_deexcitation,
        single_event,
    }
}

/// F_dc = exp(-(loss + deexcitation) (N/2) gamma_dressed tau_c) with the default branching.
pub fn f_dc(p: &DecayParams) -> f64 {
    f_dc_with(p, &BranchingModel::default())
}

pub fn f_dc_with(p: &DecayParams, b: &BranchingModel) -> f64 {
    (-p.lambda(b.destructive_fraction())).exp()
}

/// Probability that at least one dephasing event flips a qubit sign during tau_c.
pub fn flip_probability(p: &DecayParams, b: &BranchingModel) -> f64 {
    -(-p.lambda(b.dephasing_fraction)).exp_m1()
}

/// P_BBR(0) = exp(-(N/2) w^2 Gamma_BBR tau_c).
pub fn p_bbr_zero(n_atoms: usize, w: f64, gamma_bbr: f64, tau_c: f64) -> Result<f64> {
    require_non_negative("gamma_bbr", gamma_bbr)?;
    require_positive("w", w)?;
    require_positive("tau_c", tau_c)?;
    Ok((-(n_atoms as f64) / 2.0 * w * w * gamma_bbr * tau_c).exp())
}

/// Dephasing fidelity after one de-excitation at a uniformly distributed time in
/// [0, tau_c], with energies E(N_e) of the atoms before and after the event.
pub fn de_excitation_fidelity(
    n: usize,
    before: impl Fn(usize) -> f64,
    after: impl Fn(usize) -> f64,
    tau_c: f64,
) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n_atoms", "needs N >= 2"));
    }
    require_positive("tau_c", tau_c)?;
    let start = css_state(n, &CssParams::new(std::f64::consts::PI / 2.0, 0.0)?)?;
    // weights |c_k|^2 k of the branch state |k - 1>
    let weights: Vec<f64> = start
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm_sqr() * k as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let overlap_sqr = |t: f64| {
        let a: Complex64 = (1..=n)
            .map(|k| {
                let phase = (before(k) - after(k - 1)) * t;
                weights[k] / total * Complex64::from_polar(1.0, -phase)
            })
            .sum();
        a.norm_sqr()
    };
    let average = |panels: usize| {
        composite_gauss_legendre(panels, 8, 0.0, tau_c)
            .iter()
            .map(|&(t, wt)| wt * overlap_sqr(t))
            .sum::<f64>()
            / tau_c
    };
    let mut panels = (n / 2).max(8);
    let mut value = average(panels);
    for _ in 0..8 {
        panels *= 2;
        let finer = average(panels);
        let converged = (finer - value).abs() < 1e-6;
        value = finer;
        if converged {
            return Ok(value.clamp(0.0, 1.0));
        }
    }
    Err(crate::error::Error::NotConverged {
        op: "f_de",
        reason: format!("time average unconverged at {panels} panels"),
    })
}

/// F_de with Kerr energies for the N-atom cat.
pub fn f_de(n: usize, params: &DressingParams) -> Result<f64> {
    let (w, delta) = (params.w(), params.delta());
    let e = |k: usize| light_shift_quartic(k, w, delta);
    de_excitation_fidelity(n, e, e, params.tau_c())
}

/// Fidelity after losing one Rydberg-admixed atom: the remaining N - 1 atoms
/// carry N_e - 1 excitations and keep evolving under the same Kerr energies.
pub fn f_lost(n: usize, params: &DressingParams) -> Result<f64> {
    let (w, delta) = (params.w(), params.delta());
    let e = |k: usize| light_shift_quartic(k, w, delta);
    de_excitation_fidelity(n, e, e, params.tau_c())
}

/// The two product-state terms of the cat after a sign flip of the first atom's
/// excited component, rotated by pi/2 about y.
#[derive(Debug, Clone, Serialize)]
pub struct DephasingBranch {
    pub n_atoms: usize,
    /// Rotated single-atom states (first atom, remaining atoms) of the two terms,
    /// as (ground, excited) amplitudes.
    pub terms: [([Complex64; 2], [Complex64; 2]); 2],
    /// Whether the terms are |g>|e...e> and |e>|g...g> up to phases.
    pub maps_to_w_like_pair: bool,
}

fn qubit(g: Complex64, e: Complex64) -> CollectiveState {
    CollectiveState::normalized(1, vec![g, e]).expect("nonzero qubit")
}

pub fn dephasing_branch(n: usize) -> Result<DephasingBranch> {
    if n < 2 {
        return Err(invalid("n_atoms", "needs N >= 2"));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [Complex64::new(r, 0.0), Complex64::new(r, 0.0)];
    let minus = [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)];
    let flip = |s: [Complex64; 2]| [s[0], -s[1]];
    let rot = |s: [Complex64; 2]| {
        let q = rotate_y(&qubit(s[0], s[1]), std::f64::consts::FRAC_PI_2);
        [q.amplitudes()[0], q.amplitudes()[1]]
    };
    let terms = [(rot(flip(plus)), rot(plus)), (rot(flip(minus)), rot(minus))];
    let is = |s: [Complex64; 2], excited: bool| {
        let (on, off) = if excited { (s[1], s[0]) } else { (s[0], s[1]) };
        (on.norm() - 1.0).abs() < 1e-12 && off.norm() < 1e-12
    };
    let maps = (is(terms[0].0, true)
        && is(terms[0].1, false)
        && is(terms[1].0, false)
        && is(terms[1].1, true))
        || (is(terms[0].0, false)
            && is(terms[0].1, true)
            && is(terms[1].0, true)
            && is(terms[1].1, false));
    Ok(DephasingBranch {
        n_atoms: n,
        terms,
        maps_to_w_like_pair: maps,
    })
}
