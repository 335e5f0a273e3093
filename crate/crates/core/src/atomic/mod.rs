//! Strontium Rydberg structure in the single-active-electron quantum-defect
//! model: level energies, radial and angular matrix elements, Einstein A
//! coefficients, radiative lifetimes and blackbody-induced rates.

pub mod radial;
pub mod wigner;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

pub use radial::{radial_integral, radial_wavefunction, RadialGrid, RadialWavefunction};
pub use wigner::wigner6j;

use crate::constants::{BOHR_RADIUS, C_LIGHT, EPSILON_0, E_CHARGE, HBAR, K_B};
use crate::data::AtomData;
use crate::error::{invalid, require_non_negative, Error, Result};

/// Orbital angular momentum of the 5s core electron.
pub const CORE_L: u32 = 0;

/// Lowest principal number of the 5snl series included in channel sums.
pub const SERIES_MIN_N: u32 = 5;

/// Channel sums run up to n + CHANNEL_EXTRA_N.
pub const CHANNEL_EXTRA_N: u32 = 20;

/// Channel sums skip untabulated levels whose higher-order Ritz terms exceed this.
pub const RITZ_CORRECTION_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RydbergLevel {
    pub series: String,
    pub n: u32,
    pub l: u32,
    pub s_total: u32,
    pub l_total: u32,
    pub j_total: u32,
    pub defect: f64,
    pub n_star: f64,
    /// Energy relative to the ionization limit, rad/s.
    pub energy: f64,
}

impl RydbergLevel {
    /// Level with an explicit effective quantum number.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        series: &str,
        n: u32,
        l: u32,
        s_total: u32,
        l_total: u32,
        j_total: u32,
        n_star: f64,
        rydberg_cm: f64,
    ) -> Result<Self> {
        if j_total + s_total < l_total || j_total > l_total + s_total || j_total + l_total < s_total
        {
            return Err(invalid(
                "j_total",
                format!("J = {j_total} violates |L - S| <= J <= L + S"),
            ));
        }
        let defect = n as f64 - n_star;
        if !(n_star > 0.0 && defect >= 0.0 && defect < n as f64) {
            return Err(invalid(
                "n_star",
                format!("n* = {n_star} incompatible with n = {n}"),
            ));
        }
        Ok(Self {
            series: series.to_string(),
            n,
            l,
            s_total,
            l_total,
            j_total,
            defect,
            n_star,
            energy: -2.0 * std::f64::consts::PI * C_LIGHT * rydberg_cm * 100.0 / (n_star * n_star),
        })
    }

    /// Level from the quantum-defect series, or from a measured energy when one is tabulated.
    pub fn from_data(data: &AtomData, series: &str, n: u32) -> Result<Self> {
        let s = data.series(series)?;
        let n_star = match data.levels.get(&(series.to_string(), n)) {
            Some(&e) => (data.rydberg_cm / (data.ionization_cm - e)).sqrt(),
            None => n as f64 - s.defect(n),
        };
        Self::custom(
            series,
            n,
            s.l,
            s.s_total,
            s.l_total,
            s.j_total,
            n_star,
            data.rydberg_cm,
        )
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.n, self.series)
    }
}

/// Angular part of |<i|r|f>|^2 for two-electron LS-coupled levels with an s core electron:
/// max(l_i, l_f) (2L_f+1)(2J_f+1)(2L_i+1) {J_f 1 J_i; L_i S L_f}^2 {L_f 1 L_i; l_i l_core l_f}^2.
pub fn angular_factor(i: &RydbergLevel, f: &RydbergLevel) -> Result<f64> {
    if i.s_total != f.s_total {
        return Ok(0.0);
    }
    let w1 = wigner6j(
        f.j_total as f64,
        1.0,
        i.j_total as f64,
        i.l_total as f64,
        i.s_total as f64,
        f.l_total as f64,
    )?;
    let w2 = wigner6j(
        f.l_total as f64,
        1.0,
        i.l_total as f64,
        i.l as f64,
        CORE_L as f64,
        f.l as f64,
    )?;
    Ok(i.l.max(f.l) as f64
        * (2 * f.l_total + 1) as f64
        * (2 * f.j_total + 1) as f64
        * (2 * i.l_total + 1) as f64
        * (w1 * w1)
        * (w2 * w2))
}

/// A = omega^3 |<i|r|f>|^2 (e a_0)^2 / (3 pi eps_0 hbar c^3), with the squared
/// matrix element in atomic units and omega = (E_i - E_f)/hbar > 0.
pub fn einstein_a(omega: f64, radial_me: f64, angular: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(invalid(
            "omega",
            format!("spontaneous decay needs E_f < E_i, got omega = {omega}"),
        ));
    }
    require_non_negative("angular_factor", angular)?;
    let d2 = angular * radial_me * radial_me * (E_CHARGE * BOHR_RADIUS).powi(2);
    Ok(omega.powi(3) * d2 / (3.0 * std::f64::consts::PI * EPSILON_0 * HBAR * C_LIGHT.powi(3)))
}

/// Mean photon number 1/(exp(hbar |omega| / k_B T) - 1); zero at T = 0.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(invalid(
            "temperature",
            format!("must be non-negative, got {temperature}"),
        ));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega.abs() / (K_B * temperature)).exp_m1())
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionRecord {
    pub initial: RydbergLevel,
    pub final_level: RydbergLevel,
    /// (E_i - E_f)/hbar; negative for upward transitions.
    pub omega: f64,
    pub radial_me: f64,
    pub angular_factor: f64,
    /// Einstein A at |omega| with the initial level's angular factor.
    pub a_coeff: f64,
}

impl TransitionRecord {
    pub fn from_parts(
        initial: RydbergLevel,
        final_level: RydbergLevel,
        radial_me: f64,
    ) -> Result<Self> {
        let omega = initial.energy - final_level.energy;
        let angular = angular_factor(&initial, &final_level)?;
        let a_coeff = if omega == 0.0 {
            0.0
        } else {
            einstein_a(omega.abs(), radial_me, angular)?
        };
        Ok(Self {
            initial,
            final_level,
            omega,
            radial_me,
            angular_factor: angular,
            a_coeff,
        })
    }

    pub fn is_decay(&self) -> bool {
        self.omega > 0.0
    }

    /// Blackbody-stimulated rate A / (exp(hbar |omega| / k_B T) - 1).
    pub fn b_coeff(&self, temperature: f64) -> Result<f64> {
        Ok(self.a_coeff * bose_occupation(self.omega, temperature)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelRate {
    pub label: String,
    pub rate: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lifetime {
    pub tau: f64,
    pub gamma: f64,
    pub channels: Vec<ChannelRate>,
}

fn with_fractions(rates: Vec<(String, f64)>, total: f64) -> Vec<ChannelRate> {
    rates
        .into_iter()
        .map(|(label, rate)| ChannelRate {
            label,
            rate,
            fraction: if total > 0.0 { rate / total } else { 0.0 },
        })
        .collect()
}

/// Radiative lifetime 1 / sum A over the downward channels.
pub fn lifetime_from(channels: &[TransitionRecord]) -> Result<Lifetime> {
    let rates: Vec<(String, f64)> = channels
        .iter()
        .filter(|t| t.is_decay())
        .map(|t| (t.final_level.label(), t.a_coeff))
        .collect();
    if rates.is_empty() {
        return Err(invalid("channels", "no downward channel"));
    }
    let gamma: f64 = rates.iter().map(|r| r.1).sum();
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Numerical {
            op: "lifetime",
            reason: format!("total decay rate {gamma}"),
        });
    }
    Ok(Lifetime {
        tau: 1.0 / gamma,
        gamma,
        channels: with_fractions(rates, gamma),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BbrRate {
    pub temperature: f64,
    pub gamma: f64,
    pub channels: Vec<ChannelRate>,
}

/// Gamma_BBR = sum over all channels (up and down) of A / (exp(hbar |omega| / k_B T) - 1).
pub fn bbr_from(channels: &[TransitionRecord], temperature: f64) -> Result<BbrRate> {
    if !(temperature >= 0.0) {
        return Err(invalid(
            "temperature",
            format!("must be non-negative, got {temperature}"),
        ));
    }
    let rates = channels
        .iter()
        .map(|t| Ok((t.final_level.label(), t.b_coeff(temperature)?)))
        .collect::<Result<Vec<_>>>()?;
    let gamma = rates.iter().map(|r| r.1).sum();
    Ok(BbrRate {
        temperature,
        gamma,
        channels: with_fractions(rates, gamma),
    })
}

/// Level builder with a shared, internally synchronized wavefunction cache.
#[derive(Debug)]
pub struct AtomModel {
    data: AtomData,
    grid: RadialGrid,
    cache: Mutex<HashMap<(u64, u32), Arc<RadialWavefunction>>>,
}

impl AtomModel {
    pub fn new(data: AtomData, grid: RadialGrid) -> Self {
        Self {
            data,
            grid,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn data(&self) -> &AtomData {
        &self.data
    }

    pub fn level(&self, series: &str, n: u32) -> Result<RydbergLevel> {
        RydbergLevel::from_data(&self.data, series, n)
    }

    pub fn wavefunction(&self, level: &RydbergLevel) -> Result<Arc<RadialWavefunction>> {
        let key = (level.n_star.to_bits(), level.l);
        if let Some(wf) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(wf.clone());
        }
        let wf = Arc::new(radial_wavefunction(level.n_star, level.l, &self.grid)?);
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key, wf.clone());
        Ok(wf)
    }

    /// Dipole radial element <n_i l_i | r | n_f l_f> in Bohr radii.
    pub fn radial_matrix_element(&self, i: &RydbergLevel, f: &RydbergLevel) -> Result<f64> {
        if i.l.abs_diff(f.l) != 1 {
            return Err(invalid(
                "l",
                format!(
                    "dipole element needs |l_i - l_f| = 1, got {} and {}",
                    i.l, f.l
                ),
            ));
        }
        radial_integral(&*self.wavefunction(i)?, &*self.wavefunction(f)?, 1)
    }

    pub fn transition(&self, i: &RydbergLevel, f: &RydbergLevel) -> Result<TransitionRecord> {
        let me = self.radial_matrix_element(i, f)?;
        TransitionRecord::from_parts(i.clone(), f.clone(), me)
    }

    /// Dipole-coupled levels of every series with l = l_i +- 1 and the same spin,
    /// n' = SERIES_MIN_N ..= n + CHANNEL_EXTRA_N.
    pub fn channel_table(&self, initial: &RydbergLevel) -> Result<Vec<TransitionRecord>> {
        self.channel_table_to(initial, initial.n + CHANNEL_EXTRA_N)
    }

    pub fn channel_table_to(
        &self,
        initial: &RydbergLevel,
        n_max: u32,
    ) -> Result<Vec<TransitionRecord>> {
        let mut out = Vec::new();
        for s in &self.data.series {
            if s.l.abs_diff(initial.l) != 1 || s.s_total != initial.s_total {
                continue;
            }
            for m in SERIES_MIN_N..=n_max {
                let tabulated = self.data.levels.contains_key(&(s.name.clone(), m));
                if !tabulated && (s.defect(m) - s.d0).abs() > RITZ_CORRECTION_LIMIT {
                    continue;
                }
                let f = self.level(&s.name, m)?;
                if f.n_star <= f.l as f64 {
                    continue;
                }
                let t = self.transition(initial, &f)?;
                if t.angular_factor > 0.0 {
                    out.push(t);
                }
            }
        }
        Ok(out)
    }

    pub fn lifetime(&self, level: &RydbergLevel) -> Result<Lifetime> {
        lifetime_from(&self.channel_table(level)?)
    }

    pub fn bbr_rate(&self, level: &RydbergLevel, temperature: f64) -> Result<BbrRate> {
        bbr_from(&self.channel_table(level)?, temperature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HARTREE;
    use crate::data::DataSet;

    fn model() -> AtomModel {
        AtomModel::new(DataSet::embedded().atom, RadialGrid::default())
    }

    fn hydrogen(n: u32, l: u32) -> RydbergLevel {
        let (s, j) = (0, l);
        RydbergLevel::custom("H", n, l, s, l, j, n as f64, 1.0).unwrap()
    }

    #[test]
    fn hydrogen_2p_1s_rate() {
        let grid = RadialGrid {
            step: radial::DEFAULT_STEP,
            r_in: Some(1e-5),
        };
        let (i, f) = (hydrogen(2, 1), hydrogen(1, 0));
        let me = radial_integral(
            &radial_wavefunction(2.0, 1, &grid).unwrap(),
            &radial_wavefunction(1.0, 0, &grid).unwrap(),
            1,
        )
        .unwrap();
        let ang = angular_factor(&i, &f).unwrap();
        assert!((ang - 1.0 / 3.0).abs() < 1e-12);
        let omega = 0.375 * HARTREE / HBAR;
        let a = einstein_a(omega, me, ang).unwrap();
        let alpha = E_CHARGE * E_CHARGE / (4.0 * std::f64::consts::PI * EPSILON_0 * HBAR * C_LIGHT);
        let oracle = (2.0f64 / 3.0).powi(8) * alpha.powi(3) * HARTREE / HBAR;
        assert!((a / oracle - 1.0).abs() < 0.01, "{a} vs {oracle}");
        assert!((oracle / 6.27e8 - 1.0).abs() < 0.01);
    }

    #[test]
    fn einstein_a_scalings() {
        assert!(einstein_a(0.0, 1.0, 1.0).is_err());
        assert!(einstein_a(-1.0, 1.0, 1.0).is_err());
        let a = einstein_a(1e15, 2.0, 0.3).unwrap();
        assert!((einstein_a(1e15, 4.0, 0.3).unwrap() / a - 4.0).abs() < 1e-12);
        assert!((einstein_a(5e14, 2.0, 0.3).unwrap() / a - 0.125).abs() < 1e-12);
        assert!(einstein_a(1e-3, 2.0, 0.3).unwrap() < 1e-50 * a);
    }

    #[test]
    fn triplet_s_to_p_angular_factors() {
        let m = model();
        let s = m.level("3S1", 60).unwrap();
        for (j, name) in ["3P0", "3P1", "3P2"].iter().enumerate() {
            let p = m.level(name, 59).unwrap();
            let want = (2 * j + 1) as f64 / 9.0;
            assert!((angular_factor(&s, &p).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn bbr_unit_bose_factor() {
        let omega = 1e12;
        let t = HBAR * omega / (K_B * 2f64.ln());
        assert!((bose_occupation(omega, t).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(bose_occupation(omega, 0.0).unwrap(), 0.0);
        assert!(bose_occupation(omega, -1.0).is_err());
    }

    #[test]
    fn toy_single_channel_lifetime() {
        let i = hydrogen(2, 1);
        let f = hydrogen(1, 0);
        let t = TransitionRecord::from_parts(i, f, 1.29).unwrap();
        let life = lifetime_from(std::slice::from_ref(&t)).unwrap();
        assert!((life.tau * t.a_coeff - 1.0).abs() < 1e-12);
        assert_eq!(life.channels[0].fraction, 1.0);
        assert!(lifetime_from(&[]).is_err());
    }

    #[test]
    fn level_energies_increase_with_n() {
        let m = model();
        for series in ["3S1", "3P1", "3D1"] {
            let mut last = f64::NEG_INFINITY;
            for n in 10..90 {
                let e = m.level(series, n).unwrap().energy;
                assert!(e > last);
                last = e;
            }
        }
        let low = m.level("3P0", 5).unwrap();
        assert!((low.n_star - 1.863).abs() < 2e-3, "{}", low.n_star);
    }

    #[test]
    fn dipole_selection_rule() {
        let m = model();
        let a = m.level("3S1", 40).unwrap();
        assert!(m
            .radial_matrix_element(&a, &m.level("3D1", 40).unwrap())
            .is_err());
        let p = m.level("3P1", 40).unwrap();
        let ab = m.radial_matrix_element(&a, &p).unwrap();
        let ba = m.radial_matrix_element(&p, &a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn rates_at_n80() {
        let m = model();
        let s = m.level("3S1", 80).unwrap();
        let life = m.lifetime(&s).unwrap();
        assert!(life.tau > 0.0 && life.tau.is_finite());
        let sum: f64 = life.channels.iter().map(|c| c.fraction).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let b300 = m.bbr_rate(&s, 300.0).unwrap().gamma;
        let b95 = m.bbr_rate(&s, 95.0).unwrap().gamma;
        let b3 = m.bbr_rate(&s, 3.0).unwrap().gamma;
        assert!(b300 > b95 && b95 > b3 && b3 > 0.0);
        assert_eq!(m.bbr_rate(&s, 0.0).unwrap().gamma, 0.0);
    }
}
