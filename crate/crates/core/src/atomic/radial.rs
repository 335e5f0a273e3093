//! Coulomb radial wavefunctions by inward Numerov integration on a logarithmic grid.
//!
//! With x = ln r and u(r) = sqrt(r) v(x), the radial equation becomes
//! v'' = g(x) v with g = 2 r^2 (V - E) + (l + 1/2)^2 (atomic units).

use serde::Serialize;

use crate::error::{invalid, numerical, require_positive, Result};

/// Default grid step in x = ln r.
pub const DEFAULT_STEP: f64 = 0.005;

/// Inner cutoff for l = 0, Bohr radii.
pub const S_WAVE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub step: f64,
    /// Fixed inner cutoff; otherwise half the inner turning point (or the s-wave floor).
    pub r_in: Option<f64>,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            r_in: None,
        }
    }
}

/// u(r) on the points r_i = exp(i * step), i = i_min..i_min + len, normalized to int u^2 dr = 1.
#[derive(Debug, Clone, Serialize)]
pub struct RadialWavefunction {
    pub n_star: f64,
    pub l: u32,
    pub step: f64,
    pub i_min: i64,
    pub u: Vec<f64>,
}

impl RadialWavefunction {
    pub fn r(&self, idx: usize) -> f64 {
        ((self.i_min + idx as i64) as f64 * self.step).exp()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.u.len()).map(|i| self.r(i)).collect()
    }

    /// int u^2 r^p dr.
    pub fn moment(&self, p: i32) -> f64 {
        let f: Vec<f64> = self
            .u
            .iter()
            .enumerate()
            .map(|(i, u)| u * u * self.r(i).powi(p + 1))
            .collect();
        trapezoid(&f, self.step)
    }

    /// Sign changes of u, ignoring points where |u| is negligible.
    pub fn nodes(&self) -> usize {
        let max = self.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut last = 0.0;
        let mut count = 0;
        for &x in &self.u {
            if x.abs() < 1e-8 * max {
                continue;
            }
            if last != 0.0 && x.signum() != last {
                count += 1;
            }
            last = x.signum();
        }
        count
    }
}

fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 => 0.0,
        1 => 0.0,
        n => h * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1])),
    }
}

/// Half the inner classical turning point of the bare Coulomb potential, or the s-wave floor.
pub fn inner_cutoff(n_star: f64, l: u32) -> f64 {
    if l == 0 {
        return S_WAVE_FLOOR;
    }
    let ll = (l * (l + 1)) as f64;
    // smaller root of r^2 - 2 n*^2 r + n*^2 l(l+1) = 0, in cancellation-free form
    let disc = (n_star * n_star - ll).max(0.0).sqrt();
    0.5 * ll / (1.0 + disc / n_star)
}

pub fn radial_wavefunction(n_star: f64, l: u32, grid: &RadialGrid) -> Result<RadialWavefunction> {
    require_positive("n_star", n_star)?;
    require_positive("step", grid.step)?;
    if n_star <= l as f64 {
        return Err(invalid(
            "n_star",
            format!("n* = {n_star} must exceed l = {l}"),
        ));
    }
    let h = grid.step;
    let energy = -0.5 / (n_star * n_star);
    let r_out = 2.0 * n_star * (n_star + 15.0);
    let r_in = grid.r_in.unwrap_or_else(|| inner_cutoff(n_star, l));
    require_positive("r_in", r_in)?;
    let i_max = (r_out.ln() / h).ceil() as i64;
    let i_min = (r_in.ln() / h).floor() as i64;
    if i_max - i_min < 10 {
        return Err(invalid("r_in", "grid too short"));
    }
    let len = (i_max - i_min + 1) as usize;
    let lh = (l as f64 + 0.5).powi(2);
    // descending order: index 0 is the outermost point
    let g: Vec<f64> = (0..len)
        .map(|k| {
            let r = ((i_max - k as i64) as f64 * h).exp();
            2.0 * r * r * (-1.0 / r - energy) + lh
        })
        .collect();
    let f: Vec<f64> = g.iter().map(|gi| 1.0 - h * h * gi / 12.0).collect();
    let mut v = vec![0.0; len];
    v[0] = 1e-20;
    v[1] = 1e-20 * (1.0 + h * g[0].max(1e-30).sqrt());
    for k in 1..len - 1 {
        v[k + 1] = ((12.0 - 10.0 * f[k]) * v[k] - f[k - 1] * v[k - 1]) / f[k + 1];
        if v[k + 1].abs() > 1e100 {
            for x in &mut v[..=k + 1] {
                *x /= 1e100;
            }
        }
        if !v[k + 1].is_finite() {
            return Err(numerical(
                "radial_wavefunction",
                "Numerov recursion overflowed",
            ));
        }
    }
    v.reverse();
    let mut u: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(i, vi)| ((i_min + i as i64) as f64 * h).exp().sqrt() * vi)
        .collect();
    let mut wf = RadialWavefunction {
        n_star,
        l,
        step: h,
        i_min,
        u: Vec::new(),
    };
    let dens: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, x)| x * x * ((i_min + i as i64) as f64 * h).exp())
        .collect();
    let norm = trapezoid(&dens, h);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(numerical("radial_wavefunction", "zero or non-finite norm"));
    }
    let inner: f64 = dens[..10].iter().sum::<f64>() * h;
    if inner / norm > 1e-2 {
        return Err(numerical(
            "radial_wavefunction",
            format!(
                "norm concentrated at the inner cutoff (fraction {:.3e})",
                inner / norm
            ),
        ));
    }
    let scale = norm.sqrt();
    for x in &mut u {
        *x /= scale;
    }
    wf.u = u;
    Ok(wf)
}

/// int u_a u_b r^p dr over the common grid points (p = 1 gives the dipole radial element).
pub fn radial_integral(a: &RadialWavefunction, b: &RadialWavefunction, p: i32) -> Result<f64> {
    if a.step != b.step {
        return Err(invalid("step", "wavefunctions must share a grid step"));
    }
    let lo = a.i_min.max(b.i_min);
    let hi = (a.i_min + a.u.len() as i64).min(b.i_min + b.u.len() as i64);
    if hi <= lo {
        return Ok(0.0);
    }
    let f: Vec<f64> = (lo..hi)
        .map(|i| {
            let r = (i as f64 * a.step).exp();
            a.u[(i - a.i_min) as usize] * b.u[(i - b.i_min) as usize] * r.powi(p + 1)
        })
        .collect();
    Ok(trapezoid(&f, a.step))
}
