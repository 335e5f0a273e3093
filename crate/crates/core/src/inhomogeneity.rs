//! Lattice geometry, plateau pair interactions and the inhomogeneity
//! fidelity F_IH (perturbative expansion and exact small-N sum).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dressing::DressingParams;
use crate::error::{invalid, require_non_negative, require_positive, Error, Result};

/// Default lattice spacing, meters.
pub const DEFAULT_SPACING: f64 = 200e-9;

/// Largest atom number accepted by [`f_ih_exact`].
pub const EXACT_MAX_ATOMS: usize = 20;

/// Above this value of max |eps| tau_c the expansion is flagged as unreliable.
pub const PERTURBATIVE_WARN: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Shape {
    /// Full side^3 block.
    Cubic {
        side: usize,
    },
    /// The N sites of the smallest enclosing cube closest to its center.
    Cluster {
        n: usize,
    },
    Custom,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lattice {
    positions: Vec<[f64; 3]>,
    spacing: f64,
    shape: Shape,
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn cube_sites(side: usize, spacing: f64) -> Vec<[f64; 3]> {
    let mut p = Vec::with_capacity(side.pow(3));
    for i in 0..side {
        for j in 0..side {
            for k in 0..side {
                p.push([i as f64 * spacing, j as f64 * spacing, k as f64 * spacing]);
            }
        }
    }
    p
}

impl Lattice {
    pub fn cubic(side: usize, spacing: f64) -> Result<Self> {
        if side == 0 {
            return Err(invalid("side", "must be at least 1"));
        }
        require_positive("spacing", spacing)?;
        Ok(Self {
            positions: cube_sites(side, spacing),
            spacing,
            shape: Shape::Cubic { side },
        })
    }

    /// `n` sites of the smallest cube holding them, taken in order of distance
    /// from the cube center (ties broken by site index).
    pub fn cluster(n: usize, spacing: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n_atoms", "must be at least 1"));
        }
        require_positive("spacing", spacing)?;
        let mut side = 1;
        while side * side * side < n {
            side += 1;
        }
        let sites = cube_sites(side, spacing);
        let c = (side - 1) as f64 * spacing / 2.0;
        let centre = [c, c, c];
        let mut keyed: Vec<(i64, usize)> = sites
            .iter()
            .enumerate()
            .map(|(i, p)| {
                // squared distance in units of spacing^2 / 4 is an integer
                let d2 = distance(p, &centre).powi(2) / (spacing * spacing) * 4.0;
                (d2.round() as i64, i)
            })
            .collect();
        keyed.sort();
        let positions = keyed[..n].iter().map(|&(_, i)| sites[i]).collect();
        Ok(Self {
            positions,
            spacing,
            shape: Shape::Cluster { n },
        })
    }

    pub fn from_positions(positions: Vec<[f64; 3]>, spacing: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("positions", "lattice is empty"));
        }
        require_positive("spacing", spacing)?;
        if positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(invalid("positions", "non-finite coordinate"));
        }
        Ok(Self {
            positions,
            spacing,
            shape: Shape::Custom,
        })
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Space diagonal spacing * sqrt(3) * (side - 1) of a cubic block.
    pub fn space_diagonal(&self) -> Option<f64> {
        match self.shape {
            Shape::Cubic { side } => Some(self.spacing * 3f64.sqrt() * (side - 1) as f64),
            _ => None,
        }
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                d = d.max(distance(a, b));
            }
        }
        d
    }
}

/// Plateau interaction chi_0 R_b^6 / (r^6 + R_b^6).
pub fn pair_interaction(r: f64, chi0: f64, r_b: f64) -> f64 {
    let x = (r / r_b).powi(6);
    chi0 / (1.0 + x)
}

/// Pairwise interactions and their fluctuations about the pair mean.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    chi: DMatrix<f64>,
    chi_m: f64,
    eps: DMatrix<f64>,
}

impl InteractionMatrix {
    /// Use a given fluctuation matrix directly (its pair mean need not vanish).
    pub fn from_fluctuations(eps: DMatrix<f64>, chi_m: f64) -> Result<Self> {
        let n = eps.nrows();
        if n == 0 || eps.ncols() != n {
            return Err(invalid("eps", "must be a nonempty square matrix"));
        }
        for i in 0..n {
            if eps[(i, i)] != 0.0 {
                return Err(invalid("eps", "diagonal must vanish"));
            }
            for j in 0..i {
                if eps[(i, j)] != eps[(j, i)] || !eps[(i, j)].is_finite() {
                    return Err(invalid("eps", "must be symmetric and finite"));
                }
            }
        }
        let mut chi = eps.add_scalar(chi_m);
        chi.fill_diagonal(0.0);
        Ok(Self { chi, chi_m, eps })
    }

    pub fn n_atoms(&self) -> usize {
        self.chi.nrows()
    }

    pub fn chi(&self) -> &DMatrix<f64> {
        &self.chi
    }

    pub fn chi_m(&self) -> f64 {
        self.chi_m
    }

    pub fn eps(&self) -> &DMatrix<f64> {
        &self.eps
    }

    /// Sum of eps over pairs i < j.
    pub fn pair_sum(&self) -> f64 {
        let n = self.n_atoms();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.eps[(i, j)])
            .sum()
    }

    pub fn max_abs_eps(&self) -> f64 {
        self.eps.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// chi_ij from the lattice distances with chi_0 and R_b taken from the dressing.
pub fn build_interactions(lattice: &Lattice, params: &DressingParams) -> Result<InteractionMatrix> {
    build_interactions_with(lattice, params.chi0(), params.r_b())
}

pub fn build_interactions_with(
    lattice: &Lattice,
    chi0: f64,
    r_b: f64,
) -> Result<InteractionMatrix> {
    require_positive("r_b", r_b)?;
    require_positive("chi0", chi0)?;
    let n = lattice.len();
    let p = lattice.positions();
    let mut chi = DMatrix::zeros(n, n);
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = distance(&p[i], &p[j]);
            if r == 0.0 {
                return Err(invalid("positions", format!("sites {i} and {j} coincide")));
            }
            let x = pair_interaction(r, chi0, r_b);
            chi[(i, j)] = x;
            chi[(j, i)] = x;
            total += x;
        }
    }
    let pairs = (n * n.saturating_sub(1) / 2).max(1);
    let chi_m = if n > 1 { total / pairs as f64 } else { chi0 };
    let mut eps = chi.add_scalar(-chi_m);
    eps.fill_diagonal(0.0);
    Ok(InteractionMatrix { chi, chi_m, eps })
}

/// Perturbative F_IH together with the moments it is built from.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbativeIh {
    pub fidelity: f64,
    /// |third-order term| / |second-order term|.
    pub order_ratio: f64,
    /// <V_IH^2> tau_c^2.
    pub second_moment: f64,
    /// <V_IH^3> tau_c^3.
    pub third_moment: f64,
}

/// Moment expansion of |<eta = 1| exp(-i V_IH tau_c) |eta = 1>|^2 through the requested order.
pub fn f_ih_perturbative(m: &InteractionMatrix, tau_c: f64, order: u32) -> Result<PerturbativeIh> {
    if order != 2 && order != 3 {
        return Err(invalid("order", format!("must be 2 or 3, got {order}")));
    }
    require_positive("tau_c", tau_c)?;
    let n = m.n_atoms();
    let scale = m.max_abs_eps().max(m.chi_m.abs()).max(f64::MIN_POSITIVE);
    if m.pair_sum().abs() > 1e-10 * scale * (n * n) as f64 {
        return Err(invalid("eps", "fluctuations must have zero pair mean"));
    }
    let eps_tau = m.max_abs_eps() * tau_c;
    if eps_tau > PERTURBATIVE_WARN {
        log::warn!(
            "max |eps| tau_c = {eps_tau:.3} exceeds {PERTURBATIVE_WARN}; expansion unreliable"
        );
    }
    let e = m.eps() * tau_c;
    let h: Vec<f64> = (0..n).map(|i| e.row(i).sum()).collect();
    let sum_h2: f64 = h.iter().map(|x| x * x).sum();
    let sum_pairs2: f64 = e.iter().map(|x| x * x).sum::<f64>() / 2.0;
    let m2 = (sum_h2 + sum_pairs2) / 16.0;
    let hv = nalgebra::DVector::from_vec(h);
    let heh = hv.dot(&(&e * &hv));
    let e2 = &e * &e;
    let tr_e3 = e2.component_mul(&e.transpose()).sum();
    let m3 = (3.0 * heh + tr_e3) / 64.0;
    let second = 1.0 - m2 / 2.0;
    let amplitude = if order == 3 {
        Complex64::new(second, m3 / 6.0)
    } else {
        Complex64::new(second, 0.0)
    };
    let order_ratio = if m2 > 0.0 {
        (m3 / 6.0).abs() / (m2 / 2.0)
    } else {
        0.0
    };
    Ok(PerturbativeIh {
        fidelity: amplitude.norm_sqr().clamp(0.0, 1.0),
        order_ratio,
        second_moment: m2,
        third_moment: m3,
    })
}

/// Exact |2^-N sum_b exp(-i tau_c sum_{i<j} eps_ij b_i b_j)|^2 over all 2^N bit strings.
pub fn f_ih_exact(m: &InteractionMatrix, tau_c: f64) -> Result<f64> {
    let n = m.n_atoms();
    if n > EXACT_MAX_ATOMS {
        return Err(Error::Size(format!(
            "exact F_IH needs 2^N terms; N = {n} exceeds {EXACT_MAX_ATOMS}"
        )));
    }
    require_non_negative("tau_c", tau_c)?;
    let e = m.eps() * tau_c;
    // Gray-code walk: flipping bit i shifts the phase by +-(sum_j e_ij b_j).
    let mut bits = vec![false; n];
    let mut field = vec![0.0; n];
    let mut value = 0.0;
    let mut sum = Complex64::new(1.0, 0.0);
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let sign = if bits[i] { -1.0 } else { 1.0 };
        value += sign * field[i];
        bits[i] = !bits[i];
        for j in 0..n {
            field[j] += sign * e[(i, j)];
        }
        sum += Complex64::from_polar(1.0, -value);
    }
    Ok((sum / (1u64 << n) as f64).norm_sqr().min(1.0))
}

/// Eigenvalue of the homogeneous part chi_m sum_{i<j} b_i b_j on the N_e-excitation Dicke state.
pub fn homogeneous_energy(n_e: usize, chi_m: f64) -> f64 {
    let k = n_e as f64;
    chi_m * (k * k - k) / 2.0
}
