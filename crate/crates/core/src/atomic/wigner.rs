//! Wigner 6j symbols from the Racah sum.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

fn twice(field: &'static str, j: f64) -> Result<i64> {
    let t = 2.0 * j;
    if !j.is_finite() || j < 0.0 || (t - t.round()).abs() > 1e-9 {
        return Err(invalid(
            field,
            format!("{j} is not a non-negative half-integer"),
        ));
    }
    Ok(t.round() as i64)
}

fn ln_fact(n: i64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln of the triangle coefficient for doubled arguments, or None if the triad is not allowed.
fn ln_delta(a: i64, b: i64, c: i64) -> Option<f64> {
    if (a + b + c) % 2 != 0 || c > a + b || c < (a - b).abs() {
        return None;
    }
    let (p, q, r, s) = (
        (a + b - c) / 2,
        (a - b + c) / 2,
        (b + c - a) / 2,
        (a + b + c) / 2 + 1,
    );
    Some(0.5 * (ln_fact(p) + ln_fact(q) + ln_fact(r) - ln_fact(s)))
}

/// {j1 j2 j3; j4 j5 j6}.
pub fn wigner6j(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64, j6: f64) -> Result<f64> {
    let a = [
        twice("j1", j1)?,
        twice("j2", j2)?,
        twice("j3", j3)?,
        twice("j4", j4)?,
        twice("j5", j5)?,
        twice("j6", j6)?,
    ];
    Ok(wigner6j_twice(a))
}

/// 6j symbol with every argument given as twice its value.
pub fn wigner6j_twice(j: [i64; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = j;
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    let mut ln_pref = 0.0;
    for (a, b, c) in triads {
        match ln_delta(a, b, c) {
            Some(d) => ln_pref += d,
            None => return 0.0,
        }
    }
    let alpha = triads.map(|(a, b, c)| (a + b + c) / 2);
    let beta = [
        (j1 + j2 + j4 + j5) / 2,
        (j2 + j3 + j5 + j6) / 2,
        (j3 + j1 + j6 + j4) / 2,
    ];
    let t_min = *alpha.iter().max().unwrap();
    let t_max = *beta.iter().min().unwrap();
    let mut sum = 0.0;
    for t in t_min..=t_max {
        let ln_den: f64 = alpha.iter().map(|&x| ln_fact(t - x)).sum::<f64>()
            + beta.iter().map(|&x| ln_fact(x - t)).sum::<f64>();
        let term = (ln_fact(t + 1) - ln_den + ln_pref).exp();
        sum += if t % 2 == 0 { term } else { -term };
    }
    sum
}
