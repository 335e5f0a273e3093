//! Quadrature and small numerical helpers.

use gauss_quad::legendre::GaussLegendre;

/// Gauss-Legendre nodes and weights mapped onto [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    if n == 1 {
        return vec![(mid, b - a)];
    }
    let rule = GaussLegendre::new(n).expect("degree >= 2");
    let mut out: Vec<(f64, f64)> = rule
        .nodes()
        .zip(rule.weights())
        .map(|(&x, &w)| (mid + half * x, half * w))
        .collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` nodes each.
pub fn composite_gauss_legendre(panels: usize, order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| gauss_legendre(order, a + p as f64 * h, a + (p + 1) as f64 * h))
        .collect()
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of ln y against ln x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Piecewise-linear interpolation of ln y in ln x, clamped to the table ends' slopes.
pub fn log_log_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let lx = x.ln();
    let n = xs.len();
    let i = match xs.iter().position(|&v| v >= x) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => n - 2,
    }
    .min(n - 2);
    let (x0, x1) = (xs[i].ln(), xs[i + 1].ln());
    let (y0, y1) = (ys[i].ln(), ys[i + 1].ln());
    (y0 + (y1 - y0) * (lx - x0) / (x1 - x0)).exp()
}
