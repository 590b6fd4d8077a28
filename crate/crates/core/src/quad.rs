//! Quadrature and fitting helpers on uniform grids.

/// Trapezoid rule over uniformly spaced samples with spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => 0.0,
        n => {
            let mut s = 0.5 * (values[0] + values[n - 1]);
            for v in &values[1..n - 1] {
                s += v;
            }
            s * h
        }
    }
}

/// Trapezoid rule over arbitrary abscissae.
pub fn trapezoid_xy(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut s = 0.0;
    for i in 1..x.len() {
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    s
}

/// Cumulative trapezoid on cell-centered samples starting from 0.
///
/// The first node sits at `x₀ = h/2`, so the integral up to `x₀` is taken as
/// `values[0] * x₀` (constant extension over the half cell at the origin).
pub fn cumtrapz_cell_centered(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    if values.is_empty() {
        return out;
    }
    let mut acc = values[0] * 0.5 * h;
    out.push(acc);
    for i in 1..values.len() {
        acc += 0.5 * (values[i] + values[i - 1]) * h;
        out.push(acc);
    }
    out
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Central-difference derivative of uniformly spaced samples; one-sided at
/// the ends.
pub fn central_diff(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    d[0] = (values[1] - values[0]) / h;
    d[n - 1] = (values[n - 1] - values[n - 2]) / h;
    for i in 1..n - 1 {
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    d
}
