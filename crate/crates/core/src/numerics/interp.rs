//! Local cubic (4-point Lagrange) interpolation on an increasing grid.

/// Index of the last node ≤ x (clamped to a valid interior position).
fn bracket(xs: &[f64], x: f64) -> usize {
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(xs.len() - 2),
        Err(i) => i.saturating_sub(1).min(xs.len() - 2),
    }
}

/// Cubic interpolation of sampled values; clamps outside the grid is the
/// caller's business (values are extrapolated from the edge stencil).
pub fn cubic(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n < 4 {
        // linear fallback
        let i = bracket(xs, x);
        let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] + t * (ys[i + 1] - ys[i]);
    }
    let i = bracket(xs, x);
    let s = i.saturating_sub(1).min(n - 4);
    let mut val = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != j {
                l *= (x - xs[s + k]) / (xs[s + j] - xs[s + k]);
            }
        }
        val += l * ys[s + j];
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_cubic_exactly() {
        let xs: Vec<f64> = (0..20).map(|i| 0.3 * i as f64).collect();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.1 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for &x in &[0.11, 1.57, 4.99, 5.7] {
            assert_relative_eq!(cubic(&xs, &ys, x), f(x), max_relative = 1e-12);
        }
    }
}
