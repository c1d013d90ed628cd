//! Finite-difference weights on arbitrary nodes (Fornberg's algorithm).

/// Weights w such that Σ w[i]·f(xs[i]) ≈ f^(m)(x0), for all orders 0..=m.
/// Returns only the order-m row.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m, "need more nodes than derivative order");
    // c[k][i]: weight of node i for derivative order k
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.pop().unwrap()
}

/// Second derivative of sampled values on a nonuniform grid with a 7-point
/// stencil (one-sided near the edges).
pub fn second_derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n >= 7);
    let mut out = vec![0.0; n];
    for i in 0..n {
        let s = i.saturating_sub(3).min(n - 7);
        let w = fornberg_weights(xs[i], &xs[s..s + 7], 2);
        out[i] = (0..7).map(|j| w[j] * ys[s + j]).sum();
    }
    out
}

/// First derivative, same stencil policy.
pub fn first_derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n >= 7);
    let mut out = vec![0.0; n];
    for i in 0..n {
        let s = i.saturating_sub(3).min(n - 7);
        let w = fornberg_weights(xs[i], &xs[s..s + 7], 1);
        out[i] = (0..7).map(|j| w[j] * ys[s + j]).sum();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_recover_known_central_stencil() {
        // classic 3-point second derivative on a uniform grid
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-13);
        assert_relative_eq!(w[1], -2.0, epsilon = 1e-13);
        assert_relative_eq!(w[2], 1.0, epsilon = 1e-13);
    }

    #[test]
    fn derivatives_of_gaussian_on_geometric_grid() {
        let n = 600;
        // spacing kept above ~5e-4 so the h^{-2} roundoff floor stays below 1e-9
        let q = (20.0f64 / 0.05).powf(1.0 / (n - 1) as f64);
        let xs: Vec<f64> = (0..n).map(|i| 0.05 * q.powi(i as i32)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (-0.5 * x * x).exp()).collect();
        let d2 = second_derivative(&xs, &ys);
        for i in (10..n - 10).step_by(37) {
            let x = xs[i];
            if x > 6.0 {
                // exact value underflows past the Gaussian tail; FD noise floor dominates
                continue;
            }
            let exact = (x * x - 1.0) * (-0.5 * x * x).exp();
            assert_relative_eq!(d2[i], exact, epsilon = 1e-8, max_relative = 1e-6);
        }
    }
}
