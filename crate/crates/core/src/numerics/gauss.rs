//! Gauss–Legendre nodes and weights via Newton iteration on P_n.

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_eval(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// ∫_a^b f(x) dx with an n-point Gauss–Legendre rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = legendre_rule(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    xs.iter()
        .zip(&ws)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite rule: `panels` equal subintervals, n points each.
pub fn integrate_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, panels: usize) -> f64 {
    let (xs, ws) = legendre_rule(n);
    let mut acc = 0.0;
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let half = 0.5 * h;
        let mid = lo + half;
        for (&x, &w) in xs.iter().zip(&ws) {
            acc += w * f(mid + half * x);
        }
    }
    acc * 0.5 * h
}

/// Tanh-sinh (double-exponential) quadrature on (0, 1) for integrands with
/// endpoint singularities. The integrand receives (x, 1−x), both computed
/// without cancellation, so weights like x^{-δ} or (1−x)^{-1/2} stay exact
/// near the endpoints.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, points: usize) -> f64 {
    let t_max = 6.0;
    let n = points.max(64) / 2;
    let h = t_max / n as f64;
    let mut acc = 0.0;
    for i in -(n as i64)..=(n as i64) {
        let t = i as f64 * h;
        let y = std::f64::consts::FRAC_PI_2 * t.sinh();
        // x = (1 + tanh y)/2 and 1−x without cancellation
        let (x, one_minus_x) = if y >= 0.0 {
            let e = (-2.0 * y).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = (2.0 * y).exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        if x == 0.0 || one_minus_x == 0.0 {
            continue;
        }
        let ch = (std::f64::consts::FRAC_PI_2 * t.sinh()).cosh();
        let w = std::f64::consts::FRAC_PI_4 * t.cosh() / (ch * ch);
        let v = f(x, one_minus_x);
        if v.is_finite() {
            acc += w * v;
        }
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        // ∫₀¹ x^{-0.95} dx = 20
        let got = tanh_sinh(|x, _| x.powf(-0.95), 1024);
        assert_relative_eq!(got, 20.0, max_relative = 1e-11);
        // ∫₀¹ ln(1/x)/√x dx = 4
        let got = tanh_sinh(|x, _| (1.0 / x).ln() / x.sqrt(), 1024);
        assert_relative_eq!(got, 4.0, max_relative = 1e-11);
        // ∫₀¹ 1/√(1−x) dx = 2 using the cancellation-free 1−x argument
        let got = tanh_sinh(|_, omx| 1.0 / omx.sqrt(), 1024);
        assert_relative_eq!(got, 2.0, max_relative = 1e-11);
    }

    #[test]
    fn exact_for_polynomials() {
        // 5-point rule is exact through degree 9
        let got = integrate(|x| x.powi(9) + 3.0 * x.powi(4), 0.0, 2.0, 5);
        let exact = 2.0f64.powi(10) / 10.0 + 3.0 * 2.0f64.powi(5) / 5.0;
        assert_relative_eq!(got, exact, max_relative = 1e-14);
    }

    #[test]
    fn large_rule_on_exp() {
        let got = integrate(|x| x.exp(), -1.0, 1.0, 64);
        assert_relative_eq!(got, 1f64.exp() - (-1f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn weights_sum_to_interval() {
        for n in [16, 257, 2048] {
            let (_, ws) = legendre_rule(n);
            assert_relative_eq!(ws.iter().sum::<f64>(), 2.0, max_relative = 1e-13);
        }
    }
}
