//! Filon-type quadrature for oscillatory integrals with quadratic phase
//! ∫ a(ρ)·{cos,sin}(tρ²) dρ and linear phase ∫ a(s)·e^{iks} ds.
//!
//! The amplitude is interpolated by a quadratic on each two-interval panel;
//! the oscillation is integrated exactly through Fresnel / exponential
//! moments, so accuracy is set by the smooth amplitude alone and is uniform
//! in t (resp. k).

use super::quad;
use super::special::fresnel;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Antiderivatives of ρ^j·cos(tρ²) and ρ^j·sin(tρ²), j = 0, 1, 2.
fn antiderivatives(rho: f64, t: f64, trig: Trig) -> [f64; 3] {
    let kappa = (2.0 * t / std::f64::consts::PI).sqrt();
    let pref = (std::f64::consts::PI / (2.0 * t)).sqrt();
    let (c, s) = fresnel(kappa * rho);
    let phase = t * rho * rho;
    let (sp, cp) = phase.sin_cos();
    match trig {
        Trig::Cos => [
            pref * c,
            sp / (2.0 * t),
            rho * sp / (2.0 * t) - pref * s / (2.0 * t),
        ],
        Trig::Sin => [
            pref * s,
            -cp / (2.0 * t),
            -rho * cp / (2.0 * t) + pref * c / (2.0 * t),
        ],
    }
}

/// ∫ a(ρ)·trig(tρ²) dρ on a sampled grid (length must be odd ≥ 3).
///
/// Falls back to plain product quadrature when the phase is slow enough for
/// the grid to resolve it directly.
pub fn quadratic_phase_integral(a: &[f64], rho: &[f64], t: f64, trig: Trig) -> f64 {
    assert_eq!(a.len(), rho.len());
    assert!(rho.len() >= 3 && rho.len() % 2 == 1, "need odd node count");
    let rho_max = *rho.last().unwrap();
    let h_max = rho
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    // max phase advance per interval
    if 2.0 * t.abs() * rho_max * h_max < 0.5 {
        let prod: Vec<f64> = rho
            .iter()
            .zip(a)
            .map(|(&r, &av)| {
                let p = t * r * r;
                av * match trig {
                    Trig::Cos => p.cos(),
                    Trig::Sin => p.sin(),
                }
            })
            .collect();
        return quad::integrate(rho, &prod);
    }

    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 < rho.len() {
        let (p0, p1, p2) = (rho[i], rho[i + 1], rho[i + 2]);
        let (a0, a1, a2) = (a[i], a[i + 1], a[i + 2]);
        let u1 = p1 - p0;
        let u2 = p2 - p0;
        let c2 = ((a1 - a0) / u1 - (a2 - a0) / u2) / (u1 - u2);
        let c1 = (a1 - a0) / u1 - c2 * u1;
        let c0 = a0;
        // shift the quadratic to plain powers of ρ
        let q0 = c0 - c1 * p0 + c2 * p0 * p0;
        let q1 = c1 - 2.0 * c2 * p0;
        let q2 = c2;
        let lo = antiderivatives(p0, t, trig);
        let hi = antiderivatives(p2, t, trig);
        acc += q0 * (hi[0] - lo[0]) + q1 * (hi[1] - lo[1]) + q2 * (hi[2] - lo[2]);
        i += 2;
    }
    acc
}

/// Same integral with an error estimate from a coarsened (every other node)
/// evaluation.
pub fn quadratic_phase_integral_with_error(
    a: &[f64],
    rho: &[f64],
    t: f64,
    trig: Trig,
) -> (f64, f64) {
    let full = quadratic_phase_integral(a, rho, t, trig);
    let coarse_rho: Vec<f64> = rho.iter().step_by(2).copied().collect();
    let coarse_a: Vec<f64> = a.iter().step_by(2).copied().collect();
    if coarse_rho.len() >= 3 && coarse_rho.len() % 2 == 1 {
        let coarse = quadratic_phase_integral(&coarse_a, &coarse_rho, t, trig);
        (full, (full - coarse).abs())
    } else {
        (full, f64::NAN)
    }
}

/// ∫ a(s)·e^{iks} ds over a sampled grid (odd length), Filon panels with
/// exact exponential moments.
pub fn linear_phase_integral(a: &[f64], s: &[f64], k: f64) -> Complex64 {
    assert_eq!(a.len(), s.len());
    assert!(s.len() >= 3 && s.len() % 2 == 1, "need odd node count");
    let ik = Complex64::new(0.0, k);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut i = 0;
    while i + 2 < s.len() {
        let (s0, s1, s2) = (s[i], s[i + 1], s[i + 2]);
        let (a0, a1, a2) = (a[i], a[i + 1], a[i + 2]);
        let h = s2 - s0;
        if k.abs() * h < 0.5 {
            // slow phase: Simpson on the full product is plenty
            let f0 = Complex64::from_polar(a0, k * s0);
            let f1 = Complex64::from_polar(a1, k * s1);
            let f2 = Complex64::from_polar(a2, k * s2);
            // nonuniform Simpson weights
            let h0 = s1 - s0;
            let h1 = s2 - s1;
            let w0 = (2.0 * h0 - h1) * h / (6.0 * h0);
            let w1 = h * h * h / (6.0 * h0 * h1);
            let w2 = (2.0 * h1 - h0) * h / (6.0 * h1);
            acc += f0 * w0 + f1 * w1 + f2 * w2;
        } else {
            let u1 = s1 - s0;
            let u2 = s2 - s0;
            let c2 = ((a1 - a0) / u1 - (a2 - a0) / u2) / (u1 - u2);
            let c1 = (a1 - a0) / u1 - c2 * u1;
            let c0 = a0;
            let e0 = Complex64::from_polar(1.0, k * s0);
            let e2 = Complex64::from_polar(1.0, k * s2);
            let m0 = (e2 - e0) / ik;
            let m1 = e2 * u2 / ik - m0 / ik;
            let m2 = e2 * (u2 * u2) / ik - m1 * 2.0 / ik;
            acc += m0 * c0 + m1 * c1 + m2 * c2;
        }
        i += 2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_phase_matches_brute_force_moderate_t() {
        let n = 1025;
        let rho: Vec<f64> = (0..n).map(|i| 6.0 * i as f64 / (n - 1) as f64).collect();
        let a: Vec<f64> = rho.iter().map(|&r| r * r * (-r * r).exp()).collect();
        for &t in &[0.0, 0.3, 4.0, 37.0] {
            let brute = gauss::integrate_composite(
                |r| r * r * (-r * r).exp() * (t * r * r).cos(),
                0.0,
                6.0,
                16,
                2000,
            );
            let got = quadratic_phase_integral(&a, &rho, t, Trig::Cos);
            assert_relative_eq!(got, brute, epsilon = 1e-9);
        }
    }

    #[test]
    fn quadratic_phase_large_t_against_stationary_phase() {
        // ∫₀^∞ a(ρ) cos(tρ²) dρ → a(0)·√(π/8t)·√2 ... with a(0)=1:
        // exact leading term a(0)·(1/2)√(π/(2t)) + O(t^{-3/2}) for smooth a.
        let n = 4097;
        let rho: Vec<f64> = (0..n).map(|i| 7.0 * i as f64 / (n - 1) as f64).collect();
        let a: Vec<f64> = rho.iter().map(|&r| (-r * r).exp()).collect();
        let t = 2000.0;
        let got = quadratic_phase_integral(&a, &rho, t, Trig::Cos);
        let lead = 0.5 * (std::f64::consts::PI / (2.0 * t)).sqrt();
        assert_relative_eq!(got, lead, max_relative = 2e-3);
    }

    #[test]
    fn linear_phase_matches_closed_form() {
        // ∫₀^L e^{-s} e^{iks} ds = (1 - e^{(ik-1)L})/(1-ik)
        let n = 2001;
        let l = 30.0;
        let s: Vec<f64> = (0..n).map(|i| l * i as f64 / (n - 1) as f64).collect();
        let a: Vec<f64> = s.iter().map(|&x| (-x).exp()).collect();
        for &k in &[0.001, 0.3, 2.0, 40.0] {
            let got = linear_phase_integral(&a, &s, k);
            let denom = Complex64::new(1.0, -k);
            let exact = (Complex64::new(1.0, 0.0)
                - (Complex64::new(-1.0, k) * l).exp())
                / denom;
            assert_relative_eq!(got.re, exact.re, epsilon = 1e-8);
            assert_relative_eq!(got.im, exact.im, epsilon = 1e-8);
        }
    }
}
