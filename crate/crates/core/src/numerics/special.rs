//! Special functions used by the radial and oscillatory machinery:
//! spherical Bessel j_ℓ, the complex error function, and Fresnel C/S.

use num_complex::Complex64;

/// Spherical Bessel j_ℓ for ℓ ∈ {0, 1, 2, 3}.
///
/// Below x = 2 the ascending series is used (the closed trigonometric forms
/// lose digits to cancellation there); above, the closed forms are stable.
pub fn sph_j(ell: usize, x: f64) -> f64 {
    debug_assert!(ell <= 3);
    let ax = x.abs();
    if ax < 2.0 {
        return sph_j_series(ell, x);
    }
    let (s, c) = x.sin_cos();
    match ell {
        0 => s / x,
        1 => s / (x * x) - c / x,
        2 => (3.0 / (x * x * x) - 1.0 / x) * s - 3.0 * c / (x * x),
        3 => {
            let x2 = x * x;
            (15.0 / (x2 * x2) - 6.0 / x2) * s - (15.0 / (x2 * x) - 1.0 / x) * c
        }
        _ => unreachable!(),
    }
}

/// Ascending series j_ℓ(x) = x^ℓ Σ_m (−x²/2)^m / (m! (2ℓ+2m+1)!!).
fn sph_j_series(ell: usize, x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..=16 {
        let mf = m as f64;
        term *= -x2 / (2.0 * mf * (2.0 * (ell as f64) + 2.0 * mf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    let mut lead = 1.0;
    let mut dfact = 1.0;
    for k in 0..ell {
        lead *= x;
        dfact *= 2.0 * (k as f64) + 3.0;
    }
    lead / dfact * sum
}

const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6;

/// erf for complex argument. Series for |z| ≤ 3, Lentz continued fraction
/// for erfc beyond; valid for |arg z| < 3π/4 (reflected to Re z ≥ 0 first).
pub fn erf_complex(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -erf_complex(-z);
    }
    if z.norm() <= 3.0 {
        erf_series(z)
    } else {
        Complex64::new(1.0, 0.0) - erfc_cf(z)
    }
}

/// erfc for complex argument, Re z ≥ 0.
pub fn erfc_complex(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= -1e-300);
    if z.norm() <= 3.0 {
        Complex64::new(1.0, 0.0) - erf_series(z)
    } else {
        erfc_cf(z)
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..=96 {
        let nf = n as f64;
        term = term * (-z2) / nf;
        let add = term / (2.0 * nf + 1.0);
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// Modified Lentz evaluation of the classical continued fraction
/// √π e^{z²} erfc(z) = z / (z² + 1/2 / (1 + 1 / (z² + 3/2 / (1 + ...)))).
fn erfc_cf(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = z2;
    if f.norm() < 1e-300 {
        f = tiny;
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for j in 1..=400 {
        let a = Complex64::new(j as f64 / 2.0, 0.0);
        let b = if j % 2 == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            z2
        };
        d = b + a * d;
        if d.norm() < 1e-300 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    // erfc(z) = e^{−z²} z / (√π f)
    (-z2).exp() * z / (f * std::f64::consts::PI.sqrt())
}

/// Real error function via the complex path.
pub fn erf(x: f64) -> f64 {
    erf_complex(Complex64::new(x, 0.0)).re
}

/// Fresnel integrals in the normalized convention
/// C(x) = ∫₀ˣ cos(πu²/2) du, S(x) = ∫₀ˣ sin(πu²/2) du.
///
/// Computed from C + iS = (1+i)/2 · erf(√π/2 (1−i) x); for large x the
/// erfc form keeps full precision in the oscillating residues around 1/2.
pub fn fresnel(x: f64) -> (f64, f64) {
    if x < 0.0 {
        let (c, s) = fresnel(-x);
        return (-c, -s);
    }
    let half_sqrt_pi = 0.5 * std::f64::consts::PI.sqrt();
    let zeta = Complex64::new(half_sqrt_pi * x, -half_sqrt_pi * x);
    let half_1pi = Complex64::new(0.5, 0.5);
    if zeta.norm() <= 3.0 {
        let w = half_1pi * erf_series(zeta);
        (w.re, w.im)
    } else {
        // C − 1/2 + i(S − 1/2) = −(1+i)/2 erfc(ζ)
        let w = -half_1pi * erfc_cf(zeta);
        (0.5 + w.re, 0.5 + w.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss;
    use approx::assert_relative_eq;

    #[test]
    fn sph_j_matches_closed_forms_across_switch() {
        for &x in &[1e-8f64, 1e-3, 0.3, 1.0, 1.9, 2.0, 2.1, 5.0, 40.0, 250.0] {
            let j0 = x.sin() / x;
            assert_relative_eq!(sph_j(0, x), j0, max_relative = 1e-12, epsilon = 1e-300);
        }
        // DLMF 10.49.3 check for j2 on both sides of the series/closed switch
        for &x in &[0.5f64, 1.5, 2.5, 8.0] {
            let exact = (3.0 / (x * x * x) - 1.0 / x) * x.sin() - 3.0 / (x * x) * x.cos();
            assert_relative_eq!(sph_j(2, x), exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn sph_j_small_argument_leading_order() {
        let x = 1e-4;
        assert_relative_eq!(sph_j(1, x), x / 3.0, max_relative = 1e-8);
        assert_relative_eq!(sph_j(3, x), x * x * x / 105.0, max_relative = 1e-8);
    }

    #[test]
    fn erf_real_reference_values() {
        assert_relative_eq!(erf(1.0), 0.842_700_792_949_714_9, max_relative = 1e-14);
        assert_relative_eq!(erf(2.0), 0.995_322_265_018_952_7, max_relative = 1e-14);
        assert_relative_eq!(erf(3.5), 0.999_999_256_901_627_7, max_relative = 1e-12);
        assert_relative_eq!(erf(-1.0), -0.842_700_792_949_714_9, max_relative = 1e-14);
    }

    #[test]
    fn erf_complex_matches_quadrature_on_rays() {
        // erf(z) = 2/√π ∫₀^1 z e^{−(zt)²} dt along the straight segment
        for &(m, phase) in &[(2.0, -0.7), (3.2, 0.78), (6.0, -0.78), (12.0, 0.3)] {
            let z = Complex64::from_polar(m, phase);
            let re = gauss::integrate_composite(|t| (z * ((z * t) * (z * t)).scale(-1.0).exp()).re, 0.0, 1.0, 24, 64);
            let im = gauss::integrate_composite(|t| (z * ((z * t) * (z * t)).scale(-1.0).exp()).im, 0.0, 1.0, 24, 64);
            let exact = Complex64::new(re, im) * FRAC_2_SQRT_PI;
            let got = erf_complex(z);
            assert_relative_eq!(got.re, exact.re, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(got.im, exact.im, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn fresnel_matches_quadrature() {
        for &x in &[0.3, 1.0, 2.3, 3.8, 7.5, 30.0] {
            let c_ref = gauss::integrate_composite(
                |u| (std::f64::consts::FRAC_PI_2 * u * u).cos(),
                0.0,
                x,
                24,
                (40.0 * x) as usize + 8,
            );
            let s_ref = gauss::integrate_composite(
                |u| (std::f64::consts::FRAC_PI_2 * u * u).sin(),
                0.0,
                x,
                24,
                (40.0 * x) as usize + 8,
            );
            let (c, s) = fresnel(x);
            assert_relative_eq!(c, c_ref, epsilon = 1e-11);
            assert_relative_eq!(s, s_ref, epsilon = 1e-11);
        }
    }

    #[test]
    fn fresnel_limits() {
        let (c, s) = fresnel(1e4);
        assert_relative_eq!(c, 0.5, epsilon = 1e-4);
        assert_relative_eq!(s, 0.5, epsilon = 1e-4);
    }
}
