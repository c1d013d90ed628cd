//! The explicit constants of the contraction argument: Ω(δ) and its two
//! pieces, the critical exponent δ*, the Taylor order N₀, the Fresnel
//! constant and the convolution bound.

use statrs::function::gamma::gamma;

use crate::numerics::gauss;
use crate::{LabError, Result};

/// Ω evaluated both directly and as the sum Ω₁ + Ω₂, plus the Γ-function
/// closed form carried along as a cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaEvaluation {
    pub delta: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega: f64,
    pub closed_form: f64,
    pub quad_error: f64,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta < 1.0) || !delta.is_finite() {
        return Err(LabError::Parameter {
            name: "delta",
            reason: format!("Ω is defined on (−∞, 1), got {delta}"),
        });
    }
    Ok(())
}

const HALF_BRANCH: f64 = 1e-6;

/// (r^{-1/2} − r^{-δ})/(1 − 2δ). Within |δ − 1/2| < 1e-6 the removable
/// singularity is taken by the explicit logarithmic limit
/// (1/2)·r^{-1/2}·ln(1/r); outside, expm1 keeps the difference exact.
fn bracket(r: f64, delta: f64) -> f64 {
    if (delta - 0.5).abs() < HALF_BRANCH {
        0.5 * (1.0 / r.sqrt()) * (1.0 / r).ln()
    } else {
        let c = 0.5 - delta;
        // r^{-1/2} − r^{-δ} = −r^{-1/2}·expm1(c·ln r)
        -(1.0 / r.sqrt()) * (c * r.ln()).exp_m1() / (1.0 - 2.0 * delta)
    }
}

/// (1−r)^{-1/2}/(1 + √(1−r)) from the cancellation-free 1−r argument.
fn smooth_factor(one_minus_r: f64) -> f64 {
    let s = one_minus_r.sqrt();
    1.0 / (s * (1.0 + s))
}

pub const DEFAULT_NODES: usize = 2048;

/// Ω₁(δ): the (1−2δ)⁻¹-bracket part of Ω. Both endpoint singularities are
/// handled by tanh-sinh quadrature.
pub fn omega1_with_nodes(delta: f64, nodes: usize) -> Result<f64> {
    check_delta(delta)?;
    Ok(gauss::tanh_sinh(|r, omr| smooth_factor(omr) * bracket(r, delta), nodes)
        / std::f64::consts::PI)
}

/// Ω₂(δ): the r^{1/2−δ} part of Ω.
pub fn omega2_with_nodes(delta: f64, nodes: usize) -> Result<f64> {
    check_delta(delta)?;
    Ok(
        gauss::tanh_sinh(|r, omr| smooth_factor(omr) * r.powf(0.5 - delta), nodes)
            / std::f64::consts::PI,
    )
}

pub fn omega1(delta: f64) -> Result<f64> {
    omega1_with_nodes(delta, DEFAULT_NODES)
}

pub fn omega2(delta: f64) -> Result<f64> {
    omega2_with_nodes(delta, DEFAULT_NODES)
}

/// Γ-function closed form (apparent singularities at δ = 0 and δ = 1/2).
pub fn omega_closed_form(delta: f64) -> f64 {
    let sp = std::f64::consts::PI.sqrt();
    1.0 / (std::f64::consts::PI * delta * (2.0 * delta - 1.0))
        + (2.0 * gamma(0.5 - delta) / gamma(1.0 - delta) - gamma(-delta) / gamma(1.5 - delta))
            / (2.0 * sp)
}

/// Full evaluation: direct quadrature of the one-line definition, the
/// Ω₁ + Ω₂ sum (must agree to 1e-8), and the closed form.
pub fn omega_with_nodes(delta: f64, nodes: usize) -> Result<OmegaEvaluation> {
    check_delta(delta)?;
    let integrand =
        |r: f64, omr: f64| smooth_factor(omr) * (bracket(r, delta) + r.powf(0.5 - delta));
    let direct = gauss::tanh_sinh(integrand, nodes) / std::f64::consts::PI;
    let o1 = omega1_with_nodes(delta, nodes)?;
    let o2 = omega2_with_nodes(delta, nodes)?;
    // coarse re-evaluation as the error estimate
    let coarse = gauss::tanh_sinh(integrand, nodes / 2) / std::f64::consts::PI;
    Ok(OmegaEvaluation {
        delta,
        omega1: o1,
        omega2: o2,
        omega: direct,
        closed_form: omega_closed_form(delta),
        quad_error: (direct - coarse).abs(),
    })
}

pub fn omega(delta: f64) -> Result<OmegaEvaluation> {
    omega_with_nodes(delta, DEFAULT_NODES)
}

/// Root of Ω(δ*) = 1 by bisection on [0.5, 0.9], to 1e-6.
pub fn delta_star_with_nodes(nodes: usize) -> Result<f64> {
    let mut lo = 0.5;
    let mut hi = 0.9;
    let f = |d: f64| -> Result<f64> { Ok(omega_with_nodes(d, nodes)?.omega - 1.0) };
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(LabError::Data(format!(
            "δ* bracket invalid: Ω−1 at 0.5 is {flo}, at 0.9 is {fhi}; contradicts monotonicity"
        )));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn delta_star() -> Result<f64> {
    delta_star_with_nodes(DEFAULT_NODES)
}

/// N₀ = min{n ∈ ℕ : (n+1)(δ − 1/2) ≥ 3/2 + δ}, with a relative slack of
/// 1e-9 so that exact-equality cases are not lost to rounding.
pub fn n_zero(delta: f64) -> Result<u64> {
    if !(delta > 0.5) || !(delta < 1.0) {
        return Err(LabError::Parameter {
            name: "delta",
            reason: format!("N₀ needs δ ∈ (1/2, 1), got {delta}"),
        });
    }
    let target = 1.5 + delta;
    let slack = 1e-9 * target;
    let mut n = 0u64;
    loop {
        if (n as f64 + 1.0) * (delta - 0.5) >= target - slack {
            return Ok(n);
        }
        n += 1;
        if n > 1_000_000 {
            return Err(LabError::Data("N₀ search did not terminate".into()));
        }
    }
}

/// Evaluation of ∫₀^∞ cos(x²) dx (and the sine analog) by finite quadrature
/// to `cutoff` plus the integration-by-parts asymptotic tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelConstant {
    pub cosine: f64,
    pub sine: f64,
    pub cutoff: f64,
    /// magnitude of the first neglected tail term
    pub tail_error: f64,
}

/// ∫_X^∞ cos(x²) dx = −sin(X²)/(2X) + cos(X²)/(4X³) + 3sin(X²)/(8X⁵) + …
fn fresnel_tail_cos(x: f64) -> f64 {
    let (s, c) = (x * x).sin_cos();
    -s / (2.0 * x) + c / (4.0 * x.powi(3)) + 3.0 * s / (8.0 * x.powi(5))
        - 15.0 * c / (16.0 * x.powi(7))
}

fn fresnel_tail_sin(x: f64) -> f64 {
    let (s, c) = (x * x).sin_cos();
    c / (2.0 * x) + s / (4.0 * x.powi(3)) - 3.0 * c / (8.0 * x.powi(5))
        - 15.0 * s / (16.0 * x.powi(7))
}

pub fn fresnel_constant_with_cutoff(cutoff: f64) -> FresnelConstant {
    // body: panels sized to hold a bounded phase increment each
    let panels = (cutoff * cutoff / 1.5).ceil() as usize + 8;
    let cosine = gauss::integrate_composite(|x| (x * x).cos(), 0.0, cutoff, 12, panels)
        + fresnel_tail_cos(cutoff);
    let sine = gauss::integrate_composite(|x| (x * x).sin(), 0.0, cutoff, 12, panels)
        + fresnel_tail_sin(cutoff);
    FresnelConstant {
        cosine,
        sine,
        cutoff,
        tail_error: 105.0 / (32.0 * cutoff.powi(9)),
    }
}

pub fn fresnel_constant() -> FresnelConstant {
    fresnel_constant_with_cutoff(20.0)
}

/// sup_t (1+t)^{1/2+δ}·I(t) scan of the convolution bound
/// I(t) = ∫₀^t (1+t−s)^{-3/2}(s^{1/2−δ} − t^{1/2−δ})(1+s)^{-1/2} ds.
#[derive(Debug, Clone)]
pub struct ConvolutionBoundReport {
    pub delta: f64,
    pub ts: Vec<f64>,
    /// (1+t)^{1/2+δ}·I(t) at each t
    pub scaled: Vec<f64>,
    pub sup: f64,
    /// log-log slope of the scaled values over the last decade
    pub last_decade_slope: f64,
    /// the integrand is ≥ 0 for all sampled (s, t); a sign violation would
    /// contradict s^{1/2−δ} ≥ t^{1/2−δ} for s ≤ t, δ > 1/2
    pub integrand_nonnegative: bool,
}

fn convolution_integral(t: f64, delta: f64, neg_seen: &mut bool) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let neg = std::cell::Cell::new(false);
    let integrand = |s: f64| {
        let v = (1.0 + t - s).powf(-1.5) * (s.powf(0.5 - delta) - t.powf(0.5 - delta))
            * (1.0 + s).powf(-0.5);
        if v < 0.0 {
            neg.set(true);
        }
        v
    };
    // s^{1/2−δ} is singular at 0: geometric panels toward s = 0, then a
    // smooth remainder on [t/2, t]
    let mut acc = 0.0;
    let mut hi = 0.5 * t;
    for _ in 0..70 {
        let lo = hi * 0.5;
        acc += gauss::integrate(&integrand, lo, hi, 16);
        hi = lo;
        if hi < 1e-18 * t {
            break;
        }
    }
    acc += gauss::integrate(&integrand, 0.5 * t, t, 48);
    if neg.get() {
        *neg_seen = true;
    }
    acc
}

pub fn convolution_bound_check(delta: f64, t_max: f64) -> Result<ConvolutionBoundReport> {
    if !(delta > 0.5) || !(delta < 1.0) {
        return Err(LabError::Parameter {
            name: "delta",
            reason: format!("bound stated for δ ∈ (1/2, 1), got {delta}"),
        });
    }
    let n = 60;
    let ts: Vec<f64> = (0..n)
        .map(|i| 0.1 * (t_max / 0.1).powf(i as f64 / (n - 1) as f64))
        .collect();
    let mut neg_seen = false;
    let scaled: Vec<f64> = ts
        .iter()
        .map(|&t| (1.0 + t).powf(0.5 + delta) * convolution_integral(t, delta, &mut neg_seen))
        .collect();
    let sup = scaled.iter().fold(0.0f64, |m, &v| m.max(v));
    // slope over the last decade of t
    let lo = t_max / 10.0;
    let fit = crate::numerics::fit::fit_power_law(&ts, &scaled, (lo, t_max), 5)?;
    Ok(ConvolutionBoundReport {
        delta,
        ts,
        scaled,
        sup,
        last_decade_slope: fit.exponent,
        integrand_nonnegative: !neg_seen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // frozen against a 30-digit independent evaluation of the definition
    const OMEGA_0: f64 = 0.558_728_799_694_696_8;
    const OMEGA_HALF: f64 = 0.804_651_427_937_721_8;
    const OMEGA_QUARTER: f64 = 0.648_294_120_881_447_4;
    const DELTA_STAR: f64 = 0.660_719_593_430_603_2;

    #[test]
    fn omega_pins_paper_values() {
        let e0 = omega(0.0).unwrap();
        assert_relative_eq!(e0.omega, OMEGA_0, epsilon = 1e-10);
        assert_relative_eq!(
            e0.omega,
            1.0 - 4.0f64.ln() / std::f64::consts::PI,
            epsilon = 1e-10
        );
        let eh = omega(0.5).unwrap();
        assert_relative_eq!(eh.omega, OMEGA_HALF, epsilon = 1e-10);
        assert_relative_eq!(
            eh.omega,
            1.0 + (4.0f64.ln() - 2.0) / std::f64::consts::PI,
            epsilon = 1e-10
        );
        assert_relative_eq!(omega(0.25).unwrap().omega, OMEGA_QUARTER, epsilon = 1e-10);
    }

    #[test]
    fn omega_sum_identity_and_monotonicity_on_grid() {
        let mut prev = f64::NEG_INFINITY;
        let mut d = -2.0;
        while d <= 0.95 + 1e-12 {
            let e = omega(d).unwrap();
            assert!(
                (e.omega - e.omega1 - e.omega2).abs() < 1e-8,
                "sum identity at δ={d}: {}",
                e.omega - e.omega1 - e.omega2
            );
            assert!(e.omega > prev, "monotonicity violated at δ={d}");
            prev = e.omega;
            d += 0.05;
        }
    }

    #[test]
    fn omega_half_limit_branch_is_continuous() {
        let at = omega1(0.5).unwrap();
        let below = omega1(0.5 - 1e-4).unwrap();
        let above = omega1(0.5 + 1e-4).unwrap();
        assert!((at - below).abs() < 1e-3 && (at - above).abs() < 1e-3);
        // tighter: the two-sided average matches the limit to second order
        assert_relative_eq!(0.5 * (below + above), at, epsilon = 1e-6);
    }

    #[test]
    fn omega2_half_closed_form() {
        // substitution v = √(1−r) gives Ω₂(1/2) = 2 ln 2 / π exactly
        assert_relative_eq!(
            omega2(0.5).unwrap(),
            2.0 * 2.0f64.ln() / std::f64::consts::PI,
            epsilon = 1e-10
        );
    }

    #[test]
    fn omega_rejects_delta_at_or_above_one() {
        assert!(omega(1.0).is_err());
        assert!(omega(1.2).is_err());
    }

    #[test]
    fn omega_limit_small_for_very_negative_delta() {
        // the δ → −∞ limit is approached like |δ|^{-1/2}
        assert!(omega(-200.0).unwrap().omega < 0.05);
        assert!(omega(0.9).unwrap().omega > 1.0);
    }

    #[test]
    fn closed_form_matches_quadrature_away_from_apparent_singularities() {
        let mut d: f64 = -2.0;
        while d <= 0.95 + 1e-12 {
            if (d.abs() > 0.01) && ((d - 0.5).abs() > 0.01) {
                let e = omega(d).unwrap();
                assert!(
                    (e.omega - e.closed_form).abs() < 1e-6,
                    "closed-form deviation {} at δ={d}",
                    e.omega - e.closed_form
                );
            }
            d += 0.03;
        }
    }

    #[test]
    fn delta_star_location_and_reproducibility() {
        let ds = delta_star().unwrap();
        assert!((0.65..=0.67).contains(&ds), "δ* = {ds}");
        assert_relative_eq!(ds, DELTA_STAR, epsilon = 2e-6);
        assert!((omega(ds).unwrap().omega - 1.0).abs() < 1e-5);
        assert!(omega(ds - 0.05).unwrap().omega < 1.0);
        // node-count independence at ≥ 2048
        let ds4k = delta_star_with_nodes(4096).unwrap();
        assert!((ds - ds4k).abs() < 1e-6);
    }

    #[test]
    fn n_zero_inequality_cases() {
        assert_eq!(n_zero(0.6).unwrap(), 20);
        assert_eq!(n_zero(0.65).unwrap(), 14);
        assert_eq!(n_zero(0.51).unwrap(), 200);
        assert!(n_zero(0.5).is_err());
        assert!(n_zero(0.49).is_err());
    }

    #[test]
    fn fresnel_constant_value_and_tail_control() {
        let target = (std::f64::consts::PI / 8.0).sqrt();
        let f = fresnel_constant();
        assert_relative_eq!(f.cosine, target, epsilon = 1e-6);
        assert_relative_eq!(f.sine, target, epsilon = 1e-6);
        // truncation robustness: X = 20 vs X = 35 differ below 1e-6
        let f35 = fresnel_constant_with_cutoff(35.0);
        assert!((f.cosine - f35.cosine).abs() < 1e-6);
    }

    #[test]
    fn convolution_bound_is_flat_and_nonnegative() {
        let rep = convolution_bound_check(0.6, 1e4).unwrap();
        assert!(rep.integrand_nonnegative);
        assert!(rep.sup.is_finite() && rep.sup > 0.0);
        assert!(
            rep.last_decade_slope.abs() < 0.05,
            "slope {}",
            rep.last_decade_slope
        );
        // I(0) = 0 by the empty integral
        let mut neg = false;
        assert_eq!(convolution_integral(0.0, 0.6, &mut neg), 0.0);
    }
}
