//! Scalar kernels of the effective momentum equation: the resolvent boundary
//! function G(k+i0), the dispersive kernel f(t), and the friction kernel K(t)
//! by two independent routes (spectral Fourier inversion and a Volterra
//! product-integration solver), plus their decay laws.
//!
//! The consistent system implemented here is
//!   f(s)  = (1/3)∫ cos(sρ²) D(ρ) dξ,           D = effective |Ŵ|²,
//!   G(k+i0) = −∫₀^∞ e^{iks} f(s) ds,           (i−1)(π²/3)√k small-k law,
//!   K̃(k) = −1/(ik + Z G(k+i0)),                K(t<0) = 0, K(0⁺) = 1,
//!   K̇(t) + Z (f∗K)(t) = 0,                     ZK(t) → (3/√2)π^{−5/2} t^{−1/2}.
//!
//! For g > 0 the density is D_eff = Ŵ₁·ξ̂ (first order in g: the static
//! vector corrections are exact, the perturbed-propagator correction is the
//! O(g) remainder); deviations from g = 0 are reported, never asserted.

use num_complex::Complex64;

use crate::model::{ModelParams, RadialPotential};
use crate::numerics::oscillatory::{
    linear_phase_integral, quadratic_phase_integral, quadratic_phase_integral_with_error, Trig,
};
use crate::numerics::special::fresnel;
use crate::numerics::{fit, interp, quad};
use crate::parallel::{self, Mode};
use crate::radial::{resolvent_apply, RadialGrid};
use crate::sector::{sector_transform, RhoGrid, SectorProfile};
use crate::{LabError, Result};

/// Which computational route produced a kernel table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Fourier,
    Volterra,
    Quadrature,
}

impl Route {
    pub fn tag(&self) -> &'static str {
        match self {
            Route::Fourier => "fourier",
            Route::Volterra => "volterra",
            Route::Quadrature => "quadrature",
        }
    }
}

/// Sampled scalar kernel with a per-point quadrature-error estimate.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub abscissae: Vec<f64>,
    pub values: Vec<Complex64>,
    pub quad_error: Vec<f64>,
    pub route: Route,
}

impl KernelTable {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

/// Power-law check against a pinned exponent and coefficient:
/// relative_error = max over the window of |value·t^{−exponent}/coefficient − 1|.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCheck {
    pub exponent: f64,
    pub coefficient: f64,
    pub window: (f64, f64),
    pub relative_error: f64,
}

pub fn asymptotic_check(
    ts: &[f64],
    values: &[f64],
    exponent: f64,
    coefficient: f64,
    window: (f64, f64),
) -> AsymptoticCheck {
    let mut worst = 0.0f64;
    for (&t, &v) in ts.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        let dev = (v * t.powf(-exponent) / coefficient - 1.0).abs();
        worst = worst.max(dev);
    }
    AsymptoticCheck {
        exponent,
        coefficient,
        window,
        relative_error: worst,
    }
}

/// ZK(t)·√t limit (3/√2)·π^{−5/2} of the friction kernel at g = 0.
pub const ZK_SQRT_T_LIMIT: f64 = 0.121_263_853_907_049_46;
/// t^{3/2}·f(t) limit −π^{3/2}/(3√2) at g = 0.
pub const F_T32_LIMIT: f64 = -1.312_466_768_131_473_1;
/// |G(k+i0)|/√k limit √2·π²/3 at g = 0.
pub const G_SQRTK_MODULUS: f64 = 4.652_758_163_107_332;

/// Engine caching the effective spectral density and the K̃ tables for one
/// parameter set. All evaluations at distinct abscissae are independent.
pub struct KernelEngine {
    pub params: ModelParams,
    pub potential: RadialPotential,
    rho: RhoGrid,
    /// D_eff(ρ) on the ρ-grid (= |Ŵ|² at g = 0).
    d_eff: Vec<f64>,
    /// wider grid for the principal-value quadrature of Im G, so that
    /// G(k) stays computable for every k = ρ² reached by the K tables
    pv_rho: RhoGrid,
    pv_d: Vec<f64>,
    /// Watson coefficients of D_eff(√u) = d0 + d1·u + O(u²) at u = 0.
    d0: f64,
    d1: f64,
    /// true when g = 0 and the potential is the Gaussian family: closed
    /// forms replace quadrature where available
    gaussian_exact: bool,
    /// amplitude tables for the Fourier route, on the ρ-grid (k = ρ²)
    a_cos: Vec<f64>,
    a_sin: Vec<f64>,
    a_kdot: Vec<f64>,
}

impl KernelEngine {
    pub fn new(params: ModelParams, potential: RadialPotential) -> Result<Self> {
        let rho = RhoGrid::standard(potential.sigma);
        let pv_rho = RhoGrid::new(10.0 / potential.sigma, 5121);
        let g = params.coupling;
        let (d_eff, pv_d, gaussian_exact) = if g == 0.0 {
            let closed = |p: f64| {
                let w = potential.transform(p);
                w * w
            };
            (
                rho.rho.iter().map(|&p| closed(p)).collect(),
                pv_rho.rho.iter().map(|&p| closed(p)).collect(),
                true,
            )
        } else {
            let pv_d = effective_density(&params, &potential, &pv_rho)?;
            let d: Vec<f64> = rho
                .rho
                .iter()
                .map(|&p| interp::cubic(&pv_rho.rho, &pv_d, p))
                .collect();
            (d, pv_d, false)
        };
        let d0 = d_eff[0];
        // derivative of D(√u) in u = ρ² at 0, by secant on the first nodes
        let d1 = (d_eff[1] - d_eff[0]) / (rho.rho[1] * rho.rho[1]);
        let mut engine = Self {
            params,
            potential,
            rho,
            d_eff,
            pv_rho,
            pv_d,
            d0,
            d1,
            gaussian_exact,
            a_cos: Vec::new(),
            a_sin: Vec::new(),
            a_kdot: Vec::new(),
        };
        engine.build_ktilde_tables();
        Ok(engine)
    }

    fn sigma2(&self) -> f64 {
        self.potential.sigma * self.potential.sigma
    }

    /// D_eff(ρ) with cubic interpolation off the grid.
    fn density(&self, p: f64) -> f64 {
        if self.gaussian_exact {
            (-self.sigma2() * p * p).exp()
        } else {
            interp::cubic(&self.pv_rho.rho, &self.pv_d, p)
        }
    }

    fn density_derivative(&self, p: f64) -> f64 {
        if self.gaussian_exact {
            -2.0 * self.sigma2() * p * (-self.sigma2() * p * p).exp()
        } else {
            // secant over the neighboring nodes
            let h = self.pv_rho.spacing();
            (self.density(p + h) - self.density((p - h).max(0.0))) / (h + h.min(p))
        }
    }

    pub fn rho_grid(&self) -> &RhoGrid {
        &self.rho
    }

    /// f(t) = (1/3)∫cos(tρ²)D_eff(ρ)dξ = (4π/3)∫₀^∞ ρ²D_eff cos(tρ²)dρ,
    /// with a quadrature-error estimate (zero on the closed Gaussian route).
    pub fn f_function(&self, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return Err(LabError::Parameter {
                name: "t",
                reason: format!("f(t) requires t > 0, got {t}"),
            });
        }
        Ok(self.f_at(t))
    }

    /// f at any t ≥ 0 (t = 0 gives the finite limit (1/3)∫D_eff dξ).
    pub fn f_at(&self, t: f64) -> (f64, f64) {
        if self.gaussian_exact {
            let z = Complex64::new(self.sigma2(), t);
            let val = std::f64::consts::PI.powf(1.5) / 3.0 * z.powf(-1.5).re;
            (val, 0.0)
        } else {
            let a: Vec<f64> = self
                .rho
                .rho
                .iter()
                .zip(&self.d_eff)
                .map(|(&p, &d)| 4.0 * std::f64::consts::PI / 3.0 * p * p * d)
                .collect();
            quadratic_phase_integral_with_error(&a, &self.rho.rho, t, Trig::Cos)
        }
    }

    /// Boundary value G(k+i0) of the resolvent pairing.
    ///
    /// For k > 0:  Re G = −(π²/3)√k·D_eff(√k)  (Plemelj delta term),
    ///             Im G = (2π/3)[PV∫ρ²D/(ρ²−k)dρ − ∫ρ²D/(ρ²+k)dρ],
    /// G(−k) = conj G(k), G(0+i0) = 0.
    pub fn g_function(&self, k: f64) -> Result<Complex64> {
        if k == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ak = k.abs();
        let rho0 = ak.sqrt();
        let rho_max = self.pv_rho.rho_max;
        if rho0 > 0.98 * rho_max {
            return Err(LabError::Range {
                what: "g_function",
                value: k,
                min: -(0.98 * rho_max).powi(2),
                max: (0.98 * rho_max).powi(2),
            });
        }
        let d0k = self.density(rho0);
        let re = -std::f64::consts::PI.powi(2) / 3.0 * rho0 * d0k;

        // principal value with the singular constant subtracted analytically
        let pv_reg: Vec<f64> = self
            .pv_rho
            .rho
            .iter()
            .zip(&self.pv_d)
            .map(|(&p, &d)| {
                let denom = p * p - ak;
                if denom.abs() < 1e-7 * (1.0 + ak) {
                    let pm = 0.5 * (p + rho0);
                    d + ak * self.density_derivative(pm) / (2.0 * pm)
                } else {
                    d + ak * (d - d0k) / denom
                }
            })
            .collect();
        let pv_log = ak * d0k / (2.0 * rho0)
            * ((rho_max - rho0) / (rho_max + rho0)).ln();
        let pv = quad::integrate(&self.pv_rho.rho, &pv_reg) + pv_log;

        let plus: Vec<f64> = self
            .pv_rho
            .rho
            .iter()
            .zip(&self.pv_d)
            .map(|(&p, &d)| p * p * d / (p * p + ak))
            .collect();
        let plus_int = quad::integrate(&self.pv_rho.rho, &plus);

        let im = 2.0 * std::f64::consts::PI / 3.0 * (pv - plus_int);
        let g = Complex64::new(re, im);
        Ok(if k > 0.0 { g } else { g.conj() })
    }

    /// K̃(k) = −1/(ik + Z·G(k+i0)) split into real and imaginary parts.
    fn ktilde(&self, k: f64) -> Complex64 {
        let g = self.g_function(k).expect("ktilde called inside table range");
        let z = self.params.z();
        let denom = Complex64::new(z * g.re, k + z * g.im);
        -denom.conj() / denom.norm_sqr()
    }

    /// Builds the ρ-substituted amplitude tables 2ρ·Re K̃(ρ²), 2ρ·Im K̃(ρ²)
    /// and 2ρ³·Re K̃(ρ²); the ρ = 0 entries carry the analytic limits.
    fn build_ktilde_tables(&mut self) {
        let z = self.params.z();
        let n = self.rho.rho.len();
        let tables = parallel::map_collect(Mode::Parallel, n, |i| {
            let p = self.rho.rho[i];
            if i == 0 {
                // lim 2ρ·ReK̃(ρ²) = lim 2ρ·ImK̃(ρ²) = 3/(Zπ²D₀)
                let a0 = 3.0 / (z * std::f64::consts::PI.powi(2) * self.d0);
                (a0, a0, 0.0)
            } else {
                let kt = self.ktilde(p * p);
                (2.0 * p * kt.re, 2.0 * p * kt.im, 2.0 * p * p * p * kt.re)
            }
        });
        self.a_cos = tables.iter().map(|t| t.0).collect();
        self.a_sin = tables.iter().map(|t| t.1).collect();
        self.a_kdot = tables.iter().map(|t| t.2).collect();
    }

    /// K(t) for t > 0 by the cosine inversion K = (2/π)∫₀^∞ReK̃·cos kt dk.
    fn k_positive(&self, t: f64) -> (f64, f64) {
        let (v, e) =
            quadratic_phase_integral_with_error(&self.a_cos, &self.rho.rho, t, Trig::Cos);
        (2.0 / std::f64::consts::PI * v, 2.0 / std::f64::consts::PI * e)
    }

    /// K(t) for arbitrary sign by the full inversion
    /// K = (1/π)[∫₀^{k_max}(ReK̃ cos kt + ImK̃ sin kt)dk + tail],
    /// tail = ∫_{k_max}^∞ sin(kt)/k dk since ImK̃ → 1/k and ReK̃ → 0.
    pub fn k_full(&self, t: f64) -> f64 {
        let cos_part = quadratic_phase_integral(&self.a_cos, &self.rho.rho, t, Trig::Cos);
        let sin_part = quadratic_phase_integral(&self.a_sin, &self.rho.rho, t, Trig::Sin);
        let k_max = self.rho.rho_max * self.rho.rho_max;
        let tail = if t == 0.0 {
            0.0
        } else {
            t.signum() * (std::f64::consts::FRAC_PI_2 - si_asymptotic(k_max * t.abs()))
        };
        (cos_part + sin_part + tail) / std::f64::consts::PI
    }

    /// Friction kernel by the Fourier route on an arbitrary t-grid
    /// (negative abscissae use the full inversion; causality makes them ≈ 0).
    pub fn k_kernel_fourier(&self, ts: &[f64]) -> KernelTable {
        let rows = parallel::map_collect(Mode::Parallel, ts.len(), |i| {
            let t = ts[i];
            if t >= 0.0 {
                self.k_positive(t)
            } else {
                (self.k_full(t), f64::NAN)
            }
        });
        KernelTable {
            abscissae: ts.to_vec(),
            values: rows.iter().map(|r| Complex64::new(r.0, 0.0)).collect(),
            quad_error: rows.iter().map(|r| r.1).collect(),
            route: Route::Fourier,
        }
    }

    /// K̇(t) by the Fourier route: K̇ = −(2/π)∫₀^∞ k·ReK̃·sin(kt) dk.
    pub fn kdot_fourier(&self, t: f64) -> f64 {
        -2.0 / std::f64::consts::PI
            * quadratic_phase_integral(&self.a_kdot, &self.rho.rho, t, Trig::Sin)
    }

    /// Uniform-grid samples of f for the Volterra solver.
    pub fn f_table(&self, t_max: f64, dt: f64) -> Vec<f64> {
        let n = (t_max / dt).round() as usize;
        parallel::map_collect(Mode::Parallel, n + 1, |j| self.f_at(j as f64 * dt).0)
    }

    /// Solves K̇ = −Z(f∗K), K(0) = 1 by second-order product integration
    /// (trapezoidal memory weights, trapezoidal march, implicit diagonal).
    pub fn k_kernel_volterra(&self, t_max: f64, dt: f64) -> Result<KernelTable> {
        if !(dt > 0.0) || !(t_max > dt) {
            return Err(LabError::Parameter {
                name: "dt",
                reason: "need 0 < dt < t_max".into(),
            });
        }
        let z = self.params.z();
        let f = self.f_table(t_max, dt);
        let n = f.len() - 1;
        let mut k = vec![0.0f64; n + 1];
        let mut kdot = vec![0.0f64; n + 1];
        k[0] = 1.0;
        kdot[0] = 0.0;
        let diag = 1.0 + z * dt * dt * f[0] / 4.0;
        for m in 0..n {
            // Σ'_{j=1..m} f_{m+1-j} K_j plus the half-weight j = 0 term
            let mut conv = 0.5 * f[m + 1] * k[0];
            for j in 1..=m {
                conv += f[m + 1 - j] * k[j];
            }
            let rhs = k[m] + 0.5 * dt * kdot[m] - 0.5 * z * dt * dt * conv;
            k[m + 1] = rhs / diag;
            kdot[m + 1] = -z * dt * (conv + 0.5 * f[0] * k[m + 1]);
            if !k[m + 1].is_finite() || k[m + 1].abs() > 1e6 {
                return Err(LabError::Instability {
                    what: "k_kernel_volterra",
                    t: (m + 1) as f64 * dt,
                    detail: "product-integration iterates blew up (dt too large?)".into(),
                });
            }
        }
        let abscissae: Vec<f64> = (0..=n).map(|j| j as f64 * dt).collect();
        Ok(KernelTable {
            abscissae,
            values: k.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            quad_error: vec![dt * dt; n + 1],
            route: Route::Volterra,
        })
    }

    /// Half-line transform f̃(k) = ∫₀^∞ e^{iks} f(s) ds by Filon panels on
    /// [0, S] plus the two-term Watson tail integrated exactly through
    /// Fresnel-reduced incomplete integrals. F(k) = Z·f̃(k).
    pub fn f_tilde(&self, k: f64) -> Result<Complex64> {
        if k < 0.0 {
            return Ok(self.f_tilde(-k)?.conj());
        }
        let s2 = self.sigma2();
        let s_split = 400.0 * s2;
        let grid = f_body_grid(s2, s_split);
        let samples: Vec<f64> = grid.iter().map(|&s| self.f_at(s).0).collect();
        let body = linear_phase_integral(&samples, &grid, k);

        // Watson tail: f(s) ≈ c32·s^{-3/2} + c52·s^{-5/2} beyond S
        let pref = std::f64::consts::PI.powf(1.5);
        let c32 = -pref * self.d0 / (3.0 * std::f64::consts::SQRT_2);
        let c52 = -pref * self.d1 / (2.0 * std::f64::consts::SQRT_2);
        let j32 = tail_j32(s_split, k);
        let j52 = if k == 0.0 {
            Complex64::new(2.0 / 3.0 * s_split.powf(-1.5), 0.0)
        } else {
            Complex64::new(0.0, 2.0 * k / 3.0) * j32
                + 2.0 / 3.0 * s_split.powf(-1.5) * Complex64::from_polar(1.0, k * s_split)
        };
        Ok(body + c32 * j32 + c52 * j52)
    }

    /// Direct-quadrature F(k) against −Z·G(k+i0) over a k-grid, plus the
    /// small-k ratio F/(ik + ZG) → −1.
    pub fn check_f_identity(&self, ks: &[f64]) -> Result<FIdentityReport> {
        let z = self.params.z();
        let mut max_rel_dev = 0.0f64;
        let mut rows = Vec::with_capacity(ks.len());
        for &k in ks {
            let f_half = self.f_tilde(k)? * z;
            let g = self.g_function(k)?;
            let dev = (f_half + z * g).norm() / (z * g).norm();
            max_rel_dev = max_rel_dev.max(dev);
            rows.push((k, f_half, g, dev));
        }
        Ok(FIdentityReport {
            rows,
            max_rel_dev,
        })
    }

    /// F(k)/(ik + ZG(k+i0)); tends to −1 as k → 0⁺.
    pub fn f_over_symbol_ratio(&self, k: f64) -> Result<Complex64> {
        let z = self.params.z();
        let f_half = self.f_tilde(k)? * z;
        let g = self.g_function(k)?;
        Ok(f_half / (Complex64::new(0.0, k) + z * g))
    }

    /// K̇ two ways on the Volterra grid: centered differences of K against
    /// the convolution −Z∫₀^t K(t−s) f(s) ds, plus the t^{-3/2} envelope fit
    /// of the Fourier-route K̇.
    pub fn kdot_and_identity(&self, t_max: f64, dt: f64) -> Result<KdotReport> {
        let table = self.k_kernel_volterra(t_max, dt)?;
        let k = table.real_values();
        let f = self.f_table(t_max, dt);
        let z = self.params.z();
        let n = k.len() - 1;
        let ts = &table.abscissae;

        let kdot_fd: Vec<f64> = (0..=n)
            .map(|m| {
                if m == 0 {
                    0.0
                } else if m == n {
                    (k[n] - k[n - 1]) / dt
                } else {
                    (k[m + 1] - k[m - 1]) / (2.0 * dt)
                }
            })
            .collect();
        // −Z ∫₀^t K(t−s) f(s) ds by trapezoid (the factors swapped relative
        // to the solver's f∗K, so commutativity is part of the check)
        let conv: Vec<f64> = (0..=n)
            .map(|m| {
                if m == 0 {
                    return 0.0;
                }
                let mut acc = 0.5 * (k[m] * f[0] + k[0] * f[m]);
                for j in 1..m {
                    acc += k[m - j] * f[j];
                }
                -z * dt * acc
            })
            .collect();

        let mut max_abs_diff = 0.0f64;
        for m in 0..=n {
            if ts[m] >= 1.0 {
                max_abs_diff = max_abs_diff.max((kdot_fd[m] - conv[m]).abs());
            }
        }

        // envelope fit of |K̇| on [50, 500] via the Fourier route
        let fit_ts = logspace(50.0, 500.0, 30);
        let fit_vals: Vec<f64> = fit_ts.iter().map(|&t| self.kdot_fourier(t).abs()).collect();
        let envelope_fit = fit::fit_power_law(&fit_ts, &fit_vals, (50.0, 500.0), 10)?;

        Ok(KdotReport {
            ts: ts.clone(),
            kdot_fd,
            convolution: conv,
            max_abs_diff_t_ge_1: max_abs_diff,
            envelope_fit,
        })
    }
}

/// Row-wise comparison F(k) vs −ZG(k+i0).
#[derive(Debug, Clone)]
pub struct FIdentityReport {
    /// (k, F(k), G(k+i0), relative deviation |F + ZG|/|ZG|)
    pub rows: Vec<(f64, Complex64, Complex64, f64)>,
    pub max_rel_dev: f64,
}

/// K̇ identity check and envelope fit.
#[derive(Debug, Clone)]
pub struct KdotReport {
    pub ts: Vec<f64>,
    pub kdot_fd: Vec<f64>,
    pub convolution: Vec<f64>,
    pub max_abs_diff_t_ge_1: f64,
    pub envelope_fit: fit::FitResult,
}

/// Effective density D_eff(ρ) = Ŵ₁(ρ)·ξ̂(ρ) for g > 0 (equals |Ŵ|² at g=0).
fn effective_density(
    params: &ModelParams,
    potential: &RadialPotential,
    rho: &RhoGrid,
) -> Result<Vec<f64>> {
    let grid = RadialGrid::standard(potential.sigma);
    let w = potential.sample(&grid);
    let g = params.coupling;
    let u = resolvent_apply(&grid, &w, g, 1e-6)?;
    // ξ = W − gW·u
    let xi: Vec<f64> = w.iter().zip(&u).map(|(&wv, &uv)| wv - g * wv * uv).collect();
    // W₁(r) = −∫_r^∞ (1−g·u)W' ds, accumulated from the outside in
    let wp: Vec<f64> = grid.r.iter().map(|&r| potential.derivative(r)).collect();
    let integrand: Vec<f64> = wp.iter().zip(&u).map(|(&d, &uv)| (1.0 - g * uv) * d).collect();
    let cumulative = quad::cumulative(&grid.r, &integrand);
    let total = *cumulative.last().unwrap();
    let w1: Vec<f64> = cumulative.iter().map(|&c| c - total).collect();

    let xi_hat = sector_transform(&grid, &SectorProfile { ell: 0, radial: xi }, 0, rho)?;
    let w1_hat = sector_transform(&grid, &SectorProfile { ell: 0, radial: w1 }, 0, rho)?;
    Ok(xi_hat.iter().zip(&w1_hat).map(|(&a, &b)| a * b).collect())
}

/// Body grid for the half-line transform: dense near 0 on the σ² scale,
/// geometric growth outward; odd node count for the Filon panels.
fn f_body_grid(sigma2: f64, s_max: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    let mut s = sigma2 / 100.0;
    while s < s_max {
        grid.push(s);
        s *= 1.01;
    }
    grid.push(s_max);
    if grid.len() % 2 == 0 {
        let last = *grid.last().unwrap();
        let prev = grid[grid.len() - 2];
        grid.insert(grid.len() - 1, 0.5 * (prev + last));
    }
    grid
}

/// ∫_S^∞ s^{-3/2} e^{iks} ds = 2S^{-1/2}e^{ikS} + 4ik∫_{√S}^∞ e^{ikx²} dx,
/// the Fresnel piece evaluated exactly.
fn tail_j32(s_split: f64, k: f64) -> Complex64 {
    if k == 0.0 {
        return Complex64::new(2.0 / s_split.sqrt(), 0.0);
    }
    let e_iks = Complex64::from_polar(1.0, k * s_split);
    let full = 0.5 * (std::f64::consts::PI / k).sqrt() * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let arg = (2.0 * k * s_split / std::f64::consts::PI).sqrt();
    let (c, s) = fresnel(arg);
    let partial = (std::f64::consts::PI / (2.0 * k)).sqrt() * Complex64::new(c, s);
    2.0 / s_split.sqrt() * e_iks + Complex64::new(0.0, 4.0 * k) * (full - partial)
}

/// Sine integral tail π/2 − Si(x) for large x by the asymptotic series.
fn si_asymptotic(x: f64) -> f64 {
    debug_assert!(x > 10.0);
    let x2 = x * x;
    let f = (1.0 - 2.0 / x2 + 24.0 / (x2 * x2)) / x;
    let g = (1.0 - 6.0 / x2 + 120.0 / (x2 * x2)) / x2;
    std::f64::consts::FRAC_PI_2 - f * x.cos() - g * x.sin()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_default_potential;
    use approx::assert_relative_eq;

    fn engine_g0() -> &'static KernelEngine {
        use std::sync::OnceLock;
        static ENGINE: OnceLock<KernelEngine> = OnceLock::new();
        ENGINE.get_or_init(|| {
            let params = ModelParams::new(1.0, 0.0, 1.0).unwrap(); // Z = 2
            let pot = make_default_potential(1.0).unwrap();
            KernelEngine::new(params, pot).unwrap()
        })
    }

    #[test]
    fn f_limits_and_tail() {
        let e = engine_g0();
        // f(0⁺) = (1/3)∫|Ŵ|²dξ = π^{3/2}/3 for σ = 1
        let (f0, _) = e.f_at(0.0);
        assert_relative_eq!(f0, std::f64::consts::PI.powf(1.5) / 3.0, max_relative = 1e-12);
        assert!(e.f_function(0.0).is_err());
        assert!(e.f_function(-1.0).is_err());
        // the 1/t correction to the tail is 3σ²/(2t); σ = 0.6 keeps the whole
        // window [50, 200] within the 2% band around the universal constant
        let narrow = KernelEngine::new(
            ModelParams::new(1.0, 0.0, 1.0).unwrap(),
            make_default_potential(0.6).unwrap(),
        )
        .unwrap();
        for &t in &[50.0, 100.0, 200.0] {
            let (f, _) = narrow.f_function(t).unwrap();
            assert_relative_eq!(t.powf(1.5) * f, F_T32_LIMIT, max_relative = 0.02);
        }
    }

    #[test]
    fn f_filon_route_matches_closed_gaussian() {
        let e = engine_g0();
        let a: Vec<f64> = e
            .rho
            .rho
            .iter()
            .zip(&e.d_eff)
            .map(|(&p, &d)| 4.0 * std::f64::consts::PI / 3.0 * p * p * d)
            .collect();
        for &t in &[0.5, 3.0, 20.0, 120.0] {
            let filon = quadratic_phase_integral(&a, &e.rho.rho, t, Trig::Cos);
            let closed = e.f_at(t).0;
            assert_relative_eq!(filon, closed, epsilon = 1e-9, max_relative = 1e-7);
        }
    }

    #[test]
    fn g_small_k_law_and_zero() {
        let e = engine_g0();
        assert_eq!(e.g_function(0.0).unwrap(), Complex64::new(0.0, 0.0));
        let k = 1e-4;
        let g = e.g_function(k).unwrap();
        let modulus = g.norm() / k.sqrt();
        assert_relative_eq!(modulus, G_SQRTK_MODULUS, max_relative = 0.02);
        let arg = g.arg();
        assert!((arg - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 0.02, "arg {arg}");
        // mirror side
        let gm = e.g_function(-k).unwrap();
        assert_relative_eq!(gm.norm() / k.sqrt(), G_SQRTK_MODULUS, max_relative = 0.02);
        assert!(
            (gm.arg() + 3.0 * std::f64::consts::FRAC_PI_4).abs() < 0.02,
            "arg {}",
            gm.arg()
        );
        assert!(e.g_function(100.0).is_err());
    }

    #[test]
    fn f_identity_matches_minus_zg() {
        let e = engine_g0();
        let ks = logspace(0.01, 10.0, 25);
        let rep = e.check_f_identity(&ks).unwrap();
        assert!(rep.max_rel_dev < 1e-2, "max rel dev {}", rep.max_rel_dev);
        // ratio → −1 at small k
        let ratio = e.f_over_symbol_ratio(1e-3).unwrap();
        assert!((ratio - Complex64::new(-1.0, 0.0)).norm() < 0.05, "ratio {ratio}");
        // Riemann–Lebesgue: F → 0 for large k
        let f_large = e.f_tilde(30.0).unwrap();
        assert!(f_large.norm() < 0.05 * e.f_tilde(0.5).unwrap().norm());
    }

    #[test]
    fn kernel_fourier_normalization_causality_and_tail() {
        let e = engine_g0();
        let table = e.k_kernel_fourier(&[0.0, -5.0]);
        assert_relative_eq!(table.values[0].re, 1.0, epsilon = 1e-3);
        assert!(table.values[1].re.abs() < 1e-2, "K(-5) = {}", table.values[1].re);

        let ts = logspace(500.0, 2000.0, 15);
        let tab = e.k_kernel_fourier(&ts);
        let z = e.params.z();
        let scaled: Vec<f64> = ts
            .iter()
            .zip(&tab.values)
            .map(|(&t, v)| t.sqrt() * z * v.re)
            .collect();
        for (i, &s) in scaled.iter().enumerate() {
            assert_relative_eq!(s, ZK_SQRT_T_LIMIT, max_relative = 0.05);
            let _ = i;
        }
    }

    #[test]
    fn full_inversion_agrees_with_cosine_route_for_positive_t() {
        let e = engine_g0();
        for &t in &[0.7, 5.0, 20.0] {
            let a = e.k_positive(t).0;
            let b = e.k_full(t);
            assert_relative_eq!(a, b, epsilon = 2e-4);
        }
    }

    #[test]
    fn volterra_matches_fourier_route() {
        let e = engine_g0();
        let vol = e.k_kernel_volterra(50.0, 0.01).unwrap();
        assert_eq!(vol.values[0].re, 1.0);
        let idx: Vec<usize> = (0..vol.abscissae.len()).step_by(250).collect();
        let ts: Vec<f64> = idx.iter().map(|&i| vol.abscissae[i]).collect();
        let four = e.k_kernel_fourier(&ts);
        let mut sup = 0.0f64;
        for (row, &i) in idx.iter().enumerate() {
            sup = sup.max((four.values[row].re - vol.values[i].re).abs());
        }
        assert!(sup < 1e-3, "route difference {sup}");
    }

    #[test]
    fn volterra_is_second_order_in_dt() {
        let e = engine_g0();
        let coarse = e.k_kernel_volterra(10.0, 0.04).unwrap();
        let mid = e.k_kernel_volterra(10.0, 0.02).unwrap();
        let fine = e.k_kernel_volterra(10.0, 0.01).unwrap();
        // compare at t = 10
        let kc = coarse.values.last().unwrap().re;
        let km = mid.values.last().unwrap().re;
        let kf = fine.values.last().unwrap().re;
        let ratio = (kc - km) / (km - kf);
        assert!((ratio - 4.0).abs() < 0.8, "convergence ratio {ratio}");
    }

    #[test]
    fn kdot_identity_and_envelope() {
        let e = engine_g0();
        let rep = e.kdot_and_identity(50.0, 0.01).unwrap();
        assert!(
            rep.max_abs_diff_t_ge_1 < 5e-3,
            "identity residual {}",
            rep.max_abs_diff_t_ge_1
        );
        assert!(
            (rep.envelope_fit.exponent + 1.5).abs() < 0.1,
            "kdot exponent {}",
            rep.envelope_fit.exponent
        );
        // K̇(0⁺) = 0 by the empty integral
        assert_eq!(rep.kdot_fd[0], 0.0);
        assert_eq!(rep.convolution[0], 0.0);
    }

    #[test]
    fn coupled_engine_reports_small_deviation_from_free_kernels() {
        let params = ModelParams::new(1.0, 0.05, 1.0).unwrap();
        let pot = make_default_potential(1.0).unwrap();
        let eg = KernelEngine::new(params, pot).unwrap();
        let e0 = engine_g0();
        // f and G shift by O(g), not more
        let (fg, _) = eg.f_at(1.0);
        let (f0, _) = e0.f_at(1.0);
        assert!((fg - f0).abs() < 0.1 * f0.abs().max(0.1), "fg {fg} f0 {f0}");
        let gg = eg.g_function(0.5).unwrap();
        let g0 = e0.g_function(0.5).unwrap();
        assert!((gg - g0).norm() < 0.15 * g0.norm());
    }
}
