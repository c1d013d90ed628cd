//! Physical parameters, the interaction potential and initial-data checks.
//!
//! Everything lives in the rescaled units 2m = 1, Ŵ(0) = 1; no other unit
//! system appears anywhere in the crate.

use crate::numerics::quad;
use crate::radial::RadialGrid;
use crate::{LabError, Result};

/// Model constants. `Z = 2 ρ₀ / M` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub tracer_mass: f64,
    pub coupling: f64,
    pub mean_density: f64,
    pub g_max: f64,
}

pub const DEFAULT_G_MAX: f64 = 0.1;

impl ModelParams {
    pub fn new(tracer_mass: f64, coupling: f64, mean_density: f64) -> Result<Self> {
        Self::with_g_max(tracer_mass, coupling, mean_density, DEFAULT_G_MAX)
    }

    pub fn with_g_max(
        tracer_mass: f64,
        coupling: f64,
        mean_density: f64,
        g_max: f64,
    ) -> Result<Self> {
        if !(tracer_mass > 0.0) {
            return Err(LabError::Parameter {
                name: "tracer_mass",
                reason: format!("must be positive, got {tracer_mass}"),
            });
        }
        if !(mean_density > 0.0) {
            return Err(LabError::Parameter {
                name: "mean_density",
                reason: format!("must be positive, got {mean_density}"),
            });
        }
        if !(0.0..=g_max).contains(&coupling) {
            return Err(LabError::Parameter {
                name: "coupling",
                reason: format!("must lie in [0, {g_max}], got {coupling}"),
            });
        }
        Ok(Self {
            tracer_mass,
            coupling,
            mean_density,
            g_max,
        })
    }

    /// Z := 2 ρ₀ / M, the coefficient of the linearized momentum equation.
    pub fn z(&self) -> f64 {
        2.0 * self.mean_density / self.tracer_mass
    }
}

/// Spherically symmetric interaction potential with the normalization
/// Ŵ(0) = 1, i.e. ∫ W dx = (2π)^{3/2}.
///
/// The default family is the Gaussian W(r) = σ^{-3} e^{-r²/(2σ²)}, whose
/// transform is Ŵ(ρ) = e^{-σ²ρ²/2}.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    pub sigma: f64,
    pub amplitude: f64,
}

impl RadialPotential {
    pub fn value(&self, r: f64) -> f64 {
        self.amplitude * (-0.5 * r * r / (self.sigma * self.sigma)).exp()
    }

    /// Radial derivative W'(r) = -r/σ² · W(r).
    pub fn derivative(&self, r: f64) -> f64 {
        -r / (self.sigma * self.sigma) * self.value(r)
    }

    /// Closed-form transform Ŵ(ρ) = e^{-σ²ρ²/2}.
    pub fn transform(&self, rho: f64) -> f64 {
        (-0.5 * self.sigma * self.sigma * rho * rho).exp()
    }

    /// Samples W on a radial grid.
    pub fn sample(&self, grid: &RadialGrid) -> Vec<f64> {
        grid.r.iter().map(|&r| self.value(r)).collect()
    }

    /// Residual of the normalization ∫₀^∞ 4π r² W dr = (2π)^{3/2}, checked
    /// by quadrature on the given grid.
    pub fn normalization_residual(&self, grid: &RadialGrid) -> f64 {
        let samples = self.sample(grid);
        crate::radial::spherical_integral(grid, &samples) - (2.0 * std::f64::consts::PI).powf(1.5)
    }
}

/// Gaussian potential with amplitude fixed by Ŵ(0) = 1.
///
/// ∫ A e^{-r²/(2σ²)} dx = A (2πσ²)^{3/2}, so A = σ^{-3}.
pub fn make_default_potential(sigma: f64) -> Result<RadialPotential> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(LabError::Parameter {
            name: "sigma",
            reason: format!("must be positive and finite, got {sigma}"),
        });
    }
    Ok(RadialPotential {
        sigma,
        amplitude: sigma.powi(-3),
    })
}

/// Specification of the initial field as a centered Gaussian packet
/// a·e^{-|x-X₀|²/(2w²)}·e^{ik·x}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub position: [f64; 3],
    pub momentum: [f64; 3],
    pub packet_amplitude: f64,
    pub packet_width: f64,
    pub packet_carrier: [f64; 3],
}

/// Measured weighted norms of the initial data plus the pass/fail verdict
/// against the smallness threshold ε₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// ‖⟨x⟩⁵ β₀‖₂
    pub weighted5_norm: f64,
    /// ‖⟨x⟩³ ∂ₓ β₀‖₂
    pub weighted3_grad_norm: f64,
    pub momentum_norm: f64,
    pub eps0: f64,
    pub pass: bool,
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Checks the smallness hypotheses ‖⟨x⟩⁵β₀‖₂ ≤ ε₀ and |P₀| ≤ ε₀, and that
/// ‖⟨x⟩³∂ₓβ₀‖₂ is finite, by radial quadrature about the packet center.
///
/// The weight ⟨x⟩ = (1+|x|²)^{1/2} is taken about the packet center, which
/// coincides with the default X₀ = 0.
pub fn validate_initial_data(
    data: &InitialData,
    eps0: f64,
    grid: &RadialGrid,
) -> Result<ValidationReport> {
    if !(eps0 > 0.0) {
        return Err(LabError::Parameter {
            name: "eps0",
            reason: format!("must be positive, got {eps0}"),
        });
    }
    let all = data
        .position
        .iter()
        .chain(&data.momentum)
        .chain(&data.packet_carrier)
        .chain([&data.packet_amplitude, &data.packet_width]);
    for v in all {
        if !v.is_finite() {
            return Err(LabError::Data("non-finite field in initial data".into()));
        }
    }
    if !(data.packet_width > 0.0) {
        return Err(LabError::Parameter {
            name: "packet_width",
            reason: "must be positive".into(),
        });
    }
    let a = data.packet_amplitude;
    let w = data.packet_width;
    let k2 = {
        let k = data.packet_carrier;
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    };
    let four_pi = 4.0 * std::f64::consts::PI;
    let density: Vec<f64> = grid
        .r
        .iter()
        .map(|&r| a * a * (-r * r / (w * w)).exp())
        .collect();
    let w5: Vec<f64> = grid
        .r
        .iter()
        .zip(&density)
        .map(|(&r, &d)| four_pi * (1.0 + r * r).powi(5) * d * r * r)
        .collect();
    // |∂β₀|² = (r²/w⁴ + |k|²)|β₀|² for the Gaussian packet
    let w3g: Vec<f64> = grid
        .r
        .iter()
        .zip(&density)
        .map(|(&r, &d)| four_pi * (1.0 + r * r).powi(3) * (r * r / (w * w * w * w) + k2) * d * r * r)
        .collect();
    let weighted5_norm = quad::integrate(&grid.r, &w5).max(0.0).sqrt();
    let weighted3_grad_norm = quad::integrate(&grid.r, &w3g).max(0.0).sqrt();
    let momentum_norm = norm3(data.momentum);
    let pass = weighted5_norm <= eps0 && momentum_norm <= eps0 && weighted3_grad_norm.is_finite();
    Ok(ValidationReport {
        weighted5_norm,
        weighted3_grad_norm,
        momentum_norm,
        eps0,
        pass,
    })
}
