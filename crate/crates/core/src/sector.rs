//! Angular-sector (spherical Bessel) transforms of radial profiles and the
//! exact free evolution e^{−itΔ} within a sector.
//!
//! A sector function is u(x) = p(r)·N_ℓ(x̂) with N₀ = 1, N₁ = x₁/r,
//! N₃ = x₁x₂x₃/r³; free evolution preserves the sector and acts on the
//! radial part through the j_ℓ transform
//! p̂(ρ) = √(2/π) ∫ p(r) j_ℓ(ρr) r² dr (self-inverse).

use num_complex::Complex64;

use crate::model::RadialPotential;
use crate::numerics::{quad, special};
use crate::parallel::{self, Mode};
use crate::radial::RadialGrid;
use crate::{LabError, Result};

pub const SUPPORTED_SECTORS: [usize; 3] = [0, 1, 3];

/// Angular L² weight ∫_{S²} N_ℓ² dΩ of the sector direction factor.
pub fn angular_weight(ell: usize) -> f64 {
    let four_pi = 4.0 * std::f64::consts::PI;
    match ell {
        0 => four_pi,
        1 => four_pi / 3.0,
        3 => four_pi / 105.0,
        _ => f64::NAN,
    }
}

fn check_sector(ell: usize) -> Result<()> {
    if SUPPORTED_SECTORS.contains(&ell) {
        Ok(())
    } else {
        Err(LabError::Parameter {
            name: "ell",
            reason: format!("supported sectors are {SUPPORTED_SECTORS:?}, got {ell}"),
        })
    }
}

/// Radial part of a function living in one angular sector.
#[derive(Debug, Clone)]
pub struct SectorProfile {
    pub ell: usize,
    pub radial: Vec<f64>,
}

/// Uniform radial-frequency grid including ρ = 0 (odd node count, so the
/// Filon panels of the kernel module can reuse it).
#[derive(Debug, Clone)]
pub struct RhoGrid {
    pub rho: Vec<f64>,
    pub rho_max: f64,
}

pub const STANDARD_RHO_NODES: usize = 4097;

impl RhoGrid {
    pub fn new(rho_max: f64, n: usize) -> Self {
        let rho: Vec<f64> = (0..n)
            .map(|i| rho_max * i as f64 / (n - 1) as f64)
            .collect();
        Self { rho, rho_max }
    }

    /// Covers the support of Gaussian-class densities of width σ.
    pub fn standard(sigma: f64) -> Self {
        Self::new(7.5 / sigma, STANDARD_RHO_NODES)
    }

    pub fn spacing(&self) -> f64 {
        self.rho[1] - self.rho[0]
    }
}

fn transform_kernel(r: &[f64], p: &[f64], ell: usize, k: f64) -> f64 {
    // √(2/π) ∫ p(r) j_ℓ(kr) r² dr
    let vals: Vec<f64> = r
        .iter()
        .zip(p)
        .map(|(&rv, &pv)| rv * rv * pv * special::sph_j(ell, k * rv))
        .collect();
    let mut total = quad::integrate(r, &vals);
    if ell == 0 {
        // analytic head over the missing [0, r₁]; higher sectors vanish like r^{2+ℓ}
        let j0 = |x: f64| special::sph_j(0, x);
        let w0w2 = {
            let f0 = p[0] * j0(k * r[0]);
            let f1 = p[1] * j0(k * r[1]);
            let w2 = (f1 - f0) / (r[1] * r[1] - r[0] * r[0]);
            (f0 - w2 * r[0] * r[0], w2)
        };
        total += w0w2.0 * r[0].powi(3) / 3.0 + w0w2.1 * r[0].powi(5) / 5.0;
    }
    (2.0 / std::f64::consts::PI).sqrt() * total
}

/// Sector coefficients p̂_ℓ(ρ) of a profile living in sector `profile.ell`.
///
/// Requesting a different supported sector returns zeros: distinct spherical
/// harmonics are orthogonal, so the cross-sector content vanishes.
pub fn sector_transform(
    grid: &RadialGrid,
    profile: &SectorProfile,
    ell: usize,
    out: &RhoGrid,
) -> Result<Vec<f64>> {
    check_sector(ell)?;
    check_sector(profile.ell)?;
    if ell != profile.ell {
        return Ok(vec![0.0; out.rho.len()]);
    }
    let r = &grid.r;
    let p = &profile.radial;
    Ok(parallel::map_collect(Mode::Parallel, out.rho.len(), |i| {
        transform_kernel(r, p, ell, out.rho[i])
    }))
}

/// Inverse transform p(r) = √(2/π) ∫ p̂(ρ) j_ℓ(ρr) ρ² dρ for complex tables.
pub fn sector_inverse_complex(
    rho_grid: &RhoGrid,
    coeffs: &[Complex64],
    ell: usize,
    r_out: &[f64],
) -> Result<Vec<Complex64>> {
    check_sector(ell)?;
    let rho = &rho_grid.rho;
    let pref = (2.0 / std::f64::consts::PI).sqrt();
    Ok(parallel::map_collect(Mode::Parallel, r_out.len(), |i| {
        let r = r_out[i];
        let vals: Vec<Complex64> = rho
            .iter()
            .zip(coeffs)
            .map(|(&rv, &cv)| cv * (rv * rv * special::sph_j(ell, rv * r)))
            .collect();
        quad::integrate(rho, &vals) * pref
    }))
}

pub fn sector_inverse(rho_grid: &RhoGrid, coeffs: &[f64], ell: usize, r_out: &[f64]) -> Result<Vec<f64>> {
    let cplx: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    Ok(sector_inverse_complex(rho_grid, &cplx, ell, r_out)?
        .into_iter()
        .map(|z| z.re)
        .collect())
}

/// Largest time the spectral route can evolve to before e^{−itρ²} outruns
/// the ρ-grid (one radian of phase per node at the grid edge).
pub fn spectral_time_limit(rho_grid: &RhoGrid) -> f64 {
    1.0 / (2.0 * rho_grid.rho_max * rho_grid.spacing())
}

/// Free evolution e^{−itΔ} of a sector profile: transform, multiply by
/// e^{−itρ²}, transform back.
pub fn evolve_free_sector(
    grid: &RadialGrid,
    profile: &SectorProfile,
    t: f64,
    rho_grid: &RhoGrid,
) -> Result<Vec<Complex64>> {
    check_sector(profile.ell)?;
    let t_max = spectral_time_limit(rho_grid);
    if t.abs() > t_max {
        return Err(LabError::Accuracy {
            what: "evolve_free_sector phase resolution",
            achieved: t.abs(),
            required: t_max,
        });
    }
    let coeffs = sector_transform(grid, profile, profile.ell, rho_grid)?;
    let evolved: Vec<Complex64> = rho_grid
        .rho
        .iter()
        .zip(&coeffs)
        .map(|(&rho, &c)| Complex64::from_polar(c, -t * rho * rho))
        .collect();
    sector_inverse_complex(rho_grid, &evolved, profile.ell, &grid.r)
}

/// |Ŵ(ρ)|² sampled on the ρ-grid via the ℓ = 0 transform.
pub fn spectral_density(
    grid: &RadialGrid,
    potential: &RadialPotential,
    rho_grid: &RhoGrid,
) -> Result<Vec<f64>> {
    let profile = SectorProfile {
        ell: 0,
        radial: potential.sample(grid),
    };
    let hat = sector_transform(grid, &profile, 0, rho_grid)?;
    Ok(hat.into_iter().map(|v| v * v).collect())
}

/// ‖u‖₂² of a sector function from its radial part (spherical measure with
/// the angular weight of the sector).
pub fn sector_l2_norm_sq(grid: &RadialGrid, profile: &SectorProfile) -> f64 {
    let vals: Vec<f64> = grid
        .r
        .iter()
        .zip(&profile.radial)
        .map(|(&r, &p)| r * r * p * p)
        .collect();
    angular_weight(profile.ell) * quad::integrate(&grid.r, &vals)
}
