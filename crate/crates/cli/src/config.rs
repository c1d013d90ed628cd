//! Strict TOML configuration: one table per subcommand, unknown keys are
//! rejected before any computation starts.

use serde::{Deserialize, Serialize};
use tracerlab::model::{InitialData, ModelParams};
use tracerlab::parallel::Mode;
use tracerlab::sim::{BoxGrid, SimConfig};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RootConfig {
    #[serde(rename = "omega-table", default)]
    pub omega_table: Option<OmegaTableConfig>,
    #[serde(rename = "delta-star", default)]
    pub delta_star: Option<DeltaStarConfig>,
    #[serde(default)]
    pub gfunc: Option<GfuncConfig>,
    #[serde(default)]
    pub kernel: Option<KernelConfig>,
    #[serde(default)]
    pub fresnel: Option<FresnelConfig>,
    #[serde(default)]
    pub dispersive: Option<DispersiveConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
}

fn d_nodes() -> usize {
    2048
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaTableConfig {
    #[serde(default = "d_omega_min")]
    pub delta_min: f64,
    #[serde(default = "d_omega_max")]
    pub delta_max: f64,
    #[serde(default = "d_omega_step")]
    pub delta_step: f64,
    #[serde(default = "d_nodes")]
    pub nodes: usize,
}

fn d_omega_min() -> f64 {
    -2.0
}
fn d_omega_max() -> f64 {
    0.95
}
fn d_omega_step() -> f64 {
    0.01
}

impl Default for OmegaTableConfig {
    fn default() -> Self {
        Self {
            delta_min: d_omega_min(),
            delta_max: d_omega_max(),
            delta_step: d_omega_step(),
            nodes: d_nodes(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaStarConfig {
    #[serde(default = "d_nodes")]
    pub nodes: usize,
}

impl Default for DeltaStarConfig {
    fn default() -> Self {
        Self { nodes: d_nodes() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FresnelConfig {
    #[serde(default = "d_cutoff")]
    pub cutoff: f64,
}

fn d_cutoff() -> f64 {
    20.0
}

impl Default for FresnelConfig {
    fn default() -> Self {
        Self { cutoff: d_cutoff() }
    }
}

/// Shared physical parameters of the kernel-side subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    #[serde(default = "d_mass")]
    pub tracer_mass: f64,
    #[serde(default)]
    pub coupling: f64,
    #[serde(default = "d_rho0")]
    pub mean_density: f64,
    #[serde(default = "d_sigma_kernel")]
    pub sigma: f64,
}

fn d_mass() -> f64 {
    1.0
}
fn d_rho0() -> f64 {
    1.0
}
fn d_sigma_kernel() -> f64 {
    0.6
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self {
            tracer_mass: d_mass(),
            coupling: 0.0,
            mean_density: d_rho0(),
            sigma: d_sigma_kernel(),
        }
    }
}

impl PhysicalConfig {
    pub fn params(&self) -> tracerlab::Result<ModelParams> {
        ModelParams::new(self.tracer_mass, self.coupling, self.mean_density)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GfuncConfig {
    #[serde(default)]
    pub physical: PhysicalConfig,
    #[serde(default = "d_k_min")]
    pub k_min: f64,
    #[serde(default = "d_k_max")]
    pub k_max: f64,
    #[serde(default = "d_k_points")]
    pub points: usize,
}

fn d_k_min() -> f64 {
    1e-4
}
fn d_k_max() -> f64 {
    10.0
}
fn d_k_points() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default)]
    pub physical: PhysicalConfig,
    #[serde(default = "d_t_max")]
    pub t_max: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
}

fn d_t_max() -> f64 {
    50.0
}
fn d_dt() -> f64 {
    0.01
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveConfig {
    #[serde(default = "d_sigma_one")]
    pub sigma: f64,
}

fn d_sigma_one() -> f64 {
    1.0
}

impl Default for DispersiveConfig {
    fn default() -> Self {
        Self { sigma: d_sigma_one() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default = "d_sim_mass")]
    pub tracer_mass: f64,
    #[serde(default = "d_sim_g")]
    pub coupling: f64,
    #[serde(default = "d_rho0")]
    pub mean_density: f64,
    #[serde(default = "d_sigma_one")]
    pub sigma: f64,
    #[serde(default = "d_sim_n")]
    pub n: usize,
    #[serde(default = "d_sim_length")]
    pub box_length: f64,
    #[serde(default = "d_sim_absw")]
    pub absorber_width: f64,
    #[serde(default = "d_sim_abss")]
    pub absorber_strength: f64,
    #[serde(default = "d_sim_dt")]
    pub dt: f64,
    #[serde(default = "d_sim_tmax")]
    pub t_max: f64,
    #[serde(default = "d_sim_p0")]
    pub p0: [f64; 3],
    #[serde(default = "d_sim_amp")]
    pub beta0_amplitude: f64,
    #[serde(default = "d_sigma_one")]
    pub beta0_width: f64,
    #[serde(default)]
    pub beta0_carrier: [f64; 3],
    #[serde(default = "d_eps0")]
    pub eps0: f64,
    #[serde(default = "d_obs_every")]
    pub obs_every: usize,
    #[serde(default = "d_delta")]
    pub delta: f64,
    #[serde(default = "d_true")]
    pub absorber_on: bool,
    /// evaluate the friction-trend checks (envelope, exponent, splash,
    /// stopping, majorant) in the manifest
    #[serde(default)]
    pub friction_checks: bool,
}

fn d_sim_mass() -> f64 {
    10.0
}
fn d_sim_g() -> f64 {
    0.05
}
fn d_sim_n() -> usize {
    64
}
fn d_sim_length() -> f64 {
    8.0
}
fn d_sim_absw() -> f64 {
    0.75
}
fn d_sim_abss() -> f64 {
    5.0
}
fn d_sim_dt() -> f64 {
    2e-3
}
fn d_sim_tmax() -> f64 {
    200.0
}
fn d_sim_p0() -> [f64; 3] {
    [0.05, 0.0, 0.0]
}
fn d_sim_amp() -> f64 {
    0.01
}
fn d_eps0() -> f64 {
    1e-1
}
fn d_obs_every() -> usize {
    100
}
fn d_delta() -> f64 {
    0.6
}
fn d_true() -> bool {
    true
}

impl Default for SimulateConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty simulate config must default")
    }
}

impl SimulateConfig {
    pub fn build(&self, serial: bool) -> tracerlab::Result<SimConfig> {
        if !(self.delta < 1.0) {
            return Err(tracerlab::LabError::Parameter {
                name: "delta",
                reason: format!("majorant exponent must satisfy δ < 1, got {}", self.delta),
            });
        }
        Ok(SimConfig {
            params: ModelParams::new(self.tracer_mass, self.coupling, self.mean_density)?,
            sigma: self.sigma,
            grid: BoxGrid::new(self.n, self.box_length, self.absorber_width, self.absorber_strength)?,
            dt: self.dt,
            t_max: self.t_max,
            initial: InitialData {
                position: [0.0; 3],
                momentum: self.p0,
                packet_amplitude: self.beta0_amplitude,
                packet_width: self.beta0_width,
                packet_carrier: self.beta0_carrier,
            },
            eps0: self.eps0,
            absorber_on: self.absorber_on,
            source_on: true,
            kinetic_on: true,
            obs_every: self.obs_every,
            delta: self.delta,
            mode: if serial { Mode::Serial } else { Mode::Parallel },
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub input: String,
    #[serde(default)]
    pub t_min: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
}

/// Loads and strictly parses the TOML config; a missing path yields the
/// all-defaults configuration.
pub fn load(path: Option<&std::path::Path>) -> Result<RootConfig, String> {
    match path {
        None => Ok(RootConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", p.display()))
        }
    }
}
