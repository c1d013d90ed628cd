//! Single entry point: every verification and simulation is a subcommand
//! with a strict TOML config, deterministic CSV outputs and a JSON manifest.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 usage/config error,
//! 3 numerical failure.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CommandOutput;
use manifest::{now_unix, to_sorted_json, Manifest};

#[derive(Parser)]
#[command(name = "tracerlab", version, about = "Numerical laboratory for tracer-particle friction in a Bose medium")]
struct Cli {
    /// TOML configuration file (one table per subcommand; unknown keys rejected)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Force bit-reproducible serial execution
    #[arg(long, global = true)]
    serial: bool,

    /// Reserved: the pipeline is deterministic; the seed is only recorded
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Ω, Ω₁, Ω₂ and the Γ-function closed form on a δ-grid
    OmegaTable,
    /// Critical exponent δ* solving Ω(δ*) = 1
    DeltaStar,
    /// Resolvent boundary function G(k + i0)
    Gfunc,
    /// Friction kernel K by the Fourier and Volterra routes, with decay laws
    Kernel,
    /// The Fresnel constant ∫₀^∞ cos x² dx
    Fresnel,
    /// Free-propagator weighted-norm decay exponents
    Dispersive,
    /// Coupled particle–field run on the absorbing box
    Simulate,
    /// Power-law fit of a two-column CSV trace
    Fit,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::OmegaTable => "omega-table",
            Command::DeltaStar => "delta-star",
            Command::Gfunc => "gfunc",
            Command::Kernel => "kernel",
            Command::Fresnel => "fresnel",
            Command::Dispersive => "dispersive",
            Command::Simulate => "simulate",
            Command::Fit => "fit",
        }
    }
}

/// Exclusive lockfile guard: at most one run mutates an output directory.
struct DirLock {
    path: PathBuf,
}

impl DirLock {
    fn acquire(dir: &PathBuf) -> Result<Self, String> {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        let path = dir.join(".lock");
        match std::fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(DirLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(format!(
                "output directory {} is locked by another run (remove {} if stale)",
                dir.display(),
                path.display()
            )),
            Err(e) => Err(format!("cannot lock {}: {e}", dir.display())),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

fn dispatch(cmd: Command, root: &config::RootConfig, serial: bool) -> (serde_json::Value, tracerlab::Result<CommandOutput>) {
    macro_rules! run {
        ($section:expr, $f:expr) => {{
            let cfg = $section.clone().unwrap_or_default();
            let echo = serde_json::to_value(&cfg).unwrap_or(serde_json::Value::Null);
            (echo, $f(&cfg))
        }};
    }
    match cmd {
        Command::OmegaTable => run!(root.omega_table, commands::omega_table),
        Command::DeltaStar => run!(root.delta_star, commands::delta_star),
        Command::Gfunc => run!(root.gfunc, commands::gfunc),
        Command::Kernel => run!(root.kernel, commands::kernel),
        Command::Fresnel => run!(root.fresnel, commands::fresnel),
        Command::Dispersive => run!(root.dispersive, commands::dispersive_cmd),
        Command::Simulate => {
            let cfg = root.simulate.clone().unwrap_or_default();
            let echo = serde_json::to_value(&cfg).unwrap_or(serde_json::Value::Null);
            (echo, commands::simulate(&cfg, serial))
        }
        Command::Fit => {
            let Some(cfg) = root.fit.clone() else {
                return (
                    serde_json::Value::Null,
                    Err(tracerlab::LabError::Parameter {
                        name: "fit",
                        reason: "the fit subcommand needs a [fit] config section with an input path".into(),
                    }),
                );
            };
            let echo = serde_json::to_value(&cfg).unwrap_or(serde_json::Value::Null);
            (echo, commands::fit(&cfg))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = now_unix();

    let root = match config::load(cli.config.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.serial {
        // keep any rayon pool from spawning workers: deterministic order is
        // already guaranteed by fixed-chunk reductions, this pins it fully
        std::env::set_var("RAYON_NUM_THREADS", "1");
    }

    let _lock = match DirLock::acquire(&cli.out) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };

    let (config_echo, result) = dispatch(cli.command, &root, cli.serial);
    let (output, numerical_failure) = match result {
        Ok(out) => (out, None),
        Err(e) => {
            let is_config = matches!(
                e,
                tracerlab::LabError::Parameter { .. } | tracerlab::LabError::Range { .. }
            );
            if is_config {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
            (
                CommandOutput {
                    checks: vec![],
                    files: vec![],
                    notes: vec![format!("numerical failure: {e}")],
                },
                Some(e),
            )
        }
    };

    for (name, contents) in &output.files {
        let path = cli.out.join(name);
        if let Err(e) = std::fs::write(&path, contents) {
            eprintln!("io error writing {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }

    let all_pass = numerical_failure.is_none() && output.checks.iter().all(|c| c.pass);
    let manifest = Manifest {
        tool: "tracerlab",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        serial: cli.serial,
        seed: cli.seed,
        started_unix: started,
        finished_unix: now_unix(),
        config: config_echo,
        checks: output.checks,
        pass: all_pass,
        notes: output.notes,
    };
    let manifest_path = cli.out.join("manifest.json");
    if let Err(e) = std::fs::write(&manifest_path, to_sorted_json(&manifest)) {
        eprintln!("io error writing {}: {e}", manifest_path.display());
        return ExitCode::from(3);
    }

    for c in &manifest.checks {
        println!(
            "[{}] {}: measured {:.6e} ({})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.condition
        );
    }
    if let Some(e) = numerical_failure {
        eprintln!("numerical failure: {e}");
        return ExitCode::from(3);
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
