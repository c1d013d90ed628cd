//! Run manifest: config echo, versions, timestamps and one entry per
//! acceptance check relevant to the subcommand. JSON keys are emitted
//! sorted (objects go through `serde_json::Value`, whose map is a BTreeMap).

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// human-readable acceptance condition, e.g. "|x - 0.6266| <= 1e-5"
    pub condition: String,
    pub pass: bool,
}

impl Check {
    pub fn le(name: &str, measured: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            condition: format!("x <= {bound:e}"),
            pass: measured <= bound,
        }
    }

    pub fn abs_le(name: &str, measured: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            condition: format!("|x - {target:e}| <= {tol:e}"),
            pass: (measured - target).abs() <= tol,
        }
    }

    pub fn in_range(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            condition: format!("{lo:e} <= x <= {hi:e}"),
            pass: (lo..=hi).contains(&measured),
        }
    }

    pub fn boolean(name: &str, pass: bool) -> Self {
        Check {
            name: name.into(),
            measured: if pass { 1.0 } else { 0.0 },
            condition: "x == 1".into(),
            pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub serial: bool,
    pub seed: Option<u64>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub notes: Vec<String>,
}

pub fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Serialize with sorted keys by round-tripping through `Value`.
pub fn to_sorted_json(manifest: &Manifest) -> String {
    let value = serde_json::to_value(manifest).expect("manifest serializes");
    serde_json::to_string_pretty(&value).expect("value serializes")
}
