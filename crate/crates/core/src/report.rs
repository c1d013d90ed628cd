//! Observable tables and their byte-stable CSV encodings (17 significant
//! digits, lowercase exponent; identical configs must reproduce identical
//! bytes in serial mode).

use crate::kernels::KernelTable;

/// One recorded observable row of a coupled run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRow {
    pub t: f64,
    pub p: [f64; 3],
    pub p_abs: f64,
    pub x: [f64; 3],
    pub energy: f64,
    pub splash: f64,
    pub mu: f64,
}

/// Observable trace of a simulation run.
#[derive(Debug, Clone, Default)]
pub struct TimeSeries {
    pub rows: Vec<TimeSeriesRow>,
}

/// Fixed numeric format: 17 significant digits, lowercase 'e' exponent.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const TIMESERIES_HEADER: &str = "t,px,py,pz,pabs,x,y,z,energy,splash,mu";

impl TimeSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 + self.rows.len() * 200);
        out.push_str(TIMESERIES_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cols = [
                r.t, r.p[0], r.p[1], r.p[2], r.p_abs, r.x[0], r.x[1], r.x[2], r.energy, r.splash,
                r.mu,
            ];
            let mut first = true;
            for c in cols {
                if !first {
                    out.push(',');
                }
                out.push_str(&fmt_f64(c));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn ts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn p_abs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.p_abs).collect()
    }
}

pub const KERNEL_TABLE_HEADER: &str = "abscissa,re,im,quad_error,route_tag";

pub fn kernel_table_csv(table: &KernelTable) -> String {
    let mut out = String::new();
    out.push_str(KERNEL_TABLE_HEADER);
    out.push('\n');
    for i in 0..table.abscissae.len() {
        out.push_str(&fmt_f64(table.abscissae[i]));
        out.push(',');
        out.push_str(&fmt_f64(table.values[i].re));
        out.push(',');
        out.push_str(&fmt_f64(table.values[i].im));
        out.push(',');
        out.push_str(&fmt_f64(table.quad_error[i]));
        out.push(',');
        out.push_str(table.route.tag());
        out.push('\n');
    }
    out
}

/// Two-column profile CSV (r, value), the inspection format for radial data.
pub fn profile_csv(r: &[f64], values: &[f64]) -> String {
    let mut out = String::from("r,value\n");
    for (&x, &v) in r.iter().zip(values) {
        out.push_str(&fmt_f64(x));
        out.push(',');
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_17_digits_lowercase() {
        let s = fmt_f64(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert!(fmt_f64(1e-5).contains("e-5"));
    }

    #[test]
    fn empty_series_is_header_only() {
        let ts = TimeSeries::default();
        assert_eq!(ts.to_csv(), format!("{TIMESERIES_HEADER}\n"));
    }

    #[test]
    fn csv_is_deterministic() {
        let row = TimeSeriesRow {
            t: 0.1,
            p: [1.0, 2.0, 3.0],
            p_abs: 3.7416573867739413,
            x: [0.0; 3],
            energy: -0.5,
            splash: 0.25,
            mu: 1.0,
        };
        let ts = TimeSeries { rows: vec![row; 3] };
        assert_eq!(ts.to_csv(), ts.to_csv());
        assert_eq!(ts.to_csv().lines().count(), 4);
    }
}
