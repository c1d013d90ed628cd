use tracerlab::model::{InitialData, ModelParams};
use tracerlab::parallel::Mode;
use tracerlab::sim::{BoxGrid, SimConfig, Simulator};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(48);
    let t_max: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let dt: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(4e-3);
    let length = n as f64 * 0.125;
    let cfg = SimConfig {
        params: ModelParams::new(1.0, 0.05, 2.0).unwrap(),
        sigma: 1.0,
        grid: BoxGrid::new(n, length, 0.09 * length, 5.0).unwrap(),
        dt,
        t_max,
        initial: InitialData {
            position: [0.0; 3],
            momentum: [0.05, 0.0, 0.0],
            packet_amplitude: 0.05,
            packet_width: 1.0,
            packet_carrier: [0.0; 3],
        },
        eps0: 1e-1,
        absorber_on: true,
        source_on: true,
        kinetic_on: true,
        obs_every: ((0.5 / dt) as usize).max(1),
        delta: 0.6,
        mode: Mode::Parallel,
    };
    let start = std::time::Instant::now();
    let mut sim = Simulator::new(cfg).unwrap();
    let out = sim.run().unwrap();
    for r in out.series.rows.iter().step_by(4) {
        println!("t={:7.2} |P|={:.6e} X=({:+.4},{:+.4},{:+.4}) H={:+.5e} splash={:.5e} mu={:.4e}", r.t, r.p_abs, r.x[0], r.x[1], r.x[2], r.energy, r.splash, r.mu);
    }
    println!("aborted: {:?}", out.summary.aborted);
    if let Some(f) = &out.summary.momentum_fit {
        println!("momentum fit over last decade: exponent {:.3} amplitude {:.3e} rms {:.3e}", f.exponent, f.amplitude, f.residual_rms);
    }
    println!("envelope blocks: {:?}", out.summary.envelope_blocks);
    println!("x_convergence_ratio: {:.4}", out.summary.x_convergence_ratio);
    println!("splash means: first {:.4e} last {:.4e}", out.summary.splash_first_quarter_mean, out.summary.splash_last_quarter_mean);
    println!("mu growth final half: {:.4}", out.summary.mu_growth_final_half);
    println!("wall: {:.1}s for {} steps", start.elapsed().as_secs_f64(), (t_max/dt) as usize);
}
