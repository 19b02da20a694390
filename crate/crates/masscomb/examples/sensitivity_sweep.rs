//! Mass sensitivity vs pulse number with each decay mechanism isolated:
//! the ideal N^{-3/2} slope, the T1/T2 walls, and the finite-Q floor whose
//! crossing sets the optimum.
//!
//!     cargo run --example sensitivity_sweep

use masscomb::sensitivity::{sensitivity_sweep, PenaltyRoute};
use masscomb::RunConfig;

fn main() {
    let mut spec = RunConfig::preset_fig3().system;
    spec.temperature_k = 300.0;

    let n_values: Vec<usize> = (1..=10).map(|k| 2usize << k).collect(); // 4..2048
    let curve = sensitivity_sweep(&spec, &n_values, PenaltyRoute::ClosedForm).unwrap();

    println!(
        "{:>6} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "N", "ideal", "T1 only", "T2 only", "Q only", "all"
    );
    for p in &curve.points {
        println!(
            "{:>6} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}",
            p.n_pulses, p.eta_ideal, p.eta_t1, p.eta_t2, p.eta_q, p.eta_all
        );
    }
    println!("\n(g/sqrt(Hz); the combined curve turns up where the Q floor bites)");
}
