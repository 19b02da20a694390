//! The coherence time comb: collapse under thermal dephasing, sharp
//! revivals at integer oscillator periods.
//!
//!     cargo run --example time_comb

use masscomb::coherence::{coherence_trace, ChiRoute};
use masscomb::{Mechanisms, NoiseSpectrum, RunConfig};

fn main() {
    let spec = RunConfig::preset_fig2().system;
    let n = 100;
    let t0 = spec.oscillator_period();

    // Quarter-period sampling over the first comb segment.
    let times: Vec<f64> = (0..=200).map(|i| i as f64 * t0 / 4.0).collect();
    let trace = coherence_trace(
        &spec,
        n,
        &NoiseSpectrum::delta_line(&spec),
        ChiRoute::Closed,
        Mechanisms { t1: true, t2: true, q: false },
        &times,
    )
    .unwrap();

    println!("{:>10} {:>8} {:>10} {:>10}", "t [us]", "t/T0", "L_ideal", "L_total");
    for i in (0..times.len()).step_by(4) {
        println!(
            "{:>10.2} {:>8.2} {:>10.3e} {:>10.3e}",
            times[i] * 1e6,
            times[i] / t0,
            trace.l_ideal[i],
            trace.l_total[i]
        );
    }

    let revived = trace
        .times
        .iter()
        .zip(&trace.l_ideal)
        .filter(|&(_, &l)| l > 0.99)
        .count();
    println!("\n{revived} of {} samples sit on a revival peak", times.len());
}
