//! Catalog of the comb revival peaks: positions, Gaussian rates, the two
//! width conventions, and the narrowest usable peak q* = N/2 - 1.
//!
//!     cargo run --example peak_catalog

use masscomb::peaks::peak_catalog;
use masscomb::{Mechanisms, RunConfig};

fn main() {
    let spec = RunConfig::preset_fig2().system;
    let cat = peak_catalog(&spec, 100, Mechanisms { t1: true, t2: true, q: false }).unwrap();

    println!(
        "{:>4} {:>12} {:>12} {:>14} {:>14} {:>8}",
        "q", "t_q [us]", "gamma [1/s]", "w_nominal [s]", "w_expand [s]", "height"
    );
    for p in cat.peaks.iter().filter(|p| p.q % 8 == 1 || p.q == cat.qstar) {
        println!(
            "{:>4} {:>12.1} {:>12.3e} {:>14.3e} {:>14.3e} {:>8.4}",
            p.q,
            p.center_s * 1e6,
            p.gamma,
            p.width_nominal,
            p.width_expansion,
            p.height
        );
    }
    println!(
        "\nnarrowest usable peak: q* = {}; no revival at q = {} (envelope pole)",
        cat.qstar, cat.missing_q
    );
    let p = cat.peaks.last().unwrap();
    println!(
        "its width conventions differ by {:.3} (the sqrt(2) bookkeeping gap)",
        p.width_expansion / p.width_nominal
    );
}
