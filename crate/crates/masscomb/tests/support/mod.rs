#![allow(dead_code)] // each test binary uses its own subset of the oracles

//! Independent numerical oracles used by the integration suites: a
//! brute-force grid quadrature of the modulation integral and a Gaussian
//! peak fit, both deliberately built on different machinery than the crate
//! routines they check.

use num_complex::Complex64;
use masscomb::PulseSequence;

/// Modulation integral by composite Simpson on a dense uniform-ish grid,
/// segment-aligned so the sign flips never fall inside a panel.
///
/// `total_points` is the approximate number of grid points across the whole
/// sequence. The phase factor is advanced by recurrence
/// (exp(iw(t+h)) = exp(iwt) exp(iwh)) and re-anchored at every segment
/// boundary, so the accumulated rounding stays near eps * points.
pub fn modulation_integral_grid(seq: &PulseSequence, omega: f64, total_points: usize) -> Complex64 {
    let edges = seq.switching_times();
    let total = seq.total_time();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let len = b - a;
        // Simpson needs an even panel count; at least 2 per segment.
        let mut m = ((len / total) * total_points as f64).ceil() as usize;
        m += m % 2;
        m = m.max(2);
        let h = len / m as f64;
        let step = Complex64::from_polar(1.0, omega * h);
        let mut phase = Complex64::from_polar(1.0, omega * a);
        let mut sum = phase; // endpoint weight 1
        for k in 1..m {
            phase *= step;
            sum += phase * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum += Complex64::from_polar(1.0, omega * b);
        acc += sign * sum * (h / 3.0);
        sign = -sign;
    }
    acc
}

/// Least-squares fit of a Gaussian peak L(t) = exp(-gamma^2 (t - t_c)^2 / 2)
/// through the linearization -2 ln L = gamma^2 (t - t_c)^2.
///
/// Samples must be (t - t_c, L) pairs with L in (0, 1]. Returns the fitted
/// gamma. The fit is a one-parameter linear regression through the origin,
/// so it shares no code with the closed-form peak machinery.
pub fn fit_peak_gamma(samples: &[(f64, f64)]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(dt, l) in samples {
        assert!(l > 0.0 && l <= 1.0, "sample outside (0, 1]: {l}");
        let y = -2.0 * l.ln();
        let x = dt * dt;
        num += x * y;
        den += x * x;
    }
    (num / den).sqrt()
}

/// Ordinary least-squares slope of y against x.
pub fn lls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
