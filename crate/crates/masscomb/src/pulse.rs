//! Pi-pulse sequences and the modulation function f(t) they induce.

use num_complex::Complex64;
use thiserror::Error;

/// An ordered train of instantaneous pi pulses over a total evolution time.
///
/// The modulation function f(t) starts at +1 and flips sign at every pulse
/// time. Boundary switching times t_0 = 0 and t_{N+1} = total_time are
/// implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    total_time: f64,
    pulse_times: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PulseError {
    #[error("total time must be finite and positive, got {0}")]
    BadTotalTime(f64),
    #[error("pulse time {0} is not strictly inside (0, {1})")]
    PulseOutOfRange(f64, f64),
    #[error("pulse times must be strictly increasing (offender at index {0})")]
    NotIncreasing(usize),
}

impl PulseSequence {
    pub fn new(total_time: f64, pulse_times: Vec<f64>) -> Result<Self, PulseError> {
        if !total_time.is_finite() || total_time <= 0.0 {
            return Err(PulseError::BadTotalTime(total_time));
        }
        let mut prev = 0.0;
        for (i, &tj) in pulse_times.iter().enumerate() {
            if !tj.is_finite() || tj <= 0.0 || tj >= total_time {
                return Err(PulseError::PulseOutOfRange(tj, total_time));
            }
            if tj <= prev {
                return Err(PulseError::NotIncreasing(i));
            }
            prev = tj;
        }
        Ok(PulseSequence {
            total_time,
            pulse_times,
        })
    }

    /// Free evolution: no pulses.
    pub fn free(total_time: f64) -> Result<Self, PulseError> {
        Self::new(total_time, Vec::new())
    }

    /// N-pulse CPMG sequence: t_j = (2j - 1) / (2N) * t.
    pub fn cpmg(n_pulses: usize, total_time: f64) -> Result<Self, PulseError> {
        let times = (1..=n_pulses)
            .map(|j| (2 * j - 1) as f64 / (2 * n_pulses) as f64 * total_time)
            .collect();
        Self::new(total_time, times)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn n_pulses(&self) -> usize {
        self.pulse_times.len()
    }

    pub fn pulse_times(&self) -> &[f64] {
        &self.pulse_times
    }

    /// Switching times including both boundaries: 0, t_1, ..., t_N, t.
    pub fn switching_times(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.pulse_times.len() + 2);
        v.push(0.0);
        v.extend_from_slice(&self.pulse_times);
        v.push(self.total_time);
        v
    }

    /// Piecewise-analytic evaluation of the modulation integral
    /// `int_0^t f(t') exp(i omega t') dt'` (units: seconds).
    ///
    /// Each constant-sign segment contributes
    /// `(-1)^j (exp(i omega t_{j+1}) - exp(i omega t_j)) / (i omega)`,
    /// with a series expansion of (exp(ix) - 1)/(ix) below |x| = 1e-4 so the
    /// omega -> 0 limit reduces exactly to the signed segment durations.
    pub fn modulation_integral(&self, omega: f64) -> Complex64 {
        debug_assert!(omega >= 0.0 && omega.is_finite());
        let edges = self.switching_times();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let dt = b - a;
            // segment integral = exp(i omega a) * E(omega dt) * dt
            let phase_a = Complex64::from_polar(1.0, omega * a);
            acc += sign * phase_a * cis_mean(omega * dt) * dt;
            sign = -sign;
        }
        acc
    }
}

/// E(x) = (exp(ix) - 1) / (ix): mean of exp(i s) over s in [0, x].
fn cis_mean(x: f64) -> Complex64 {
    if x.abs() < 1e-4 {
        // 1 + ix/2 - x^2/6 - ix^3/24 + x^4/120; truncation below 1e-22
        let x2 = x * x;
        Complex64::new(
            1.0 - x2 / 6.0 + x2 * x2 / 120.0,
            x / 2.0 - x2 * x / 24.0,
        )
    } else {
        let num = Complex64::new((x).cos() - 1.0, x.sin());
        num / Complex64::new(0.0, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cpmg_times_are_exact() {
        let seq = PulseSequence::cpmg(4, 8.0).unwrap();
        assert_eq!(seq.pulse_times(), &[1.0, 3.0, 5.0, 7.0]);
    }

    #[test]
    fn rejects_invalid_sequences() {
        assert!(PulseSequence::new(-1.0, vec![]).is_err());
        assert!(PulseSequence::new(1.0, vec![0.0]).is_err());
        assert!(PulseSequence::new(1.0, vec![1.0]).is_err());
        assert!(PulseSequence::new(1.0, vec![0.5, 0.5]).is_err());
        assert!(PulseSequence::new(1.0, vec![0.6, 0.4]).is_err());
    }

    #[test]
    fn free_evolution_matches_analytic() {
        // |int_0^t exp(i w t')|^2 = 4 sin^2(wt/2) / w^2
        let t = 3.7e-4;
        let seq = PulseSequence::free(t).unwrap();
        for &w in &[1.0, 1e3, 6.28e5] {
            let got = seq.modulation_integral(w).norm_sqr();
            let want = 4.0 * (w * t / 2.0).sin().powi(2) / (w * w);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn hahn_echo_matches_analytic() {
        // single pulse at t/2: |integral|^2 = 16 sin^4(wt/4) / w^2
        let t = 1.3e-3;
        let seq = PulseSequence::new(t, vec![t / 2.0]).unwrap();
        for &w in &[2.0, 4.2e4, 7.7e5] {
            let got = seq.modulation_integral(w).norm_sqr();
            let want = 16.0 * (w * t / 4.0).sin().powi(4) / (w * w);
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn zero_frequency_gives_signed_durations() {
        // Hahn echo splits t into equal-sign-weight halves: integral = 0.
        let seq = PulseSequence::new(2.0, vec![1.0]).unwrap();
        let v = seq.modulation_integral(0.0);
        assert!(v.norm() < 1e-15);

        // Unbalanced: +0.5 - 1.5 = -1.0
        let seq = PulseSequence::new(2.0, vec![0.5]).unwrap();
        let v = seq.modulation_integral(0.0);
        assert_relative_eq!(v.re, -1.0, max_relative = 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn small_argument_series_matches_direct_formula() {
        // Near the switchover the direct formula is still accurate to about
        // eps / x absolute, so the two branches must agree to ~1e-11 there.
        for &x in &[0.5e-4, 0.9e-4, 0.999e-4] {
            let series = cis_mean(x);
            let direct = Complex64::new(x.cos() - 1.0, x.sin()) / Complex64::new(0.0, x);
            assert!((series - direct).norm() < 1e-11, "x = {x}");
        }
    }
}
