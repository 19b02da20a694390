//! Catalog of coherence-recovery peaks in the time comb.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::coherence::{background_coherence_selected, Mechanisms};
use crate::pulse::PulseSequence;
use crate::quadrature::chi_spectral_quadrature;
use crate::spectrum::NoiseSpectrum;
use crate::system::SystemSpec;

/// One recovery peak of the coherence comb, L(t) ~ exp[-gamma^2 (t-t_q)^2 / 2].
#[derive(Debug, Clone, PartialEq)]
pub struct PeakDescriptor {
    /// Comb index; the peak sits at t_q = q T0.
    pub q: usize,
    /// Peak centre, seconds.
    pub center_s: f64,
    /// Gaussian decay rate gamma_q = lambda_tilde (sec(pi q / N) - 1), 1/s,
    /// from the second-order expansion of chi around t_q.
    pub gamma: f64,
    /// Expansion width 2 sqrt(2) / gamma_q, seconds.
    pub width_expansion: f64,
    /// Nominal narrow-peak width T0 / (N Lambda sqrt(2 n_th + 1)) = 2 pi /
    /// (N lambda_tilde), seconds. Smaller than `width_expansion` by about
    /// sqrt(2): the two conventions disagree by that constant, which is why
    /// both are reported.
    pub width_nominal: f64,
    /// Peak height in [0, 1] including background decay and, when the q
    /// mechanism is on, the finite-Q recovery penalty exp(-chi(t_q)/2).
    pub height: f64,
}

/// Full comb analysis for an even-N CPMG sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakCatalog {
    /// Peaks q = 1 ... N/2 - 1 (the first comb segment).
    pub peaks: Vec<PeakDescriptor>,
    /// Suppressed index at the end of the segment: q = N/2, where the comb
    /// envelope diverges (odd multiples of N/2 in general).
    pub missing_q: usize,
    /// Index of the narrowest usable peak, q* = N/2 - 1.
    pub qstar: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum PeakError {
    #[error("comb analysis requires an even pulse count >= 2, got {0}")]
    BadPulseCount(usize),
    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadratureError),
}

/// Narrowest-peak time t_q* = (N/2 - 1) T0.
pub fn narrowest_peak_time(spec: &SystemSpec, n_pulses: usize) -> f64 {
    (n_pulses as f64 / 2.0 - 1.0) * spec.oscillator_period()
}

/// Gaussian rate of peak q.
pub fn peak_gamma(spec: &SystemSpec, n_pulses: usize, q: usize) -> f64 {
    let x = std::f64::consts::PI * q as f64 / n_pulses as f64;
    let sec_m1 = 2.0 * (x / 2.0).sin().powi(2) / x.cos();
    spec.lambda_tilde_sq().sqrt() * sec_m1
}

/// Builds the peak catalog for the first comb segment.
///
/// Heights combine the selected background channels at each t_q with, when
/// `mech.q` is set, the finite-Q recovery penalty evaluated by spectral
/// quadrature.
pub fn peak_catalog(
    spec: &SystemSpec,
    n_pulses: usize,
    mech: Mechanisms,
) -> Result<PeakCatalog, PeakError> {
    if n_pulses < 2 || !n_pulses.is_multiple_of(2) {
        return Err(PeakError::BadPulseCount(n_pulses));
    }
    let t0 = spec.oscillator_period();
    let lambda_tilde = spec.lambda_tilde_sq().sqrt();
    let width_nominal = TAU / (n_pulses as f64 * lambda_tilde);
    let lorentzian = NoiseSpectrum::lorentzian(spec);

    // N = 2 has no usable peak before the missing one; the catalog is empty.
    let mut peaks = Vec::with_capacity(n_pulses / 2);
    for q in 1..n_pulses / 2 {
        let center = q as f64 * t0;
        let gamma = peak_gamma(spec, n_pulses, q);
        let mut height = background_coherence_selected(n_pulses, center, spec, mech);
        if mech.q {
            let seq = PulseSequence::cpmg(n_pulses, center).expect("valid CPMG");
            let chi = chi_spectral_quadrature(&seq, &lorentzian)?;
            height *= (-chi / 2.0).exp();
        }
        peaks.push(PeakDescriptor {
            q,
            center_s: center,
            gamma,
            width_expansion: 2.0 * std::f64::consts::SQRT_2 / gamma,
            width_nominal,
            height,
        });
    }
    Ok(PeakCatalog {
        peaks,
        missing_q: n_pulses / 2,
        qstar: n_pulses / 2 - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig2_spec() -> SystemSpec {
        SystemSpec {
            f0_hz: 1e5,
            quality_factor: 1e9,
            mass_g: 2.3e-16,
            temperature_k: 10.0,
            coupling_hz: 100.0,
            qubit_t1_s: 7e-3,
            qubit_t2_s: 100e-6,
            t2_scaling_exponent: 2.0 / 3.0,
            readout_contrast: 1.0,
            qubit_frequency_hz: 0.0,
        }
    }

    #[test]
    fn four_pulse_catalog() {
        let cat = peak_catalog(&fig2_spec(), 4, Mechanisms::none()).unwrap();
        assert_eq!(cat.peaks.len(), 1);
        assert_eq!(cat.peaks[0].q, 1);
        assert_eq!(cat.missing_q, 2);
        assert_eq!(cat.qstar, 1);
    }

    #[test]
    fn odd_pulse_count_rejected() {
        assert!(matches!(
            peak_catalog(&fig2_spec(), 99, Mechanisms::none()),
            Err(PeakError::BadPulseCount(99))
        ));
    }

    #[test]
    fn fig2_narrowest_peak() {
        let spec = fig2_spec();
        let cat = peak_catalog(&spec, 100, Mechanisms::none()).unwrap();
        assert_eq!(cat.qstar, 49);
        let p = cat.peaks.last().unwrap();
        assert_eq!(p.q, 49);
        assert_relative_eq!(p.center_s, 4.9e-4, max_relative = 1e-12);
        // Frozen independent arithmetic at these parameters:
        // gamma* = lambda_tilde (sec(0.49 pi) - 1) = 3.9552e7 / s.
        assert_relative_eq!(p.gamma, 3.9552e7, max_relative = 1e-4);
        assert_relative_eq!(p.width_expansion, 7.1511e-8, max_relative = 1e-4);
        assert_relative_eq!(p.width_nominal, 4.8986e-8, max_relative = 1e-4);
        // The two width conventions differ by ~sqrt(2) up to the
        // sec(pi q*/N) vs N/pi approximation.
        let ratio = p.width_expansion / p.width_nominal;
        assert!((ratio - std::f64::consts::SQRT_2).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn widths_shrink_toward_missing_peak() {
        let cat = peak_catalog(&fig2_spec(), 100, Mechanisms::none()).unwrap();
        for w in cat.peaks.windows(2) {
            assert!(w[1].gamma > w[0].gamma);
            assert!(w[1].width_expansion < w[0].width_expansion);
        }
    }

    #[test]
    fn heights_unity_without_mechanisms() {
        let cat = peak_catalog(&fig2_spec(), 100, Mechanisms::none()).unwrap();
        assert!(cat.peaks.iter().all(|p| p.height == 1.0));
        let with_bg = peak_catalog(
            &fig2_spec(),
            100,
            Mechanisms {
                t1: true,
                t2: true,
                q: false,
            },
        )
        .unwrap();
        assert!(with_bg.peaks.iter().all(|p| p.height < 1.0 && p.height > 0.0));
    }
}
