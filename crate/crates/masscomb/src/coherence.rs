//! Dephasing exponent chi(t) and qubit coherence L(t) = exp(-chi/2), by
//! three mutually checking routes, plus the background decoherence model.

use thiserror::Error;

use crate::pulse::PulseSequence;
use crate::quadrature::{chi_spectral_quadrature, QuadratureError};
use crate::spectrum::NoiseSpectrum;
use crate::system::SystemSpec;

/// Which background / line-width decay mechanisms are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Mechanisms {
    /// Qubit longitudinal relaxation, exp(-t/T1).
    pub t1: bool,
    /// Qubit transverse dephasing, exp(-(t/T2(N))^3).
    pub t2: bool,
    /// Oscillator line broadening kappa = omega0/Q.
    pub q: bool,
}

impl Mechanisms {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Mechanisms {
            t1: true,
            t2: true,
            q: true,
        }
    }
}

/// How to evaluate the dephasing exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiRoute {
    /// CPMG closed form (delta line).
    Closed,
    /// Piecewise-analytic modulation integral at omega0 (delta line,
    /// arbitrary sequences).
    Piecewise,
    /// Adaptive spectral quadrature (Lorentzian line).
    Quadrature,
}

#[derive(Debug, Error, PartialEq)]
pub enum ChiError {
    #[error("operation requires a delta-line spectrum")]
    ExpectedDeltaLine,
    #[error("route {0:?} requires a Lorentzian spectrum")]
    ExpectedLorentzian(ChiRoute),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// CPMG closed-form dephasing exponent.
///
/// For even N: chi = (4 lt^2 / w0^2) (sec(w0 t / 2N) - 1)^2 sin^2(w0 t / 2).
/// For odd N the last factor is cos^2 instead of sin^2; the even-N form as
/// commonly quoted fails for odd pulse counts (check it against the Hahn
/// echo N = 1). Both variants agree with the piecewise modulation integral
/// at every frequency, not just at the zeros.
///
/// Where cos(w0 t / 2N) = 0 the envelope (sec - 1) blows up, but the comb
/// factor vanishes at the same points, leaving the finite removable limit
/// 4 lt^2 N^2 / w0^2 (coherence still effectively dead at realistic
/// parameters). The result is never NaN.
pub fn chi_cpmg_closed(n_pulses: usize, omega0: f64, lambda_tilde_sq: f64, t: f64) -> f64 {
    assert!(n_pulses >= 1, "closed form needs at least one pulse");
    assert!(t >= 0.0 && omega0 > 0.0);
    let n = n_pulses as f64;
    let x = omega0 * t / (2.0 * n);
    let cos_x = x.cos();
    if cos_x == 0.0 {
        return 4.0 * lambda_tilde_sq * n * n / (omega0 * omega0);
    }
    // sec(x) - 1 = 2 sin^2(x/2) / cos(x), avoiding the 1/cos - 1 cancellation
    let sec_m1 = 2.0 * (x / 2.0).sin().powi(2) / cos_x;
    let half_phase = omega0 * t / 2.0;
    let comb = if n_pulses.is_multiple_of(2) {
        half_phase.sin()
    } else {
        half_phase.cos()
    };
    let chi = 4.0 * lambda_tilde_sq / (omega0 * omega0) * sec_m1 * sec_m1 * comb * comb;
    if chi.is_nan() {
        f64::INFINITY
    } else {
        chi
    }
}

/// Delta-line chi for an arbitrary sequence:
/// chi = lambda_tilde^2 |F(omega0)|^2 with F the modulation integral.
pub fn chi_delta_general(seq: &PulseSequence, spectrum: &NoiseSpectrum) -> Result<f64, ChiError> {
    match *spectrum {
        NoiseSpectrum::DeltaLine {
            lambda_tilde_sq,
            omega0,
        } => Ok(lambda_tilde_sq * seq.modulation_integral(omega0).norm_sqr()),
        NoiseSpectrum::Lorentzian { .. } => Err(ChiError::ExpectedDeltaLine),
    }
}

/// Background decoherence exp[-t/T1 - (t / (T2 N^s))^3] with both channels on.
pub fn background_coherence(n_pulses: usize, t: f64, spec: &SystemSpec) -> f64 {
    background_coherence_selected(
        n_pulses,
        t,
        spec,
        Mechanisms {
            t1: true,
            t2: true,
            q: false,
        },
    )
}

/// Background decoherence with individually selectable channels.
pub fn background_coherence_selected(
    n_pulses: usize,
    t: f64,
    spec: &SystemSpec,
    mech: Mechanisms,
) -> f64 {
    assert!(n_pulses >= 1 && t >= 0.0);
    let mut exponent = 0.0;
    if mech.t1 {
        exponent += t / spec.qubit_t1_s;
    }
    if mech.t2 {
        let t2_n = spec.qubit_t2_s * (n_pulses as f64).powf(spec.t2_scaling_exponent);
        exponent += (t / t2_n).powi(3);
    }
    (-exponent).exp()
}

/// Sampled coherence with its ideal, background, and total components.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceTrace {
    /// Sample times, seconds, ascending.
    pub times: Vec<f64>,
    /// Oscillator-induced coherence exp(-chi/2).
    pub l_ideal: Vec<f64>,
    /// Background decoherence.
    pub l_bg: Vec<f64>,
    /// Elementwise product of the two.
    pub l_total: Vec<f64>,
}

/// Evaluates the CPMG coherence on a time grid.
///
/// `route` picks the chi evaluation; `Closed` and `Piecewise` require a
/// delta line, `Quadrature` a Lorentzian (a delta line is accepted there too
/// and collapses analytically). The background uses only the t1/t2 flags of
/// `mech`; the q mechanism is carried by the spectrum choice.
pub fn coherence_trace(
    spec: &SystemSpec,
    n_pulses: usize,
    spectrum: &NoiseSpectrum,
    route: ChiRoute,
    mech: Mechanisms,
    times: &[f64],
) -> Result<CoherenceTrace, ChiError> {
    let mut l_ideal = Vec::with_capacity(times.len());
    let mut l_bg = Vec::with_capacity(times.len());
    let mut l_total = Vec::with_capacity(times.len());
    for &t in times {
        let chi = if t == 0.0 {
            0.0
        } else {
            match route {
                ChiRoute::Closed => match spectrum {
                    NoiseSpectrum::DeltaLine {
                        lambda_tilde_sq,
                        omega0,
                    } => chi_cpmg_closed(n_pulses, *omega0, *lambda_tilde_sq, t),
                    NoiseSpectrum::Lorentzian { .. } => {
                        return Err(ChiError::ExpectedDeltaLine)
                    }
                },
                ChiRoute::Piecewise => {
                    let seq = PulseSequence::cpmg(n_pulses, t).expect("valid CPMG");
                    chi_delta_general(&seq, spectrum)?
                }
                ChiRoute::Quadrature => {
                    let seq = PulseSequence::cpmg(n_pulses, t).expect("valid CPMG");
                    chi_spectral_quadrature(&seq, spectrum)?
                }
            }
        };
        let ideal = (-chi / 2.0).exp();
        let bg = background_coherence_selected(n_pulses, t, spec, mech);
        l_ideal.push(ideal);
        l_bg.push(bg);
        l_total.push(ideal * bg);
    }
    Ok(CoherenceTrace {
        times: times.to_vec(),
        l_ideal,
        l_bg,
        l_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

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
    fn hahn_echo_closed_matches_piecewise() {
        // N = 1, w0 t = 2 pi: chi = 16 lt^2 / w0^2 by the Hahn closed form.
        let omega0 = TAU * 1e5;
        let t = TAU / omega0;
        let lt2 = 3.0;
        let chi = chi_cpmg_closed(1, omega0, lt2, t);
        assert_relative_eq!(chi, 16.0 * lt2 / (omega0 * omega0), max_relative = 1e-9);

        let seq = PulseSequence::cpmg(1, t).unwrap();
        let s = NoiseSpectrum::DeltaLine {
            lambda_tilde_sq: lt2,
            omega0,
        };
        assert_relative_eq!(
            chi_delta_general(&seq, &s).unwrap(),
            chi,
            max_relative = 1e-9
        );
    }

    #[test]
    fn comb_zeros_at_integer_periods() {
        let spec = fig2_spec();
        let (w0, lt2) = (spec.omega0(), spec.lambda_tilde_sq());
        let t0 = spec.oscillator_period();
        for q in [1u32, 7, 45, 49] {
            let chi = chi_cpmg_closed(100, w0, lt2, f64::from(q) * t0);
            assert!(chi.abs() < 1e-12, "chi({q} T0) = {chi}");
        }
    }

    #[test]
    fn envelope_pole_is_removable_and_finite() {
        let spec = fig2_spec();
        let (w0, lt2) = (spec.omega0(), spec.lambda_tilde_sq());
        // w0 t / 2N = pi/2  <=>  t = 50 T0 for N = 100: the envelope pole.
        let t = std::f64::consts::FRAC_PI_2 * 2.0 * 100.0 / w0;
        let chi = chi_cpmg_closed(100, w0, lt2, t);
        assert!(!chi.is_nan());
        // Removable limit 4 lt^2 N^2 / w0^2. The floating-point t lands a
        // hair off the pole, where cos(x) carries an O(eps) absolute error
        // on an O(1e-17) value, so the computed chi is only good to a
        // factor-level agreement with the limit -- which is plenty, since
        // the coherence there is utterly dead either way.
        let limit = 4.0 * lt2 * 1e4 / (w0 * w0);
        assert!(chi > 0.5 * limit && chi < 2.0 * limit, "{chi} vs {limit}");

        // A quarter comb period off the pole the envelope is still huge.
        let t0 = spec.oscillator_period();
        let chi_near = chi_cpmg_closed(100, w0, lt2, t + t0 / 4.0);
        assert!(chi_near > 1e3 && !chi_near.is_nan());
    }

    #[test]
    fn fig2_midpoint_collapse() {
        // chi(45.5 T0) = Gamma^2 sin^2(w0 t / 2) with Gamma = 24.9; frozen
        // from the envelope arithmetic at N = 100, Lambda = 1e-3, T = 10 K.
        let spec = fig2_spec();
        let t = 45.5 * spec.oscillator_period();
        let chi = chi_cpmg_closed(100, spec.omega0(), spec.lambda_tilde_sq(), t);
        assert_relative_eq!(chi, 619.689, max_relative = 1e-4);
    }

    #[test]
    fn background_examples() {
        let spec = fig2_spec();
        assert_eq!(background_coherence(100, 0.0, &spec), 1.0);

        let mut eternal = fig2_spec();
        eternal.qubit_t1_s = 1e30;
        eternal.qubit_t2_s = 1e30;
        assert_relative_eq!(background_coherence(100, 1.0, &eternal), 1.0);

        // T1 = 7 ms, T2 = 100 us, N = 100, t = 0.49 ms:
        // exp[-0.07 - (0.49/2.1544)^3] = 0.92150 (direct arithmetic).
        let l = background_coherence(100, 0.49e-3, &spec);
        assert_relative_eq!(l, 0.921_50, max_relative = 1e-4);
    }

    #[test]
    fn trace_components_multiply_and_stay_in_range() {
        let spec = fig2_spec();
        let t0 = spec.oscillator_period();
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.26 * t0).collect();
        let tr = coherence_trace(
            &spec,
            100,
            &NoiseSpectrum::delta_line(&spec),
            ChiRoute::Closed,
            Mechanisms {
                t1: true,
                t2: true,
                q: false,
            },
            &times,
        )
        .unwrap();
        for i in 0..times.len() {
            assert!((0.0..=1.0).contains(&tr.l_ideal[i]));
            assert!((0.0..=1.0).contains(&tr.l_bg[i]));
            assert_relative_eq!(tr.l_total[i], tr.l_ideal[i] * tr.l_bg[i]);
        }
        assert_eq!(tr.l_ideal[0], 1.0);
        assert_eq!(tr.l_bg[0], 1.0);
    }

    #[test]
    fn closed_route_rejects_lorentzian() {
        let spec = fig2_spec();
        let err = coherence_trace(
            &spec,
            100,
            &NoiseSpectrum::lorentzian(&spec),
            ChiRoute::Closed,
            Mechanisms::none(),
            &[1e-4],
        )
        .unwrap_err();
        assert_eq!(err, ChiError::ExpectedDeltaLine);
    }

    #[test]
    fn chi_linear_in_spectrum_amplitude() {
        let spec = fig2_spec();
        let t = 45.3 * spec.oscillator_period();
        let seq = PulseSequence::cpmg(100, t).unwrap();
        let base = spec.lambda_tilde_sq();
        let one = chi_delta_general(
            &seq,
            &NoiseSpectrum::DeltaLine {
                lambda_tilde_sq: base,
                omega0: spec.omega0(),
            },
        )
        .unwrap();
        let two = chi_delta_general(
            &seq,
            &NoiseSpectrum::DeltaLine {
                lambda_tilde_sq: 2.0 * base,
                omega0: spec.omega0(),
            },
        )
        .unwrap();
        assert_relative_eq!(two, 2.0 * one, max_relative = 1e-12);
    }
}
