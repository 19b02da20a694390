//! Mass-sensing figures of merit: sensitivity vs pulse number, decay
//! penalties, mass-shift inversion, and the optimal operating point.

use rayon::prelude::*;
use thiserror::Error;

use crate::coherence::{background_coherence_selected, Mechanisms};
use crate::constants::{BOLTZMANN, HBAR, PLANCK_H};
use crate::peaks::narrowest_peak_time;
use crate::pulse::PulseSequence;
use crate::quadrature::{chi_spectral_quadrature, QuadratureError};
use crate::spectrum::NoiseSpectrum;
use crate::system::SystemSpec;

/// How the finite-Q penalty chi(t_q*) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyRoute {
    /// Closed estimate 4 lambda_tilde^2 N^3 / (omega0^2 Q).
    #[default]
    ClosedForm,
    /// Full spectral quadrature at t_q*.
    Quadrature,
}

#[derive(Debug, Error, PartialEq)]
pub enum SensitivityError {
    #[error("sensitivity analysis requires an even pulse count >= 2, got {0}")]
    BadPulseCount(usize),
    #[error(
        "flank operating point gamma*offset = {0:.3} outside [0.3, 3]: too close to \
         the peak centre the first-order response vanishes, too far out the \
         coherence is gone"
    )]
    FlankOutOfRange(f64),
    #[error(
        "scan range does not bracket a minimum: best N = {best_n} at the \
         {side} edge (eta = {best_eta:.3e}); widen the range"
    )]
    NoBracket {
        best_n: usize,
        best_eta: f64,
        side: &'static str,
    },
    #[error("empty pulse-number scan range")]
    EmptyRange,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// One row of a sensitivity-vs-N sweep, all in g/sqrt(Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityPoint {
    pub n_pulses: usize,
    pub eta_ideal: f64,
    pub eta_t1: f64,
    pub eta_t2: f64,
    pub eta_q: f64,
    pub eta_all: f64,
    /// Narrowest-peak time for this N, seconds.
    pub t_qstar: f64,
}

/// Sensitivity vs pulse number with each decay mechanism in isolation and
/// all of them combined.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub points: Vec<SensitivityPoint>,
}

/// Shot-noise-limited sensitivity with no decay:
/// eta = M / ((2N)^{3/2} Lambda sqrt(kB T / h)), g/sqrt(Hz).
///
/// Valid in the high-occupation regime; callers should warn below
/// n_th = 10.
pub fn sensitivity_ideal(spec: &SystemSpec, n_pulses: usize) -> Result<f64, SensitivityError> {
    check_even(n_pulses)?;
    let thermal = (BOLTZMANN * spec.temperature_k / PLANCK_H).sqrt();
    Ok(spec.mass_g / ((2.0 * n_pulses as f64).powf(1.5) * spec.coupling_ratio() * thermal))
}

/// Closed estimate of the finite-Q dephasing floor at the narrowest peak.
pub fn chi_qstar_closed(spec: &SystemSpec, n_pulses: usize) -> f64 {
    let w0 = spec.omega0();
    4.0 * spec.lambda_tilde_sq() * (n_pulses as f64).powi(3) / (w0 * w0 * spec.quality_factor)
}

/// Finite-Q dephasing floor chi(t_q*) by the selected route.
pub fn chi_qstar(
    spec: &SystemSpec,
    n_pulses: usize,
    route: PenaltyRoute,
) -> Result<f64, SensitivityError> {
    check_even(n_pulses)?;
    match route {
        PenaltyRoute::ClosedForm => Ok(chi_qstar_closed(spec, n_pulses)),
        PenaltyRoute::Quadrature => {
            let t = narrowest_peak_time(spec, n_pulses);
            let seq = PulseSequence::cpmg(n_pulses, t).expect("valid CPMG");
            Ok(chi_spectral_quadrature(&seq, &NoiseSpectrum::lorentzian(spec))?)
        }
    }
}

/// Sensitivity with the selected decay mechanisms and the readout contrast:
/// eta = eta_ideal * exp(chi_q*(t)/2) * L_bg(t_q*)^-1 * C^-1, with each
/// penalty present only when its mechanism is on.
pub fn sensitivity_full(
    spec: &SystemSpec,
    n_pulses: usize,
    mech: Mechanisms,
    route: PenaltyRoute,
) -> Result<f64, SensitivityError> {
    let mut eta = sensitivity_ideal(spec, n_pulses)?;
    if mech.q {
        eta *= (chi_qstar(spec, n_pulses, route)? / 2.0).exp();
    }
    let t_qstar = narrowest_peak_time(spec, n_pulses);
    let bg = background_coherence_selected(
        n_pulses,
        t_qstar,
        spec,
        Mechanisms {
            t1: mech.t1,
            t2: mech.t2,
            q: false,
        },
    );
    eta /= bg;
    eta /= spec.readout_contrast;
    Ok(eta)
}

/// Sweeps the per-mechanism sensitivity curves over the given pulse numbers.
///
/// Points are evaluated in parallel; the output order follows the input
/// order regardless of scheduling.
pub fn sensitivity_sweep(
    spec: &SystemSpec,
    n_values: &[usize],
    route: PenaltyRoute,
) -> Result<SensitivityCurve, SensitivityError> {
    let points: Result<Vec<_>, SensitivityError> = n_values
        .par_iter()
        .map(|&n| {
            let only = |t1, t2, q| Mechanisms { t1, t2, q };
            Ok(SensitivityPoint {
                n_pulses: n,
                eta_ideal: sensitivity_ideal(spec, n)?,
                eta_t1: sensitivity_full(spec, n, only(true, false, false), route)?,
                eta_t2: sensitivity_full(spec, n, only(false, true, false), route)?,
                eta_q: sensitivity_full(spec, n, only(false, false, true), route)?,
                eta_all: sensitivity_full(spec, n, Mechanisms::all(), route)?,
                t_qstar: narrowest_peak_time(spec, n),
            })
        })
        .collect();
    Ok(SensitivityCurve { points: points? })
}

/// Analytic optimal pulse number
/// N_opt = (omega0 / 2 lambda) (hbar lambda Q / kB T)^{1/3},
/// rounded to the nearest even integer >= 2.
pub fn optimal_n_analytic(spec: &SystemSpec) -> usize {
    let lambda = spec.lambda();
    let n = spec.omega0() / (2.0 * lambda)
        * (HBAR * lambda * spec.quality_factor / (BOLTZMANN * spec.temperature_k)).powf(1.0 / 3.0);
    let even = 2.0 * (n / 2.0).round();
    (even.max(2.0)) as usize
}

/// Result of the exhaustive even-N sensitivity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub n_opt: usize,
    pub eta_opt: f64,
    /// Universal optimum estimate M / sqrt(f0 Q), g/sqrt(Hz).
    pub eta_universal: f64,
    /// chi(t_q*) at the numeric optimum.
    pub chi_at_opt: f64,
}

/// Universal optimal-sensitivity estimate M / sqrt(f0 Q).
pub fn eta_universal(spec: &SystemSpec) -> f64 {
    spec.mass_g / (spec.f0_hz * spec.quality_factor).sqrt()
}

/// Exhaustive scan of `sensitivity_full` over even pulse numbers.
///
/// Ties break toward smaller N. Errors when the minimum sits on either edge
/// of the range, since then the range cannot have bracketed it.
pub fn optimize_sensitivity_numeric(
    spec: &SystemSpec,
    n_values: &[usize],
    mech: Mechanisms,
    route: PenaltyRoute,
) -> Result<OptimizationResult, SensitivityError> {
    if n_values.is_empty() {
        return Err(SensitivityError::EmptyRange);
    }
    let etas: Result<Vec<f64>, SensitivityError> = n_values
        .par_iter()
        .map(|&n| sensitivity_full(spec, n, mech, route))
        .collect();
    let etas = etas?;
    let mut best = 0usize;
    for (i, &eta) in etas.iter().enumerate() {
        if eta < etas[best] {
            best = i;
        }
    }
    if best == 0 || best + 1 == n_values.len() {
        return Err(SensitivityError::NoBracket {
            best_n: n_values[best],
            best_eta: etas[best],
            side: if best == 0 { "lower" } else { "upper" },
        });
    }
    Ok(OptimizationResult {
        n_opt: n_values[best],
        eta_opt: etas[best],
        eta_universal: eta_universal(spec),
        chi_at_opt: chi_qstar(spec, n_values[best], route)?,
    })
}

/// Inverts a measured relative coherence change at the peak flank into a
/// relative mass shift.
///
/// The coherence responds to a frequency pull as
/// d ln L = -gamma^2 (t - t_q*) t_q* * (d omega0 / omega0), and the mass
/// enters through omega0 = sqrt(k/M) as d omega0 / omega0 = -dM / 2M, so
/// dM/M = 2 (dL/L) / (gamma^2 * offset * t_q*).
///
/// `t_offset` is the flank distance t - t_q*; the usable flank requires
/// |gamma * t_offset| in [0.3, 3].
pub fn mass_shift_from_coherence(
    delta_l_over_l: f64,
    gamma_qstar: f64,
    t_offset: f64,
    t_qstar: f64,
) -> Result<f64, SensitivityError> {
    let flank = (gamma_qstar * t_offset).abs();
    if !(0.3..=3.0).contains(&flank) {
        return Err(SensitivityError::FlankOutOfRange(flank));
    }
    Ok(2.0 * delta_l_over_l / (gamma_qstar * gamma_qstar * t_offset * t_qstar))
}

fn check_even(n_pulses: usize) -> Result<(), SensitivityError> {
    if n_pulses < 2 || !n_pulses.is_multiple_of(2) {
        return Err(SensitivityError::BadPulseCount(n_pulses));
    }
    Ok(())
}

/// Default even-N sweep: every even value up to 256, then steps of 16 up to
/// `max` (2048 unless widened).
pub fn default_n_sweep(max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=128).map(|i| 2 * i).filter(|&n| n <= max).collect();
    let mut n = 272;
    while n <= max {
        v.push(n);
        n += 16;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec_at(temperature_k: f64) -> SystemSpec {
        SystemSpec {
            f0_hz: 1e5,
            quality_factor: 1e9,
            mass_g: 2.3e-16,
            temperature_k,
            coupling_hz: 100.0,
            qubit_t1_s: 7e-3,
            qubit_t2_s: 100e-6,
            t2_scaling_exponent: 2.0 / 3.0,
            readout_contrast: 1.0,
            qubit_frequency_hz: 0.0,
        }
    }

    #[test]
    fn ideal_scaling_in_n_and_t() {
        let s = spec_at(300.0);
        let e100 = sensitivity_ideal(&s, 100).unwrap();
        let e200 = sensitivity_ideal(&s, 200).unwrap();
        assert_relative_eq!(e100 / e200, 2.0f64.powf(1.5), max_relative = 1e-12);

        let hot = spec_at(4.0 * 300.0);
        assert_relative_eq!(
            sensitivity_ideal(&hot, 100).unwrap(),
            e100 / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ideal_value_room_temperature() {
        // M = 2.3e-16 g, N = 100, Lambda = 1e-3, T = 300 K, CODATA constants:
        // (2N)^{3/2} = 2828.43, sqrt(kB T / h) = 2.5002e6, eta = 3.2524e-23.
        let eta = sensitivity_ideal(&spec_at(300.0), 100).unwrap();
        assert_relative_eq!(eta, 3.2524e-23, max_relative = 1e-4);
    }

    #[test]
    fn full_reduces_to_ideal_without_mechanisms() {
        let s = spec_at(300.0);
        assert_relative_eq!(
            sensitivity_full(&s, 100, Mechanisms::none(), PenaltyRoute::ClosedForm).unwrap(),
            sensitivity_ideal(&s, 100).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn contrast_is_a_linear_penalty() {
        let mut s = spec_at(300.0);
        let base = sensitivity_full(&s, 100, Mechanisms::none(), PenaltyRoute::ClosedForm).unwrap();
        s.readout_contrast = 0.1;
        let degraded =
            sensitivity_full(&s, 100, Mechanisms::none(), PenaltyRoute::ClosedForm).unwrap();
        assert_relative_eq!(degraded, 10.0 * base, max_relative = 1e-12);
    }

    #[test]
    fn analytic_optimum_values() {
        // Frozen from independent arithmetic with CODATA constants.
        assert_eq!(optimal_n_analytic(&spec_at(300.0)), 126);
        assert_eq!(optimal_n_analytic(&spec_at(1.0)), 844);
    }

    #[test]
    fn cube_root_temperature_scaling() {
        let n1 = optimal_n_analytic(&spec_at(300.0));
        let n8 = optimal_n_analytic(&spec_at(8.0 * 300.0));
        assert!((n1 as f64 / n8 as f64 - 2.0).abs() < 0.05);
    }

    #[test]
    fn numeric_optimum_q_only() {
        let q_only = Mechanisms {
            t1: false,
            t2: false,
            q: true,
        };
        let sweep = default_n_sweep(2048);
        let r =
            optimize_sensitivity_numeric(&spec_at(300.0), &sweep, q_only, PenaltyRoute::ClosedForm)
                .unwrap();
        assert_eq!(r.n_opt, 126);
        assert_relative_eq!(r.chi_at_opt, 1.0, max_relative = 0.05);
        assert_relative_eq!(r.eta_universal, 2.3e-23, max_relative = 1e-12);
        // Minimum is e^{1/2} above the ideal curve at N_opt.
        assert_relative_eq!(r.eta_opt, 3.792e-23, max_relative = 1e-3);
    }

    #[test]
    fn ideal_only_scan_has_no_bracket() {
        let sweep = default_n_sweep(512);
        let err = optimize_sensitivity_numeric(
            &spec_at(300.0),
            &sweep,
            Mechanisms::none(),
            PenaltyRoute::ClosedForm,
        )
        .unwrap_err();
        match err {
            SensitivityError::NoBracket { best_n, side, .. } => {
                assert_eq!(best_n, *sweep.last().unwrap());
                assert_eq!(side, "upper");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn mass_shift_inversion() {
        assert_eq!(mass_shift_from_coherence(0.0, 1e7, 1e-7, 1e-3).unwrap(), 0.0);
        // dL/L = 0.01, gamma * offset = 1, gamma * t_q* = 1e4
        let gamma = 1e7;
        let shift = mass_shift_from_coherence(0.01, gamma, 1.0 / gamma, 1e4 / gamma).unwrap();
        assert_relative_eq!(shift, 2e-6, max_relative = 1e-12);

        assert!(matches!(
            mass_shift_from_coherence(0.01, gamma, 0.1 / gamma, 1.0),
            Err(SensitivityError::FlankOutOfRange(_))
        ));
    }

    #[test]
    fn pointwise_mechanism_domination() {
        let s = spec_at(300.0);
        let sweep = default_n_sweep(512);
        let curve = sensitivity_sweep(&s, &sweep, PenaltyRoute::ClosedForm).unwrap();
        for p in &curve.points {
            let max_single = p.eta_t1.max(p.eta_t2).max(p.eta_q);
            assert!(p.eta_all >= max_single * (1.0 - 1e-12));
            assert!(max_single >= p.eta_ideal * (1.0 - 1e-12));
        }
    }
}
