//! Physical parameters of the qubit-oscillator sensing setup.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::constants::{BOLTZMANN, HBAR};

/// Oscillator, qubit, coupling, and environment parameters.
///
/// Configuration uses ordinary frequencies (Hz) and SI times; all internal
/// computation works with angular frequencies (rad/s). Masses are in grams.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    /// Oscillator frequency f0, Hz.
    pub f0_hz: f64,
    /// Oscillator quality factor Q; the line width is kappa = omega0 / Q.
    pub quality_factor: f64,
    /// Oscillator mass, grams.
    pub mass_g: f64,
    /// Environment temperature, kelvin.
    pub temperature_k: f64,
    /// Qubit-oscillator coupling strength, Hz (lambda = 2 pi * coupling_hz).
    pub coupling_hz: f64,
    /// Qubit longitudinal relaxation time T1, seconds.
    pub qubit_t1_s: f64,
    /// Qubit single-echo transverse coherence time T2, seconds.
    pub qubit_t2_s: f64,
    /// Exponent s in T2(N) = T2 * N^s. The 2/3 default comes from the
    /// solid-state spin measurements this model is calibrated to; it is a
    /// knob, not a law.
    pub t2_scaling_exponent: f64,
    /// Readout contrast C in (0, 1].
    pub readout_contrast: f64,
    /// Qubit splitting, Hz. Informational only: it cancels from |L(t)| in
    /// the rotating frame and no operation consumes it.
    pub qubit_frequency_hz: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("{field} must be finite and positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("temperature must be finite and >= 0, got {0}")]
    NegativeTemperature(f64),
    #[error("readout contrast must lie in (0, 1], got {0}")]
    ContrastOutOfRange(f64),
    #[error("coupling ratio lambda/omega0 = {0} is not below 1 (weak coupling required)")]
    StrongCoupling(f64),
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },
}

impl SystemSpec {
    /// Checks all field invariants. Every public entry point that accepts a
    /// spec assumes this has passed.
    pub fn validate(&self) -> Result<(), SpecError> {
        let positive = [
            ("f0_hz", self.f0_hz),
            ("quality_factor", self.quality_factor),
            ("mass_g", self.mass_g),
            ("coupling_hz", self.coupling_hz),
            ("qubit_t1_s", self.qubit_t1_s),
            ("qubit_t2_s", self.qubit_t2_s),
        ];
        for (field, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(SpecError::NonPositive { field, value });
            }
        }
        if !self.temperature_k.is_finite() || self.temperature_k < 0.0 {
            return Err(SpecError::NegativeTemperature(self.temperature_k));
        }
        if !self.readout_contrast.is_finite()
            || self.readout_contrast <= 0.0
            || self.readout_contrast > 1.0
        {
            return Err(SpecError::ContrastOutOfRange(self.readout_contrast));
        }
        for (field, value) in [
            ("t2_scaling_exponent", self.t2_scaling_exponent),
            ("qubit_frequency_hz", self.qubit_frequency_hz),
        ] {
            if !value.is_finite() {
                return Err(SpecError::NonFinite { field, value });
            }
        }
        let ratio = self.coupling_ratio();
        if ratio >= 1.0 {
            return Err(SpecError::StrongCoupling(ratio));
        }
        Ok(())
    }

    /// Oscillator angular frequency omega0, rad/s.
    pub fn omega0(&self) -> f64 {
        TAU * self.f0_hz
    }

    /// Oscillator period T0 = 2 pi / omega0 = 1 / f0, seconds.
    pub fn oscillator_period(&self) -> f64 {
        1.0 / self.f0_hz
    }

    /// Coupling strength lambda, rad/s.
    pub fn lambda(&self) -> f64 {
        TAU * self.coupling_hz
    }

    /// Dimensionless coupling ratio Lambda = lambda / omega0.
    pub fn coupling_ratio(&self) -> f64 {
        self.coupling_hz / self.f0_hz
    }

    /// Oscillator line width kappa = omega0 / Q, rad/s.
    pub fn kappa(&self) -> f64 {
        self.omega0() / self.quality_factor
    }

    /// Thermal occupation of this spec's oscillator.
    pub fn thermal_occupation(&self) -> f64 {
        thermal_occupation(self.f0_hz, self.temperature_k)
    }

    /// Thermally enhanced coupling lambda_tilde^2 = lambda^2 (2 n_th + 1), rad^2/s^2.
    pub fn lambda_tilde_sq(&self) -> f64 {
        lambda_tilde_sq(self.lambda(), self.thermal_occupation())
    }

    /// Returns a copy with the mass perturbed to M (1 + delta_m_rel).
    ///
    /// The oscillator frequency follows as omega0 (1 + delta_m_rel)^(-1/2);
    /// the spring constant is unchanged.
    pub fn with_mass_perturbation(&self, delta_m_rel: f64) -> SystemSpec {
        let scale = (1.0 + delta_m_rel).sqrt();
        SystemSpec {
            mass_g: self.mass_g * (1.0 + delta_m_rel),
            f0_hz: self.f0_hz / scale,
            ..self.clone()
        }
    }
}

/// Bose-Einstein occupation n_th = 1 / (exp(hbar omega0 / kB T) - 1).
///
/// Returns 0 at T = 0 and stays accurate in the classical regime
/// hbar omega0 << kB T via `exp_m1`.
pub fn thermal_occupation(f0_hz: f64, temperature_k: f64) -> f64 {
    assert!(
        f0_hz.is_finite() && f0_hz > 0.0,
        "thermal_occupation: f0 must be positive"
    );
    assert!(
        temperature_k.is_finite() && temperature_k >= 0.0,
        "thermal_occupation: T must be >= 0"
    );
    if temperature_k == 0.0 {
        return 0.0;
    }
    let x = HBAR * TAU * f0_hz / (BOLTZMANN * temperature_k);
    1.0 / x.exp_m1()
}

/// lambda_tilde^2 = lambda^2 (2 n_th + 1), rad^2/s^2.
pub fn lambda_tilde_sq(lambda: f64, n_th: f64) -> f64 {
    assert!(lambda > 0.0 && n_th >= 0.0);
    lambda * lambda * (2.0 * n_th + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub fn fig2ish() -> SystemSpec {
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
            qubit_frequency_hz: 2.87e9,
        }
    }

    #[test]
    fn occupation_zero_temperature() {
        assert_eq!(thermal_occupation(1e5, 0.0), 0.0);
    }

    #[test]
    fn occupation_at_ln2_crossover() {
        // hbar omega0 / kB T = ln 2 gives exactly one thermal phonon.
        let f0 = 1e5;
        let t = HBAR * TAU * f0 / (BOLTZMANN * std::f64::consts::LN_2);
        assert_relative_eq!(thermal_occupation(f0, t), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn occupation_classical_regime() {
        // 100 kHz at 10 K; frozen from a high-precision Bose-Einstein
        // evaluation (kB T / hbar omega0 = 2.0837e6, correction negligible).
        assert_relative_eq!(
            thermal_occupation(1e5, 10.0),
            2.083_661_4e6,
            max_relative = 1e-7
        );
    }

    #[test]
    fn lambda_tilde_limits() {
        let lam = TAU * 100.0;
        assert_eq!(lambda_tilde_sq(lam, 0.0), lam * lam);
        assert_relative_eq!(lambda_tilde_sq(lam, 1.0), 3.0 * lam * lam);
        // Arithmetic from the frozen occupation value above.
        assert_relative_eq!(
            lambda_tilde_sq(lam, 2.084e6),
            1.645e12,
            max_relative = 1e-3
        );
    }

    #[test]
    fn validation_rejects_bad_fields() {
        let mut s = fig2ish();
        s.temperature_k = -1.0;
        assert!(matches!(s.validate(), Err(SpecError::NegativeTemperature(_))));

        let mut s = fig2ish();
        s.readout_contrast = 0.0;
        assert!(matches!(s.validate(), Err(SpecError::ContrastOutOfRange(_))));

        let mut s = fig2ish();
        s.coupling_hz = 2e5;
        assert!(matches!(s.validate(), Err(SpecError::StrongCoupling(_))));

        let mut s = fig2ish();
        s.mass_g = f64::NAN;
        assert!(s.validate().is_err());

        assert!(fig2ish().validate().is_ok());
    }

    #[test]
    fn mass_perturbation_rescales_frequency() {
        let s = fig2ish();
        let p = s.with_mass_perturbation(1e-6);
        assert_relative_eq!(p.mass_g / s.mass_g, 1.0 + 1e-6);
        assert_relative_eq!(p.f0_hz / s.f0_hz, (1.0f64 + 1e-6).powf(-0.5));
    }
}
