//! Oscillator noise spectral densities seen by the qubit.

use crate::system::SystemSpec;

/// Spectral density S(omega) of the thermal oscillator line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpectrum {
    /// S(omega) = lambda_tilde^2 * pi * delta(omega - omega0).
    DeltaLine {
        /// lambda_tilde^2 = lambda^2 (2 n_th + 1), rad^2/s^2.
        lambda_tilde_sq: f64,
        /// Line centre omega0, rad/s.
        omega0: f64,
    },
    /// S(omega) = lambda_tilde^2 kappa / ((omega - omega0)^2 + kappa^2).
    Lorentzian {
        lambda_tilde_sq: f64,
        omega0: f64,
        /// Line width kappa = omega0 / Q, rad/s.
        kappa: f64,
    },
}

impl NoiseSpectrum {
    /// Infinitely narrow line for the given system parameters.
    pub fn delta_line(spec: &SystemSpec) -> Self {
        NoiseSpectrum::DeltaLine {
            lambda_tilde_sq: spec.lambda_tilde_sq(),
            omega0: spec.omega0(),
        }
    }

    /// Finite-Q Lorentzian line for the given system parameters.
    pub fn lorentzian(spec: &SystemSpec) -> Self {
        NoiseSpectrum::Lorentzian {
            lambda_tilde_sq: spec.lambda_tilde_sq(),
            omega0: spec.omega0(),
            kappa: spec.kappa(),
        }
    }

    pub fn lambda_tilde_sq(&self) -> f64 {
        match *self {
            NoiseSpectrum::DeltaLine { lambda_tilde_sq, .. }
            | NoiseSpectrum::Lorentzian { lambda_tilde_sq, .. } => lambda_tilde_sq,
        }
    }

    pub fn omega0(&self) -> f64 {
        match *self {
            NoiseSpectrum::DeltaLine { omega0, .. }
            | NoiseSpectrum::Lorentzian { omega0, .. } => omega0,
        }
    }
}
