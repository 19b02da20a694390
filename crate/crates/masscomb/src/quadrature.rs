//! Adaptive spectral quadrature of the dephasing integral
//! chi(t) = int_0^inf (dw/pi) S(w) |F(w t)|^2.
//!
//! The Lorentzian line is orders of magnitude narrower than the filter
//! structure for realistic Q, so the integrand mixes two scales: kappa around
//! the line centre and 2 pi / t from the filter oscillations. The integral is
//! split into a centre zone, evaluated under the substitution
//! w = w0 + kappa tan(theta) which absorbs the Lorentzian exactly, and outer
//! zones integrated panel-by-panel with one filter oscillation per panel.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::pulse::PulseSequence;
use crate::spectrum::NoiseSpectrum;

/// Absolute floor of the quadrature tolerance on chi.
pub const CHI_ABS_TOL: f64 = 1e-10;
/// Relative tolerance on chi; the looser of the two bounds applies.
pub const CHI_REL_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error(
        "spectral quadrature did not converge: value {value:.6e}, \
         error estimate {achieved:.2e} > required {required:.2e}"
    )]
    NonConvergence {
        value: f64,
        achieved: f64,
        required: f64,
    },
}

/// chi for an arbitrary sequence against a delta or Lorentzian line.
///
/// A delta line collapses the integral to lambda_tilde^2 |F(w0)|^2; the
/// Lorentzian case integrates over the window
/// [max(0, w0 - W), w0 + W] with W = max(50 kappa, 20 * 2 pi N / t),
/// extended down to zero frequency to pick up the low-frequency tail.
pub fn chi_spectral_quadrature(
    seq: &PulseSequence,
    spectrum: &NoiseSpectrum,
) -> Result<f64, QuadratureError> {
    match *spectrum {
        NoiseSpectrum::DeltaLine {
            lambda_tilde_sq,
            omega0,
        } => Ok(lambda_tilde_sq * seq.modulation_integral(omega0).norm_sqr()),
        NoiseSpectrum::Lorentzian {
            lambda_tilde_sq,
            omega0,
            kappa,
        } => chi_lorentzian(seq, lambda_tilde_sq, omega0, kappa),
    }
}

fn chi_lorentzian(
    seq: &PulseSequence,
    lambda_tilde_sq: f64,
    omega0: f64,
    kappa: f64,
) -> Result<f64, QuadratureError> {
    let t = seq.total_time();
    let n = seq.n_pulses().max(1) as f64;
    let window = (50.0 * kappa).max(20.0 * TAU * n / t);
    let hi = omega0 + window;
    let filter_period = TAU / t;

    let integrand = |w: f64| -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let d = w - omega0;
        lambda_tilde_sq * kappa / ((d * d + kappa * kappa) * PI)
            * seq.modulation_integral(w).norm_sqr()
    };

    let mut panels: Vec<(f64, f64, PanelKind)> = Vec::new();
    // Centre zone only when the line is much sharper than the filter scale.
    let spike_half = 0.05 * filter_period;
    let use_centre = kappa < spike_half / 10.0 && omega0 - spike_half > 0.0;
    let (outer_left_end, outer_right_start) = if use_centre {
        let theta_max = (spike_half / kappa).atan();
        let n_theta = 16;
        let h = 2.0 * theta_max / n_theta as f64;
        for i in 0..n_theta {
            let a = -theta_max + i as f64 * h;
            panels.push((a, a + h, PanelKind::Theta));
        }
        (omega0 - spike_half, omega0 + spike_half)
    } else {
        (omega0, omega0)
    };
    push_omega_panels(&mut panels, 0.0, outer_left_end, filter_period);
    push_omega_panels(&mut panels, outer_right_start, hi, filter_period);

    let theta_integrand = |theta: f64| -> f64 {
        let w = omega0 + kappa * theta.tan();
        if w <= 0.0 {
            return 0.0;
        }
        lambda_tilde_sq / PI * seq.modulation_integral(w).norm_sqr()
    };

    // First pass: one K15 rule per panel to scale the tolerance.
    let mut results: Vec<(f64, f64)> = panels
        .iter()
        .map(|&(a, b, kind)| match kind {
            PanelKind::Omega => kronrod15(&integrand, a, b),
            PanelKind::Theta => kronrod15(&theta_integrand, a, b),
        })
        .collect();
    let rough: f64 = results.iter().map(|r| r.0).sum();
    let tolerance = CHI_ABS_TOL.max(CHI_REL_TOL * rough.abs());
    let per_panel = tolerance / panels.len() as f64;

    for (i, &(a, b, kind)) in panels.iter().enumerate() {
        if results[i].1 > per_panel {
            results[i] = match kind {
                PanelKind::Omega => refine(&integrand, a, b, per_panel, 0),
                PanelKind::Theta => refine(&theta_integrand, a, b, per_panel, 0),
            };
        }
    }

    let value: f64 = results.iter().map(|r| r.0).sum();
    let achieved: f64 = results.iter().map(|r| r.1).sum();
    let required = CHI_ABS_TOL.max(CHI_REL_TOL * value.abs());
    if achieved > required {
        return Err(QuadratureError::NonConvergence {
            value,
            achieved,
            required,
        });
    }
    Ok(value.max(0.0))
}

#[derive(Clone, Copy)]
enum PanelKind {
    Omega,
    Theta,
}

fn push_omega_panels(
    panels: &mut Vec<(f64, f64, PanelKind)>,
    lo: f64,
    hi: f64,
    period: f64,
) {
    if hi <= lo {
        return;
    }
    let count = ((hi - lo) / period).ceil().max(1.0) as usize;
    let h = (hi - lo) / count as f64;
    for i in 0..count {
        let a = lo + i as f64 * h;
        let b = if i + 1 == count { hi } else { a + h };
        panels.push((a, b, PanelKind::Omega));
    }
}

fn refine(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
    let (v, e) = kronrod15(f, a, b);
    if e <= tol || depth >= 40 || (b - a) < f64::EPSILON * a.abs() {
        return (v, e);
    }
    let m = 0.5 * (a + b);
    let (vl, el) = refine(f, a, m, tol / 2.0, depth + 1);
    let (vr, er) = refine(f, m, b, tol / 2.0, depth + 1);
    (vl + vr, el + er)
}

// 7-point Gauss / 15-point Kronrod abscissae and weights (QUADPACK QK15).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Single Gauss-Kronrod 15(7) rule; returns (integral, error estimate).
fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(c - x) + f(c + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    let value = kronrod * half;
    // |K - G| overestimates the Kronrod error; conservative is fine here.
    let err = ((kronrod - gauss) * half).abs() + f64::EPSILON * value.abs();
    (value, err)
}
