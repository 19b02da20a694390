//! Monte Carlo readout simulation and shot-noise-limited estimation of the
//! coherence and of a mass shift from the two-point flank protocol.

use rayon::prelude::*;
use thiserror::Error;

use crate::coherence::{background_coherence_selected, chi_cpmg_closed, Mechanisms};
use crate::peaks::{narrowest_peak_time, peak_gamma};
use crate::sensitivity::{mass_shift_from_coherence, SensitivityError};
use crate::system::SystemSpec;

/// Parameters of one Monte Carlo mass-shift estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    /// CPMG pulse count (even).
    pub n_pulses: usize,
    /// Readout repetitions per operating point.
    pub n_run: u64,
    /// Injected relative mass shift on the perturbed branch.
    pub delta_m_rel: f64,
    /// Flank operating point: the measurement sits at
    /// t = t_q* + flank_offset / gamma*. Values near 1 put the readout on
    /// the steep side of the narrowest peak.
    pub flank_offset: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("readout probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("zero readout repetitions")]
    NoRepetitions,
    #[error(
        "reference coherence estimate {0:.4} is below 0.1: the flank point \
         carries no usable signal at these parameters"
    )]
    ReferenceTooSmall(f64),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
}

// SplitMix64 finalizer. Each (seed, stream, trial) triple maps to one
// uniform deviate with no sequential state, so results are identical for
// any worker count and any chunking.
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Uniform deviate in [0, 1) for a counter triple.
pub fn unit_uniform(seed: u64, stream: u64, trial: u64) -> f64 {
    let z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let u = mix64(mix64(mix64(z) ^ stream) ^ trial);
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Simulates `n_run` Bernoulli readouts at up-probability `p` and returns
/// the up count. Deterministic in (seed, stream) regardless of thread count.
pub fn simulate_readout(
    p: f64,
    n_run: u64,
    seed: u64,
    stream: u64,
) -> Result<u64, EstimatorError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(EstimatorError::BadProbability(p));
    }
    if n_run == 0 {
        return Err(EstimatorError::NoRepetitions);
    }
    let ups = (0..n_run)
        .into_par_iter()
        .filter(|&trial| unit_uniform(seed, stream, trial) < p)
        .count() as u64;
    Ok(ups)
}

/// Coherence recovered from a readout tally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceEstimate {
    /// Raw up-fraction.
    pub p_hat: f64,
    /// (2 p_hat - 1) / C, clamped to [-1, 1].
    pub l_hat: f64,
    /// Binomial one-sigma on l_hat: 2 sqrt(p_hat (1 - p_hat) / n) / C.
    pub sigma_l: f64,
    /// True when the raw inversion left [-1, 1] and was clamped.
    pub clamped: bool,
}

/// Inverts an up count into a coherence estimate.
pub fn estimate_coherence(ups: u64, n_run: u64, contrast: f64) -> Result<CoherenceEstimate, EstimatorError> {
    if n_run == 0 {
        return Err(EstimatorError::NoRepetitions);
    }
    let p_hat = ups as f64 / n_run as f64;
    let raw = (2.0 * p_hat - 1.0) / contrast;
    let l_hat = raw.clamp(-1.0, 1.0);
    let sigma_l = 2.0 * (p_hat * (1.0 - p_hat) / n_run as f64).sqrt() / contrast;
    Ok(CoherenceEstimate {
        p_hat,
        l_hat,
        sigma_l,
        clamped: raw != l_hat,
    })
}

/// Outcome of one simulated two-point mass-shift measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MassShiftReport {
    /// Narrowest-peak time of the reference system, seconds.
    pub t_qstar: f64,
    /// Gaussian rate gamma* at the narrowest peak, 1/s.
    pub gamma_qstar: f64,
    /// Measurement time t_q* + flank_offset / gamma*, seconds.
    pub t_meas: f64,
    /// True coherences of the two branches at t_meas.
    pub l_ref_true: f64,
    pub l_pert_true: f64,
    pub reference: CoherenceEstimate,
    pub perturbed: CoherenceEstimate,
    /// Estimated relative mass shift.
    pub delta_m_rel_hat: f64,
    /// One-sigma shot-noise uncertainty on the estimate.
    pub sigma_delta_m_rel: f64,
    /// Total integration time n_run * t_q*, seconds.
    pub t_total: f64,
    /// sigma_delta_m_rel * sqrt(t_total), 1/sqrt(Hz); multiplied by the
    /// mass this is the achieved sensitivity.
    pub sigma_sqrt_t: f64,
}

/// True total coherence at time `t`: the thermal-line closed form times the
/// selected background channels.
pub fn true_coherence(spec: &SystemSpec, n_pulses: usize, t: f64, mech: Mechanisms) -> f64 {
    let chi = chi_cpmg_closed(n_pulses, spec.omega0(), spec.lambda_tilde_sq(), t);
    (-chi / 2.0).exp() * background_coherence_selected(n_pulses, t, spec, mech)
}

/// Runs the two-point flank protocol end to end.
///
/// Both branches use the same pulse sequence and measurement time; the
/// perturbed branch carries the heavier oscillator, whose lowered frequency
/// walks the comb peak away from t_meas and drops the coherence there. The
/// streams of the two branches are independent: no common-random-number
/// variance cancellation is assumed, so the reported uncertainty is what a
/// real pair of measurement campaigns would see.
pub fn estimate_mass_shift(
    spec: &SystemSpec,
    plan: &MeasurementPlan,
    mech: Mechanisms,
    seed: u64,
) -> Result<MassShiftReport, EstimatorError> {
    let t_qstar = narrowest_peak_time(spec, plan.n_pulses);
    let gamma = peak_gamma(spec, plan.n_pulses, plan.n_pulses / 2 - 1);
    let t_meas = t_qstar + plan.flank_offset / gamma;

    let perturbed_spec = spec.with_mass_perturbation(plan.delta_m_rel);
    let l_ref_true = true_coherence(spec, plan.n_pulses, t_meas, mech);
    let l_pert_true = true_coherence(&perturbed_spec, plan.n_pulses, t_meas, mech);

    let c = spec.readout_contrast;
    let p_ref = 0.5 + c * l_ref_true / 2.0;
    let p_pert = 0.5 + c * l_pert_true / 2.0;
    let ups_ref = simulate_readout(p_ref, plan.n_run, seed, 0)?;
    let ups_pert = simulate_readout(p_pert, plan.n_run, seed, 1)?;
    let reference = estimate_coherence(ups_ref, plan.n_run, c)?;
    let perturbed = estimate_coherence(ups_pert, plan.n_run, c)?;

    if reference.l_hat < 0.1 {
        return Err(EstimatorError::ReferenceTooSmall(reference.l_hat));
    }

    let rel_change = perturbed.l_hat / reference.l_hat - 1.0;
    let delta_m_rel_hat = mass_shift_from_coherence(
        rel_change,
        gamma,
        t_meas - t_qstar,
        t_qstar,
    )?;

    // Propagate the two independent binomial errors through
    // d = L_pert / L_ref - 1.
    let sigma_rel = ((perturbed.sigma_l / reference.l_hat).powi(2)
        + (perturbed.l_hat * reference.sigma_l / (reference.l_hat * reference.l_hat)).powi(2))
    .sqrt();
    let sigma_delta_m_rel =
        2.0 * sigma_rel / (gamma * gamma * (t_meas - t_qstar) * t_qstar);

    let t_total = plan.n_run as f64 * t_qstar;
    Ok(MassShiftReport {
        t_qstar,
        gamma_qstar: gamma,
        t_meas,
        l_ref_true,
        l_pert_true,
        reference,
        perturbed,
        delta_m_rel_hat,
        sigma_delta_m_rel,
        t_total,
        sigma_sqrt_t: sigma_delta_m_rel * t_total.sqrt(),
    })
}
