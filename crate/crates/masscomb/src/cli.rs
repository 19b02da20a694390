//! Command-line front end: config assembly, the five commands, and
//! deterministic CSV emission.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::coherence::{coherence_trace, ChiError, ChiRoute};
use crate::config::{ConfigError, RunConfig, SpectrumKind};
use crate::estimator::{estimate_mass_shift, EstimatorError, MeasurementPlan};
use crate::peaks::{peak_catalog, PeakError};
use crate::quadrature::QuadratureError;
use crate::sensitivity::{
    default_n_sweep, eta_universal, optimal_n_analytic, optimize_sensitivity_numeric,
    sensitivity_full, sensitivity_sweep, PenaltyRoute, SensitivityError,
};
use crate::spectrum::NoiseSpectrum;

/// Time-comb simulator and mass-sensitivity estimator for a qubit coupled
/// to a thermal mechanical oscillator.
#[derive(Debug, Parser)]
#[command(name = "masscomb", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence trace over a time grid (the comb of revival peaks).
    Comb(CommonArgs),
    /// Catalog of comb peaks: positions, widths, heights.
    Peaks(CommonArgs),
    /// Sensitivity vs pulse number, per decay mechanism.
    Sensitivity(CommonArgs),
    /// Analytic and numeric optimal pulse number and sensitivity.
    Optimize(CommonArgs),
    /// Monte Carlo mass-shift estimation campaign.
    Estimate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file (flat key = value lines, # comments).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Start from a named preset instead of the defaults.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output path for the CSV artifact; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Override a single config key, repeatable: --set key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("config: {0}")]
    ConfigRead(std::io::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("compute: {0}")]
    Chi(#[from] ChiError),
    #[error("compute: {0}")]
    Peaks(#[from] PeakError),
    #[error("compute: {0}")]
    Sensitivity(#[from] SensitivityError),
    #[error("compute: {0}")]
    Estimator(#[from] EstimatorError),
    #[error("compute: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 = config error, 3 = I/O error, 4 = computational failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ConfigRead(_) | CliError::Pool(_) => 2,
            CliError::Write { .. } => 3,
            CliError::Chi(_)
            | CliError::Peaks(_)
            | CliError::Sensitivity(_)
            | CliError::Estimator(_)
            | CliError::Quadrature(_) => 4,
        }
    }
}

/// Assembles the effective config: preset, then file, then --set overrides,
/// then the dedicated flags; validated at the end.
pub fn build_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.preset {
        Some(name) => RunConfig::preset(name)?,
        None => RunConfig::default(),
    };
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(CliError::ConfigRead)?;
        cfg.apply_text(&text)?;
    }
    for setting in &args.set {
        cfg.apply_set(setting)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(out) = &args.out {
        cfg.out = out.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one parsed command to completion.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let args = match &cli.command {
        Command::Comb(a)
        | Command::Peaks(a)
        | Command::Sensitivity(a)
        | Command::Optimize(a)
        | Command::Estimate(a) => a,
    };
    let cfg = build_config(args)?;
    let body = || match &cli.command {
        Command::Comb(_) => cmd_comb(&cfg),
        Command::Peaks(_) => cmd_peaks(&cfg),
        Command::Sensitivity(_) => cmd_sensitivity(&cfg),
        Command::Optimize(_) => cmd_optimize(&cfg),
        Command::Estimate(_) => cmd_estimate(&cfg),
    };
    if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()?;
        pool.install(body)
    } else {
        body()
    }
}

fn emit(cfg: &RunConfig, csv: &str) -> Result<(), CliError> {
    if cfg.out.is_empty() {
        print!("{csv}");
        Ok(())
    } else {
        fs::write(&cfg.out, csv).map_err(|source| CliError::Write {
            path: cfg.out.clone(),
            source,
        })
    }
}

fn spectrum_of(cfg: &RunConfig) -> NoiseSpectrum {
    match cfg.spectrum {
        SpectrumKind::Delta => NoiseSpectrum::delta_line(&cfg.system),
        SpectrumKind::Lorentzian => NoiseSpectrum::lorentzian(&cfg.system),
    }
}

fn penalty_route(cfg: &RunConfig) -> PenaltyRoute {
    match cfg.chi_route {
        ChiRoute::Quadrature => PenaltyRoute::Quadrature,
        _ => PenaltyRoute::ClosedForm,
    }
}

/// Time grid with closed-form divergence points nudged off by one grid ulp.
///
/// The closed form blows up where cos(omega0 t / 2N) = 0; a grid point
/// landing there would print +inf for chi. Nudges go to standard error,
/// never silently.
fn build_time_grid(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.n_points;
    let step = (cfg.t_max_s - cfg.t_min_s) / (n - 1) as f64;
    let w0 = cfg.system.omega0();
    let np = cfg.pulses as f64;
    (0..n)
        .map(|i| {
            let t = cfg.t_min_s + i as f64 * step;
            let phase = w0 * t / (2.0 * np);
            if phase.cos().abs() < 1e-9 {
                let nudged = t + step * 1e-6;
                eprintln!(
                    "note: grid point t = {t} sits on a closed-form divergence; \
                     nudged to {nudged}"
                );
                nudged
            } else {
                t
            }
        })
        .collect()
}

fn cmd_comb(cfg: &RunConfig) -> Result<(), CliError> {
    let times = build_time_grid(cfg);
    let spectrum = spectrum_of(cfg);
    let trace = coherence_trace(
        &cfg.system,
        cfg.pulses,
        &spectrum,
        cfg.chi_route,
        cfg.mechanisms,
        &times,
    )?;
    let mut csv = String::from("t_seconds,omega0_t_over_2pi,L_ideal,L_bg,L_total\n");
    let f0 = cfg.system.f0_hz;
    for i in 0..trace.times.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            trace.times[i],
            trace.times[i] * f0,
            trace.l_ideal[i],
            trace.l_bg[i],
            trace.l_total[i]
        );
    }
    emit(cfg, &csv)
}

fn cmd_peaks(cfg: &RunConfig) -> Result<(), CliError> {
    let cat = peak_catalog(&cfg.system, cfg.pulses, cfg.mechanisms)?;
    let mut csv =
        String::from("q,t_q_seconds,gamma_q,width_nominal,width_expansion,height,kind\n");
    for p in &cat.peaks {
        let kind = if p.q == cat.qstar { "qstar" } else { "peak" };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            p.q, p.center_s, p.gamma, p.width_nominal, p.width_expansion, p.height, kind
        );
    }
    // The envelope diverges at q = N/2: no revival there at all.
    let t_missing = cat.missing_q as f64 * cfg.system.oscillator_period();
    let _ = writeln!(csv, "{},{},inf,0,0,0,missing", cat.missing_q, t_missing);
    emit(cfg, &csv)
}

// Rows are emitted by ascending (temperature, N) whatever the config order.
fn sweep_values(cfg: &RunConfig) -> Vec<usize> {
    if cfg.n_values.is_empty() {
        default_n_sweep(2048)
    } else {
        let mut v = cfg.n_values.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn sweep_temperatures(cfg: &RunConfig) -> Vec<f64> {
    let mut temps = if cfg.temperatures_k.is_empty() {
        vec![cfg.system.temperature_k]
    } else {
        cfg.temperatures_k.clone()
    };
    temps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    temps
}

fn cmd_sensitivity(cfg: &RunConfig) -> Result<(), CliError> {
    let n_values = sweep_values(cfg);
    let route = penalty_route(cfg);
    let mut csv =
        String::from("temperature_k,n_pulses,eta_ideal,eta_t1,eta_t2,eta_q,eta_all\n");
    for temperature in sweep_temperatures(cfg) {
        let mut system = cfg.system.clone();
        system.temperature_k = temperature;
        let curve = sensitivity_sweep(&system, &n_values, route)?;
        for p in &curve.points {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                temperature, p.n_pulses, p.eta_ideal, p.eta_t1, p.eta_t2, p.eta_q, p.eta_all
            );
        }
    }
    emit(cfg, &csv)
}

fn cmd_optimize(cfg: &RunConfig) -> Result<(), CliError> {
    let n_values = sweep_values(cfg);
    let route = penalty_route(cfg);
    let mut csv = String::from(
        "temperature_k,n_opt_analytic,n_opt_numeric,eta_opt_numeric,eta_universal,chi_at_opt\n",
    );
    for temperature in sweep_temperatures(cfg) {
        let mut system = cfg.system.clone();
        system.temperature_k = temperature;
        let n_analytic = optimal_n_analytic(&system);
        let r = optimize_sensitivity_numeric(&system, &n_values, cfg.mechanisms, route)?;
        println!("T = {temperature} K");
        println!("  N_opt analytic  = {n_analytic}");
        println!("  N_opt numeric   = {}", r.n_opt);
        println!("  eta_opt numeric = {:e} g/sqrt(Hz)", r.eta_opt);
        println!(
            "  eta_opt universal M/sqrt(f0 Q) = {:e} g/sqrt(Hz)",
            eta_universal(&system)
        );
        println!("  chi(t_q*) at optimum = {}", r.chi_at_opt);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            temperature, n_analytic, r.n_opt, r.eta_opt, r.eta_universal, r.chi_at_opt
        );
    }
    emit(cfg, &csv)
}

fn cmd_estimate(cfg: &RunConfig) -> Result<(), CliError> {
    let plan = MeasurementPlan {
        n_pulses: cfg.pulses,
        n_run: cfg.n_run,
        delta_m_rel: cfg.delta_m_rel,
        flank_offset: cfg.flank_offset,
    };
    let mut csv = String::from(
        "seed,l_ref_hat,l_pert_hat,delta_m_rel_hat,sigma_delta_m_rel,sigma_sqrt_t\n",
    );
    let mut estimates = Vec::with_capacity(cfg.seeds as usize);
    let mut last_sigma_sqrt_t = 0.0;
    for i in 0..cfg.seeds {
        let seed = cfg.seed.wrapping_add(i);
        let r = estimate_mass_shift(&cfg.system, &plan, cfg.mechanisms, seed)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            seed,
            r.reference.l_hat,
            r.perturbed.l_hat,
            r.delta_m_rel_hat,
            r.sigma_delta_m_rel,
            r.sigma_sqrt_t
        );
        estimates.push(r.delta_m_rel_hat);
        last_sigma_sqrt_t = r.sigma_sqrt_t;
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let std = var.sqrt();
    let eta_full = sensitivity_full(&cfg.system, cfg.pulses, cfg.mechanisms, penalty_route(cfg))?;
    let predicted = eta_full / cfg.system.mass_g;
    println!("seeds = {}, n_run = {}", cfg.seeds, cfg.n_run);
    println!("injected delta_m_rel = {:e}", cfg.delta_m_rel);
    println!("ensemble mean = {mean:e}  std = {std:e}");
    println!(
        "achieved sigma*sqrt(T_tot) = {:e} 1/sqrt(Hz); analytic eta/M = {:e} 1/sqrt(Hz)",
        last_sigma_sqrt_t, predicted
    );
    emit(cfg, &csv)
}
