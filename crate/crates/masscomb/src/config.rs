//! Flat `key = value` run configuration with `#` comments.
//!
//! Every key has a documented unit suffix in its name (Hz, s, K, g) where one
//! applies. Parsing starts from the defaults and overrides whatever keys are
//! present, so a config file only needs the keys it changes; serialization
//! always writes the full set, and parse -> serialize -> parse is the
//! identity.

use std::fmt::Write as _;

use thiserror::Error;

use crate::coherence::{ChiRoute, Mechanisms};
use crate::system::{SpecError, SystemSpec};

/// Which spectral line model drives the oscillator dephasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Delta,
    Lorentzian,
}

/// Everything a command run needs: the physical system plus grids, toggles,
/// Monte Carlo plan, and output routing.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemSpec,
    /// CPMG pulse count for single-N commands.
    pub pulses: usize,
    /// Time grid for trace commands, seconds.
    pub t_min_s: f64,
    pub t_max_s: f64,
    pub n_points: usize,
    /// Pulse numbers for sweep commands; empty means the built-in even sweep.
    pub n_values: Vec<usize>,
    /// Temperatures for multi-temperature sweeps; empty means the system
    /// temperature alone.
    pub temperatures_k: Vec<f64>,
    pub mechanisms: Mechanisms,
    pub chi_route: ChiRoute,
    pub spectrum: SpectrumKind,
    /// Readout repetitions per Monte Carlo operating point.
    pub n_run: u64,
    /// Number of independent seeds in an estimation campaign.
    pub seeds: u64,
    pub seed: u64,
    pub delta_m_rel: f64,
    /// Flank operating point in units of 1/gamma*.
    pub flank_offset: f64,
    /// Worker threads; 0 means all available cores.
    pub workers: usize,
    /// Output path; empty means standard output.
    pub out: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::preset_fig2()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value', got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for {key}: {value:?} ({why})")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        why: String,
    },
    #[error("unknown preset {0:?}; available: fig2, fig3")]
    UnknownPreset(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("n_points must be >= 2, got {0}")]
    TooFewPoints(usize),
    #[error("time grid requires 0 <= t_min < t_max, got [{0}, {1}]")]
    BadTimeGrid(f64, f64),
    #[error("pulse count must be even and >= 2, got {0}")]
    BadPulses(usize),
    #[error("n_values entries must be even and >= 2, got {0}")]
    BadSweepEntry(usize),
    #[error("temperatures must be positive, got {0}")]
    BadTemperature(f64),
    #[error("n_run and seeds must be >= 1")]
    EmptyCampaign,
    #[error("delta_m_rel must be finite and > -1, got {0}")]
    BadMassShift(f64),
    #[error("flank_offset must be finite and nonzero, got {0}")]
    BadFlankOffset(f64),
}

impl RunConfig {
    /// 100 kHz oscillator at 10 K, coupling 1e-3 of the oscillator
    /// frequency, N = 100: the comb-demonstration operating point.
    pub fn preset_fig2() -> Self {
        RunConfig {
            system: SystemSpec {
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
            },
            pulses: 100,
            t_min_s: 0.0,
            t_max_s: 5e-4,
            n_points: 5001,
            n_values: Vec::new(),
            temperatures_k: Vec::new(),
            mechanisms: Mechanisms::none(),
            chi_route: ChiRoute::Closed,
            spectrum: SpectrumKind::Delta,
            n_run: 1_000_000,
            seeds: 100,
            seed: 1,
            delta_m_rel: 1e-6,
            flank_offset: 1.0,
            workers: 0,
            out: String::new(),
        }
    }

    /// Same hardware, set up for sensitivity sweeps at 1 K and 300 K with
    /// every decay mechanism on.
    pub fn preset_fig3() -> Self {
        let mut cfg = RunConfig::preset_fig2();
        cfg.system.temperature_k = 300.0;
        cfg.temperatures_k = vec![1.0, 300.0];
        cfg.mechanisms = Mechanisms::all();
        cfg.spectrum = SpectrumKind::Lorentzian;
        cfg
    }

    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        match name {
            "fig2" => Ok(RunConfig::preset_fig2()),
            "fig3" => Ok(RunConfig::preset_fig3()),
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }

    /// Parses a config text over the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies every `key = value` line of `text` to this config.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: content.to_string(),
                });
            };
            self.apply_kv(key.trim(), value.trim(), line)?;
        }
        Ok(())
    }

    /// Applies one `key=value` override, as given to `--set`.
    pub fn apply_set(&mut self, setting: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = setting.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: 0,
                text: setting.to_string(),
            });
        };
        self.apply_kv(key.trim(), value.trim(), 0)
    }

    fn apply_kv(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let bad = |why: &str| ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
            why: why.to_string(),
        };
        let f = |v: &str| v.parse::<f64>().map_err(|e| bad(&e.to_string()));
        let u = |v: &str| v.parse::<u64>().map_err(|e| bad(&e.to_string()));
        match key {
            "f0_hz" => self.system.f0_hz = f(value)?,
            "quality_factor" => self.system.quality_factor = f(value)?,
            "mass_g" => self.system.mass_g = f(value)?,
            "temperature_k" => self.system.temperature_k = f(value)?,
            "coupling_hz" => self.system.coupling_hz = f(value)?,
            "qubit_t1_s" => self.system.qubit_t1_s = f(value)?,
            "qubit_t2_s" => self.system.qubit_t2_s = f(value)?,
            "t2_scaling_exponent" => self.system.t2_scaling_exponent = f(value)?,
            "readout_contrast" => self.system.readout_contrast = f(value)?,
            "qubit_frequency_hz" => self.system.qubit_frequency_hz = f(value)?,
            "pulses" => self.pulses = u(value)? as usize,
            "t_min_s" => self.t_min_s = f(value)?,
            "t_max_s" => self.t_max_s = f(value)?,
            "n_points" => self.n_points = u(value)? as usize,
            "n_values" => {
                self.n_values = parse_list(value, |v| {
                    v.parse::<usize>().map_err(|e| bad(&e.to_string()))
                })?;
            }
            "temperatures_k" => {
                self.temperatures_k = parse_list(value, f)?;
            }
            "mechanisms" => self.mechanisms = parse_mechanisms(value).ok_or_else(|| {
                bad("expected comma list of t1/t2/q, or 'none'/'all'")
            })?,
            "chi_route" => {
                self.chi_route = match value {
                    "closed" => ChiRoute::Closed,
                    "piecewise" => ChiRoute::Piecewise,
                    "quadrature" => ChiRoute::Quadrature,
                    _ => return Err(bad("expected closed|piecewise|quadrature")),
                }
            }
            "spectrum" => {
                self.spectrum = match value {
                    "delta" => SpectrumKind::Delta,
                    "lorentzian" => SpectrumKind::Lorentzian,
                    _ => return Err(bad("expected delta|lorentzian")),
                }
            }
            "n_run" => self.n_run = u(value)?,
            "seeds" => self.seeds = u(value)?,
            "seed" => self.seed = u(value)?,
            "delta_m_rel" => self.delta_m_rel = f(value)?,
            "flank_offset" => self.flank_offset = f(value)?,
            "workers" => self.workers = u(value)? as usize,
            "out" => self.out = value.to_string(),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Full config as parseable text; `RunConfig::parse` of the output
    /// reproduces `self` exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# system");
        let _ = writeln!(s, "f0_hz = {}", self.system.f0_hz);
        let _ = writeln!(s, "quality_factor = {}", self.system.quality_factor);
        let _ = writeln!(s, "mass_g = {}", self.system.mass_g);
        let _ = writeln!(s, "temperature_k = {}", self.system.temperature_k);
        let _ = writeln!(s, "coupling_hz = {}", self.system.coupling_hz);
        let _ = writeln!(s, "qubit_t1_s = {}", self.system.qubit_t1_s);
        let _ = writeln!(s, "qubit_t2_s = {}", self.system.qubit_t2_s);
        let _ = writeln!(
            s,
            "t2_scaling_exponent = {}",
            self.system.t2_scaling_exponent
        );
        let _ = writeln!(s, "readout_contrast = {}", self.system.readout_contrast);
        let _ = writeln!(
            s,
            "qubit_frequency_hz = {}",
            self.system.qubit_frequency_hz
        );
        let _ = writeln!(s, "# run");
        let _ = writeln!(s, "pulses = {}", self.pulses);
        let _ = writeln!(s, "t_min_s = {}", self.t_min_s);
        let _ = writeln!(s, "t_max_s = {}", self.t_max_s);
        let _ = writeln!(s, "n_points = {}", self.n_points);
        let _ = writeln!(s, "n_values = {}", join(&self.n_values));
        let _ = writeln!(s, "temperatures_k = {}", join(&self.temperatures_k));
        let _ = writeln!(s, "mechanisms = {}", mechanisms_str(self.mechanisms));
        let _ = writeln!(
            s,
            "chi_route = {}",
            match self.chi_route {
                ChiRoute::Closed => "closed",
                ChiRoute::Piecewise => "piecewise",
                ChiRoute::Quadrature => "quadrature",
            }
        );
        let _ = writeln!(
            s,
            "spectrum = {}",
            match self.spectrum {
                SpectrumKind::Delta => "delta",
                SpectrumKind::Lorentzian => "lorentzian",
            }
        );
        let _ = writeln!(s, "n_run = {}", self.n_run);
        let _ = writeln!(s, "seeds = {}", self.seeds);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "delta_m_rel = {}", self.delta_m_rel);
        let _ = writeln!(s, "flank_offset = {}", self.flank_offset);
        let _ = writeln!(s, "workers = {}", self.workers);
        let _ = writeln!(s, "out = {}", self.out);
        s
    }

    /// Re-checks every invariant after parsing and overrides.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.system.validate()?;
        if self.n_points < 2 {
            return Err(ConfigError::TooFewPoints(self.n_points));
        }
        if !(self.t_min_s >= 0.0 && self.t_min_s < self.t_max_s) {
            return Err(ConfigError::BadTimeGrid(self.t_min_s, self.t_max_s));
        }
        if self.pulses < 2 || !self.pulses.is_multiple_of(2) {
            return Err(ConfigError::BadPulses(self.pulses));
        }
        for &n in &self.n_values {
            if n < 2 || n % 2 != 0 {
                return Err(ConfigError::BadSweepEntry(n));
            }
        }
        for &t in &self.temperatures_k {
            if !t.is_finite() || t <= 0.0 {
                return Err(ConfigError::BadTemperature(t));
            }
        }
        if self.n_run == 0 || self.seeds == 0 {
            return Err(ConfigError::EmptyCampaign);
        }
        if !self.delta_m_rel.is_finite() || self.delta_m_rel <= -1.0 {
            return Err(ConfigError::BadMassShift(self.delta_m_rel));
        }
        if !self.flank_offset.is_finite() || self.flank_offset == 0.0 {
            return Err(ConfigError::BadFlankOffset(self.flank_offset));
        }
        Ok(())
    }
}

fn parse_list<T>(
    value: &str,
    parse_one: impl Fn(&str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| parse_one(item.trim()))
        .collect()
}

fn parse_mechanisms(value: &str) -> Option<Mechanisms> {
    match value {
        "none" | "" => return Some(Mechanisms::none()),
        "all" => return Some(Mechanisms::all()),
        _ => {}
    }
    let mut m = Mechanisms::none();
    for item in value.split(',') {
        match item.trim() {
            "t1" => m.t1 = true,
            "t2" => m.t2 = true,
            "q" => m.q = true,
            _ => return None,
        }
    }
    Some(m)
}

fn mechanisms_str(m: Mechanisms) -> String {
    let mut parts = Vec::new();
    if m.t1 {
        parts.push("t1");
    }
    if m.t2 {
        parts.push("t2");
    }
    if m.q {
        parts.push("q");
    }
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join(",")
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
