//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments run to end of line
//! experiment.mode = hbt-delay
//! detector.gamma = 0.99
//! ```
//!
//! Omitted keys take their defaults; unknown or repeated keys are errors.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::detector::DelayConfig;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::messenger::{FrequencyMode, LineShape, PhaseMode, Routing, SourceConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Independent routing, same-event coincidences.
    Hbt,
    /// Independent routing, delayed clicks, windowed coincidences.
    HbtDelay,
    /// Pairs always split between the detectors, delayed clicks, windowed coincidences.
    Boson,
    /// Single detector fed identical messages.
    Efficiency,
    /// Split routing with pump-conserving pair frequencies.
    NonMono,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Hbt,
        Mode::HbtDelay,
        Mode::Boson,
        Mode::Efficiency,
        Mode::NonMono,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Hbt => "hbt",
            Mode::HbtDelay => "hbt-delay",
            Mode::Boson => "boson",
            Mode::Efficiency => "efficiency",
            Mode::NonMono => "nonmono",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyKind {
    Monochromatic,
    PairConserving,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencySettings {
    pub kind: FrequencyKind,
    pub frequency: f64,
    pub pump: f64,
    pub shape: LineShape,
    pub width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorSettings {
    pub ports: usize,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSettings {
    pub y1_min: f64,
    pub y1_max: f64,
    pub steps: usize,
}

impl SweepSettings {
    /// Detector D1 ordinates, evenly spaced and increasing.
    pub fn ordinates(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.y1_min];
        }
        let span = self.y1_max - self.y1_min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.y1_min + span * i as f64 / last)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EfficiencyPattern {
    /// Identical messages, always on port 0.
    Constant,
    /// Ports 0 and 1 in turn, carrying orthogonal messages.
    Alternating,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencySettings {
    pub warmup: u64,
    pub arrivals: u64,
    pub pattern: EfficiencyPattern,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Pairs per sweep point.
    pub n_tot: u64,
    /// Coincidence window for delayed clicks.
    pub window: f64,
    pub phase_mode: PhaseMode,
    pub n_f: u64,
    pub frequency: FrequencySettings,
    pub detector: DetectorSettings,
    pub delay: DelayConfig,
    pub geometry: Geometry,
    pub sweep: SweepSettings,
    pub efficiency: EfficiencySettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Hbt,
            seed: 1,
            n_tot: 2_000_000,
            window: 1.0,
            phase_mode: PhaseMode::BlockRandom,
            n_f: 50,
            frequency: FrequencySettings {
                kind: FrequencyKind::Monochromatic,
                frequency: 1.0,
                pump: 2.0,
                shape: LineShape::Gaussian,
                width: 0.02,
            },
            detector: DetectorSettings {
                ports: 2,
                gamma: 0.99,
            },
            delay: DelayConfig::default(),
            geometry: Geometry::default(),
            sweep: SweepSettings {
                y1_min: -100.0,
                y1_max: 100.0,
                steps: 41,
            },
            efficiency: EfficiencySettings {
                warmup: 1000,
                arrivals: 10_000,
                pattern: EfficiencyPattern::Constant,
            },
        }
    }
}

impl ExperimentConfig {
    pub fn with_mode(self, mode: Mode) -> Self {
        ExperimentConfig { mode, ..self }
    }

    pub fn routing(&self) -> Routing {
        match self.mode {
            Mode::Boson | Mode::NonMono => Routing::Boson,
            _ => Routing::Independent,
        }
    }

    /// Whether clicks carry delays and coincidences use the window.
    pub fn delay_enabled(&self) -> bool {
        match self.mode {
            Mode::Hbt | Mode::Efficiency => false,
            Mode::HbtDelay | Mode::Boson => true,
            Mode::NonMono => self.delay.enabled,
        }
    }

    pub fn effective_delay(&self) -> DelayConfig {
        DelayConfig {
            enabled: self.delay_enabled(),
            ..self.delay
        }
    }

    pub fn frequency_kind(&self) -> FrequencyKind {
        if self.mode == Mode::NonMono {
            FrequencyKind::PairConserving
        } else {
            self.frequency.kind
        }
    }

    pub fn source(&self) -> SourceConfig {
        let fs = &self.frequency;
        let frequency = match self.frequency_kind() {
            FrequencyKind::Monochromatic => FrequencyMode::Monochromatic {
                frequency: fs.frequency,
            },
            FrequencyKind::PairConserving => FrequencyMode::PairConserving {
                pump: fs.pump,
                shape: fs.shape,
                width: fs.width,
            },
        };
        SourceConfig {
            phase_mode: self.phase_mode,
            n_f: self.n_f,
            frequency,
        }
    }

    /// Frequency used for `ΔT·f` and the fringe fits: the message frequency,
    /// or half the pump for pair-conserving sources.
    pub fn reference_frequency(&self) -> f64 {
        match self.frequency_kind() {
            FrequencyKind::Monochromatic => self.frequency.frequency,
            FrequencyKind::PairConserving => self.frequency.pump / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tot < 1 {
            return Err(Error::invalid("experiment.n_tot", "must be at least 1"));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::invalid("experiment.window", "must be positive"));
        }
        self.source().validate()?;
        let f = &self.frequency;
        if !(f.frequency.is_finite() && f.frequency > 0.0) {
            return Err(Error::invalid("source.frequency.f", "must be positive"));
        }
        if !(f.pump.is_finite() && f.pump > 0.0) {
            return Err(Error::invalid("source.frequency.pump", "must be positive"));
        }
        if !(f.width.is_finite() && f.width > 0.0) {
            return Err(Error::invalid("source.frequency.width", "must be positive"));
        }
        let min_ports = match (self.mode, self.efficiency.pattern) {
            (Mode::Efficiency, EfficiencyPattern::Constant) => 1,
            _ => 2,
        };
        if self.detector.ports < min_ports {
            return Err(Error::invalid(
                "detector.k",
                format!("must be at least {min_ports} in {} mode", self.mode),
            ));
        }
        if !(0.0..1.0).contains(&self.detector.gamma) {
            return Err(Error::invalid("detector.gamma", "must lie in [0, 1)"));
        }
        DelayConfig {
            enabled: true,
            ..self.delay
        }
        .validate()?;
        self.geometry.validate()?;
        let s = &self.sweep;
        if !(s.y1_min.is_finite() && s.y1_max.is_finite()) {
            return Err(Error::invalid("sweep.y1_min", "must be finite"));
        }
        if s.y1_max < s.y1_min {
            return Err(Error::invalid("sweep.y1_max", "must not be below sweep.y1_min"));
        }
        if s.steps < 1 {
            return Err(Error::invalid("sweep.steps", "must be at least 1"));
        }
        if self.efficiency.arrivals < 1 {
            return Err(Error::invalid("efficiency.arrivals", "must be at least 1"));
        }
        Ok(())
    }

    /// Every key with its value, in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let f = &self.frequency;
        vec![
            ("seed", self.seed.to_string()),
            ("experiment.mode", self.mode.to_string()),
            ("experiment.n_tot", self.n_tot.to_string()),
            ("experiment.window", self.window.to_string()),
            ("source.mode", phase_mode_name(self.phase_mode).into()),
            ("source.n_f", self.n_f.to_string()),
            ("source.frequency.mode", frequency_kind_name(f.kind).into()),
            ("source.frequency.f", f.frequency.to_string()),
            ("source.frequency.pump", f.pump.to_string()),
            ("source.frequency.dist", shape_name(f.shape).into()),
            ("source.frequency.width", f.width.to_string()),
            ("detector.k", self.detector.ports.to_string()),
            ("detector.gamma", self.detector.gamma.to_string()),
            ("delay.enabled", self.delay.enabled.to_string()),
            ("delay.t_max", self.delay.t_max.to_string()),
            ("delay.h", self.delay.h.to_string()),
            ("geometry.x", self.geometry.x.to_string()),
            ("geometry.d", self.geometry.d.to_string()),
            ("geometry.y0", self.geometry.y0.to_string()),
            ("sweep.y1_min", self.sweep.y1_min.to_string()),
            ("sweep.y1_max", self.sweep.y1_max.to_string()),
            ("sweep.steps", self.sweep.steps.to_string()),
            ("efficiency.warmup", self.efficiency.warmup.to_string()),
            ("efficiency.arrivals", self.efficiency.arrivals.to_string()),
            ("efficiency.pattern", pattern_name(self.efficiency.pattern).into()),
        ]
    }

    /// The entries that influence a run in the configured mode.
    pub fn effective_entries(&self) -> Vec<(&'static str, String)> {
        let efficiency = self.mode == Mode::Efficiency;
        let delay = self.delay_enabled();
        let pair = self.frequency_kind() == FrequencyKind::PairConserving;
        self.entries()
            .into_iter()
            .filter(|(key, _)| {
                let k = *key;
                if efficiency {
                    return matches!(
                        k,
                        "seed"
                            | "experiment.mode"
                            | "source.frequency.f"
                            | "detector.k"
                            | "detector.gamma"
                            | "geometry.x"
                    ) || k.starts_with("efficiency.");
                }
                if k.starts_with("efficiency.") {
                    return false;
                }
                match k {
                    "experiment.window" | "delay.t_max" | "delay.h" => delay,
                    "delay.enabled" => self.mode == Mode::NonMono,
                    "source.frequency.mode" => self.mode != Mode::NonMono,
                    "source.frequency.f" => !pair,
                    "source.frequency.pump" | "source.frequency.dist" | "source.frequency.width" => pair,
                    "source.n_f" => self.phase_mode == PhaseMode::BlockRandom,
                    _ => true,
                }
            })
            .collect()
    }

    /// Short hex digest of the effective parameters.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.effective_entries() {
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Config text that [`parse_config`] reads back to an equal config.
    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn phase_mode_name(m: PhaseMode) -> &'static str {
    match m {
        PhaseMode::Fixed => "fixed-phase",
        PhaseMode::BlockRandom => "block-random",
    }
}

fn frequency_kind_name(k: FrequencyKind) -> &'static str {
    match k {
        FrequencyKind::Monochromatic => "monochromatic",
        FrequencyKind::PairConserving => "pair-conserving",
    }
}

fn shape_name(s: LineShape) -> &'static str {
    match s {
        LineShape::Gaussian => "gaussian",
        LineShape::Lorentzian => "lorentzian",
    }
}

fn pattern_name(p: EfficiencyPattern) -> &'static str {
    match p {
        EfficiencyPattern::Constant => "constant",
        EfficiencyPattern::Alternating => "alternating",
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{value}` for {key}"),
    })
}

fn parse_choice<T: Copy>(key: &str, value: &str, line: usize, choices: &[(&str, T)]) -> Result<T> {
    choices
        .iter()
        .find(|(name, _)| *name == value)
        .map(|&(_, v)| v)
        .ok_or_else(|| {
            let names: Vec<&str> = choices.iter().map(|(n, _)| *n).collect();
            Error::Parse {
                line,
                message: format!("{key} must be one of {}, got `{value}`", names.join(", ")),
            }
        })
}

/// Parses and validates a config. Omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        seen.push(key.to_string());
        apply(&mut cfg, key, value, line)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let v = value;
    match key {
        "seed" => cfg.seed = parse_value(key, v, line)?,
        "experiment.mode" => {
            cfg.mode = v.parse().map_err(|message| Error::Parse { line, message })?
        }
        "experiment.n_tot" => cfg.n_tot = parse_value(key, v, line)?,
        "experiment.window" => cfg.window = parse_value(key, v, line)?,
        "source.mode" => {
            cfg.phase_mode = parse_choice(
                key,
                v,
                line,
                &[("fixed-phase", PhaseMode::Fixed), ("block-random", PhaseMode::BlockRandom)],
            )?
        }
        "source.n_f" => cfg.n_f = parse_value(key, v, line)?,
        "source.frequency.mode" => {
            cfg.frequency.kind = parse_choice(
                key,
                v,
                line,
                &[
                    ("monochromatic", FrequencyKind::Monochromatic),
                    ("pair-conserving", FrequencyKind::PairConserving),
                ],
            )?
        }
        "source.frequency.f" => cfg.frequency.frequency = parse_value(key, v, line)?,
        "source.frequency.pump" => cfg.frequency.pump = parse_value(key, v, line)?,
        "source.frequency.dist" => {
            cfg.frequency.shape = parse_choice(
                key,
                v,
                line,
                &[("gaussian", LineShape::Gaussian), ("lorentzian", LineShape::Lorentzian)],
            )?
        }
        "source.frequency.width" => cfg.frequency.width = parse_value(key, v, line)?,
        "detector.k" => cfg.detector.ports = parse_value(key, v, line)?,
        "detector.gamma" => cfg.detector.gamma = parse_value(key, v, line)?,
        "delay.enabled" => cfg.delay.enabled = parse_value(key, v, line)?,
        "delay.t_max" => cfg.delay.t_max = parse_value(key, v, line)?,
        "delay.h" => cfg.delay.h = parse_value(key, v, line)?,
        "geometry.x" => cfg.geometry.x = parse_value(key, v, line)?,
        "geometry.d" => cfg.geometry.d = parse_value(key, v, line)?,
        "geometry.y0" => cfg.geometry.y0 = parse_value(key, v, line)?,
        "sweep.y1_min" => cfg.sweep.y1_min = parse_value(key, v, line)?,
        "sweep.y1_max" => cfg.sweep.y1_max = parse_value(key, v, line)?,
        "sweep.steps" => cfg.sweep.steps = parse_value(key, v, line)?,
        "efficiency.warmup" => cfg.efficiency.warmup = parse_value(key, v, line)?,
        "efficiency.arrivals" => cfg.efficiency.arrivals = parse_value(key, v, line)?,
        "efficiency.pattern" => {
            cfg.efficiency.pattern = parse_choice(
                key,
                v,
                line,
                &[
                    ("constant", EfficiencyPattern::Constant),
                    ("alternating", EfficiencyPattern::Alternating),
                ],
            )?
        }
        _ => {
            return Err(Error::Parse {
                line,
                message: format!("unknown key `{key}`"),
            })
        }
    }
    Ok(())
}
