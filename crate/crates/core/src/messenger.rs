//! Messengers, their clock messages, and the pair source.

use std::f64::consts::TAU;

use rand_distr::{Cauchy, Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A particle's clock: it rotates with `frequency` and runs ahead by `phase`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Message {
    pub frequency: f64,
    /// Radians in `[0, 2π)`.
    pub phase: f64,
    /// Accumulated time of flight, zero until the messenger reaches a detector.
    pub time_of_flight: f64,
}

impl Message {
    pub fn new(frequency: f64, phase: f64) -> Self {
        Message {
            frequency,
            phase,
            time_of_flight: 0.0,
        }
    }

    pub fn with_time_of_flight(self, time_of_flight: f64) -> Self {
        Message {
            time_of_flight,
            ..self
        }
    }

    /// Hand of the clock as a unit vector `(cos ψ, sin ψ)` with `ψ = 2πft + δ`.
    #[inline]
    pub fn vector(&self) -> MessageVector {
        // Reduce f·t to one turn before scaling; t is ~1e5 in typical layouts.
        let turns = (self.frequency * self.time_of_flight).fract();
        MessageVector::from_angle(TAU * turns + self.phase)
    }
}

/// Two-dimensional unit vector carried by a message.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MessageVector {
    pub cos: f64,
    pub sin: f64,
}

impl MessageVector {
    #[inline]
    pub fn from_angle(psi: f64) -> Self {
        let (sin, cos) = psi.sin_cos();
        MessageVector { cos, sin }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.cos * self.cos + self.sin * self.sin
    }
}

pub fn message_vector(message: &Message) -> MessageVector {
    message.vector()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseMode {
    /// Both sources keep phase zero for the whole run.
    Fixed,
    /// Fresh uniform phases every `n_f` pairs.
    BlockRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineShape {
    Gaussian,
    Lorentzian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrequencyMode {
    Monochromatic {
        frequency: f64,
    },
    /// Pair members share the pump frequency: `f1 + f2 = pump`.
    PairConserving {
        pump: f64,
        shape: LineShape,
        /// Standard deviation (gaussian) or half width at half maximum (lorentzian).
        width: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceConfig {
    pub phase_mode: PhaseMode,
    pub n_f: u64,
    pub frequency: FrequencyMode,
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_f < 1 {
            return Err(Error::invalid("source.n_f", "must be at least 1"));
        }
        match self.frequency {
            FrequencyMode::Monochromatic { frequency } => {
                if !(frequency.is_finite() && frequency > 0.0) {
                    return Err(Error::invalid("source.frequency.f", "must be positive"));
                }
            }
            FrequencyMode::PairConserving { pump, width, .. } => {
                if !(pump.is_finite() && pump > 0.0) {
                    return Err(Error::invalid("source.frequency.pump", "must be positive"));
                }
                if !(width.is_finite() && width > 0.0) {
                    return Err(Error::invalid("source.frequency.width", "must be positive"));
                }
            }
        }
        Ok(())
    }
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            phase_mode: PhaseMode::BlockRandom,
            n_f: 50,
            frequency: FrequencyMode::Monochromatic { frequency: 1.0 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Routing {
    /// Each messenger picks its detector with a fair coin of its own.
    Independent,
    /// The two messengers of a pair always go to different detectors.
    Boson,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairEmission {
    /// Messenger from S0.
    pub message0: Message,
    /// Messenger from S1.
    pub message1: Message,
    pub target0: usize,
    pub target1: usize,
}

/// Two independent phases, uniform on `[0, 2π)`.
pub fn draw_phase_block(stream: &mut RngStream) -> (f64, f64) {
    let d0 = TAU * stream.uniform01();
    let d1 = TAU * stream.uniform01();
    // TAU * u can round up to TAU for u just below one.
    (wrap_phase(d0), wrap_phase(d1))
}

fn wrap_phase(p: f64) -> f64 {
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Frequencies `(f1, f2)` of one pair. Monochromatic sources return `(f, f)`.
///
/// In pair-conserving mode `f1` is drawn around `pump / 2` and `f2 = pump - f1`;
/// draws that would make either member non-positive are redrawn. The larger
/// member is always formed first so that `f1 + f2 == pump` holds exactly in
/// floating point.
pub fn draw_frequencies(mode: &FrequencyMode, stream: &mut RngStream) -> Result<(f64, f64)> {
    match *mode {
        FrequencyMode::Monochromatic { frequency } => Ok((frequency, frequency)),
        FrequencyMode::PairConserving { pump, shape, width } => {
            if !(pump.is_finite() && pump > 0.0) {
                return Err(Error::invalid("source.frequency.pump", "must be positive"));
            }
            if !(width.is_finite() && width > 0.0) {
                return Err(Error::invalid("source.frequency.width", "must be positive"));
            }
            let centre = pump / 2.0;
            loop {
                let g = match shape {
                    LineShape::Gaussian => Normal::new(centre, width)
                        .expect("width checked positive")
                        .sample(stream),
                    LineShape::Lorentzian => Cauchy::new(centre, width)
                        .expect("width checked positive")
                        .sample(stream),
                };
                if !(g > 0.0 && g < pump) {
                    continue;
                }
                // Sterbenz: a - b is exact for b in [a/2, a].
                let (f1, f2) = if g >= centre {
                    (g, pump - g)
                } else {
                    let f2 = pump - g;
                    (pump - f2, f2)
                };
                if f1 > 0.0 && f2 > 0.0 {
                    return Ok((f1, f2));
                }
            }
        }
    }
}

/// Detector indices `(target0, target1)` for the messengers from S0 and S1.
#[inline]
pub fn route_pair(routing: Routing, stream: &mut RngStream) -> (usize, usize) {
    match routing {
        Routing::Independent => (stream.coin() as usize, stream.coin() as usize),
        Routing::Boson => {
            let t0 = stream.coin() as usize;
            (t0, 1 - t0)
        }
    }
}

/// Streams consumed by a [`Source`].
#[derive(Clone, Debug)]
pub struct SourceStreams {
    pub phase: RngStream,
    pub frequency: RngStream,
    pub routing: RngStream,
}

impl SourceStreams {
    pub fn from_parent(parent: &RngStream) -> Result<Self> {
        Ok(SourceStreams {
            phase: parent.split("source/phase")?,
            frequency: parent.split("source/frequency")?,
            routing: parent.split("routing")?,
        })
    }
}

/// The two-source emitter of one run, including its phase-block schedule.
#[derive(Clone, Debug)]
pub struct Source {
    config: SourceConfig,
    routing: Routing,
    phases: (f64, f64),
    remaining_in_block: u64,
}

impl Source {
    pub fn new(config: SourceConfig, routing: Routing) -> Result<Self> {
        config.validate()?;
        Ok(Source {
            config,
            routing,
            phases: (0.0, 0.0),
            remaining_in_block: 0,
        })
    }

    /// Phases in effect for the next emission.
    pub fn next_phases(&mut self, stream: &mut RngStream) -> (f64, f64) {
        if self.config.phase_mode == PhaseMode::Fixed {
            return (0.0, 0.0);
        }
        if self.remaining_in_block == 0 {
            self.phases = draw_phase_block(stream);
            self.remaining_in_block = self.config.n_f;
        }
        self.remaining_in_block -= 1;
        self.phases
    }

    pub fn emit(&mut self, streams: &mut SourceStreams) -> Result<PairEmission> {
        let (delta0, delta1) = self.next_phases(&mut streams.phase);
        let (f0, f1) = match self.config.frequency {
            FrequencyMode::Monochromatic { frequency } => (frequency, frequency),
            ref mode @ FrequencyMode::PairConserving { .. } => {
                let (a, b) = draw_frequencies(mode, &mut streams.frequency)?;
                if streams.frequency.coin() {
                    (a, b)
                } else {
                    (b, a)
                }
            }
        };
        let (target0, target1) = route_pair(self.routing, &mut streams.routing);
        Ok(PairEmission {
            message0: Message::new(f0, delta0),
            message1: Message::new(f1, delta1),
            target0,
            target1,
        })
    }
}
