//! Event-based single-photon detector.
//!
//! The detector is an adaptive machine with `K` input ports. Its input stage
//! keeps a vector `x` on the probability simplex and one stored message per
//! port. Each arrival at port `k` moves `x` towards the corner `e_k`
//! (`x <- γx + (1-γ)e_k`) and overwrites register `k`. The transformation stage
//! forms `T = Σ x_k Y_k`, and the output stage clicks when `|T|²` exceeds a fresh
//! uniform threshold, so a click happens with probability `|T|²`.
//!
//! Ports are zero-based here: a messenger from source `m` enters port `m`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::messenger::{Message, MessageVector};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorState {
    gamma: f64,
    x: Vec<f64>,
    registers: Vec<MessageVector>,
}

/// Output of the transformation stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformOutput {
    pub t: (f64, f64),
    pub magnitude_sqr: f64,
}

impl TransformOutput {
    pub fn new(t: (f64, f64)) -> Self {
        TransformOutput {
            t,
            magnitude_sqr: t.0 * t.0 + t.1 * t.1,
        }
    }

    /// An output with a prescribed `|T|²`, pointing along the first axis.
    pub fn with_magnitude_sqr(magnitude_sqr: f64) -> Self {
        TransformOutput {
            t: (magnitude_sqr.sqrt(), 0.0),
            magnitude_sqr,
        }
    }
}

/// Click delay model: an exponential delay with mean `t_max (1 - |T|²)^h`
/// added to the time of flight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayConfig {
    pub enabled: bool,
    pub t_max: f64,
    pub h: f64,
}

impl DelayConfig {
    pub fn disabled() -> Self {
        DelayConfig {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled {
            if !(self.t_max.is_finite() && self.t_max > 0.0) {
                return Err(Error::invalid("delay.t_max", "must be positive"));
            }
            if !(self.h.is_finite() && self.h > 0.0) {
                return Err(Error::invalid("delay.h", "must be positive"));
            }
        }
        Ok(())
    }

    /// Mean of the exponential part of the delay at a given `|T|²`.
    pub fn mean_excess(&self, magnitude_sqr: f64) -> f64 {
        self.t_max * (1.0 - magnitude_sqr).max(0.0).powf(self.h)
    }
}

impl Default for DelayConfig {
    fn default() -> Self {
        DelayConfig {
            enabled: true,
            t_max: 1000.0,
            h: 8.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrivalOutcome {
    pub click: bool,
    pub magnitude_sqr: f64,
    /// Click time; only present for clicks of a detector with delays enabled.
    pub delay_time: Option<f64>,
}

/// Per-detector random streams.
#[derive(Clone, Debug)]
pub struct DetectorStreams {
    pub threshold: RngStream,
    pub delay: RngStream,
}

impl DetectorStreams {
    /// Streams `threshold/<name>` and `delay/<name>` under `parent`.
    pub fn from_parent(parent: &RngStream, name: &str) -> Result<Self> {
        Ok(DetectorStreams {
            threshold: parent.split("threshold")?.split(name)?,
            delay: parent.split("delay")?.split(name)?,
        })
    }
}

impl DetectorState {
    /// Fresh detector: `x = (1, 0, ..., 0)` and each register a random unit vector.
    pub fn new(ports: usize, gamma: f64, stream: &mut RngStream) -> Result<Self> {
        if ports < 1 {
            return Err(Error::invalid("detector.k", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("detector.gamma", "must lie in [0, 1)"));
        }
        let mut x = vec![0.0; ports];
        x[0] = 1.0;
        let registers = (0..ports)
            .map(|_| MessageVector::from_angle(std::f64::consts::TAU * stream.uniform01()))
            .collect();
        Ok(DetectorState {
            gamma,
            x,
            registers,
        })
    }

    /// Builds a state from explicit contents. `x` must lie on the simplex and
    /// every register must be a unit vector.
    pub fn from_parts(gamma: f64, x: Vec<f64>, registers: Vec<MessageVector>) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("detector.gamma", "must lie in [0, 1)"));
        }
        if x.is_empty() || x.len() != registers.len() {
            return Err(Error::invalid("detector.k", "x and registers must have equal, nonzero length"));
        }
        let sum: f64 = x.iter().sum();
        if x.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("x", "must lie on the probability simplex"));
        }
        if registers.iter().any(|y| (y.norm_sqr() - 1.0).abs() > 1e-12) {
            return Err(Error::invalid("registers", "must be unit vectors"));
        }
        Ok(DetectorState {
            gamma,
            x,
            registers,
        })
    }

    pub fn ports(&self) -> usize {
        self.x.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn registers(&self) -> &[MessageVector] {
        &self.registers
    }

    /// Input stage: learn from a message `y` arriving at `port`.
    #[inline]
    pub fn update(&mut self, port: usize, y: MessageVector) -> Result<()> {
        if port >= self.x.len() {
            return Err(Error::PortOutOfRange {
                port,
                ports: self.x.len(),
            });
        }
        let g = self.gamma;
        for (i, xi) in self.x.iter_mut().enumerate() {
            *xi = g * *xi + if i == port { 1.0 - g } else { 0.0 };
        }
        self.registers[port] = y;
        Ok(())
    }

    /// Transformation stage: `T = Σ x_k Y_k`.
    #[inline]
    pub fn transform(&self) -> TransformOutput {
        let mut t = (0.0, 0.0);
        for (xk, yk) in self.x.iter().zip(&self.registers) {
            t.0 += xk * yk.cos;
            t.1 += xk * yk.sin;
        }
        TransformOutput::new(t)
    }

    /// All three stages for one messenger, plus the click delay when enabled.
    #[inline]
    pub fn process_arrival(
        &mut self,
        port: usize,
        message: &Message,
        delay: &DelayConfig,
        streams: &mut DetectorStreams,
    ) -> Result<ArrivalOutcome> {
        self.update(port, message.vector())?;
        let out = self.transform();
        let click = threshold(&out, &mut streams.threshold);
        let delay_time = if click && delay.enabled {
            Some(delay_time(&out, message.time_of_flight, delay, &mut streams.delay))
        } else {
            None
        };
        Ok(ArrivalOutcome {
            click,
            magnitude_sqr: out.magnitude_sqr,
            delay_time,
        })
    }

    /// Human-readable dump of the machine state.
    pub fn dump(&self) -> String {
        let mut s = format!("gamma={}\n", self.gamma);
        for (k, (xk, yk)) in self.x.iter().zip(&self.registers).enumerate() {
            let _ = writeln!(s, "port={k} x={xk:.17e} y=({:.17e}, {:.17e})", yk.cos, yk.sin);
        }
        s
    }
}

/// Output stage: click iff `|T|² > R` for a fresh uniform `R` in `[0, 1)`.
#[inline]
pub fn threshold(out: &TransformOutput, stream: &mut RngStream) -> bool {
    out.magnitude_sqr > stream.uniform01()
}

/// Click time `T_mn - t_max (1 - |T|²)^h ln R` with `R` uniform on `(0, 1)`.
#[inline]
pub fn delay_time(
    out: &TransformOutput,
    time_of_flight: f64,
    cfg: &DelayConfig,
    stream: &mut RngStream,
) -> f64 {
    let r = stream.open01();
    time_of_flight - cfg.mean_excess(out.magnitude_sqr) * r.ln()
}
