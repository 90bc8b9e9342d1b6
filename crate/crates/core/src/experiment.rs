//! Pair events, sweep points, full sweeps, and the efficiency experiment.

use rayon::prelude::*;

use crate::config::{EfficiencyPattern, ExperimentConfig, Mode};
use crate::detector::{DelayConfig, DetectorState, DetectorStreams};
use crate::error::{Error, Result};
use crate::fit::{self, FitResult};
use crate::geometry::Geometry;
use crate::messenger::{Message, PairEmission, Source, SourceStreams};
use crate::oracle::{self, CoincidenceModel};
use crate::rng::RngStream;

/// Click times of one detector within one pair event (at most two).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClickTimes {
    times: [f64; 2],
    len: u8,
}

impl ClickTimes {
    fn push(&mut self, t: f64) {
        self.times[self.len as usize] = t;
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.times[..self.len as usize]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairEvent {
    /// Messengers received per detector.
    pub arrivals: [u8; 2],
    /// Clicks per detector.
    pub clicks: [u8; 2],
    /// Click timestamps per detector; empty unless delays are enabled.
    pub delays: [ClickTimes; 2],
    pub coincident: bool,
}

/// Fixed per-point inputs to [`run_pair_event`].
#[derive(Clone, Copy, Debug)]
pub struct EventContext {
    /// Times of flight indexed `[source][detector]`.
    pub flight_times: [[f64; 2]; 2],
    pub delay: DelayConfig,
    pub window: f64,
}

impl EventContext {
    pub fn new(geometry: &Geometry, delay: DelayConfig, window: f64) -> Self {
        EventContext {
            flight_times: geometry.flight_times(),
            delay,
            window,
        }
    }
}

/// Sends one emitted pair to its detectors and decides coincidence.
///
/// Messengers enter the port matching their source; if both reach the same
/// detector, the one from S0 is processed first. Without delays an event is
/// coincident when both detectors click. With delays some click of D0 and some
/// click of D1 must lie within the window of each other.
#[inline]
pub fn run_pair_event(
    ctx: &EventContext,
    detectors: &mut [DetectorState; 2],
    streams: &mut [DetectorStreams; 2],
    emission: &PairEmission,
) -> Result<PairEvent> {
    let mut event = PairEvent::default();
    let arrivals = [
        (0usize, emission.message0, emission.target0),
        (1usize, emission.message1, emission.target1),
    ];
    for (source, message, target) in arrivals {
        let message = message.with_time_of_flight(ctx.flight_times[source][target]);
        let outcome =
            detectors[target].process_arrival(source, &message, &ctx.delay, &mut streams[target])?;
        event.arrivals[target] += 1;
        if outcome.click {
            event.clicks[target] += 1;
            if let Some(t) = outcome.delay_time {
                event.delays[target].push(t);
            }
        }
    }
    event.coincident = if ctx.delay.enabled {
        event.delays[0].as_slice().iter().any(|t0| {
            event.delays[1]
                .as_slice()
                .iter()
                .any(|t1| (t0 - t1).abs() <= ctx.window)
        })
    } else {
        event.clicks[0] > 0 && event.clicks[1] > 0
    };
    Ok(event)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCounts {
    pub y1: f64,
    pub delta_t: f64,
    pub n_count: [u64; 2],
    pub n_coincidence: u64,
    /// Events in which both messengers reached the same detector.
    pub same_detector_events: u64,
}

/// Everything one sweep point needs, built from the point's own stream.
struct PointRun {
    ctx: EventContext,
    detectors: [DetectorState; 2],
    detector_streams: [DetectorStreams; 2],
    source: Source,
    source_streams: SourceStreams,
}

impl PointRun {
    fn new(config: &ExperimentConfig, geometry: &Geometry, stream: &RngStream) -> Result<Self> {
        let d = &config.detector;
        let detectors = [
            DetectorState::new(d.ports, d.gamma, &mut stream.split("init")?.split("d0")?)?,
            DetectorState::new(d.ports, d.gamma, &mut stream.split("init")?.split("d1")?)?,
        ];
        Ok(PointRun {
            ctx: EventContext::new(geometry, config.effective_delay(), config.window),
            detectors,
            detector_streams: [
                DetectorStreams::from_parent(stream, "d0")?,
                DetectorStreams::from_parent(stream, "d1")?,
            ],
            source: Source::new(config.source(), config.routing())?,
            source_streams: SourceStreams::from_parent(stream)?,
        })
    }

    fn step(&mut self) -> Result<PairEvent> {
        let emission = self.source.emit(&mut self.source_streams)?;
        run_pair_event(
            &self.ctx,
            &mut self.detectors,
            &mut self.detector_streams,
            &emission,
        )
    }
}

/// Runs `config.n_tot` pair events with D1 at `y1`, using fresh detectors.
pub fn run_point(config: &ExperimentConfig, y1: f64, stream: &RngStream) -> Result<PointCounts> {
    let geometry = config.geometry.with_y1(y1);
    let mut run = PointRun::new(config, &geometry, stream)?;
    let mut counts = PointCounts {
        y1,
        delta_t: geometry.delta_t(),
        n_count: [0; 2],
        n_coincidence: 0,
        same_detector_events: 0,
    };
    for _ in 0..config.n_tot {
        let ev = run.step()?;
        counts.n_count[0] += ev.clicks[0] as u64;
        counts.n_count[1] += ev.clicks[1] as u64;
        counts.n_coincidence += ev.coincident as u64;
        counts.same_detector_events += (ev.arrivals[0] != 1) as u64;
    }
    Ok(counts)
}

/// Stream of sweep point `index`.
pub fn point_stream(seed: u64, index: usize) -> Result<RngStream> {
    RngStream::new(seed).split("point")?.split(&index.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepAnalysis {
    pub coincidence: FitResult,
    /// Constant fit `a` of the singles of D0 and D1.
    pub singles: [f64; 2],
    pub empirical_visibility: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    /// Ordered by `y1`.
    pub points: Vec<PointCounts>,
    pub analysis: Option<SweepAnalysis>,
}

impl SweepResult {
    fn series(&self, value: impl Fn(&PointCounts) -> u64) -> Vec<(f64, f64)> {
        let f = self.config.reference_frequency();
        self.points
            .iter()
            .map(|p| (p.delta_t * f, value(p) as f64))
            .collect()
    }

    /// `(ΔT·f, N_coincidence)` per point.
    pub fn coincidence_series(&self) -> Vec<(f64, f64)> {
        self.series(|p| p.n_coincidence)
    }

    /// `(ΔT·f, N_count)` of one detector per point.
    pub fn singles_series(&self, detector: usize) -> Vec<(f64, f64)> {
        self.series(|p| p.n_count[detector])
    }

    /// Fits the coincidence fringe and the singles, storing the result.
    pub fn analyze(&mut self) -> Result<SweepAnalysis> {
        let n = self.config.n_tot;
        // ΔT is already scaled by f in the series.
        let coincidences = self.coincidence_series();
        let analysis = SweepAnalysis {
            coincidence: fit::fit_cosine(&coincidences, n, 1.0)?,
            singles: [
                fit::fit_constant(&self.singles_series(0), n)?,
                fit::fit_constant(&self.singles_series(1), n)?,
            ],
            empirical_visibility: fit::empirical_visibility(&coincidences)?,
        };
        self.analysis = Some(analysis);
        Ok(analysis)
    }

    pub fn coincidence_model(&self) -> CoincidenceModel {
        match (self.config.delay_enabled(), self.config.routing()) {
            (false, _) => CoincidenceModel::Simple,
            (true, crate::messenger::Routing::Independent) => CoincidenceModel::Delay,
            (true, crate::messenger::Routing::Boson) => CoincidenceModel::Boson,
        }
    }

    /// Model coincidence count at each point: the closed form for same-event
    /// coincidences, otherwise the fitted curve.
    pub fn predicted(&self) -> Result<Vec<f64>> {
        let model = self.coincidence_model();
        let fit = self.analysis.map(|a| (a.coincidence.a, a.coincidence.b));
        let f = self.config.reference_frequency();
        self.points
            .iter()
            .map(|p| oracle::predicted_coincidence(self.config.n_tot, p.delta_t, f, model, fit))
            .collect()
    }
}

/// Runs every point of the configured sweep. Each point draws from its own
/// stream, so the result does not depend on `execution`.
pub fn run_sweep(config: &ExperimentConfig, execution: Execution) -> Result<SweepResult> {
    config.validate()?;
    if config.mode == Mode::Efficiency {
        return Err(Error::invalid("experiment.mode", "efficiency runs have no sweep"));
    }
    let ys = config.sweep.ordinates();
    let one = |(i, &y1): (usize, &f64)| run_point(config, y1, &point_stream(config.seed, i)?);
    let points = match execution {
        Execution::Sequential => ys.iter().enumerate().map(one).collect::<Result<Vec<_>>>()?,
        Execution::Parallel => ys
            .par_iter()
            .enumerate()
            .map(one)
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SweepResult {
        config: *config,
        points,
        analysis: None,
    })
}

/// Click rate of a single detector after `efficiency.warmup` discarded arrivals.
///
/// The source is far away and fixed, so every messenger has the same time of
/// flight `geometry.x` and the same phase.
pub fn run_efficiency(config: &ExperimentConfig) -> Result<f64> {
    let root = RngStream::new(config.seed).split("efficiency")?;
    let eff = &config.efficiency;
    if eff.arrivals < 1 {
        return Err(Error::invalid("efficiency.arrivals", "must be at least 1"));
    }
    let mut detector = DetectorState::new(
        config.detector.ports,
        config.detector.gamma,
        &mut root.split("init")?.split("d0")?,
    )?;
    let mut streams = DetectorStreams::from_parent(&root, "d0")?;
    let phase = std::f64::consts::TAU * root.split("source/phase")?.uniform01();
    let base = Message::new(config.frequency.frequency, phase % std::f64::consts::TAU)
        .with_time_of_flight(config.geometry.x);
    let quarter_turn = Message {
        phase: (base.phase + std::f64::consts::FRAC_PI_2) % std::f64::consts::TAU,
        ..base
    };
    let delay = DelayConfig::disabled();
    let mut clicks = 0u64;
    for i in 0..eff.warmup + eff.arrivals {
        let (port, message) = match eff.pattern {
            EfficiencyPattern::Constant => (0, &base),
            EfficiencyPattern::Alternating if i % 2 == 0 => (0, &base),
            EfficiencyPattern::Alternating => (1, &quarter_turn),
        };
        let out = detector.process_arrival(port, message, &delay, &mut streams)?;
        if i >= eff.warmup && out.click {
            clicks += 1;
        }
    }
    Ok(clicks as f64 / eff.arrivals as f64)
}
