//! Closed-form predictions: wave-theory intensities and correlations, and the
//! coincidence curves expected from the event-based model.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::Geometry;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveParams {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase0: f64,
    pub phase1: f64,
}

/// Intensity on detector `detector` of two coherent waves of equal amplitude:
/// `2A²{1 + cos[φ0 - φ1 + 2πf(T0n - T1n)]}`.
pub fn intensity(detector: usize, params: &WaveParams, geom: &Geometry) -> f64 {
    let bracket = geom.time_of_flight(0, detector) - geom.time_of_flight(1, detector);
    let a2 = params.amplitude * params.amplitude;
    2.0 * a2 * (1.0 + (params.phase0 - params.phase1 + TAU * params.frequency * bracket).cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldModel {
    Classical,
    Boson,
}

/// Phase-averaged intensity product `<I0 I1>`.
pub fn intensity_correlation(delta_t: f64, frequency: f64, amplitude: f64, model: FieldModel) -> f64 {
    let c = (TAU * frequency * delta_t).cos();
    let a4 = amplitude.powi(4);
    match model {
        FieldModel::Classical => 4.0 * a4 * (1.0 + 0.5 * c),
        FieldModel::Boson => 4.0 * a4 * (1.0 + c),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoincidenceModel {
    /// Same-event coincidences, no delays: `N/8 (1 + ½cos 2πfΔT)`.
    Simple,
    /// Windowed coincidences with click delays; amplitude is empirical.
    Delay,
    /// Delays plus routing that never sends both messengers to one detector.
    Boson,
}

/// Expected coincidence count. The delay and boson curves are
/// `a N (1 + b cos 2πfΔT)` and need fitted `(a, b)`.
pub fn predicted_coincidence(
    n_tot: u64,
    delta_t: f64,
    frequency: f64,
    model: CoincidenceModel,
    fit: Option<(f64, f64)>,
) -> Result<f64> {
    let n = n_tot as f64;
    let c = (TAU * frequency * delta_t).cos();
    match model {
        CoincidenceModel::Simple => Ok(n / 8.0 * (1.0 + 0.5 * c)),
        CoincidenceModel::Delay | CoincidenceModel::Boson => {
            let name = if model == CoincidenceModel::Delay {
                "delay"
            } else {
                "boson"
            };
            let (a, b) = fit.ok_or(Error::MissingFitConstants(name))?;
            Ok(a * n * (1.0 + b * c))
        }
    }
}

/// `(max - min) / (max + min)` of the samples.
pub fn visibility(signal: &[f64]) -> Result<f64> {
    if signal.is_empty() {
        return Err(Error::EmptyInput("visibility needs at least one sample"));
    }
    let max = signal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = signal.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok((max - min) / (max + min))
}
