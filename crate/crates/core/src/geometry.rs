//! Two-source, two-detector layout.
//!
//! Sources sit on the y-axis at `y = +d/2` (S0) and `y = -d/2` (S1); both
//! detectors sit on the line at distance `x` from it, at ordinates `y0` and
//! `y1`. Units: `c = 1`, lengths in `c/f`, times in `1/f`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub x: f64,
    pub d: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Geometry {
    pub fn new(x: f64, d: f64, y0: f64, y1: f64) -> Result<Self> {
        let g = Geometry { x, d, y0, y1 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.x > 0.0) {
            return Err(Error::invalid("geometry.x", "must be positive"));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::invalid("geometry.d", "must be positive"));
        }
        if !(self.y0.is_finite() && self.y1.is_finite()) {
            return Err(Error::invalid("geometry.y0", "detector ordinates must be finite"));
        }
        Ok(())
    }

    pub fn with_y1(self, y1: f64) -> Self {
        Geometry { y1, ..self }
    }

    fn detector_y(&self, detector: usize) -> f64 {
        match detector {
            0 => self.y0,
            _ => self.y1,
        }
    }

    /// Time of flight from source `source` to detector `detector`.
    #[inline]
    pub fn time_of_flight(&self, source: usize, detector: usize) -> f64 {
        let sign = if source == 0 { 1.0 } else { -1.0 };
        let dy = sign * self.d / 2.0 - self.detector_y(detector);
        self.x.hypot(dy)
    }

    /// All four times of flight, indexed `[source][detector]`.
    pub fn flight_times(&self) -> [[f64; 2]; 2] {
        [
            [self.time_of_flight(0, 0), self.time_of_flight(0, 1)],
            [self.time_of_flight(1, 0), self.time_of_flight(1, 1)],
        ]
    }

    /// `(T00 - T10) - (T01 - T11)`.
    pub fn delta_t(&self) -> f64 {
        let t = self.flight_times();
        (t[0][0] - t[1][0]) - (t[0][1] - t[1][1])
    }

    /// Small-angle form `d (y1 - y0) / x` of [`delta_t`](Self::delta_t).
    pub fn delta_t_far_field(&self) -> f64 {
        self.d * (self.y1 - self.y0) / self.x
    }

    /// Period of the coincidence fringe in `y1` under the far-field form.
    pub fn fringe_period(&self, frequency: f64) -> f64 {
        self.x / (frequency * self.d)
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            x: 100_000.0,
            d: 2000.0,
            y0: 0.0,
            y1: 0.0,
        }
    }
}
