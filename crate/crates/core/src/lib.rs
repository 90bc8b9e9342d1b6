//! Event-by-event simulation of two-photon intensity interference.
//!
//! Two sources emit pairs of messengers, particles that carry nothing but a
//! clock. Each messenger is routed to one of two detectors, and each detector
//! is an adaptive machine that decides, one arrival at a time, whether to
//! click. Counting single clicks and coincidences while sweeping the position
//! of one detector reproduces the intensity-correlation fringes of the
//! Hanbury Brown–Twiss and Ghosh–Mandel experiments: visibility 1/2 for
//! same-event coincidences, close to 1 once click delays and a narrow
//! coincidence window are taken into account.
//!
//! ```
//! use twophoton::{config::{ExperimentConfig, Mode}, experiment::{run_sweep, Execution}};
//!
//! let mut cfg = ExperimentConfig::default().with_mode(Mode::Hbt);
//! cfg.n_tot = 5_000;
//! cfg.sweep.steps = 9;
//! let mut sweep = run_sweep(&cfg, Execution::Parallel).unwrap();
//! let fit = sweep.analyze().unwrap();
//! assert!(fit.singles[0] > 0.45 && fit.singles[0] < 0.55);
//! ```

pub mod config;
pub mod detector;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod geometry;
pub mod messenger;
pub mod oracle;
pub mod output;
pub mod rng;
pub mod selftest;

pub use config::{parse_config, ExperimentConfig, Mode};
pub use error::{Error, Result};
pub use experiment::{run_efficiency, run_point, run_sweep, Execution, PointCounts, SweepResult};
pub use rng::RngStream;

// The guide's code blocks are compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/messengers.md")]
    mod messengers {}
    #[doc = include_str!("../../../book/src/detector.md")]
    mod detector {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/wave-theory.md")]
    mod wave_theory {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    mod fitting {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
