//! Quick invariant checks, run by the `selftest` command.

use crate::config::{ExperimentConfig, Mode};
use crate::detector::{delay_time, threshold, DelayConfig, DetectorState, TransformOutput};
use crate::experiment::{run_efficiency, run_sweep, Execution};
use crate::geometry::Geometry;
use crate::messenger::MessageVector;
use crate::rng::RngStream;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

pub fn run_all() -> Vec<Check> {
    vec![
        simplex_and_closed_form(),
        transform_bound(),
        click_law(),
        delay_mean(),
        geometry_far_field(),
        efficiency(),
        determinism(),
    ]
}

fn simplex_and_closed_form() -> Check {
    let mut worst: f64 = 0.0;
    for gamma in [0.0, 0.5, 0.99] {
        let mut d = DetectorState::new(2, gamma, &mut RngStream::new(1)).expect("valid");
        let y = MessageVector::from_angle(0.3);
        for n in 1..=10_000i32 {
            d.update(1, y).expect("port 1");
            let expect = 1.0 - gamma.powi(n);
            worst = worst.max((d.x()[1] - expect).abs());
            worst = worst.max((d.x().iter().sum::<f64>() - 1.0).abs());
        }
    }
    check("simplex + closed form", worst <= 1e-12, format!("max deviation {worst:e}"))
}

fn transform_bound() -> Check {
    let mut s = RngStream::new(2);
    let mut d = DetectorState::new(3, 0.9, &mut s).expect("valid");
    let mut max: f64 = 0.0;
    for _ in 0..100_000 {
        let port = (s.uniform01() * 3.0) as usize;
        d.update(port, MessageVector::from_angle(std::f64::consts::TAU * s.uniform01()))
            .expect("port");
        max = max.max(d.transform().magnitude_sqr);
    }
    check("|T| <= 1", max <= 1.0 + 1e-12, format!("max |T|² {max}"))
}

fn click_law() -> Check {
    let mut s = RngStream::new(3);
    let n = 200_000;
    let mut worst: f64 = 0.0;
    for p in [0.0, 0.25, 0.5, 1.0] {
        let out = TransformOutput::with_magnitude_sqr(p);
        let rate = (0..n).filter(|_| threshold(&out, &mut s)).count() as f64 / n as f64;
        worst = worst.max((rate - p).abs());
    }
    check("click rate = |T|²", worst < 0.005, format!("max deviation {worst}"))
}

fn delay_mean() -> Check {
    let cfg = DelayConfig::default();
    let out = TransformOutput::with_magnitude_sqr(0.2);
    let mut s = RngStream::new(4);
    let n = 200_000;
    let mean = (0..n).map(|_| delay_time(&out, 0.0, &cfg, &mut s)).sum::<f64>() / n as f64;
    let rel = mean / cfg.mean_excess(0.2) - 1.0;
    check("exponential delay mean", rel.abs() < 0.01, format!("relative error {rel}"))
}

fn geometry_far_field() -> Check {
    let g = Geometry::default().with_y1(25.0);
    let v = g.delta_t();
    check("ΔT·f at quarter period", (v - 0.5).abs() < 1e-3, format!("{v}"))
}

fn efficiency() -> Check {
    let cfg = ExperimentConfig::default().with_mode(Mode::Efficiency);
    match run_efficiency(&cfg) {
        Ok(rate) => check("detection efficiency", rate >= 0.99, format!("rate {rate}")),
        Err(e) => check("detection efficiency", false, e.to_string()),
    }
}

fn determinism() -> Check {
    let mut cfg = ExperimentConfig::default().with_mode(Mode::HbtDelay);
    cfg.n_tot = 5_000;
    cfg.sweep.steps = 7;
    let a = run_sweep(&cfg, Execution::Sequential);
    let b = run_sweep(&cfg, Execution::Parallel);
    let passed = matches!((&a, &b), (Ok(a), Ok(b)) if a == b);
    let detail = if passed { "identical" } else { "differs" };
    check("sequential = parallel sweep", passed, detail.to_string())
}
