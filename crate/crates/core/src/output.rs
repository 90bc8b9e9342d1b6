//! `sweep.csv` and `fit.txt` writers. Floats use 17 significant digits so
//! equal results always produce equal bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{SweepAnalysis, SweepResult};

pub const SWEEP_COLUMNS: &str = "y1_f_over_c,deltaT_f,n_count_d0,n_count_d1,n_coincidence,predicted";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text of a sweep. The `predicted` column is left empty when the sweep
/// has no fit and the model needs one.
pub fn render_sweep_csv(result: &SweepResult) -> Result<String> {
    if result.points.is_empty() {
        return Err(Error::EmptyInput("sweep has no points"));
    }
    let cfg = &result.config;
    let f = cfg.reference_frequency();
    let predicted = result.predicted().ok();
    let mut out = String::new();
    let _ = writeln!(out, "# seed={} mode={}", cfg.seed, cfg.mode);
    let _ = writeln!(out, "# config_digest={}", cfg.digest());
    let _ = writeln!(out, "{SWEEP_COLUMNS}");
    for (i, p) in result.points.iter().enumerate() {
        let pred = predicted.as_ref().map(|v| num(v[i])).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(p.y1 * f),
            num(p.delta_t * f),
            p.n_count[0],
            p.n_count[1],
            p.n_coincidence,
            pred
        );
    }
    Ok(out)
}

pub fn render_fit(analysis: &SweepAnalysis) -> String {
    let c = &analysis.coincidence;
    format!(
        "a={} b={} visibility={} residual={}\nsingles_d0_a={}\nsingles_d1_a={}\nempirical_visibility={}\n",
        num(c.a),
        num(c.b),
        num(c.visibility),
        num(c.residual_norm),
        num(analysis.singles[0]),
        num(analysis.singles[1]),
        num(analysis.empirical_visibility),
    )
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_text(path, &render_sweep_csv(result)?)
}

pub fn write_fit(analysis: &SweepAnalysis, path: &Path) -> Result<()> {
    write_text(path, &render_fit(analysis))
}
