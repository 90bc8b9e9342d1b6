use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twophoton::config::{parse_config, ExperimentConfig, Mode};
use twophoton::error::{Error, Result};
use twophoton::experiment::{run_efficiency, run_sweep, Execution};
use twophoton::oracle::{self, CoincidenceModel, FieldModel};
use twophoton::output;

#[derive(Parser)]
#[command(name = "twophoton", version, about = "Event-by-event two-photon interference simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a detector-position sweep (or the efficiency experiment) and fit it.
    Simulate {
        #[arg(long)]
        mode: Mode,
        #[command(flatten)]
        common: Common,
        /// Output directory for sweep.csv and fit.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Run sweep points one after another instead of in parallel.
        #[arg(long)]
        sequential: bool,
    },
    /// Emit closed-form correlation and coincidence curves as CSV.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        dt_min: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        dt_max: f64,
        #[arg(long, default_value_t = 201)]
        steps: usize,
        /// Fitted amplitude fraction for the windowed-coincidence curve.
        #[arg(long, requires = "fit_b")]
        fit_a: Option<f64>,
        /// Fitted contrast for the windowed-coincidence curve.
        #[arg(long, requires = "fit_a", allow_negative_numbers = true)]
        fit_b: Option<f64>,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detection-efficiency experiment: one detector, identical messages.
    Efficiency {
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; omitted keys use defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self, mode: Option<Mode>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_config(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(mode) = mode {
            cfg.mode = mode;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn simulate(cfg: &ExperimentConfig, out: &Path, execution: Execution) -> Result<()> {
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    if cfg.mode == Mode::Efficiency {
        let rate = run_efficiency(cfg)?;
        let text = format!(
            "# seed={} mode={}\n# config_digest={}\nrate={rate:.16e}\n",
            cfg.seed,
            cfg.mode,
            cfg.digest()
        );
        output::write_text(&out.join("efficiency.txt"), &text)?;
        println!("rate={rate}");
        return Ok(());
    }
    let mut sweep = run_sweep(cfg, execution)?;
    let fitted = sweep.analyze();
    output::write_sweep_csv(&sweep, &out.join("sweep.csv"))?;
    let analysis = fitted?;
    output::write_fit(&analysis, &out.join("fit.txt"))?;
    let c = analysis.coincidence;
    println!(
        "a={} b={} visibility={} empirical_visibility={} singles=({}, {})",
        c.a, c.b, c.visibility, analysis.empirical_visibility, analysis.singles[0], analysis.singles[1]
    );
    Ok(())
}

fn predict(
    cfg: &ExperimentConfig,
    dt_min: f64,
    dt_max: f64,
    steps: usize,
    fit: Option<(f64, f64)>,
) -> Result<String> {
    if steps < 2 {
        return Err(Error::InvalidParameter {
            name: "steps".into(),
            reason: "must be at least 2".into(),
        });
    }
    let mut text = String::from("deltaT_f,corr_classical,corr_boson,coincidence_simple");
    if fit.is_some() {
        text.push_str(",coincidence_fit");
    }
    text.push('\n');
    let n = cfg.n_tot;
    for i in 0..steps {
        // Grid in units of ΔT·f, evaluated at f = 1.
        let dt = dt_min + (dt_max - dt_min) * i as f64 / (steps - 1) as f64;
        let classical = oracle::intensity_correlation(dt, 1.0, 1.0, FieldModel::Classical);
        let boson = oracle::intensity_correlation(dt, 1.0, 1.0, FieldModel::Boson);
        let simple = oracle::predicted_coincidence(n, dt, 1.0, CoincidenceModel::Simple, None)?;
        text.push_str(&format!("{dt:.16e},{classical:.16e},{boson:.16e},{simple:.16e}"));
        if fit.is_some() {
            let v = oracle::predicted_coincidence(n, dt, 1.0, CoincidenceModel::Delay, fit)?;
            text.push_str(&format!(",{v:.16e}"));
        }
        text.push('\n');
    }
    Ok(text)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate {
            mode,
            common,
            out,
            sequential,
        } => {
            let cfg = common.load(Some(mode))?;
            let execution = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            simulate(&cfg, &out, execution)?;
        }
        Command::Predict {
            common,
            dt_min,
            dt_max,
            steps,
            fit_a,
            fit_b,
            out,
        } => {
            let cfg = common.load(None)?;
            let text = predict(&cfg, dt_min, dt_max, steps, fit_a.zip(fit_b))?;
            match out {
                Some(path) => output::write_text(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Efficiency { common } => {
            let cfg = common.load(Some(Mode::Efficiency))?;
            println!("rate={}", run_efficiency(&cfg)?);
        }
        Command::Selftest => {
            let checks = twophoton::selftest::run_all();
            let mut ok = true;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {}", c.name, c.detail);
                ok &= c.passed;
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
