mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noether_core::exactmath::field::set_display_digits;
use noether_core::noether::NoetherianMap;
use noether_core::pipeline::{self, AnalysisOptions};
use noether_core::potentials::example43;
use noether_core::{Error, Result};
use serde::Serialize;

/// Exact cohomological dynamics of the maps f = L∘J on projective space.
///
/// Exit codes: 0 success, 1 usage or invalid input, 2 unsupported
/// configuration, 3 internal contradiction or failed check.
#[derive(Parser, Debug)]
#[command(name = "noether", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Digits for decimal renderings of exact values.
    #[arg(long, global = true, default_value_t = 30)]
    precision: usize,
    /// Master seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Iterations used to test nonsingular orbits.
    #[arg(long, global = true, default_value_t = 100)]
    horizon: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct MapArg {
    /// Parameters a_0,…,a_d as rationals p/q, summing to 2.
    #[arg(long = "a", value_name = "A", allow_hyphen_values = true)]
    a: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full analysis of one map.
    Analyze {
        #[command(flatten)]
        map: MapArg,
        /// Skip the Monte Carlo trend.
        #[arg(long)]
        no_sampling: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Fixed examples with their checks.
    Fixtures {
        #[arg(value_enum)]
        which: Fixture,
        /// Degree for blowup-invariant.
        #[arg(long, default_value_t = 2)]
        lambda: u32,
        /// Parameters for y-model.
        #[arg(long = "a", allow_hyphen_values = true, default_value = pipeline::Y_MODEL_DEFAULT)]
        a: String,
    },
    /// Batch check over all small orbit configurations.
    GridVerify {
        #[arg(long, default_value_t = 6)]
        d_max: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Cesàro means of the normalized pullback iterates applied to H.
    Cesaro {
        #[arg(long = "a", allow_hyphen_values = true, conflicts_with = "fixture")]
        a: Option<String>,
        #[arg(long, value_enum)]
        fixture: Option<CesaroFixture>,
        #[arg(long = "N-max", default_value_t = 1000)]
        n_max: usize,
    },
    /// Convergence gate and Monte Carlo trend of the potential.
    Star {
        #[arg(long = "a", allow_hyphen_values = true, conflicts_with = "example43")]
        a: Option<String>,
        /// Squaring map on the blown-up plane instead of a map f.
        #[arg(long)]
        example43: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Largest iterate; defaults to 12 for maps and 20 for the squaring map.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Exceptional orbits and their regularity.
    Orbits {
        #[command(flatten)]
        map: MapArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fixture {
    P3cubic,
    BlowupInvariant,
    YModel,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CesaroFixture {
    P3cubic,
}

enum Outcome {
    Ok,
    Unsupported(String),
    Failed(String),
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
    let out = if json {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Contradiction(e.to_string()))?;
        s.push('\n');
        s
    } else {
        text(value)
    };
    // A closed pipe (`noether ... | head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    set_display_digits(cli.precision);
    match &cli.command {
        Command::Analyze { map, no_sampling, samples } => {
            let f = NoetherianMap::parse(&map.a)?;
            let opts = AnalysisOptions {
                horizon: cli.horizon,
                sampling: !no_sampling,
                samples: *samples,
                seed: cli.seed,
                ..Default::default()
            };
            let report = pipeline::analyze(&f, &opts)?;
            emit(cli.json, &report, render::analysis)?;
            Ok(match &report.unsupported {
                Some(r) => Outcome::Unsupported(r.clone()),
                None => Outcome::Ok,
            })
        }
        Command::Fixtures { which, lambda, a } => {
            match which {
                Fixture::P3cubic => emit(cli.json, &pipeline::p3_cubic(1000)?, render::p3_cubic)?,
                Fixture::BlowupInvariant => emit(cli.json, &pipeline::blowup_invariant(*lambda)?, render::blowup)?,
                Fixture::YModel => emit(cli.json, &pipeline::y_model(&NoetherianMap::parse(a)?)?, render::y_model)?,
            }
            Ok(Outcome::Ok)
        }
        Command::GridVerify { d_max, n_max } => {
            if *d_max < 3 || *n_max < 1 {
                return Err(Error::InvalidInput("need --d-max >= 3 and --n-max >= 1".into()));
            }
            let report = pipeline::grid_verify(*d_max, *n_max, 50);
            emit(cli.json, &report, |r| r.table())?;
            Ok(if report.ok() {
                Outcome::Ok
            } else {
                let bad: Vec<&str> = report
                    .rows
                    .iter()
                    .filter(|r| r.status == pipeline::GridStatus::Fail)
                    .map(|r| r.label.as_str())
                    .collect();
                Outcome::Failed(format!("failing configurations: {}", bad.join("; ")))
            })
        }
        Command::Cesaro { a, fixture, n_max } => {
            match (a, fixture) {
                (Some(a), _) => {
                    let r = pipeline::cesaro_for_map(&NoetherianMap::parse(a)?, *n_max)?;
                    emit(cli.json, &r, render::cesaro)?;
                }
                (None, Some(CesaroFixture::P3cubic)) => {
                    let r = pipeline::p3_cubic(*n_max)?;
                    emit(cli.json, &r.cesaro, |c| c.table())?;
                }
                (None, None) => return Err(Error::InvalidInput("cesaro needs --a or --fixture".into())),
            }
            Ok(Outcome::Ok)
        }
        Command::Star { a, example43: ex, samples, n_max } => {
            if *ex {
                let r = example43(n_max.unwrap_or(20), *samples, cli.seed)?;
                emit(cli.json, &r, render::example43)?;
                return Ok(Outcome::Ok);
            }
            let Some(a) = a else {
                return Err(Error::InvalidInput("star needs --a or --example43".into()));
            };
            let r = pipeline::star_for_map(&NoetherianMap::parse(a)?, *samples, n_max.unwrap_or(12), cli.seed)?;
            emit(cli.json, &r, render::star)?;
            Ok(if r.gate.holds() {
                Outcome::Ok
            } else {
                Outcome::Unsupported("convergence gate does not apply".into())
            })
        }
        Command::Orbits { map } => {
            let f = NoetherianMap::parse(&map.a)?;
            emit(cli.json, &pipeline::orbits(&f, cli.horizon)?, render::orbits)?;
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Unsupported(r)) => {
            eprintln!("unsupported: {r}");
            ExitCode::from(2)
        }
        Ok(Outcome::Failed(r)) => {
            eprintln!("error: {r}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
