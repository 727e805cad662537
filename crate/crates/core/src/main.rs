use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use policysim::pipeline::{
    emit_outputs, read_data_csv, run_pipeline, AnalysisConfig, Headline, PipelineInput,
    PipelineReport,
};
use policysim::scenario::{default_scenario, load_scenario_file, validate_scenario, ScenarioSpec};
use policysim::synth::generate;
use policysim::Error;

/// Exit codes.
const EXIT_IO: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 3;
const EXIT_STAGE_FAILED: u8 = 4;
const EXIT_QUALITY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "policysim", version, about = "Structural-path scenario simulation and regression pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic table from a scenario
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Table format
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run EDA, models and path analyses on an existing data CSV
    Analyze {
        /// Data CSV with a header row
        #[arg(long)]
        data: PathBuf,
        /// Model configuration JSON; defaults to the reference models
        #[arg(long)]
        config: Option<PathBuf>,
        /// Bootstrap seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        boot: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Summary printed to stdout
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Simulate and analyze in one run
    Pipeline {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        boot: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Summary printed to stdout
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check a scenario file and list every violation
    Validate {
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON; defaults to the built-in calibrated scenario
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_INVALID_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load_spec(args: &ScenarioArgs) -> Result<ScenarioSpec, Failure> {
    let mut spec = match &args.scenario {
        Some(p) => load_scenario_file(p)?,
        None => default_scenario(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.n {
        spec.n = n;
    }
    let violations = validate_scenario(&spec);
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations).into());
    }
    Ok(spec)
}

fn load_config(path: Option<&Path>, seed: u64, boot: Option<usize>) -> Result<AnalysisConfig, Failure> {
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.display().to_string(),
                source: e,
            })?;
            AnalysisConfig::from_json(&text)?
        }
        None => AnalysisConfig::default(),
    };
    config.bootstrap.seed = seed;
    if let Some(b) = boot {
        config.bootstrap.resamples = b;
    }
    Ok(config)
}

fn finish(
    result: Result<PipelineReport, policysim::pipeline::PipelineError>,
    out: &Path,
    format: Format,
) -> Result<(), Failure> {
    let (report, failure) = match result {
        Ok(r) => (r, None),
        Err(e) => {
            let msg = e.to_string();
            (*e.partial, Some(msg))
        }
    };
    let manifest = emit_outputs(&report, out)?;
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&manifest).expect("manifest serializes")
        ),
        Format::Csv => print!("{}", Headline::from_report(&report).to_csv()),
    }
    if let Some(message) = failure {
        return Err(Failure {
            code: EXIT_STAGE_FAILED,
            message,
        });
    }
    if !report.quality_passed() {
        return Err(Failure {
            code: EXIT_QUALITY_FAILED,
            message: "quality gate failed; see report.json".into(),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            scenario,
            out,
            format,
        } => {
            let spec = load_spec(&scenario)?;
            let table = generate(&spec)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io {
                path: out.display().to_string(),
                source: e,
            })?;
            let (path, content) = match format {
                Format::Csv => (out.join("data.csv"), table.to_csv_string()?),
                Format::Json => (
                    out.join("data.json"),
                    serde_json::to_string_pretty(&table).map_err(Error::from)?,
                ),
            };
            std::fs::write(&path, content).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Analyze {
            data,
            config,
            seed,
            boot,
            out,
            format,
        } => {
            let table = read_data_csv(&data)?;
            let config = load_config(
                config.as_deref(),
                seed.unwrap_or(policysim::scenario::DEFAULT_SEED),
                boot,
            )?;
            finish(run_pipeline(PipelineInput::Table(table), &config), &out, format)
        }
        Command::Pipeline {
            scenario,
            config,
            boot,
            out,
            format,
        } => {
            let spec = load_spec(&scenario)?;
            let config = load_config(config.as_deref(), spec.seed, boot)?;
            finish(run_pipeline(PipelineInput::Scenario(spec), &config), &out, format)
        }
        Command::Validate { scenario } => {
            let spec = match &scenario {
                Some(p) => load_scenario_file(p)?,
                None => default_scenario(),
            };
            let violations = validate_scenario(&spec);
            if violations.is_empty() {
                println!("ok: {} variables, {} paths", spec.variables.len(), spec.paths.len());
                Ok(())
            } else {
                for v in &violations {
                    println!("{v}");
                }
                Err(Failure {
                    code: EXIT_INVALID_INPUT,
                    message: format!("{} violation(s)", violations.len()),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
