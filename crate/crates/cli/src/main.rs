mod cli;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use passage_core::io::{parse_start, read_table, InputError};
use passage_core::oracle::simulate_many;
use passage_core::{
    passage_time_moments, run_mc, sweep_sample_fraction, unit_start, validate_spec,
    AbsorbingChainSpec, McConfig, TransitionCountTable,
};
use thiserror::Error;

use cli::{Cli, Command, InputArgs, McArgs, OutputArgs};

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: InputError },
    #[error("--start: {0}")]
    Start(InputError),
    #[error("{0}")]
    Core(#[from] passage_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Input { source, .. } | CliError::Start(source) => match source {
                InputError::Parse { .. } => 2,
                InputError::Validation(_) => 3,
            },
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &passage_core::Error) -> u8 {
    use passage_core::Error as E;
    match e {
        E::InvalidSpec(_)
        | E::InvalidTable(_)
        | E::InvalidConfig(_)
        | E::InvalidProbabilityVector(_) => 3,
        E::TooManySkips { .. } => 5,
        E::AtFraction { source, .. } => core_exit_code(source),
        E::SingularSystem { .. }
        | E::NonFinite
        | E::NegativeVariance(_)
        | E::DimensionMismatch { .. }
        | E::TrajectoryOverflow(_)
        | E::InsufficientReplicates(_) => 4,
    }
}

struct Loaded {
    table: TransitionCountTable,
    start: Vec<f64>,
    start_label: String,
}

fn load(args: &InputArgs) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(&args.input).map_err(|source| CliError::Io {
        path: args.input.clone(),
        source,
    })?;
    let table = read_table(&text, args.format).map_err(|source| CliError::Input {
        path: args.input.clone(),
        source,
    })?;
    let (start, start_label) = match &args.start {
        Some(s) => (
            parse_start(s, table.labels()).map_err(CliError::Start)?,
            s.trim().to_string(),
        ),
        None => (unit_start(table.k(), 0), table.labels()[0].clone()),
    };
    Ok(Loaded {
        table,
        start,
        start_label,
    })
}

fn chain(l: &Loaded) -> Result<AbsorbingChainSpec, CliError> {
    Ok(l.table.to_chain(l.start.clone())?)
}

fn mc_config(mc: &McArgs, fraction: f64) -> McConfig {
    McConfig {
        replicates: mc.replicates,
        seed: mc.seed,
        fraction,
        max_skip_ratio: mc.max_skip_ratio,
        workers: mc.workers,
        retain_replicates: false,
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic { input, output } => {
            let l = load(&input)?;
            let m = passage_time_moments(&chain(&l)?)?;
            let r = report::AnalyticReport {
                start: l.start.clone(),
                moments: m.into(),
            };
            emit(
                &output,
                &report::analytic(&r, &l.start_label, output.format()),
            )
        }
        Command::Montecarlo {
            input,
            mc,
            fraction,
            output,
        } => {
            let l = load(&input)?;
            let analytic = passage_time_moments(&chain(&l)?)?;
            let cfg = mc_config(&mc, fraction);
            let result = run_mc(&l.table, &l.start, &cfg)?;
            let r = report::McReport::new(cfg.seed, fraction, &result, analytic);
            emit(
                &output,
                &report::montecarlo(&r, &l.start_label, output.format()),
            )
        }
        Command::Sweep {
            input,
            mc,
            fractions,
            output,
        } => {
            let l = load(&input)?;
            chain(&l)?;
            let points =
                sweep_sample_fraction(&l.table, &l.start, &mc_config(&mc, 1.0), &fractions)?;
            let rows: Vec<report::SweepRow> = points.iter().map(Into::into).collect();
            emit(&output, &report::sweep(&rows, output.format()))
        }
        Command::Simulate {
            input,
            trajectories,
            seed,
            output,
        } => {
            let l = load(&input)?;
            let spec = chain(&l)?;
            let analytic = passage_time_moments(&spec)?;
            let summary = simulate_many(&spec, trajectories, seed)?;
            let r = report::SimulateReport {
                seed,
                summary,
                analytic: analytic.into(),
            };
            emit(
                &output,
                &report::simulate(&r, &l.start_label, output.format()),
            )
        }
        Command::Validate { input } => {
            let l = load(&input)?;
            let spec = AbsorbingChainSpec::from_parts(
                l.table.point_estimate(),
                l.start.clone(),
                l.table.labels().to_vec(),
            );
            let violations = validate_spec(&spec);
            if !violations.is_empty() {
                return Err(passage_core::Error::InvalidSpec(violations).into());
            }
            println!(
                "{}: {} transient states, {} observed transitions, valid",
                input.input.display(),
                l.table.k(),
                l.table.totals().iter().sum::<u64>()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
