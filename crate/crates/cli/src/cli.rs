use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use passage_core::io::Format;

#[derive(Debug, Parser)]
#[command(
    name = "passage",
    version,
    about = "Mean and variance of absorption time in Markov chains estimated from counts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact moments from the point estimate of the transition matrix.
    Analytic {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Moments with count-sampling uncertainty, by multinomial resampling.
    Montecarlo {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Share of each row's observations used for resampling, in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        fraction: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo at several sample fractions, reporting the growth of the
    /// standard deviation against the full sample.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Comma-separated sample fractions; 1 is added when missing.
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.2,0.1")]
        fractions: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate individual trajectories of the point-estimate chain.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 100_000)]
        trajectories: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Parse and validate an input file.
    Validate {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Count table to read.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_format, default_value = "generic")]
    pub format: Format,
    /// Start state label, or one comma-separated weight per state.
    /// Defaults to the first listed state.
    #[arg(long)]
    pub start: Option<String>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub max_skip_ratio: f64,
    /// Worker threads. Results are identical for any value.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Defaults to the extension of --out, else table.
    #[arg(long, value_enum)]
    pub output_format: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn format(&self) -> OutputFormat {
        if let Some(f) = self.output_format {
            return f;
        }
        match self
            .out
            .as_ref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
        {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Table,
        }
    }
}
