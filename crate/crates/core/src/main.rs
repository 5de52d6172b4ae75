//! Command-line front end. Stages compose through the JSON report file:
//! `indices` writes the initial report, `fit` and `score` enrich it, and
//! `report` adds group analytics and renders the final output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bibfactor::dataset::{self, DatasetFormat, RunConfig};
use bibfactor::error::{Error, Result};
use bibfactor::indices::{ArVariant, GVariant};
use bibfactor::report::{
    emit_report, stage_analytics, stage_fit, stage_indices, stage_score, InjectedWeights, Report,
    ReportFormat,
};
use bibfactor::synth::{generate_synthetic, FactorModel, SynthConfig};

#[derive(Parser)]
#[command(name = "bibfactor", version, about = "Bibliometric factor scoring pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Config knobs shared by the stages that start from a raw dataset.
#[derive(Args, Default)]
struct ConfigArgs {
    /// JSON config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Census year for paper ages
    #[arg(long)]
    reference_year: Option<i32>,
    /// g-index convention: capped | uncapped
    #[arg(long)]
    g_variant: Option<String>,
    /// AR-index convention: pop_all_papers | jin_h_core
    #[arg(long)]
    ar_variant: Option<String>,
    /// Chi-square multiplier: n | n_minus_one
    #[arg(long)]
    chi_square_multiplier: Option<String>,
    /// Standard-error divisor: n | n_minus_one
    #[arg(long)]
    se_divisor: Option<String>,
    /// Optimizer gradient tolerance
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Grouping for analytics: department | population
    #[arg(long)]
    group_by: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-researcher indices and manifest vectors from a dataset
    Indices {
        /// Dataset path: a directory with authors.csv/publications.csv, or
        /// a JSON population file
        #[arg(long)]
        input: PathBuf,
        /// Input layout: csv-pair | json
        #[arg(long, default_value = "csv-pair")]
        format: String,
        #[command(flatten)]
        config: ConfigArgs,
        /// Where to write the report JSON
        #[arg(long)]
        output: PathBuf,
    },
    /// Fit the one-factor model to a report's manifest vectors
    Fit {
        /// Report JSON produced by `indices`
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Compute weights, scores, and rankings
    Score {
        /// Report JSON produced by `fit` (or `indices` when weights are
        /// supplied externally)
        #[arg(long)]
        input: PathBuf,
        /// JSON file with `loadings` and `standard_errors` arrays; when
        /// given, scoring uses these instead of the fitted model
        #[arg(long)]
        weights_file: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Add group analytics and render the report
    Report {
        /// Report JSON produced by `score`
        #[arg(long)]
        input: PathBuf,
        /// Output rendering: json | csv-tables | markdown
        #[arg(long, default_value = "json")]
        format: String,
        /// Output file (json, markdown) or directory (csv-tables)
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a seeded synthetic population with known factor structure
    Synth {
        /// Number of researchers
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2008)]
        reference_year: i32,
        /// Where to write the population JSON
        #[arg(long)]
        output: PathBuf,
    },
}

fn parse_variant<T: serde::de::DeserializeOwned>(flag: &str, raw: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(raw.to_string()))
        .map_err(|_| Error::Config(format!("invalid value '{raw}' for --{flag}")))
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(y) = self.reference_year {
            cfg.reference_year = y;
        }
        if let Some(raw) = &self.g_variant {
            cfg.g_variant = parse_variant::<GVariant>("g-variant", raw)?;
        }
        if let Some(raw) = &self.ar_variant {
            cfg.ar_variant = parse_variant::<ArVariant>("ar-variant", raw)?;
        }
        if let Some(raw) = &self.chi_square_multiplier {
            cfg.chi_square_multiplier = parse_variant("chi-square-multiplier", raw)?;
        }
        if let Some(raw) = &self.se_divisor {
            cfg.se_divisor = parse_variant("se-divisor", raw)?;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(m) = self.max_iterations {
            cfg.max_iterations = m;
        }
        if let Some(raw) = &self.group_by {
            cfg.group_by = parse_variant("group-by", raw)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Indices { input, format, config, output } => {
            let format: DatasetFormat = parse_variant("format", &format)?;
            let cfg = config.resolve()?;
            let ds = dataset::load_population(&input, format, cfg.reference_year)?;
            let report = stage_indices(&ds, &cfg);
            report.save(&output)
        }
        Command::Fit { input, output } => {
            let mut report = Report::load(&input)?;
            stage_fit(&mut report)?;
            report.save(&output)
        }
        Command::Score { input, weights_file, output } => {
            let mut report = Report::load(&input)?;
            let injected = weights_file.as_deref().map(InjectedWeights::load).transpose()?;
            stage_score(&mut report, injected.as_ref())?;
            report.save(&output)
        }
        Command::Report { input, format, out } => {
            let format: ReportFormat = parse_variant("format", &format)?;
            let mut report = Report::load(&input)?;
            stage_analytics(&mut report);
            emit_report(&report, format, &out)
        }
        Command::Synth { n, seed, reference_year, output } => {
            let ds = generate_synthetic(&SynthConfig {
                n,
                model: FactorModel::paper_like(),
                reference_year,
                seed,
            })?;
            dataset::save_population_json(&ds, &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
