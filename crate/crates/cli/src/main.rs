//! `matter` — effort-aligned evaluation of defect-proneness rankings.
//!
//! Subcommands:
//! - `evaluate`: run models over a corpus and write indicator rows.
//! - `compare`:  group models into statistically distinct tiers.
//! - `sweep`:    evaluate along a grid of budget fractions or exclusion shares.
//! - `validate`: check corpus files against the admission rules.
//! - `one-rank`: emit the size-based baseline ranking for one release.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 model error.

mod commands;
mod config;
mod output;
mod pipeline;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matter_core::{BudgetKind, ErrorKind, Polarity};

use commands::{CompareSpec, SweepAxis};
use config::{resolve, RunConfig};

#[derive(Parser)]
#[command(
    name = "matter",
    version,
    about = "Effort-aligned evaluation and comparison of defect-proneness rankings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured model on every release and write results.csv/.json
    Evaluate(EvaluateArgs),
    /// Group models into statistically distinct performance tiers
    Compare(CompareArgs),
    /// Evaluate along a grid of budget fractions or excluded-code shares
    Sweep(SweepArgs),
    /// Check corpus releases against the admission rules
    Validate(ValidateArgs),
    /// Emit the size-first baseline ranking of one release as CSV
    OneRank(OneRankArgs),
}

/// Overrides shared by the run-driving subcommands.
#[derive(Args)]
struct RunOverrides {
    /// Path to the JSON run configuration
    #[arg(long, value_name = "JSON")]
    config: PathBuf,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured models (comma-separated names)
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Write outputs into this directory instead of the configured one
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    run: RunOverrides,
    /// Replace the configured budgets with this single fraction
    #[arg(long, value_name = "FRACTION")]
    budget: Option<f64>,
    /// Budget kind for --budget
    #[arg(long, value_enum, requires = "budget")]
    budget_kind: Option<BudgetKindArg>,
}

#[derive(Args)]
struct CompareArgs {
    /// Results CSV files produced by `evaluate`
    #[arg(required = true, value_name = "RESULTS")]
    results: Vec<PathBuf>,
    /// Indicator column to compare on
    #[arg(long, default_value = "mcc")]
    indicator: String,
    /// Rank orientation; defaults to the indicator's natural one
    #[arg(long, value_enum)]
    polarity: Option<PolarityArg>,
    /// Keep only rows with this budget kind
    #[arg(long, value_enum)]
    budget_kind: Option<BudgetKindArg>,
    /// Keep only rows with this budget fraction
    #[arg(long, value_name = "FRACTION")]
    budget: Option<f64>,
    /// Compare results files even if their config hashes differ
    #[arg(long)]
    force: bool,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunOverrides,
    /// Quantity the sweep varies
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Grid points (comma-separated fractions)
    #[arg(long, value_name = "LIST", value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    /// Budget kind for the budget-fraction axis
    #[arg(long, value_enum, default_value = "snm")]
    budget_kind: BudgetKindArg,
    /// Report only this indicator instead of the configured list
    #[arg(long)]
    indicator: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Path to the JSON run configuration
    #[arg(long, value_name = "JSON")]
    config: PathBuf,
    /// Exit nonzero if any release fails
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct OneRankArgs {
    /// Release CSV (canonical columns: id, sloc, optional label, metrics)
    input: PathBuf,
    /// Code-size share excluded from the top of the ranking
    #[arg(long, default_value_t = 0.2)]
    excluded: f64,
    /// Output file; stdout if omitted
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BudgetKindArg {
    Snm,
    Ssc,
}

impl From<BudgetKindArg> for BudgetKind {
    fn from(arg: BudgetKindArg) -> Self {
        match arg {
            BudgetKindArg::Snm => BudgetKind::Snm,
            BudgetKindArg::Ssc => BudgetKind::Ssc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarityArg {
    Higher,
    Lower,
}

impl From<PolarityArg> for Polarity {
    fn from(arg: PolarityArg) -> Self {
        match arg {
            PolarityArg::Higher => Polarity::HigherIsBetter,
            PolarityArg::Lower => Polarity::LowerIsBetter,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    /// Vary the budget fraction
    BudgetFraction,
    /// Vary the share of code excluded from the top of the ONE ranking
    ExcludedPct,
}

/// A command-line value that fails its semantic check; exits with code 1.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<matter_core::Error>().map(|e| e.kind()) {
        Some(ErrorKind::Model) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Evaluate(args) => run_evaluate(args),
        Command::Compare(args) => run_compare(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Validate(args) => run_validate(args),
        Command::OneRank(args) => run_one_rank(args),
    }
}

/// Loads the config and applies the shared command-line overrides; returns
/// the effective config, the directory paths resolve against, and the output
/// directory.
fn load_with_overrides(run: &RunOverrides) -> anyhow::Result<(RunConfig, PathBuf, PathBuf)> {
    let (mut config, base) = RunConfig::load(&run.config)?;
    if let Some(seed) = run.seed {
        config.seed = seed;
    }
    if let Some(models) = &run.models {
        for name in models {
            config::parse_model(name).map_err(|e| usage(e.to_string()))?;
        }
        config.models = models.clone();
    }
    let out_dir = match &run.out {
        Some(dir) => dir.clone(),
        None => resolve(&base, &config.output_dir),
    };
    Ok((config, base, out_dir))
}

fn run_evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let (mut config, base, out_dir) = load_with_overrides(&args.run)?;
    if let Some(fraction) = args.budget {
        let kind = args.budget_kind.map_or(BudgetKind::Snm, BudgetKind::from);
        let budget =
            matter_core::EffortBudget::new(kind, fraction).map_err(|e| usage(e.to_string()))?;
        config.budgets = vec![budget];
    }
    let rows = commands::cmd_evaluate(&config, &base, &out_dir)?;
    println!(
        "wrote {rows} result rows to {}",
        out_dir.join("results.csv").display()
    );
    Ok(())
}

fn run_compare(args: CompareArgs) -> anyhow::Result<()> {
    let polarity = match args.polarity {
        Some(polarity) => Polarity::from(polarity),
        None => Polarity::for_indicator(&args.indicator).ok_or_else(|| {
            usage(format!(
                "indicator {:?} has no default rank orientation; pass --polarity",
                args.indicator
            ))
        })?,
    };
    let spec = CompareSpec {
        indicator: args.indicator,
        polarity,
        budget_kind: args.budget_kind.map(BudgetKind::from),
        budget_fraction: args.budget,
        force: args.force,
    };
    commands::cmd_compare(&args.results, &spec, &args.out)?;
    println!(
        "wrote grouping.csv, grouping.json, pairwise_delta.csv to {}",
        args.out.display()
    );
    Ok(())
}

fn run_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let (mut config, base, out_dir) = load_with_overrides(&args.run)?;
    if let Some(indicator) = args.indicator {
        if !config::sweep_indicator_is_known(&indicator) {
            return Err(usage(format!("unknown indicator {indicator:?}")));
        }
        config.indicators = vec![indicator];
    }
    let axis = match args.axis {
        AxisArg::BudgetFraction => SweepAxis::BudgetFraction(args.budget_kind.into()),
        AxisArg::ExcludedPct => SweepAxis::ExcludedShare,
    };
    for &point in &args.grid {
        axis.check_point(point).map_err(|e| usage(e.to_string()))?;
    }
    let rows = commands::cmd_sweep(&config, &base, &out_dir, axis, &args.grid)?;
    println!(
        "wrote {rows} sweep rows to {}",
        out_dir.join("sweep.csv").display()
    );
    Ok(())
}

fn run_validate(args: ValidateArgs) -> anyhow::Result<()> {
    let (config, base) = RunConfig::load(&args.config)?;
    let lines = commands::cmd_validate(&config, &base)?;
    let mut failures = 0usize;
    for line in &lines {
        if line.reasons.is_empty() {
            println!("release {}: pass", line.label);
        } else {
            failures += 1;
            println!("release {}: fail ({})", line.label, line.reasons.join("; "));
        }
    }
    println!(
        "validated {} release(s): {} pass, {} fail",
        lines.len(),
        lines.len() - failures,
        failures
    );
    if args.strict && failures > 0 {
        return Err(anyhow::Error::new(matter_core::Error::data(format!(
            "{failures} release(s) failed validation"
        ))));
    }
    Ok(())
}

fn run_one_rank(args: OneRankArgs) -> anyhow::Result<()> {
    matter_core::OneConfig::new(args.excluded).map_err(|e| usage(e.to_string()))?;
    commands::cmd_one_rank(&args.input, args.excluded, args.out.as_deref())?;
    Ok(())
}
