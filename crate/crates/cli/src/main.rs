use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use litscan_cli::{
    check_stage_requirements, configured_stages, emit_plot_data, run_pipeline, write_canonical,
    Overrides, PlotKind, RunConfig, Stage,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_STAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "litscan",
    version,
    about = "Corpus analytics over annotated literature collections",
    after_help = "Exit codes: 0 success, 2 configuration error, 3 stage error."
)]
struct Cli {
    /// Run configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config file).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Abort on the first malformed input line.
    #[arg(long, global = true)]
    strict: bool,

    /// Skip malformed input lines and count them.
    #[arg(long, global = true, conflicts_with = "strict")]
    lenient: bool,

    /// Worker threads (0 = all cores; overrides the config file).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the inputs and write the canonical corpus export.
    Ingest,
    /// Weekly growth curve and category statistics.
    Stats,
    /// Synonym-merged entity counts and weekly trends.
    Entities,
    /// Dictionary tagging: symptom counts, tree groups, organ and
    /// finding reports.
    Symptoms,
    /// Two-corpus significance comparison.
    Compare,
    /// Topic discovery: clusters, titles, onsets, category heatmap.
    Topics,
    /// Emit plot-ready datasets (all kinds by default).
    Report {
        /// Dataset kind; repeatable.
        #[arg(long = "kind", value_name = "KIND")]
        kinds: Vec<String>,
    },
    /// Run every stage the configuration supports.
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let Some(config_path) = cli.config.clone() else {
        eprintln!("error: --config <PATH> is required");
        return ExitCode::from(EXIT_CONFIG);
    };
    let overrides = Overrides {
        out: cli.out.clone(),
        strict: match (cli.strict, cli.lenient) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        },
        threads: cli.threads,
    };
    let config = match RunConfig::load(&config_path, &overrides) {
        Ok(config) => config,
        Err(error) => {
            eprintln!("configuration error: {error}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    match run(&cli.command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunFailure::Config(message)) => {
            eprintln!("configuration error: {message}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunFailure::Stage(message)) => {
            eprintln!("stage error: {message}");
            ExitCode::from(EXIT_STAGE)
        }
    }
}

enum RunFailure {
    Config(String),
    Stage(String),
}

fn run(command: &Command, config: &RunConfig) -> Result<(), RunFailure> {
    let stages: BTreeSet<Stage> = match command {
        Command::Ingest => BTreeSet::new(),
        Command::Stats => [Stage::Stats].into(),
        Command::Entities => [Stage::Entities].into(),
        Command::Symptoms => [Stage::Symptoms].into(),
        Command::Compare => [Stage::Compare].into(),
        Command::Topics => [Stage::Topics].into(),
        Command::All => configured_stages(config),
        Command::Report { kinds } => {
            let parsed = parse_kinds(kinds, config)?;
            parsed.iter().map(|kind| kind.stage()).collect()
        }
    };
    check_stage_requirements(config, &stages).map_err(RunFailure::Config)?;

    let mut report =
        run_pipeline(config, &stages).map_err(|error| RunFailure::Stage(error.to_string()))?;

    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }

    match command {
        Command::Ingest => {
            write_canonical(&mut report).map_err(|error| RunFailure::Stage(error.to_string()))?;
            report
                .write_manifest()
                .map_err(|error| RunFailure::Stage(error.to_string()))?;
        }
        Command::Report { kinds } => {
            for kind in parse_kinds(kinds, config)? {
                emit_plot_data(&mut report, kind)
                    .map_err(|error| RunFailure::Stage(error.to_string()))?;
            }
            report
                .write_manifest()
                .map_err(|error| RunFailure::Stage(error.to_string()))?;
        }
        _ => {}
    }

    if let Some((_, message)) = &report.failure {
        eprintln!("stage error: {message}");
        eprintln!(
            "completed outputs were kept in {}",
            report.out_dir.display()
        );
        return Err(RunFailure::Stage(message.clone()));
    }

    println!(
        "wrote {} output file(s) to {} (fingerprint {})",
        report.outputs.len(),
        report.out_dir.display(),
        report.fingerprint
    );
    for entry in &report.outputs {
        println!("  {}\t{} rows\t[{}]", entry.name, entry.rows, entry.stage);
    }
    Ok(())
}

fn parse_kinds(names: &[String], config: &RunConfig) -> Result<Vec<PlotKind>, RunFailure> {
    if names.is_empty() {
        // Default to every dataset the configuration can produce;
        // explicitly requested kinds still error when inputs are missing.
        return Ok(PlotKind::ALL
            .into_iter()
            .filter(|kind| kind.available(config))
            .collect());
    }
    names
        .iter()
        .map(|name| {
            PlotKind::parse(name).ok_or_else(|| {
                RunFailure::Config(format!(
                    "unknown plot kind `{name}` (expected one of: {})",
                    PlotKind::ALL
                        .iter()
                        .map(|kind| kind.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
        })
        .collect()
}
