use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plsigma_cli::commands::{catalog_entry, catalog_list};
use plsigma_cli::{cmd_construct, cmd_simulate, cmd_verify, to_json, CliError, ModelConfig, Overrides, PointSpec};

/// Poisson-Lie structures and lattice sigma models.
///
/// CONFIG is a JSON model file or `catalog:<name>` (e.g. `catalog:example_beta:-2`).
#[derive(Parser)]
#[command(name = "plsigma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Override the default relative tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Override the sampling and lattice seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json and CSV tables.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full check battery; exit 1 if any check fails.
    Verify {
        config: String,
        /// Number of random sample points.
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate Π, the chart bivector P and the frame e as CSV.
    Construct {
        config: String,
        /// Seeded random points in the sampling box.
        #[arg(long, conflicts_with_all = ["grid", "at"])]
        points: Option<usize>,
        /// Tensor grid with this many nodes per axis (default 5).
        #[arg(long, conflicts_with = "at")]
        grid: Option<usize>,
        /// Explicit comma-separated point; repeatable.
        #[arg(long, value_delimiter = ';')]
        at: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Flat-then-integrate refinement study with the variation probe.
    Simulate {
        config: String,
        /// Node count per direction on the coarsest grid.
        #[arg(long)]
        grid: Option<usize>,
        /// Number of refinements (spacing halved each time).
        #[arg(long)]
        refine: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// List, show or export built-in models.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Entry data including checkpoints, as JSON.
    Show { name: String },
    /// Entry as a config file.
    Export {
        name: String,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn parse_point(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Input(format!("--at {text}: {e}"))))
        .collect()
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Verify { config, points, common } => {
            let overrides = Overrides {
                tolerance: common.tolerance,
                seed: common.seed,
                points,
                ..Default::default()
            };
            let config = overrides.apply(ModelConfig::load(&config)?)?;
            let report = cmd_verify(&config)?;
            let json = to_json(&report);
            if let Some(dir) = &common.output_dir {
                write_file(dir, "report.json", &json)?;
            }
            print!("{json}");
            for r in report.reports.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {}: defect {:e} > {:e}{}", r.check_name, r.max_defect, r.tolerance,
                    r.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default());
            }
            Ok(report.summary.pass)
        }
        Command::Construct { config, points, grid, at, common } => {
            let overrides = Overrides {
                tolerance: common.tolerance,
                seed: common.seed,
                ..Default::default()
            };
            let config = overrides.apply(ModelConfig::load(&config)?)?;
            let spec = if let Some(p) = points {
                PointSpec::Random(p)
            } else if !at.is_empty() {
                PointSpec::Explicit(at.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?)
            } else {
                PointSpec::Grid(grid.unwrap_or(5))
            };
            let table = cmd_construct(&config, &spec)?;
            match &common.output_dir {
                Some(dir) => write_file(dir, "construct.csv", &table)?,
                None => print!("{table}"),
            }
            Ok(true)
        }
        Command::Simulate { config, grid, refine, common } => {
            let overrides = Overrides {
                tolerance: common.tolerance,
                seed: common.seed,
                grid,
                refine,
                ..Default::default()
            };
            let config = overrides.apply(ModelConfig::load(&config)?)?;
            let sim = cmd_simulate(&config)?;
            let json = to_json(&sim.report);
            if let Some(dir) = &common.output_dir {
                write_file(dir, "report.json", &json)?;
                for (name, contents) in &sim.snapshots {
                    write_file(dir, name, contents)?;
                }
            }
            print!("{json}");
            Ok(sim.report.summary.pass)
        }
        Command::Catalog { action } => {
            match action {
                CatalogAction::List => print!("{}", catalog_list()),
                CatalogAction::Show { name } => print!("{}", to_json(&catalog_entry(&name)?)),
                CatalogAction::Export { name, output_dir } => {
                    let json = to_json(&ModelConfig::from_entry(&catalog_entry(&name)?));
                    match output_dir {
                        Some(dir) => write_file(&dir, &format!("{name}.json"), &json)?,
                        None => print!("{json}"),
                    }
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("plsigma: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
