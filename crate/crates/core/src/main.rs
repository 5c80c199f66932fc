use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use moarchive::experiment::{
    classify, compare_experiment, render_compare, render_matrix, run_experiment, write_classify, write_compare,
    write_run, ClassifyConfig, ExperimentConfig,
};

/// Run bounded multi-objective archivers over solution sequences and check
/// which archiver properties they exhibit.
#[derive(Parser)]
#[command(name = "moarchive", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run archivers over a sequence; write trajectories, metrics and a
    /// violation report.
    Run(CommonArgs),
    /// Compare two or more archivers against the unbounded archive.
    Compare(CommonArgs),
    /// Classify archivers by property on random and crafted sequences.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    shared: SharedArgs,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Classification config (JSON); defaults to the desk-scale budgets.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    shared: SharedArgs,
}

#[derive(Args)]
struct SharedArgs {
    /// Output directory (overrides the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment seed (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 2 if any violation is found.
    #[arg(long)]
    fail_on_violation: bool,
}

fn out_dir(shared: &SharedArgs, configured: Option<PathBuf>) -> PathBuf {
    shared.out.clone().or(configured).unwrap_or_else(|| PathBuf::from("out"))
}

/// Violations found, and whether they should fail the process.
fn execute(command: &Command) -> Result<(usize, bool)> {
    match command {
        Command::Run(args) | Command::Compare(args) => {
            let mut cfg =
                ExperimentConfig::load(&args.config).with_context(|| format!("loading {}", args.config.display()))?;
            if let Some(seed) = args.shared.seed {
                cfg.seed = seed;
            }
            let dir = out_dir(&args.shared, cfg.output.clone());
            let violations = if matches!(command, Command::Run(_)) {
                let report = run_experiment(&cfg)?;
                write_run(&report, &dir)?;
                for a in &report.archivers {
                    println!("{}: {} members, {} violations", a.label, a.final_archive.len(), a.violation_count());
                    for (property, count) in a.counts_by_property() {
                        if count > 0 {
                            println!("  {property}: {count} witnesses");
                        }
                    }
                }
                report.violation_count()
            } else {
                let report = compare_experiment(&cfg)?;
                write_compare(&report, &dir)?;
                print!("{}", render_compare(&report));
                report.violation_count()
            };
            println!("wrote {}", dir.display());
            Ok((violations, args.shared.fail_on_violation))
        }
        Command::Classify(args) => {
            let mut cfg = match &args.config {
                Some(path) => ClassifyConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
                None => ClassifyConfig::default(),
            };
            if let Some(seed) = args.shared.seed {
                cfg.seed = seed;
            }
            let dir = out_dir(&args.shared, cfg.output.clone());
            let report = classify(&cfg)?;
            write_classify(&report, &dir)?;
            print!("{}", render_matrix(&report));
            println!("wrote {}", dir.display());
            Ok((report.violation_count(), args.shared.fail_on_violation))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli.command) {
        Ok((violations, true)) if violations > 0 => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
