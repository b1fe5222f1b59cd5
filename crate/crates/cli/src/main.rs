mod config;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use config::{plan, Cli, Command, Plan};
use splinegabor::experiment::comparison_table;
use splinegabor::run_experiment;

/// Exit code for configurations rejected before any computation.
const CONFIG_ERROR: u8 = 2;

fn run(plan: &Plan) -> Result<()> {
    let single = plan.experiments.len() == 1;
    let mut summary = Vec::new();
    for (name, config) in &plan.experiments {
        log::info!("running {name}");
        let outcome = run_experiment(config).with_context(|| format!("experiment '{name}'"))?;
        let dir = if single { plan.out.clone() } else { plan.out.join(name) };
        output::write_experiment(&dir, name, &outcome)?;
        for r in &outcome.results {
            println!(
                "{name}: N = {:>5}  mean {:.3e}  l2 {:.3e}  max {:.3e}",
                r.budget, r.report.mean, r.report.l2_ratio, r.report.max
            );
        }
        summary.extend(output::summary_records(name, &outcome));
    }
    if !single {
        output::write_summary(&plan.out.join(output::SUMMARY_FILE), &summary)?;
    }
    println!("wrote {}", plan.out.display());
    Ok(())
}

fn table1(plan: &Plan) -> Result<()> {
    let (_, base) = plan.experiments.first().context("no base configuration")?;
    let rows = comparison_table(base);
    output::write_table(&plan.out, &rows)?;
    print!("{}", output::format_table(&rows));
    println!("wrote {}", plan.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (args, job): (_, fn(&Plan) -> Result<()>) = match &cli.command {
        Command::Run(args) => (args, run),
        Command::Table1(args) => (args, table1),
    };
    let plan = match plan(args) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match job(&plan) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
