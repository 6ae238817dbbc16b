use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lte_runner::commands;
use lte_runner::config::ScenarioConfig;
use lte_runner::verify;

/// Local-equilibrium laboratory: cross-checked thermodynamics, hydrodynamics,
/// fluctuation fields and finite-volume quantum statistics on solvable models.
#[derive(Parser)]
#[command(name = "lte-lab", version, about)]
struct Cli {
    /// Scenario configuration (TOML). A built-in driven-paramagnet scenario
    /// is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's output dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Substring filter for `verify`.
    #[arg(long, global = true, default_value = "")]
    filter: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate s, pi and pi'' for the configured model.
    Thermo,
    /// Integrate the hydrodynamic scenario and report diagnostics.
    Hydro,
    /// Fluctuation-field sampling checks.
    Fluct,
    /// Reduced-pressure convergence, completeness, restriction checks.
    Quantum,
    /// Probe thermalization at the configured temperature.
    Zeroth,
    /// Full composition across all levels; exit 0 iff every check passes.
    Pipeline,
    /// Run the invariant suites (optionally filtered by --filter).
    Verify,
}

fn load(cli: &Cli) -> Result<(ScenarioConfig, String), lte_runner::ConfigError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            lte_runner::ConfigError(format!("cannot read {}: {e}", path.display()))
        })?,
        None => commands::DEFAULT_CONFIG.to_string(),
    };
    let mut cfg = ScenarioConfig::from_str(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.display().to_string();
    }
    Ok((cfg, text))
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    // LTE_LAB_THREADS caps the worker pool; results do not depend on it.
    if let Ok(threads) = std::env::var("LTE_LAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }

    if matches!(cli.command, Command::Verify) {
        let groups = verify::verify_suite(&cli.filter);
        let ok = verify::print_table(&groups);
        return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
    }

    let (config, raw) = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let dir = PathBuf::from(&config.output.dir);

    let run = || -> anyhow::Result<bool> {
        match cli.command {
            Command::Thermo => commands::cmd_thermo(&config, &dir),
            Command::Hydro => commands::cmd_hydro(&config, &dir),
            Command::Fluct => commands::cmd_fluct(&config, &dir),
            Command::Quantum => commands::cmd_quantum(&config, &dir),
            Command::Zeroth => commands::cmd_zeroth(&config, &dir),
            Command::Pipeline => {
                let outcome = lte_runner::run_pipeline(&config, &raw)?;
                let files = lte_runner::write_outputs(&outcome, &dir)?;
                for f in &files {
                    println!("wrote {}", f.display());
                }
                let (ok, total) = (
                    outcome.report.records.iter().filter(|r| r.pass).count(),
                    outcome.report.records.len(),
                );
                println!(
                    "pipeline: {ok}/{total} checks passed ({})",
                    if outcome.report.pass { "PASS" } else { "FAIL" }
                );
                Ok(outcome.report.pass)
            }
            Command::Verify => unreachable!(),
        }
    };

    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            // configuration-shaped failures exit 2, check failures exit 1
            if e.downcast_ref::<lte_runner::ConfigError>().is_some() {
                eprintln!("{e}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    }
}
