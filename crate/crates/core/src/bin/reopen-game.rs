use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reopen_game::experiment::{
    dump_trajectories, run_scenario, run_suggest, run_sweep, run_verify, write_sweep_csv, Config, Scenario,
    SeverityMode, SweepPlan,
};
use reopen_game::Error;

#[derive(Parser)]
#[command(name = "reopen-game", version, about = "Vaccination game with regime switching on network epidemics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the equilibrium of one configuration.
    Scenario(Common),
    /// Check the complement and substitute properties of vaccination.
    Verify(Common),
    /// Sweep the public precision and write one CSV row per grid value.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// CSV destination; falls back to `sweep.output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the precision region meeting both the reopening target and the
    /// disease-free condition.
    Suggest(Common),
}

#[derive(Args)]
struct Common {
    /// TOML or JSON (by extension) configuration file.
    config: PathBuf,
    #[arg(long, value_enum)]
    severity_mode: Option<SeverityMode>,
    /// Directory for both regimes' trajectory CSVs.
    #[arg(long)]
    dump_trajectories: Option<PathBuf>,
    /// Equilibrium solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

struct Loaded {
    config: Config,
    scenario: Scenario,
}

impl Common {
    fn load(&self) -> Result<Loaded, Error> {
        let mut config = Config::load(&self.config)?;
        if let Some(tol) = self.tol {
            config.solver.tol = tol;
        }
        let scenario = config.scenario()?;
        Ok(Loaded { config, scenario })
    }

    fn sweep_plan(&self, config: &Config) -> Result<SweepPlan, Error> {
        let mut plan = config.sweep_plan()?;
        if let Some(mode) = self.severity_mode {
            plan.severity_mode = mode;
        }
        Ok(plan)
    }

    fn maybe_dump(&self, scenario: &Scenario) -> Result<(), Error> {
        if let Some(dir) = &self.dump_trajectories {
            let report = run_scenario(scenario)?;
            for path in dump_trajectories(scenario, &report, dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Ok(())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Scenario(common) => {
            let loaded = common.load()?;
            let report = run_scenario(&loaded.scenario)?;
            stdout.write_all(report.render().as_bytes())?;
            if let Some(dir) = &common.dump_trajectories {
                for path in dump_trajectories(&loaded.scenario, &report, dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            Ok(0)
        }
        Command::Verify(common) => {
            let loaded = common.load()?;
            let report = run_verify(&loaded.scenario, &loaded.config.verify)?;
            stdout.write_all(report.render(&loaded.scenario.model).as_bytes())?;
            common.maybe_dump(&loaded.scenario)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Sweep { common, out } => {
            let loaded = common.load()?;
            let plan = common.sweep_plan(&loaded.config)?;
            let rows = run_sweep(&loaded.scenario, &plan);
            let dest = out.or_else(|| loaded.config.sweep.as_ref().and_then(|s| s.output.clone()));
            match dest {
                Some(path) => {
                    write_sweep_csv(&rows, fs::File::create(&path)?)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => write_sweep_csv(&rows, &mut stdout)?,
            }
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} of {} grid points failed; see the error column", rows.len());
            }
            common.maybe_dump(&loaded.scenario)?;
            Ok(0)
        }
        Command::Suggest(common) => {
            let loaded = common.load()?;
            let plan = common.sweep_plan(&loaded.config)?;
            let suggestion = run_suggest(&loaded.scenario, &plan);
            stdout.write_all(suggestion.render().as_bytes())?;
            common.maybe_dump(&loaded.scenario)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
