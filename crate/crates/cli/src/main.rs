//! `critsense`: QFI tables, sweeps, brachistochrone curves and verification
//! suites for su(1,1) critical sensing models.

mod commands;
mod config;
mod error;
mod output;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, ModelId, RunConfig};
use crate::error::CliError;
use crate::output::Table;

#[derive(Parser, Debug)]
#[command(name = "critsense", version, about = "Quantum Fisher information near su(1,1) critical points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// QFI, its six parts and the Cramer-Rao bound on a (λ, t) grid.
    Qfi(Common),
    /// QFI over an estimand and/or zeta grid; time defaults to π.
    Sweep(Common),
    /// Normalised generator curves for several couplings.
    Brachistochrone(Common),
    /// Run the verification suites; exits with 3 if any check fails.
    Verify(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelId>,
    /// Override a config entry, e.g. `--set params.zeta=2` (repeatable).
    #[arg(long = "set", value_name = "PATH=JSON")]
    sets: Vec<String>,
    /// Add brute-force oracle columns.
    #[arg(long)]
    with_oracle: bool,
    /// Drop the h_x term exactly at the critical point.
    #[arg(long, alias = "compat-paper-case-iii")]
    compat_drop_critical_hx: bool,
    /// Number of independent repetitions in the Cramer-Rao bound.
    #[arg(long)]
    nu: Option<u32>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads. Output does not depend on this.
    #[arg(long, short)]
    jobs: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = config::load(self.config.as_deref(), &self.sets)?;
        if let Some(m) = self.model {
            cfg.model = Some(m);
        }
        cfg.with_oracle |= self.with_oracle;
        cfg.compat_drop_critical_hx |= self.compat_drop_critical_hx;
        if let Some(nu) = self.nu {
            cfg.nu = nu;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        Ok(cfg)
    }
}

fn emit(table: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            table.write(cfg.format, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(cfg.format, &mut lock)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, name) = match &cli.command {
        Command::Qfi(c) => (c, "qfi"),
        Command::Sweep(c) => (c, "sweep"),
        Command::Brachistochrone(c) => (c, "brachistochrone"),
        Command::Verify(c) => (c, "verify"),
    };
    let cfg = common.resolve()?;
    let table = match name {
        "qfi" => commands::cmd_qfi(&cfg)?,
        "sweep" => commands::cmd_sweep(&cfg)?,
        "brachistochrone" => commands::cmd_brachistochrone(&cfg)?,
        _ => {
            let (table, ok) = verify::cmd_verify(&cfg)?;
            emit(&table, &cfg)?;
            if !ok {
                let summary = table.meta.iter().find(|(k, _)| k == "summary").map(|(_, v)| v.clone());
                return Err(CliError::Verify(summary.unwrap_or_default()));
            }
            return Ok(());
        }
    };
    emit(&table, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("critsense: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
