//! Batch driver for the verification suites.
//!
//! Exit codes: 0 all checks pass, 1 a tolerance check failed, 2 config
//! error, 3 internal numeric error.

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use symvar_lab::cli::{run, Command, RunConfig};
use symvar_lab::error::Error;

#[derive(Parser)]
#[command(name = "symvar-lab", version, about = "curvature-functional verification lab")]
struct Args {
    /// suite to run
    #[arg(value_enum)]
    command: CommandArg,
    /// JSON config file (defaults apply when omitted)
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory for CSVs and report.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker pool width (default: one per core)
    #[arg(long)]
    jobs: Option<usize>,
    /// override a numeric config field, e.g. --set m=2 --set eps_grid.count=7
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CommandArg {
    Curvature,
    Functional,
    ModelScan,
    SchwarzschildVerify,
    KasnerScan,
    AuditB8,
    All,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Command {
        match c {
            CommandArg::Curvature => Command::Curvature,
            CommandArg::Functional => Command::Functional,
            CommandArg::ModelScan => Command::ModelScan,
            CommandArg::SchwarzschildVerify => Command::SchwarzschildVerify,
            CommandArg::KasnerScan => Command::KasnerScan,
            CommandArg::AuditB8 => Command::AuditB8,
            CommandArg::All => Command::All,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();

    let mut cfg = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match RunConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            },
            Err(e) => {
                eprintln!("config error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    cfg.command = args.command.into();
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    cfg = match cfg.with_overrides(&args.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if cfg.jobs > 0 {
            b = b.num_threads(cfg.jobs);
        }
        match b.build() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("config error: thread pool: {e}");
                return ExitCode::from(2);
            }
        }
    };

    let out_dir = args.out.clone();
    let result = pool.install(|| run(&cfg, out_dir.as_deref()));
    match result {
        Ok(report) => {
            for r in &report.rows {
                println!(
                    "{} {:<32} value={:+.10e} target={:+.10e} [{}]",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.id,
                    r.value,
                    r.target,
                    r.reference
                );
            }
            println!(
                "{}: {} checks, overall {}",
                report.command,
                report.rows.len(),
                if report.overall_pass { "PASS" } else { "FAIL" }
            );
            if report.overall_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::Input(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("numeric error: {e}");
            ExitCode::from(3)
        }
    }
}
