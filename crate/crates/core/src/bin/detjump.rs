//! Command-line front end for detuning-jump sweeps.
//!
//! Exit codes: 0 success, 1 config error, 2 partial failure (some nodes NaN),
//! 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use detjump::sweep::output::{self, OutputFormat};
use detjump::sweep::{self, config, OutputKind, RunConfig, SweepResult};
use detjump::{Error, ShapeKind};

#[derive(Parser)]
#[command(name = "detjump", version, about = "Population transfer by a detuning sign jump")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// One run at the first grid values (default Omega0 T = Delta0 T = 5).
    Single,
    /// Omega0 T cut at one Delta0 T (default 5).
    Fig1,
    /// Full Omega0 T x Delta0 T grid (default 100 x 100 over (0, 10]).
    Grid,
    /// Three-level transition table for all initial states (default Omega0 T = 8, Delta0 T = 2).
    Table3,
}

#[derive(Args)]
struct Common {
    /// Run configuration file (`key: value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[arg(long, global = true)]
    shape: Option<ShapeKind>,
    /// Detuning ramp time in units of T (0 = ideal step).
    #[arg(long, global = true)]
    tau_jump: Option<f64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Omega0 T values, e.g. `5` or `0.1:10:0.1`.
    #[arg(long, global = true)]
    omega0: Option<String>,
    /// Delta0 T values.
    #[arg(long, global = true)]
    delta0: Option<String>,
    #[arg(long, global = true)]
    system: Option<String>,
    #[arg(long, global = true)]
    initial_state: Option<usize>,
}

fn load_config(cmd: Command, common: &Common) -> detjump::Result<RunConfig> {
    let base = match cmd {
        Command::Single => RunConfig::single(),
        Command::Fig1 => RunConfig::fig1(),
        Command::Grid => RunConfig::default(),
        Command::Table3 => RunConfig::table3(),
    };
    let mut cfg = match &common.config {
        Some(path) => config::parse_config_file(path, base)?,
        None => base,
    };
    let overrides = [
        ("shape", common.shape.map(|s| s.to_string())),
        ("tau_jump", common.tau_jump.map(|x| x.to_string())),
        ("tolerance", common.tolerance.map(|x| x.to_string())),
        ("omega0", common.omega0.clone()),
        ("delta0", common.delta0.clone()),
        ("system", common.system.clone()),
        ("initial_state", common.initial_state.map(|x| x.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn formats(cfg: &RunConfig) -> Vec<OutputFormat> {
    let mut f = vec![OutputFormat::Csv, OutputFormat::JsonLines];
    if cfg.outputs.contains(&OutputKind::ResidualMap) || cfg.outputs.contains(&OutputKind::AnalyticOverlay) {
        f.push(OutputFormat::Matrix);
        f.push(OutputFormat::Gnuplot);
    }
    f
}

fn run(cli: &Cli) -> detjump::Result<SweepResult> {
    let cfg = load_config(cli.command, &cli.common)?;
    let out = &cli.common.out;
    let workers = cli.common.workers;
    let (result, stem) = match cli.command {
        Command::Single => {
            let single = sweep::run_single(&cfg)?;
            if let Some(traj) = &single.trajectory {
                std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
                output::emit_trajectory(traj, cfg.system.dimension(), &out.join("trajectory.csv"))?;
            }
            (single.result, "single")
        }
        Command::Fig1 => (sweep::run_fig1_cut(&cfg, workers)?, "fig1"),
        Command::Grid => (sweep::run_grid(&cfg, workers)?, "grid"),
        Command::Table3 => (sweep::run_three_level_table(&cfg, workers)?, "table3"),
    };
    let paths = output::emit_outputs(&result, &formats(&cfg), out, stem)?;
    std::fs::write(out.join(format!("{stem}.config")), cfg.emit())
        .map_err(|e| Error::Io { path: out.join(format!("{stem}.config")), source: e })?;
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(result)
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
    match run(&cli) {
        Ok(result) => {
            for row in &result.rows {
                let num: Vec<String> = row.p_numeric.iter().map(|p| format!("{p:.6}")).collect();
                let ana: Vec<String> = row.p_analytic.iter().map(|p| format!("{p:.6}")).collect();
                if result.rows.len() <= 12 {
                    println!(
                        "Omega0T={} Delta0T={} start=|{}>  numeric=[{}]  analytic=[{}]  residual={:+.3e}",
                        row.omega0_t,
                        row.delta0_t,
                        row.initial_state,
                        num.join(", "),
                        ana.join(", "),
                        row.residual
                    );
                }
            }
            for row in result.rows.iter().filter(|r| r.failed()) {
                eprintln!(
                    "node Omega0T={} Delta0T={} start=|{}> failed: {}",
                    row.omega0_t,
                    row.delta0_t,
                    row.initial_state,
                    row.error.as_deref().unwrap_or("")
                );
            }
            let failed = result.failed_rows();
            println!(
                "{} rows, max |residual| = {:.3e}, {failed} failed",
                result.rows.len(),
                result.max_abs_residual(|r| !r.failed())
            );
            if failed > 0 {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 3,
                _ => 1,
            })
        }
    }
}
