mod commands;
mod config;
mod error;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Overrides, RunConfig};
use error::CliError;

const CONFIG_HELP: &str = "\
Configuration (TOML; preset < --config file < flags):
  [physical]  m, hbar, T, N (>= 2), x0                      all required
  [potential] name = free | rosen-morse | smooth-step | truncated-double-well
              | gaussian-double-well | harmonic; V0, alpha, depth or omega
  [lattice]   x_min = -50, x_max = 50, M = 4096, pad_factor = 2
  [method]    mode = quadrature, node_count = 100, angle = adaptive
              (| half-max | fraction | fixed, with angle_value),
              tolerance = 1e-13, refine_tolerance = 1e-8, max_nodes = 4096,
              newton_tol = 1e-12, newton_max_iter = 50
  [output]    directory = out
  [field]     x0_min = -15, x0_max = 15, x0_count = 61, x1_min/x1_max = lattice
  [caustics]  x0_min = x0_max = physical.x0, x0_count = 1,
              v0_min = -5, v0_max = 5, v0_count = 1001, time_steps = 0
  [converge]  N_list = [physical.N], A = x_min, B = x_max, eikonal_from (unset)
  [state]     mu, sigma, p0 = 0, crank_steps (unset), crank_refine = 1

Presets: rosen-morse-fig2, rosen-morse-fig3, rosen-morse-fig5,
  rosen-morse-fig6-n{5,10,15}, smooth-step-fig8-n{5,10,20}, rosen-morse-fig9

Exit codes: 0 success, 1 configuration, 2 numerical failure, 3 I/O.
meta.json is written to the output directory on every run.";

/// Real-time lattice path integrals in one dimension by stitching.
#[derive(Debug, Parser)]
#[command(name = "pathstitch", version, after_long_help = CONFIG_HELP)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named parameter set of a published figure.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory (overrides output.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// J_n evaluation mode (overrides method.mode).
    #[arg(long, global = true, value_parser = ["quadrature", "eikonal"])]
    mode: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// G_n(x1, x0) for n = 1..N on the lattice: propagator.csv.
    Propagate,
    /// G_N(x1, x0) over the [field] grid of x0: field.csv.
    Field,
    /// Exact Rosen-Morse propagator: exact.csv.
    ExactRm {
        /// Evaluate over the [field] grid instead of the single physical.x0.
        #[arg(long)]
        field: bool,
    },
    /// Caustics of the continuum flow: caustics.csv (and caustics_time.csv).
    Caustics,
    /// ε_N against the exact propagator over converge.N_list: converge.csv.
    Converge,
    /// Gaussian packet from [state]: evolve.csv (and crank.csv).
    Evolve,
    /// J_n and J̄_n for n = 2..N: jn.csv.
    DumpJn,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Propagate => "propagate",
            Command::Field => "field",
            Command::ExactRm { .. } => "exact-rm",
            Command::Caustics => "caustics",
            Command::Converge => "converge",
            Command::Evolve => "evolve",
            Command::DumpJn => "dump-jn",
        }
    }
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<commands::Report, CliError> {
    match cli.command {
        Command::Propagate => commands::propagate(cfg),
        Command::Field => commands::field(cfg),
        Command::ExactRm { field } => commands::exact_rm(cfg, field),
        Command::Caustics => commands::caustic_curves(cfg),
        Command::Converge => commands::converge(cfg),
        Command::Evolve => commands::evolve(cfg),
        Command::DumpJn => commands::dump_jn(cfg),
    }
}

fn write_meta(dir: &std::path::Path, meta: serde_json::Value) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    output::write_json(&dir.join("meta.json"), &meta)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let started = Instant::now();
    let overrides = Overrides { out: cli.out.clone(), mode: cli.mode.clone() };
    let command = cli.command.name();

    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads: must be ≥ 1");
            return ExitCode::from(1);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }

    let cfg = match config::load(cli.config.as_deref(), cli.preset.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(dir) = config::output_hint(cli.config.as_deref(), cli.preset.as_deref(), &overrides) {
                let meta = json!({
                    "command": command,
                    "status": "error",
                    "error": { "kind": e.kind(), "exit_code": e.exit_code(), "message": e.to_string() },
                    "config": null,
                    "wall_time_s": started.elapsed().as_secs_f64(),
                });
                let _ = write_meta(&dir, meta);
            }
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    if let Err(e) = std::fs::create_dir_all(&cfg.output) {
        eprintln!("error: {}: {e}", cfg.output.display());
        return ExitCode::from(3);
    }
    let result = run(&cli, &cfg);
    let mut meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "mode": cfg.mode,
        "config": cfg,
        "threads": rayon::current_num_threads(),
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    let code = match &result {
        Ok(report) => {
            meta["status"] = json!("ok");
            meta["files"] = json!(report
                .files
                .iter()
                .filter_map(|f| f.file_name())
                .map(|f| f.to_string_lossy())
                .collect::<Vec<_>>());
            meta["details"] = report.details.clone();
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            meta["status"] = json!("error");
            meta["error"] = json!({ "kind": e.kind(), "exit_code": e.exit_code(), "message": e.to_string() });
            e.exit_code()
        }
    };
    if let Err(e) = write_meta(&cfg.output, meta) {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    ExitCode::from(code as u8)
}
