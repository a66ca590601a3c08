//! Command-line front end: batch runs from a JSON config, the identity
//! suite, and the shifted-disk demonstration.

mod commands;
mod config;
mod output;

pub use commands::{run_config, verify_identities, CliError, IdentityRow, McCheck, RunResult};
pub use config::{ConfigError, MonteCarloSpec, PerturbationSpec, RunConfig, Term, Tolerances, SCHEMA_VERSION};
pub use output::{margins_svg, report_csv, report_json, write_outputs};

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::inequalities::{shift_counterexample, CheckId};
use crate::sphere_core::build_grid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const THREADS_ENV: &str = "BM_STABILITY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "bm-stability", version, about = "Brunn-Minkowski stability checks near the ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the checks listed in a config file and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write margins.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Print residuals of the structural identities.
    VerifyIdentities {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 48)]
        resolution: usize,
        /// Take the measure (and n, resolution) from a run config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Geometric mean of a shifted disk and the unit disk.
    DemoShift {
        #[arg(long, default_value_t = 0.3)]
        t: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
    },
    /// List the available checks.
    ListChecks,
}

fn init_threads() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => eprintln!("warning: ignoring {THREADS_ENV}={v}"),
        }
    }
}

fn exit_for(e: &CliError) -> i32 {
    eprintln!("error: {e}");
    EXIT_CONFIG
}

fn cmd_run(config: PathBuf, out: Option<PathBuf>, svg: bool) -> i32 {
    let cfg = match RunConfig::load(&config) {
        Ok(c) => c,
        Err(e) => return exit_for(&e.into()),
    };
    let result = match run_config(&cfg) {
        Ok(r) => r,
        Err(e) => return exit_for(&e),
    };
    let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("bm-stability-out"));
    if let Err(e) = write_outputs(&dir, &cfg, &result, svg) {
        return exit_for(&e);
    }
    let failed = result.reports.iter().filter(|r| !r.pass).count();
    println!(
        "{} reports, {} failed, minimum margin {:.3e}; written to {}",
        result.reports.len(),
        failed,
        crate::inequalities::min_margin(&result.reports),
        dir.display()
    );
    if let Some(mc) = &result.monte_carlo {
        println!(
            "monte carlo: {:.6} +- {:.1e} vs quadrature {:.6} ({:.2} sigma)",
            mc.estimate.value, mc.estimate.std_error, mc.quadrature, mc.sigmas
        );
    }
    if result.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn cmd_identities(n: usize, resolution: usize, config: Option<PathBuf>) -> i32 {
    let (n, resolution, measure) = match config {
        Some(path) => match RunConfig::load(&path) {
            Ok(c) => (c.n, c.resolution, Some(c.measure)),
            Err(e) => return exit_for(&e.into()),
        },
        None => (n, resolution, None),
    };
    let rows = match verify_identities(n, resolution, measure.as_ref()) {
        Ok(r) => r,
        Err(e) => return exit_for(&e),
    };
    println!("{:<48} {:>12} {:>10}  status", "identity", "residual", "tolerance");
    for r in &rows {
        println!("{:<48} {:>12.3e} {:>10.0e}  {}", r.name, r.residual, r.tolerance, if r.ok { "ok" } else { "FAIL" });
    }
    if rows.iter().all(|r| r.ok) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn cmd_demo_shift(t: f64, lambda: f64, radius: f64, resolution: usize) -> i32 {
    let rep = build_grid(2, resolution)
        .map_err(CliError::from)
        .and_then(|g| Ok(shift_counterexample(radius, t, lambda, &g)?));
    match rep {
        Ok(r) => {
            println!("area of geometric mean  {:.9}", r.lhs);
            println!("pi R^2                  {:.9}", r.rhs);
            println!("margin                  {:.6e}", r.margin);
            if let Some(o) = &r.oracle {
                println!("quadrature area         {:.9} (difference {:.2e})", o.value, o.diff);
            }
            if let Some(c) = r.details.get("closed_form_area") {
                println!("closed form             {c:.9}");
            }
            println!("expected failure        {}", r.expected_failure);
            if r.pass {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => exit_for(&e),
    }
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    init_threads();
    match cli.command {
        Command::Run { config, out, svg } => cmd_run(config, out, svg),
        Command::VerifyIdentities { n, resolution, config } => cmd_identities(n, resolution, config),
        Command::DemoShift { t, lambda, radius, resolution } => cmd_demo_shift(t, lambda, radius, resolution),
        Command::ListChecks => {
            for c in CheckId::ALL {
                println!("{:<24} {}", c.as_str(), c.description());
            }
            EXIT_OK
        }
    }
}
