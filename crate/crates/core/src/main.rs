use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use ge_sim::cli::{run, threads_from_env, EXIT_CONFIG, THREADS_ENV};
use ge_sim::config::Mode;

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Mode::ALL.iter().map(|m| m.name()).collect();
        format!("unknown mode {s:?}; expected one of {}", names.join(", "))
    })
}

/// Gravity-induced excitation simulator.
///
/// The worker count of the parallel kernels can be set with GE_SIM_THREADS.
#[derive(Parser)]
#[command(name = "ge-sim", version)]
struct Args {
    /// eigen, pex, visibility, negativity, sn, optomech, oracle, feasibility or validate.
    #[arg(value_parser = parse_mode)]
    mode: Mode,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's output.dir, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Embedded configuration: fig2, fig5 or eq24.
    #[arg(long)]
    preset: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match threads_from_env() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("ge-sim: cannot start {n} workers: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("ge-sim: {e} ({THREADS_ENV})");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    let code = run(
        args.mode,
        args.config.as_deref(),
        args.out.as_deref(),
        args.preset.as_deref(),
    );
    ExitCode::from(code as u8)
}
