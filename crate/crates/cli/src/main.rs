use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use panelfactor::factor::DEFAULT_RMAX;
use panelfactor::Month;
use panelfactor_cli::commands::render_validation;
use panelfactor_cli::config::{default_drop, parse_list, parse_penalties};
use panelfactor_cli::{cmd_analyze, cmd_simulate, cmd_validate, Failure, Format, RunConfig, SimConfig};

#[derive(Parser)]
#[command(name = "panelfactor", version)]
#[command(about = "Factor analysis of FRED-MD style monthly macro panels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a panel and report its shape, missing cells and tcodes
    Validate {
        #[arg(long)]
        input: PathBuf,
        /// Sidecar metadata CSV (id,mnemonic,tcode,group,description)
        #[arg(long)]
        meta: Option<PathBuf>,
        /// Print the report as JSON instead of text
        #[arg(long)]
        format: Option<Format>,
    },
    /// Transform, balance, estimate factors and write result files
    Analyze(AnalyzeArgs),
    /// Estimate planted factor models and report recovery
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct SelectionArgs {
    /// Largest factor count scored by the information criteria
    #[arg(long, default_value_t = DEFAULT_RMAX)]
    rmax: usize,
    /// Penalties to evaluate
    #[arg(long, default_value = "g1,g2,g3")]
    penalty: String,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    meta: Option<PathBuf>,
    /// First month of the balanced window (YYYY-MM)
    #[arg(long, default_value = "2009-09")]
    start: Month,
    /// Last month of the balanced window (YYYY-MM)
    #[arg(long, default_value = "2024-12")]
    end: Month,
    /// Series to leave out, comma separated; "none" for none
    #[arg(long)]
    drop: Option<String>,
    /// Use this many factors instead of the information-criterion choice
    #[arg(long)]
    r: Option<usize>,
    /// Rescale factors to unit variance (loadings absorb the scale)
    #[arg(long)]
    unit_variance: bool,
    #[command(flatten)]
    sel: SelectionArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 80)]
    q: usize,
    #[arg(long, default_value_t = 184)]
    t: usize,
    /// Number of planted factors
    #[arg(long, default_value_t = 4)]
    r_true: usize,
    /// Idiosyncratic noise standard deviation
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// First seed; replications use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[command(flatten)]
    sel: SelectionArgs,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let penalties = |s: &str| parse_penalties(s).map_err(|e| Failure::input(anyhow::anyhow!(e)));
    match cli.command {
        Command::Validate { input, meta, format } => {
            let report = cmd_validate(&input, meta.as_deref())?;
            match format {
                Some(f) => print!("{}", render_validation(&report, f)),
                None => print!("{}", report.render_text()),
            }
        }
        Command::Analyze(a) => {
            let mut cfg = RunConfig::new(a.input, a.sel.out);
            cfg.meta = a.meta;
            cfg.start = a.start;
            cfg.end = a.end;
            cfg.drop = a.drop.as_deref().map(parse_list).unwrap_or_else(default_drop);
            cfg.rmax = a.sel.rmax;
            cfg.penalties = penalties(&a.sel.penalty)?;
            cfg.r = a.r;
            cfg.format = a.sel.format;
            cfg.unit_variance = a.unit_variance;
            let m = cmd_analyze(&cfg)?;
            println!(
                "q={} T={} r={} ({}) r_hat={} variance_explained={}",
                m["panel"]["q"], m["panel"]["T"], m["r"], m["r_source"].as_str().unwrap_or(""), m["r_hat"],
                m["variance_explained"]
            );
            println!("wrote {}", cfg.out.display());
        }
        Command::Simulate(s) => {
            let mut cfg = SimConfig::new(s.sel.out);
            cfg.q = s.q;
            cfg.t = s.t;
            cfg.r_true = s.r_true;
            cfg.noise_sd = s.noise;
            cfg.seed = s.seed;
            cfg.reps = s.reps;
            cfg.rmax = s.sel.rmax;
            cfg.penalties = penalties(&s.sel.penalty)?;
            cfg.format = s.sel.format;
            let report = cmd_simulate(&cfg)?;
            let m = &report.manifest;
            println!(
                "recovery_rate={} mean_fit={} min_fit={}",
                m["recovery_rate"], m["mean_fit"], m["min_fit"]
            );
            println!("wrote {}", cfg.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code as u8)
        }
    }
}
