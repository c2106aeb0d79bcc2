use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fusion_game::sweep::{
    equilibrium_report, run_regions, run_sweep, write_regions_csv, write_sweep_csv, Execution,
    ExperimentConfig, Mode,
};
use fusion_game::{ibr_run, Error, IbrOutcome, Vector};

const EXIT_TRIVIAL_INIT: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_CONFIG: u8 = 64;
const EXIT_DEGENERATE: u8 = 65;
const EXIT_IO: u8 = 74;

/// Iterated best response and convergence analysis for the trusted-computation fusion game.
#[derive(Parser, Debug)]
#[command(name = "fusion-game", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace one run from `y_bar_0` against `y_attack`.
    Run(Common),
    /// Classify every grid target and write CSV.
    Sweep(Common),
    /// Evaluate union and intersection regions per radius and write CSV.
    Regions(Common),
    /// Report closed-form equilibria for `y_attack`.
    Equilibria {
        #[command(flatten)]
        common: Common,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    alpha_tol: Option<f64>,
}

enum Failure {
    Config(String),
    Degenerate(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateGame => Failure::Degenerate(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Failure> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| Failure::Config(format!("{}: {e}", self.config.display())))?;
        let mut cfg = ExperimentConfig::from_json(&text)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
            if let Some(z) = cfg.zeta_set.as_mut() {
                z.seed = seed;
            }
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if let Some(n) = self.max_iter {
            cfg.max_iter = n;
        }
        if let Some(tol) = self.alpha_tol {
            cfg.alpha_tol = tol;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn fmt_vec(v: &Vector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn cmd_run(common: &Common) -> Result<u8, Failure> {
    let cfg = common.load()?;
    let p = cfg.game_params()?;
    let trace = ibr_run(&p, &cfg.y_bar_0()?, &cfg.ibr_config())?;
    let mut w = common.output()?;
    let y0 = trace.initial_y_bar();
    writeln!(w, "{:>5}  {:>12}  {:<40}  region", "i", "alpha", "y_bar")?;
    writeln!(
        w,
        "{:>5}  {:>12}  {:<40}  {}",
        0,
        "-",
        fmt_vec(y0),
        p.classify_region(y0)
    )?;
    for (i, step) in trace.steps().iter().enumerate() {
        let (y, region) = match &step.y_bar {
            Some(y) => (fmt_vec(y), p.classify_region(y).to_string()),
            None => ("-".to_string(), "-".to_string()),
        };
        writeln!(
            w,
            "{:>5}  {:>12.9}  {:<40}  {}",
            i + 1,
            step.alpha.value(),
            y,
            region
        )?;
    }
    let outcome = trace.outcome();
    write!(w, "outcome: {}", outcome.kind())?;
    if let Some(a) = outcome.alpha_star() {
        write!(w, " alpha*={}", a.value())?;
    }
    if let Some(y) = outcome.y_bar_star() {
        write!(w, " y_bar*={}", fmt_vec(y))?;
    }
    if let Some(r) = outcome.tail_ratio() {
        write!(w, " tail_ratio={r}")?;
    }
    writeln!(w, " iterations={}", trace.iterations())?;
    w.flush()?;
    Ok(match outcome {
        IbrOutcome::ConvergedZero { .. } | IbrOutcome::ConvergedMixed { .. } => 0,
        IbrOutcome::TrivialInit => EXIT_TRIVIAL_INIT,
        _ => EXIT_NO_CONVERGENCE,
    })
}

fn cmd_sweep(common: &Common) -> Result<u8, Failure> {
    let cfg = common.load()?;
    let rows = run_sweep(&cfg, Execution::Parallel)?;
    let mut w = common.output()?;
    write_sweep_csv(&mut w, &rows, cfg.mode, cfg.slack_tol)?;
    w.flush()?;
    Ok(0)
}

fn cmd_regions(common: &Common) -> Result<u8, Failure> {
    let cfg = common.load()?;
    if cfg.zeta_set.is_none() {
        return Err(Failure::Config("regions needs a zeta_set".into()));
    }
    let (rows, eps) = run_regions(&cfg)?;
    let mut w = common.output()?;
    write_regions_csv(&mut w, &rows, &eps)?;
    w.flush()?;
    Ok(0)
}

fn cmd_equilibria(common: &Common, json: bool) -> Result<u8, Failure> {
    let cfg = common.load()?;
    let p = cfg.game_params()?;
    let report = equilibrium_report(&p, cfg.tau_one, cfg.seed)?;
    let mut w = common.output()?;
    if json {
        writeln!(w, "{}", report.to_json())?;
    } else {
        writeln!(w, "{report}")?;
    }
    w.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run(c) => cmd_run(c),
        Command::Sweep(c) => cmd_sweep(c),
        Command::Regions(c) => cmd_regions(c),
        Command::Equilibria { common, json } => cmd_equilibria(common, *json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Degenerate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DEGENERATE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
