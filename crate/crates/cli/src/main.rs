use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use madc::capacity::{
    c2_additivity_probe, evaluate, find_g2_population_threshold, find_q_threshold, CapacityPoint, Quantity,
    Q_ZERO_TOL,
};
use madc::checks::{covariance_residuals, representation_agreement};
use madc::sweep::{run_sweep, to_csv, to_json, Grid, GridRange, DEFAULT_STEP};
use madc::{ChannelParams, OptimizerConfig};

const CHECK_TOL: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "madc", version, about = "Capacity bounds for the two-qubit amplitude damping channel with memory")]
struct Cli {
    /// Optional key = value file overriding optimizer defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    opt: OptimizerFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct OptimizerFlags {
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true)]
    max_evals: Option<usize>,
    #[arg(long, global = true)]
    f_tol: Option<f64>,
    #[arg(long, global = true)]
    x_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one quantity at one (eta, mu).
    Point {
        #[arg(value_name = "QUANTITY")]
        positional: Option<Quantity>,
        #[arg(long, conflicts_with = "positional")]
        quantity: Option<Quantity>,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        phase_search: bool,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a quantity on an (eta, mu) grid.
    Sweep {
        #[arg(value_name = "QUANTITY")]
        positional: Option<Quantity>,
        #[arg(long, conflicts_with = "positional")]
        quantity: Option<Quantity>,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        grid_step: f64,
        /// Step of the eta grid if different from --grid-step.
        #[arg(long)]
        eta_step: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        eta_min: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_max: f64,
        #[arg(long, default_value_t = 0.0)]
        mu_min: f64,
        #[arg(long, default_value_t = 1.0)]
        mu_max: f64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        phase_search: bool,
        #[arg(long)]
        json: bool,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the representation-agreement and covariance suites.
    Check {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Memory thresholds of the G2 |11> population and of q_lwb.
    Thresholds {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
        eta: Vec<f64>,
    },
    /// Compare both Holevo bounds at mu = 0 with twice the single-qubit capacity.
    Additivity {
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.5, 0.8])]
        eta: Vec<f64>,
    },
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    restarts: Option<usize>,
    max_evals_per_restart: Option<usize>,
    f_tol: Option<f64>,
    x_tol: Option<f64>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<madc::Error> for Failure {
    fn from(e: madc::Error) -> Self {
        match e {
            madc::Error::OutOfRange { .. } | madc::Error::Config(_) | madc::Error::Domain(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn optimizer_config(path: Option<&Path>, flags: &OptimizerFlags) -> Result<OptimizerConfig, Failure> {
    let file = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            toml::from_str::<ConfigFile>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    let mut cfg = OptimizerConfig::default();
    cfg.seed = flags.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.restarts = flags.restarts.or(file.restarts).unwrap_or(cfg.restarts);
    cfg.max_evals_per_restart = flags.max_evals.or(file.max_evals_per_restart).unwrap_or(cfg.max_evals_per_restart);
    cfg.f_tol = flags.f_tol.or(file.f_tol).unwrap_or(cfg.f_tol);
    cfg.x_tol = flags.x_tol.or(file.x_tol).unwrap_or(cfg.x_tol);
    cfg.validate()?;
    Ok(cfg)
}

fn pick_quantity(positional: Option<Quantity>, flag: Option<Quantity>) -> Result<Quantity, Failure> {
    positional.or(flag).ok_or_else(|| Failure::Usage("a quantity is required (chi-g1, chi-g2, q-lwb, q-upb, ce)".into()))
}

fn print_point(p: &CapacityPoint) {
    println!("quantity   {}", p.quantity);
    println!("eta        {}", p.eta);
    println!("mu         {}", p.mu);
    println!("value      {:.10}", p.value);
    let args: Vec<String> = p
        .quantity
        .argmax_fields()
        .iter()
        .zip(p.argmax.values())
        .map(|(name, v)| format!("{name}={v:.8}"))
        .collect();
    println!("argmax     {}", args.join(" "));
    println!("evals      {} over {} restarts, converged: {}", p.evals, p.restarts_used, p.converged);
    if p.quantity == Quantity::QLwb && p.raw_value <= Q_ZERO_TOL {
        println!("note       no positive coherent information: mu is at or below the quantum-capacity threshold for this eta");
    }
}

fn fmt_threshold(t: Option<f64>) -> String {
    t.map_or_else(|| "none".to_string(), |m| format!("{m:.4}"))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| {
            let _ = fs::remove_file(p);
            Failure::Runtime(format!("{}: {e}", p.display()))
        }),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let cfg = optimizer_config(cli.config.as_deref(), &cli.opt)?;
    match cli.command {
        Command::Point { positional, quantity, eta, mu, phase_search, json } => {
            let q = pick_quantity(positional, quantity)?;
            let point = evaluate(q, ChannelParams::new(eta, mu)?, &cfg, phase_search)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&point).map_err(|e| Failure::Runtime(e.to_string()))?);
            } else {
                print_point(&point);
            }
        }
        Command::Sweep {
            positional,
            quantity,
            grid_step,
            eta_step,
            eta_min,
            eta_max,
            mu_min,
            mu_max,
            jobs,
            phase_search,
            json,
            out,
        } => {
            let q = pick_quantity(positional, quantity)?;
            let grid = Grid {
                eta: GridRange::new(eta_min, eta_max, eta_step.unwrap_or(grid_step))?,
                mu: GridRange::new(mu_min, mu_max, grid_step)?,
            };
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if jobs == 0 {
                return Err(Failure::Usage("--jobs must be positive".into()));
            }
            let points = run_sweep(q, &grid, &cfg, phase_search, jobs)?;
            let text = if json { to_json(&points)? + "\n" } else { to_csv(q, &points)? };
            write_output(out.as_deref(), &text)?;
        }
        Command::Check { trials } => {
            if trials == 0 {
                return Err(Failure::Usage("--trials must be positive".into()));
            }
            let agreement = representation_agreement(trials, cfg.seed)?;
            let cov = covariance_residuals(trials.div_ceil(5), 20, cfg.seed)?;
            println!("trials                          {trials}");
            println!("system kraus vs closed form     {:.3e}", agreement.system_kraus_vs_closed);
            println!("system dilation vs closed form  {:.3e}", agreement.system_dilation_vs_closed);
            println!("system dilation vs kraus        {:.3e}", agreement.system_dilation_vs_kraus);
            println!("environment dilation vs closed  {:.3e}", agreement.environment_dilation_vs_closed);
            println!("covariance sign flips           {:.3e}", cov.sign_flips);
            println!("covariance swap                 {:.3e}", cov.swap);
            let worst = agreement.worst().max(cov.worst());
            if worst > CHECK_TOL {
                println!("FAIL: worst residual {worst:.3e} exceeds {CHECK_TOL:e}");
                return Ok(ExitCode::from(1));
            }
            println!("ok: all residuals <= {CHECK_TOL:e}");
        }
        Command::Thresholds { eta } => {
            println!("{:>6}  {:>10}  {:>10}", "eta", "mu_th_g2", "mu_th_q");
            for e in eta {
                let g2 = find_g2_population_threshold(e, &cfg)?;
                let q = find_q_threshold(e, &cfg)?;
                println!("{e:>6}  {:>10}  {:>10}", fmt_threshold(g2), fmt_threshold(q));
            }
        }
        Command::Additivity { eta } => {
            println!("{:>6}  {:>12}  {:>12}  {:>12}  verdict", "eta", "chi_g1", "chi_g2", "2*C1");
            for e in eta {
                let r = c2_additivity_probe(e, &cfg)?;
                let verdict = if r.no_violation { "no violation found" } else { "possible violation" };
                println!("{e:>6}  {:>12.8}  {:>12.8}  {:>12.8}  {verdict}", r.chi_g1, r.chi_g2, r.two_c1);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
