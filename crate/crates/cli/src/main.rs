use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use paim_core::harness::{replicate, replicate_with_truth, write_experiment, ExperimentConfig};
use paim_core::targets::{grid_expectation, Banana, BananaParams};

#[derive(Parser)]
#[command(name = "paim", version, about = "Parallel adaptive independent Metropolis sampler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's base_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduction grids for the banana benchmark.
    Benchmark {
        #[command(subcommand)]
        which: Benchmark,
    },
    /// Grid-quadrature mean of a benchmark target.
    Oracle(OracleArgs),
}

#[derive(Subcommand)]
enum Benchmark {
    /// MSE reduction of PAIM over independent chains for each (T_train, N).
    Table1 {
        #[arg(long, value_delimiter = ',', default_values_t = vec![5usize, 10, 50, 100])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u64, 10, 20])]
        ttrain: Vec<u64>,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one summary.json per cell under this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value = "banana")]
    target: String,
    /// Lower and upper bound, applied to every axis.
    #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = vec![-15.0, 15.0])]
    bounds: Vec<f64>,
    #[arg(long, default_value_t = 2001)]
    points: usize,
    #[arg(long = "B", default_value_t = 10.0)]
    b: f64,
    #[arg(long, default_value_t = 4.0)]
    eta1: f64,
    #[arg(long, default_value_t = 5.0)]
    eta2: f64,
    #[arg(long, default_value_t = 5.0)]
    eta3: f64,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, seed, out } => run(config, seed, out),
        Command::Benchmark {
            which:
                Benchmark::Table1 {
                    n,
                    ttrain,
                    reps,
                    samples,
                    seed,
                    out,
                },
        } => table1(&n, &ttrain, reps, samples, seed, out),
        Command::Oracle(args) => oracle(args),
    }
}

fn run(path: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let mut config = ExperimentConfig::load(&path)?;
    if let Some(s) = seed {
        config.base_seed = s;
    }
    let dir = out
        .or_else(|| config.output_dir.clone())
        .context("no output directory: pass --out or set output_dir")?;
    let exp = replicate(&config)?;
    write_experiment(&exp, &dir)?;

    let r = &exp.report;
    if let Some(p) = &r.paim {
        println!("paim mse {:.6e} (mean T_tot {:.1}, mean final active {:.1})", p.mse, p.mean_t_tot, p.mean_final_active);
    }
    if let Some(q) = &r.ipc {
        println!("ipc  mse {:.6e}", q.mse);
    }
    if let Some(red) = r.reduction_percent {
        println!("reduction {red:.2}%");
    }
    println!("outputs written to {}", dir.display());
    Ok(())
}

fn table1(ns: &[usize], ttrains: &[u64], reps: usize, samples: usize, seed: u64, out: Option<PathBuf>) -> Result<()> {
    if ns.is_empty() || ttrains.is_empty() {
        bail!("need at least one N and one T_train");
    }
    let target = Banana {
        params: BananaParams::default(),
    };
    let truth = grid_expectation(&target, &[-15.0, -15.0], &[15.0, 15.0], 2001)?;
    println!("ground truth E[X] = [{:.6}, {:.6}]", truth[0], truth[1]);
    println!("MSE reduction of PAIM vs. independent chains (L={samples}, R={reps})");

    let mut header = format!("{:>8}", "T_train");
    for n in ns {
        header.push_str(&format!(" | {:>9}", format!("N={n}")));
    }
    println!("{header}");
    for &t_train in ttrains {
        let mut line = format!("{t_train:>8}");
        for &n in ns {
            let started = Instant::now();
            let config = ExperimentConfig::banana_benchmark(n, samples, t_train, reps, seed);
            let exp = replicate_with_truth(&config, &target, truth.clone())?;
            let red = exp.report.reduction_percent.unwrap_or(f64::NAN);
            line.push_str(&format!(" | {:>8.2}%", red));
            if let Some(dir) = &out {
                let cell = dir.join(format!("ttrain{t_train}_n{n}"));
                paim_core::harness::write_summary(&exp.report, &cell)?;
            }
            eprintln!("  cell T_train={t_train} N={n}: {red:.2}% in {:.1}s", started.elapsed().as_secs_f64());
        }
        println!("{line}");
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    if args.target != "banana" {
        bail!("unknown oracle target '{}' (supported: banana)", args.target);
    }
    let params = BananaParams {
        b: args.b,
        eta1: args.eta1,
        eta2: args.eta2,
        eta3: args.eta3,
    };
    params.validate()?;
    let (lo, hi) = (args.bounds[0], args.bounds[1]);
    let mean = grid_expectation(&Banana { params }, &[lo, lo], &[hi, hi], args.points)?;
    println!("{}", serde_json_line(&mean, args.points, lo, hi));
    Ok(())
}

fn serde_json_line(mean: &[f64], points: usize, lo: f64, hi: f64) -> String {
    let parts: Vec<String> = mean.iter().map(|v| format!("{v:.16e}")).collect();
    format!(
        "{{\"target\":\"banana\",\"bounds\":[{lo},{hi}],\"points\":{points},\"mean\":[{}]}}",
        parts.join(",")
    )
}
