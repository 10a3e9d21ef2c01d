//! Command-line front end: simulate, estimate, mi, experiment, rates,
//! diagnose.
//!
//! Exit codes: 0 success, 2 usage or arity errors, 3 data or domain errors,
//! 4 i/o failures.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use knn_entropy::estimator::{kl_entropy, mutual_information, EstimatorConfig};
use knn_entropy::math::{MixingProfile, MomentProfile};
use knn_entropy::processes::{sample_stationary_chain, GaussianChainSpec};
use knn_entropy::rng::{Prng, RngSeed};
use knn_entropy::theory::{
    empirical_tv_standard_error, empirical_tv_to_poisson, neighbor_count_experiment,
    stein_chen_bound, theta_interval, RateBound,
};
use knn_entropy::{Dataset, Error, Metric, Result};
use knn_entropy_cli::experiment::{run_plan, write_outputs};
use knn_entropy_cli::plan::ExperimentPlan;

#[derive(Parser)]
#[command(name = "knn-entropy", version, about = "k-NN entropy estimation for time series")]
struct Cli {
    /// Base seed for every random operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Size of the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Distance metric: euclidean or chebyshev.
    #[arg(long, global = true, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,

    /// Break duplicate points by adding deterministic uniform noise in
    /// [-eps, eps] to every coordinate before estimating.
    #[arg(long, value_name = "EPS", global = true)]
    jitter: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a process realization and write it as CSV.
    Simulate(SimulateArgs),
    /// Estimate entropy from a CSV dataset.
    Estimate(EstimateArgs),
    /// Estimate mutual information between two CSV datasets.
    Mi(MiArgs),
    /// Run a replicated bias/variance experiment from a plan file.
    Experiment(ExperimentArgs),
    /// Evaluate the bias-rate exponent interval.
    Rates(RatesArgs),
    /// Poisson-approximation diagnostic for pinned neighbor counts.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// State dimension d.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Band parameter r of the marginal covariance.
    #[arg(long, default_value_t = 0.25)]
    band: f64,
    /// Temporal correlation rho; ignored with --iid.
    #[arg(long, default_value_t = 0.25)]
    rho: f64,
    /// Draw independent points instead of a chain.
    #[arg(long)]
    iid: bool,
    /// Number of points to generate.
    #[arg(long)]
    length: usize,
    /// Substream index.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Output CSV path.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input CSV dataset.
    #[arg(long)]
    input: PathBuf,
    /// Neighbor rank k.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct MiArgs {
    #[arg(long)]
    input_x: PathBuf,
    #[arg(long)]
    input_y: PathBuf,
    #[arg(long, default_value_t = 3)]
    k: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Plan file (key = value format).
    #[arg(long)]
    plan: PathBuf,
    /// Directory receiving report, slopes, chart, and manifest files.
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    dim: usize,
    /// Mixing decay exponent.
    #[arg(long)]
    eps: f64,
    /// Moment order beyond the dimension.
    #[arg(long)]
    r_mom: f64,
    /// Also write the table as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 0.0)]
    band: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    /// Number of non-pinned points per replicate.
    #[arg(long)]
    n: usize,
    /// Radius rule r: the counting ball has radius (r / n)^(1/d).
    #[arg(long)]
    radius_rule: f64,
    #[arg(long, default_value_t = 100_000)]
    replicates: usize,
    /// Pin point, comma-separated coordinates (default: the origin).
    #[arg(long)]
    pin: Option<String>,
    /// Beta for the Stein-Chen bound printed alongside the diagnostic.
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    /// Mixing constant K for the printed bound (0 = independent).
    #[arg(long, default_value_t = 0.0)]
    k_mix: f64,
    /// Mixing sum L for the printed bound.
    #[arg(long, default_value_t = 0.0)]
    l_mix: f64,
    /// Mixing decay exponent for the printed bound.
    #[arg(long, default_value_t = 1e6)]
    eps: f64,
    /// Write the count histogram as CSV to this path.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    s.parse::<Metric>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Arity(_) => 2,
        Error::Domain(_)
        | Error::Parse(_)
        | Error::DegenerateData { .. }
        | Error::NotPositiveDefinite(_) => 3,
        Error::Io(_) => 4,
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(cli, args),
        Command::Estimate(args) => cmd_estimate(cli, args),
        Command::Mi(args) => cmd_mi(cli, args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Rates(args) => cmd_rates(args),
        Command::Diagnose(args) => cmd_diagnose(cli, args),
    }
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<()> {
    let rho = if args.iid { 0.0 } else { args.rho };
    let spec = GaussianChainSpec::new(args.dim, args.band, rho)?;
    let data = sample_stationary_chain(&spec, args.length, RngSeed::new(cli.seed, args.stream))?;
    let file = File::create(&args.output)?;
    let mut w = BufWriter::new(file);
    data.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn read_dataset(path: &PathBuf) -> Result<Dataset> {
    let file = File::open(path)?;
    Dataset::read_csv(BufReader::new(file))
}

/// Deterministic tie-breaking noise: uniform in [-eps, eps] per coordinate,
/// drawn from the given stream of the global seed.
fn apply_jitter(data: &Dataset, eps: f64, seed: u64, stream: u64) -> Result<Dataset> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::Domain(format!(
            "jitter must be a positive width, got {eps}"
        )));
    }
    let mut rng = Prng::from_seed(RngSeed::new(seed, stream));
    let flat: Vec<f64> = data
        .points()
        .flatten()
        .map(|&x| x + eps * (2.0 * rng.uniform_open01() - 1.0))
        .collect();
    Dataset::from_flat(flat, data.dim())
}

fn cmd_estimate(cli: &Cli, args: &EstimateArgs) -> Result<()> {
    let mut data = read_dataset(&args.input)?;
    if let Some(eps) = cli.jitter {
        data = apply_jitter(&data, eps, cli.seed, 0)?;
    }
    let config = EstimatorConfig {
        k: args.k,
        metric: cli.metric,
    };
    let est = kl_entropy(&data, &config)?;
    println!("entropy {:.6}", est.value);
    println!("n_points {}", est.n_points);
    println!("k {}", args.k);
    println!("metric {}", cli.metric);
    Ok(())
}

fn cmd_mi(cli: &Cli, args: &MiArgs) -> Result<()> {
    let mut x = read_dataset(&args.input_x)?;
    let mut y = read_dataset(&args.input_y)?;
    if let Some(eps) = cli.jitter {
        x = apply_jitter(&x, eps, cli.seed, 0)?;
        y = apply_jitter(&y, eps, cli.seed, 1)?;
    }
    let config = EstimatorConfig {
        k: args.k,
        metric: cli.metric,
    };
    let mi = mutual_information(&x, &y, &config)?;
    println!("mi {mi:.6}");
    println!("n_points {}", x.n_points());
    println!("k {}", args.k);
    println!("metric {}", cli.metric);
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let started = Instant::now();
    let text = fs::read_to_string(&args.plan)?;
    let plan = ExperimentPlan::parse(&text)?;
    let reports = run_plan(&plan)?;
    write_outputs(&plan, &reports, &args.output_dir, started)?;
    for report in &reports {
        match &report.bias_fit {
            Some(fit) => println!("k {} bias_slope {}", report.k, fit.slope),
            None => println!("k {} bias_slope absent", report.k),
        }
        match &report.variance_fit {
            Some(fit) => println!("k {} variance_slope {}", report.k, fit.slope),
            None => println!("k {} variance_slope absent", report.k),
        }
    }
    Ok(())
}

fn rate_rows(bound: &RateBound) -> [(&'static str, f64); 5] {
    [
        ("mixing_term", bound.mixing_term),
        ("interior_term", bound.interior_term),
        ("tail_term", bound.tail_term),
        ("cross_term", bound.cross_term),
        ("theta_sup", bound.theta_sup),
    ]
}

fn cmd_rates(args: &RatesArgs) -> Result<()> {
    if args.dim == 0 {
        return Err(Error::Arity("dimension must be at least 1".into()));
    }
    let mixing = MixingProfile::new(0.0, args.eps, 0.0)?;
    let moments = MomentProfile::new(args.r_mom)?;
    let bound = theta_interval(args.dim, &mixing, &moments);
    println!("d {}", args.dim);
    println!("eps {}", args.eps);
    println!("r_mom {}", args.r_mom);
    for (name, value) in rate_rows(&bound) {
        println!("{name} {value:.12}");
    }
    println!("admissible {}", bound.admissible);
    if !bound.admissible {
        let threshold = (args.dim as f64).min(1.0 + 5.0f64.sqrt());
        println!(
            "warning: eps = {} does not exceed min(d, 1 + sqrt 5) = {threshold}; \
             the rate guarantee does not apply",
            args.eps
        );
    }
    if let Some(path) = &args.csv {
        let mut out = String::from("parameter,value\n");
        out.push_str(&format!("d,{}\n", args.dim));
        out.push_str(&format!("eps,{}\n", args.eps));
        out.push_str(&format!("r_mom,{}\n", args.r_mom));
        for (name, value) in rate_rows(&bound) {
            out.push_str(&format!("{name},{value}\n"));
        }
        out.push_str(&format!("admissible,{}\n", bound.admissible));
        fs::write(path, out)?;
    }
    Ok(())
}

fn cmd_diagnose(cli: &Cli, args: &DiagnoseArgs) -> Result<()> {
    let spec = GaussianChainSpec::new(args.dim, args.band, args.rho)?;
    let pin = match &args.pin {
        Some(text) => {
            let coords: Result<Vec<f64>> = text
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("cannot parse pin coordinate {c:?}")))
                })
                .collect();
            coords?
        }
        None => vec![0.0; args.dim],
    };
    let exp = neighbor_count_experiment(
        &spec,
        &pin,
        args.n,
        args.radius_rule,
        args.replicates,
        cli.metric,
        RngSeed::new(cli.seed, 0),
    )?;
    let tv = empirical_tv_to_poisson(&exp.histogram, exp.lambda_hat)?;
    let se = empirical_tv_standard_error(&exp.histogram, exp.lambda_hat)?;
    let mixing = MixingProfile::new(args.k_mix, args.eps, args.l_mix)?;
    let p_hat = exp.lambda_hat / args.n as f64;
    let bound = stein_chen_bound(&mixing, args.beta, args.n, p_hat)?;
    println!("n {}", args.n);
    println!("radius {}", exp.radius);
    println!("replicates {}", args.replicates);
    println!("lambda_hat {}", exp.lambda_hat);
    println!("tv_to_poisson {tv}");
    println!("tv_standard_error {se}");
    println!("stein_chen_bound {bound}");
    if let Some(path) = &args.histogram {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        exp.histogram.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}
