//! `ncfa` command-line tool.
//!
//! Exit codes: 0 success, 2 invalid input, 3 exact solver refusal,
//! 4 training divergence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncfa::ecc::{solve, EccConfig, SolveMode, DEFAULT_EXACT_CAP};
use ncfa::graphs::{default_lambda, sfd, shd, McmGraph, UndirectedGraph};
use ncfa::indep::{SampleMatrix, TestMethod};
use ncfa::pipeline::{
    discover, run_ncfa, run_synthetic_experiment, write_json, write_outputs,
    write_records_csv, write_summary_csv, write_trace_csv, RunConfig, SweepConfig,
};
use ncfa::synth::{make_ground_truth, sample_dataset, sample_er_udg, GroundTruth};
use ncfa::vae::{baseline_vae, TrainConfig};
use ncfa::{Execution, NcfaError, Result};

#[derive(Parser)]
#[command(name = "ncfa", version, about = "Neuro-causal factor analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the unconditional dependence graph of a CSV dataset.
    Discover {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        test: TestArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory; prints the graph to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge clique cover of a UDG file.
    Ecc {
        /// UDG JSON file ({"n": .., "edges": [[i, j], ..]}).
        udg: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// List every minimum cover (exact solver only).
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: UDG, clique cover, latent allocation, VAE training.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Ground truth JSON (from `synth`) to score the recovered structure.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Skip the fully connected baseline.
        #[arg(long)]
        no_baseline: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fully connected VAE with λ latents.
    Baseline {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random ground truth and a dataset drawn from it.
    Synth {
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Edge density of the random UDG.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic experiment over edge densities.
    Sweep {
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Comma-separated densities.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        densities: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        graphs: usize,
        #[arg(long, default_value_t = 10)]
        datasets: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Skip the model given the true structure.
        #[arg(long)]
        no_truth_model: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// SFD and SHD between two graph files.
    Metrics {
        /// UDG, MCM/NCFA or ground truth JSON.
        a: PathBuf,
        b: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    /// CSV file, one column per measurement.
    #[arg(long)]
    data: PathBuf,
    /// The CSV has no header row.
    #[arg(long)]
    no_header: bool,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value = "dcov")]
    test: TestMethod,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = "auto")]
    solver: SolveMode,
    /// Largest n the exact solver accepts.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
}

#[derive(Args)]
struct TrainArgs {
    /// Latent degrees of freedom (default ⌊n²/4⌋).
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-5)]
    lr: f64,
    /// Training fraction of the train/validation split.
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    #[arg(long)]
    batch_size: Option<usize>,
}

impl TrainArgs {
    fn config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.lr,
            split_fraction: self.split,
            batch_size: self.batch_size,
            seed,
            ..TrainConfig::default()
        }
    }
}

fn run_config(test: &TestArgs, solver: &SolverArgs, train: &TrainArgs, seed: u64) -> Result<RunConfig> {
    let cfg = RunConfig {
        alpha: test.alpha,
        lambda: train.lambda,
        test: test.test,
        solver: solver.solver,
        exact_cap: solver.exact_cap,
        train: train.config(0),
        baseline: true,
        seed,
        execution: Execution::Parallel,
    };
    cfg.train.validate()?;
    Ok(cfg)
}

fn read_sample(args: &DataArgs) -> Result<SampleMatrix> {
    SampleMatrix::read_csv(&args.data, !args.no_header)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// A graph file as an MCM graph when it has one, else as a UDG.
enum GraphFile {
    Mcm(McmGraph),
    Udg(UndirectedGraph),
}

impl GraphFile {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if let Ok(gt) = serde_json::from_str::<GroundTruth>(&text) {
            return Ok(GraphFile::Mcm(gt.mcm));
        }
        if let Ok(m) = serde_json::from_str::<McmGraph>(&text) {
            return Ok(GraphFile::Mcm(m));
        }
        match serde_json::from_str::<UndirectedGraph>(&text) {
            Ok(u) => Ok(GraphFile::Udg(u)),
            Err(e) => Err(NcfaError::InvalidInput(format!(
                "{} is not a UDG, MCM graph or ground truth file: {e}",
                path.display()
            ))),
        }
    }

    fn udg(&self) -> UndirectedGraph {
        match self {
            GraphFile::Mcm(m) => m.udg(),
            GraphFile::Udg(u) => u.clone(),
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Discover { data, test, seed, out } => {
            let sample = read_sample(&data)?;
            let cfg = RunConfig {
                alpha: test.alpha,
                test: test.test,
                seed,
                ..RunConfig::default()
            };
            let est = discover(&sample, &cfg)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    write_json(dir.join("udg.json"), &est.graph)?;
                    write_json(dir.join("tests.json"), &est.tests)?;
                }
                None => print_json(&est.graph)?,
            }
        }
        Command::Ecc { udg, solver, enumerate, seed, out } => {
            let graph: UndirectedGraph = read_json(&udg)?;
            let cfg = EccConfig {
                exact_cap: solver.exact_cap,
                enumerate_all: enumerate,
            };
            let sol = solve(&graph, solver.solver, seed, &cfg)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    let mcm = McmGraph::from_cover(&sol.cover.with_isolated_singletons(&graph))?;
                    write_json(dir.join("mcm.json"), &mcm)?;
                    write_json(dir.join("ecc.json"), &sol)?;
                }
                None => print_json(&sol)?,
            }
        }
        Command::Fit { data, test, solver, train, truth, no_baseline, seed, out } => {
            let sample = read_sample(&data)?;
            let mut cfg = run_config(&test, &solver, &train, seed)?;
            cfg.baseline = !no_baseline;
            let truth: Option<GroundTruth> = truth.map(|p| read_json(&p)).transpose()?;
            let result = run_ncfa(&sample, &cfg, truth.as_ref())?;
            write_outputs(&out, &result)?;
            for w in &result.report.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Baseline { data, train, seed, out } => {
            let sample = read_sample(&data)?;
            let tc = train.config(seed);
            let lambda = train.lambda.unwrap_or_else(|| default_lambda(sample.n_vars())).max(1);
            let (params, trace) = baseline_vae(lambda, &sample, &tc)?;
            fs::create_dir_all(&out)?;
            write_json(out.join("model.json"), &params.to_file(&tc))?;
            write_trace_csv(out.join("trace.csv"), &trace)?;
        }
        Command::Synth { n, density, samples, seed, out } => {
            let udg = sample_er_udg(n, density, ncfa::rng::derive(seed, 0))?;
            let gt = make_ground_truth(&udg, ncfa::rng::derive(seed, 1), SolveMode::Auto, &EccConfig::default())?;
            let data = sample_dataset(&gt, samples, ncfa::rng::derive(seed, 2))?;
            fs::create_dir_all(&out)?;
            write_json(out.join("truth.json"), &gt)?;
            write_json(out.join("udg.json"), &gt.udg)?;
            write_json(out.join("mcm.json"), &gt.mcm)?;
            data.write_csv(fs::File::create(out.join("data.csv"))?)?;
        }
        Command::Sweep {
            n,
            densities,
            graphs,
            datasets,
            samples,
            test,
            solver,
            train,
            no_truth_model,
            seed,
            out,
        } => {
            let mut run = run_config(&test, &solver, &train, seed)?;
            run.execution = Execution::Sequential;
            let cfg = SweepConfig {
                n,
                densities,
                graphs_per_density: graphs,
                datasets_per_graph: datasets,
                samples,
                run,
                truth_model: !no_truth_model,
                seed,
            };
            let res = run_synthetic_experiment(&cfg, Execution::Parallel)?;
            fs::create_dir_all(&out)?;
            write_records_csv(fs::File::create(out.join("runs.csv"))?, &res.records)?;
            write_summary_csv(fs::File::create(out.join("summary.csv"))?, &res.summary)?;
            let failed = res.records.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} runs failed", res.records.len());
            }
        }
        Command::Metrics { a, b } => {
            let (a, b) = (GraphFile::load(&a)?, GraphFile::load(&b)?);
            let sfd = match (&a, &b) {
                (GraphFile::Mcm(x), GraphFile::Mcm(y)) => Some(sfd(x, y)?),
                _ => None,
            };
            let shd = shd(&a.udg(), &b.udg())?;
            print_json(&serde_json::json!({ "sfd": sfd, "shd": shd }))?;
        }
    }
    Ok(())
}

fn exit_code(err: &NcfaError) -> u8 {
    match err.root() {
        NcfaError::SolverRefused { .. } => 3,
        NcfaError::NonFiniteLoss { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
