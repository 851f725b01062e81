//! End-to-end runs: UDG estimation, edge clique cover, latent allocation and
//! VAE training, with a fully connected baseline of the same size and
//! optional comparison against a known ground truth.

mod deltas;
mod sweep;

pub use deltas::{compute_deltas, DeltaRow, Deltas};
pub use sweep::{
    run_synthetic_experiment, summarize, write_records_csv, write_summary_csv, RunRecord,
    SweepConfig, SweepResult, SweepSummaryRow,
};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ecc::{solve, EccConfig, EccSolution, SolveMode, SolverKind, DEFAULT_EXACT_CAP};
use crate::graphs::{
    assign_latents, default_lambda, sfd, shd, McmGraph, NcfaGraph, UndirectedGraph,
};
use crate::indep::{estimate_udg, SampleMatrix, TestMethod, UdgEstimate};
use crate::synth::GroundTruth;
use crate::vae::{baseline_vae, train, TrainConfig, TrainTrace, VaeParams};
use crate::{rng, Execution, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: f64,
    /// Latent degrees of freedom; `None` uses ⌊n²/4⌋.
    pub lambda: Option<usize>,
    pub test: TestMethod,
    pub solver: SolveMode,
    pub exact_cap: usize,
    /// Training settings. The seed inside is ignored: it is derived from
    /// [`RunConfig::seed`].
    pub train: TrainConfig,
    /// Also train the fully connected baseline.
    pub baseline: bool,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 0.05,
            lambda: None,
            test: TestMethod::Dcov,
            solver: SolveMode::Auto,
            exact_cap: DEFAULT_EXACT_CAP,
            train: TrainConfig::default(),
            baseline: true,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl RunConfig {
    fn ecc_config(&self) -> EccConfig {
        EccConfig {
            exact_cap: self.exact_cap,
            enumerate_all: false,
        }
    }

    /// Training settings with the run-derived seed. NCFA, baseline and
    /// truth-given models share it, so they see the same split, the same
    /// noise and the same initial values on shared weights.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: rng::derive(self.seed, 2),
            ..self.train.clone()
        }
    }
}

/// Step 1: the estimated UDG.
pub fn discover(sample: &SampleMatrix, config: &RunConfig) -> Result<UdgEstimate> {
    estimate_udg(
        sample,
        config.alpha,
        config.test,
        rng::derive(config.seed, 0),
        config.execution,
    )
    .map_err(|e| e.in_stage("independence testing"))
}

/// Steps 2 and 3: a clique cover of `udg` (plus singletons for isolated
/// vertices) and its NCFA graph. Also returns the solver output and any
/// warnings.
pub fn structure(
    udg: &UndirectedGraph,
    config: &RunConfig,
) -> Result<(EccSolution, NcfaGraph, Vec<String>)> {
    let sol = solve(udg, config.solver, rng::derive(config.seed, 1), &config.ecc_config())
        .map_err(|e| e.in_stage("edge clique cover"))?;
    let cover = sol.cover.with_isolated_singletons(udg);
    let mcm = McmGraph::from_cover(&cover).map_err(|e| e.in_stage("edge clique cover"))?;
    let mut warnings = Vec::new();
    let requested = config.lambda.unwrap_or_else(|| default_lambda(udg.n()));
    if requested < mcm.k() {
        warnings.push(format!(
            "lambda {requested} is below the {} cliques; raised to {}",
            mcm.k(),
            mcm.k()
        ));
    }
    let ncfa = assign_latents(&mcm, requested).map_err(|e| e.in_stage("latent allocation"))?;
    Ok((sol, ncfa, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    pub train: f64,
    pub val: f64,
}

impl From<&TrainTrace> for Losses {
    fn from(t: &TrainTrace) -> Self {
        Losses {
            train: t.final_train_loss(),
            val: t.final_val_loss(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthComparison {
    pub sfd: u64,
    pub shd: usize,
    /// SFD is zero: the estimated MCM graph matches the truth.
    pub exact_recovery: bool,
}

/// Summary written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub n: usize,
    pub samples: usize,
    pub udg: UndirectedGraph,
    /// Cliques of the cover, singletons for isolated vertices included.
    pub cover: Vec<Vec<usize>>,
    pub solver: SolverKind,
    pub certified_minimum: bool,
    pub fallbacks: Vec<String>,
    pub warnings: Vec<String>,
    /// Number of cliques (causal degrees of freedom).
    pub k: usize,
    pub lambda: usize,
    pub multiplicities: Vec<usize>,
    pub ncfa: Option<Losses>,
    pub baseline: Option<Losses>,
    /// Baseline minus NCFA final training loss.
    pub training_delta: Option<f64>,
    /// Baseline minus NCFA final validation loss.
    pub validation_delta: Option<f64>,
    pub truth: Option<TruthComparison>,
    pub config: RunConfig,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub udg: UdgEstimate,
    pub ecc: EccSolution,
    pub ncfa: NcfaGraph,
    /// Trained model and trace, absent when training was skipped.
    pub model: Option<(VaeParams, TrainTrace)>,
    pub baseline: Option<(VaeParams, TrainTrace)>,
    pub report: RunReport,
}

/// Full pipeline. Training is skipped when `config.train.epochs` is zero.
pub fn run_ncfa(
    sample: &SampleMatrix,
    config: &RunConfig,
    truth: Option<&GroundTruth>,
) -> Result<RunOutput> {
    let udg = discover(sample, config)?;
    let (ecc, ncfa, warnings) = structure(&udg.graph, config)?;
    let truth_cmp = truth
        .map(|gt| -> Result<TruthComparison> {
            let d = sfd(ncfa.mcm(), &gt.mcm)?;
            Ok(TruthComparison {
                sfd: d,
                shd: shd(&udg.graph, &gt.udg)?,
                exact_recovery: d == 0,
            })
        })
        .transpose()?;

    let (model, baseline) = if config.train.epochs == 0 {
        (None, None)
    } else {
        let tc = config.train_config();
        let model = train(&ncfa, sample, &tc).map_err(|e| e.in_stage("training"))?;
        let baseline = if config.baseline {
            Some(baseline_vae(ncfa.lambda(), sample, &tc).map_err(|e| e.in_stage("baseline training"))?)
        } else {
            None
        };
        (Some(model), baseline)
    };
    let ncfa_losses = model.as_ref().map(|(_, t)| Losses::from(t));
    let base_losses = baseline.as_ref().map(|(_, t)| Losses::from(t));
    let deltas = match (&model, &baseline) {
        (Some((_, m)), Some((_, b))) => Some(compute_deltas(m, b)?),
        _ => None,
    };

    let report = RunReport {
        n: sample.n_vars(),
        samples: sample.n_samples(),
        udg: udg.graph.clone(),
        cover: ncfa.mcm().to_cover().cliques().to_vec(),
        solver: ecc.solver,
        certified_minimum: ecc.is_certified_minimum,
        fallbacks: ecc.fallback.iter().cloned().collect(),
        warnings,
        k: ncfa.mcm().k(),
        lambda: ncfa.lambda(),
        multiplicities: ncfa.multiplicities().to_vec(),
        ncfa: ncfa_losses,
        baseline: base_losses,
        training_delta: deltas.as_ref().map(|d| d.training),
        validation_delta: deltas.as_ref().map(|d| d.validation),
        truth: truth_cmp,
        config: config.clone(),
    };
    Ok(RunOutput {
        udg,
        ecc,
        ncfa,
        model,
        baseline,
        report,
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_trace_csv(path: impl AsRef<Path>, trace: &TrainTrace) -> Result<()> {
    trace.write_csv(fs::File::create(path)?)
}

/// Writes `udg.json`, `mcm.json`, `ncfa.json` and `report.json`, plus
/// `model.json` and `trace.csv` when a model was trained and
/// `baseline_trace.csv` for the baseline.
pub fn write_outputs(dir: impl AsRef<Path>, out: &RunOutput) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_json(dir.join("udg.json"), &out.udg.graph)?;
    write_json(dir.join("mcm.json"), out.ncfa.mcm())?;
    write_json(dir.join("ncfa.json"), &out.ncfa)?;
    if let Some((params, trace)) = &out.model {
        write_json(dir.join("model.json"), &params.to_file(&out.report.config.train_config()))?;
        write_trace_csv(dir.join("trace.csv"), trace)?;
    }
    if let Some((_, trace)) = &out.baseline {
        write_trace_csv(dir.join("baseline_trace.csv"), trace)?;
    }
    write_json(dir.join("report.json"), &out.report)?;
    Ok(())
}
