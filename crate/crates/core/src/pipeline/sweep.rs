use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{compute_deltas, run_ncfa, RunConfig};
use crate::ecc::{EccConfig, SolveMode};
use crate::graphs::{McmGraph, NcfaGraph};
use crate::synth::{make_ground_truth, sample_dataset, sample_er_udg};
use crate::vae::train;
use crate::{rng, Execution, Result};

/// Synthetic experiment: for every density, `graphs_per_density` random
/// UDGs, each with `datasets_per_graph` datasets of `samples` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub densities: Vec<f64>,
    pub graphs_per_density: usize,
    pub datasets_per_graph: usize,
    pub samples: usize,
    /// Per-run pipeline settings. Its seed is replaced per run and its
    /// execution mode is ignored (runs are the parallel unit).
    pub run: RunConfig,
    /// Also train the model that is given the true structure, with one
    /// latent per true clique.
    pub truth_model: bool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 10,
            densities: (1..=9).map(|i| i as f64 / 10.0).collect(),
            graphs_per_density: 10,
            datasets_per_graph: 10,
            samples: 1000,
            run: RunConfig::default(),
            truth_model: true,
            seed: 0,
        }
    }
}

/// One row of the long-format sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub density: f64,
    pub graph: usize,
    pub dataset: usize,
    pub edges: usize,
    pub k_true: usize,
    pub k_est: Option<usize>,
    pub lambda: Option<usize>,
    pub sfd: Option<u64>,
    pub shd: Option<usize>,
    pub exact_recovery: Option<bool>,
    pub ncfa_train: Option<f64>,
    pub ncfa_val: Option<f64>,
    pub baseline_train: Option<f64>,
    pub baseline_val: Option<f64>,
    pub truth_train: Option<f64>,
    pub truth_val: Option<f64>,
    /// Baseline minus NCFA.
    pub train_delta_baseline: Option<f64>,
    pub val_delta_baseline: Option<f64>,
    /// Truth-given model minus NCFA.
    pub train_delta_truth: Option<f64>,
    pub val_delta_truth: Option<f64>,
    /// Set when the run failed; the other optional fields are then empty.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub density: f64,
    pub runs: usize,
    pub failures: usize,
    pub exact_recovery_rate: f64,
    pub median_sfd: Option<f64>,
    pub median_shd: Option<f64>,
    pub median_val_delta_baseline: Option<f64>,
    pub median_val_delta_truth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Records in (density, graph, dataset) order.
    pub records: Vec<RunRecord>,
    pub summary: Vec<SweepSummaryRow>,
}

struct RunSpec {
    density_index: usize,
    density: f64,
    graph: usize,
    dataset: usize,
}

fn one_run(cfg: &SweepConfig, spec: &RunSpec) -> RunRecord {
    let graph_seed = rng::derive_path(cfg.seed, &[spec.density_index as u64, spec.graph as u64]);
    let mut rec = RunRecord {
        density: spec.density,
        graph: spec.graph,
        dataset: spec.dataset,
        edges: 0,
        k_true: 0,
        k_est: None,
        lambda: None,
        sfd: None,
        shd: None,
        exact_recovery: None,
        ncfa_train: None,
        ncfa_val: None,
        baseline_train: None,
        baseline_val: None,
        truth_train: None,
        truth_val: None,
        train_delta_baseline: None,
        val_delta_baseline: None,
        train_delta_truth: None,
        val_delta_truth: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let udg = sample_er_udg(cfg.n, spec.density, rng::derive(graph_seed, 0))?;
        rec.edges = udg.edge_count();
        let ecc = EccConfig {
            exact_cap: cfg.run.exact_cap,
            enumerate_all: false,
        };
        let gt = make_ground_truth(&udg, rng::derive(graph_seed, 1), SolveMode::Auto, &ecc)?;
        rec.k_true = gt.k();
        let data_seed = rng::derive_path(graph_seed, &[2, spec.dataset as u64]);
        let data = sample_dataset(&gt, cfg.samples, data_seed)?;
        let run_cfg = RunConfig {
            seed: rng::derive_path(graph_seed, &[3, spec.dataset as u64]),
            execution: Execution::Sequential,
            ..cfg.run.clone()
        };
        let out = run_ncfa(&data, &run_cfg, Some(&gt))?;
        let r = &out.report;
        rec.k_est = Some(r.k);
        rec.lambda = Some(r.lambda);
        if let Some(t) = r.truth {
            rec.sfd = Some(t.sfd);
            rec.shd = Some(t.shd);
            rec.exact_recovery = Some(t.exact_recovery);
        }
        rec.ncfa_train = r.ncfa.map(|l| l.train);
        rec.ncfa_val = r.ncfa.map(|l| l.val);
        rec.baseline_train = r.baseline.map(|l| l.train);
        rec.baseline_val = r.baseline.map(|l| l.val);
        rec.train_delta_baseline = r.training_delta;
        rec.val_delta_baseline = r.validation_delta;
        if let (true, Some((_, ncfa_trace))) = (cfg.truth_model, &out.model) {
            let truth_graph = NcfaGraph::new(
                McmGraph::clone(&gt.mcm),
                vec![1; gt.k()],
            )?;
            let (_, truth_trace) = train(&truth_graph, &data, &run_cfg.train_config())?;
            let d = compute_deltas(ncfa_trace, &truth_trace)?;
            rec.truth_train = Some(truth_trace.final_train_loss());
            rec.truth_val = Some(truth_trace.final_val_loss());
            rec.train_delta_truth = Some(d.training);
            rec.val_delta_truth = Some(d.validation);
        }
        Ok(())
    })();
    if let Err(e) = result {
        rec.error = Some(e.to_string());
    }
    rec
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Per-density aggregates of `records`, in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<SweepSummaryRow> {
    let mut densities: Vec<f64> = Vec::new();
    for r in records {
        if !densities.contains(&r.density) {
            densities.push(r.density);
        }
    }
    densities
        .into_iter()
        .map(|d| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.density == d).collect();
            let ok: Vec<&RunRecord> = rows.iter().copied().filter(|r| r.error.is_none()).collect();
            let collect = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            let recovered = ok.iter().filter(|r| r.exact_recovery == Some(true)).count();
            SweepSummaryRow {
                density: d,
                runs: rows.len(),
                failures: rows.len() - ok.len(),
                exact_recovery_rate: if ok.is_empty() {
                    0.0
                } else {
                    recovered as f64 / ok.len() as f64
                },
                median_sfd: median(collect(&|r| r.sfd.map(|v| v as f64))),
                median_shd: median(collect(&|r| r.shd.map(|v| v as f64))),
                median_val_delta_baseline: median(collect(&|r| r.val_delta_baseline)),
                median_val_delta_truth: median(collect(&|r| r.val_delta_truth)),
            }
        })
        .collect()
}

/// Runs the experiment. Runs execute in parallel under `exec`, each with
/// seeds derived from its (density, graph, dataset) indices, so the result
/// does not depend on scheduling. A failed run is recorded and the sweep
/// continues.
pub fn run_synthetic_experiment(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    if cfg.n < 2 {
        return Err(crate::NcfaError::InvalidInput("sweep needs n >= 2".into()));
    }
    let specs: Vec<RunSpec> = cfg
        .densities
        .iter()
        .enumerate()
        .flat_map(|(di, &density)| {
            (0..cfg.graphs_per_density).flat_map(move |graph| {
                (0..cfg.datasets_per_graph).map(move |dataset| RunSpec {
                    density_index: di,
                    density,
                    graph,
                    dataset,
                })
            })
        })
        .collect();
    let records = exec.map(&specs, |s| one_run(cfg, s));
    let summary = summarize(&records);
    Ok(SweepResult { records, summary })
}

pub fn write_records_csv<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(writer: W, rows: &[SweepSummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vae::TrainConfig;

    fn tiny(epochs: usize) -> SweepConfig {
        SweepConfig {
            n: 5,
            densities: vec![0.3, 0.7],
            graphs_per_density: 2,
            datasets_per_graph: 2,
            samples: 200,
            run: RunConfig {
                train: TrainConfig {
                    epochs,
                    ..TrainConfig::default()
                },
                ..RunConfig::default()
            },
            truth_model: true,
            seed: 3,
        }
    }

    #[test]
    fn order_and_determinism() {
        let cfg = tiny(2);
        let a = run_synthetic_experiment(&cfg, Execution::Parallel).unwrap();
        let b = run_synthetic_experiment(&cfg, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 8);
        assert_eq!(a.summary.len(), 2);
        assert_eq!((a.records[0].density, a.records[0].graph, a.records[0].dataset), (0.3, 0, 0));
        assert_eq!((a.records[7].density, a.records[7].graph, a.records[7].dataset), (0.7, 1, 1));
        assert!(a.records.iter().all(|r| r.error.is_none()));
        // Datasets of one graph share the truth.
        assert_eq!(a.records[0].k_true, a.records[1].k_true);
    }

    #[test]
    fn deltas_reconcile() {
        let res = run_synthetic_experiment(&tiny(2), Execution::Parallel).unwrap();
        for r in &res.records {
            let lhs = r.val_delta_truth.unwrap() - r.val_delta_baseline.unwrap();
            let rhs = r.truth_val.unwrap() - r.baseline_val.unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn failures_are_recorded() {
        let mut cfg = tiny(0);
        cfg.samples = 5;
        let res = run_synthetic_experiment(&cfg, Execution::Parallel).unwrap();
        assert!(res.records.iter().all(|r| r.error.is_some()));
        assert_eq!(res.summary[0].failures, 4);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let res = run_synthetic_experiment(&tiny(0), Execution::Sequential).unwrap();
        let mut out = Vec::new();
        write_records_csv(&mut out, &res.records).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("density,graph,dataset,edges,"));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn median_rule() {
        assert_eq!(median(vec![]), None);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
