//! Multi-seed runs over optimizer and λ settings, aggregated into summary rows.

use mas_core::OptimizerKind;
use rayon::prelude::*;

use crate::error::HarnessError;
use crate::run::{run_single, Metric, RunTrace};
use crate::spec::RunSpec;

/// The five MAS weightings of the experimental grid, in table order.
pub const GRID_LAMBDAS: [(f64, f64); 5] =
    [(0.5, 0.5), (0.4, 0.6), (0.6, 0.4), (0.7, 0.3), (0.3, 0.7)];

/// One table row to be: a label and the runs (one per seed) behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunGroup {
    pub label: String,
    pub optimizer: OptimizerKind,
    pub lambda_a: f64,
    pub lambda_s: f64,
    pub specs: Vec<RunSpec>,
}

impl RunGroup {
    /// One spec per seed, each a copy of `base` with its seed replaced.
    pub fn from_seeds(label: impl Into<String>, base: &RunSpec, seeds: &[u64]) -> Self {
        let (lambda_a, lambda_s) = table_lambdas(base);
        RunGroup {
            label: label.into(),
            optimizer: base.optimizer,
            lambda_a,
            lambda_s,
            specs: seeds
                .iter()
                .map(|&seed| RunSpec {
                    seed,
                    ..base.clone()
                })
                .collect(),
        }
    }
}

/// The (λa, λs) a row reports: ADAM is (1, 0), SGD is (0, 1).
pub fn table_lambdas(spec: &RunSpec) -> (f64, f64) {
    match spec.optimizer {
        OptimizerKind::Adam => (1.0, 0.0),
        OptimizerKind::Sgd => (0.0, 1.0),
        OptimizerKind::Mas => (spec.hyper.lambda_a, spec.hyper.lambda_s),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub optimizer: OptimizerKind,
    pub lambda_a: f64,
    pub lambda_s: f64,
    pub metric: Metric,
    /// Mean over non-diverged runs; `None` when every run diverged.
    pub metric_avg: Option<f64>,
    /// Largest over non-diverged runs.
    pub metric_max: Option<f64>,
    pub n_runs: usize,
    pub n_diverged: usize,
}

/// Aggregates per-seed finals. `None` entries are diverged runs.
pub fn summarize(group: &RunGroup, metric: Metric, finals: &[Option<f64>]) -> SummaryRow {
    let ok: Vec<f64> = finals.iter().flatten().copied().collect();
    let avg = (!ok.is_empty()).then(|| ok.iter().sum::<f64>() / ok.len() as f64);
    let max = ok.iter().copied().reduce(f64::max);
    SummaryRow {
        label: group.label.clone(),
        optimizer: group.optimizer,
        lambda_a: group.lambda_a,
        lambda_s: group.lambda_s,
        metric,
        metric_avg: avg,
        metric_max: max,
        n_runs: finals.len(),
        n_diverged: finals.len() - ok.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome {
    pub rows: Vec<SummaryRow>,
    /// `traces[g][s]` belongs to `groups[g].specs[s]`.
    pub traces: Vec<Vec<RunTrace>>,
}

impl GridOutcome {
    pub fn diverged_runs(&self) -> usize {
        self.rows.iter().map(|r| r.n_diverged).sum()
    }
}

/// Runs every spec of every group. `jobs` caps the worker threads; 0 means
/// one per core. Results do not depend on `jobs`.
pub fn run_groups(groups: &[RunGroup], jobs: usize) -> Result<GridOutcome, HarnessError> {
    let flat: Vec<(usize, &RunSpec)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, group)| group.specs.iter().map(move |s| (g, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let results: Vec<Result<RunTrace, HarnessError>> =
        pool.install(|| flat.par_iter().map(|(_, spec)| run_single(spec)).collect());

    let mut traces: Vec<Vec<RunTrace>> = groups.iter().map(|_| Vec::new()).collect();
    for ((g, _), result) in flat.iter().zip(results) {
        traces[*g].push(result?);
    }
    let rows = groups
        .iter()
        .zip(&traces)
        .map(|(group, runs)| {
            let metric = runs.first().map_or(Metric::FinalLoss, |t| t.metric);
            let finals: Vec<Option<f64>> = runs.iter().map(|t| t.final_metric).collect();
            summarize(group, metric, &finals)
        })
        .collect();
    Ok(GridOutcome { rows, traces })
}

/// MAS over each (λa, λs) pair, one row per pair in the given order.
pub fn run_grid(
    base: &RunSpec,
    lambdas: &[(f64, f64)],
    seeds: &[u64],
    jobs: usize,
) -> Result<GridOutcome, HarnessError> {
    let mut groups = Vec::with_capacity(lambdas.len());
    for &(lambda_a, lambda_s) in lambdas {
        let mut spec = base.clone();
        spec.optimizer = OptimizerKind::Mas;
        spec.hyper.lambda_a = lambda_a;
        spec.hyper.lambda_s = lambda_s;
        if spec.hyper.mas().is_err() {
            return Err(HarnessError::LambdaPair { lambda_a, lambda_s });
        }
        groups.push(RunGroup::from_seeds("MAS", &spec, seeds));
    }
    run_groups(&groups, jobs)
}

/// The table layout: ADAM and SGD baselines, then MAS at each pair.
pub fn table_groups(base: &RunSpec, lambdas: &[(f64, f64)], seeds: &[u64]) -> Vec<RunGroup> {
    let mut groups = vec![
        RunGroup::from_seeds(
            "Adam",
            &RunSpec {
                optimizer: OptimizerKind::Adam,
                ..base.clone()
            },
            seeds,
        ),
        RunGroup::from_seeds(
            "SGD",
            &RunSpec {
                optimizer: OptimizerKind::Sgd,
                ..base.clone()
            },
            seeds,
        ),
    ];
    for &(lambda_a, lambda_s) in lambdas {
        let mut spec = base.clone();
        spec.optimizer = OptimizerKind::Mas;
        spec.hyper.lambda_a = lambda_a;
        spec.hyper.lambda_s = lambda_s;
        groups.push(RunGroup::from_seeds("MAS", &spec, seeds));
    }
    groups
}

pub fn seed_range(n: u64) -> Vec<u64> {
    (0..n).collect()
}
