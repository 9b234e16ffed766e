//! Executes one [`RunSpec`] and records its trace.

use mas_core::problems::{
    l1_cone, make_mlp_problem, random_quadratic, rosenbrock, FactoredSurface, MlpProblem, Problem,
    SyntheticDataset, ToyLossForm,
};
use mas_core::{norm2, ParamVector, Rng};

use crate::error::HarnessError;
use crate::spec::{build_optimizer, ProblemSpec, RunSpec, ToyForm, DEFAULT_BATCH_SIZE};

/// Parameter snapshots are kept only up to this many parameters.
pub const PARAM_SNAPSHOT_MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based optimizer step.
    pub step: u64,
    /// 1-based epoch the step belongs to.
    pub epoch: u64,
    /// Full-gradient problems: loss after the step. Batched problems: the
    /// mini-batch loss that produced the step's gradient.
    pub loss: f64,
    pub step_norm: f64,
    pub effective_lr: f64,
    pub params: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FinalLoss,
    TestAccuracy,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::FinalLoss => "final_loss",
            Metric::TestAccuracy => "test_accuracy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    /// Step at which a non-finite loss or parameter appeared. Records stop
    /// before it.
    pub diverged_at: Option<u64>,
    pub initial_loss: f64,
    pub metric: Metric,
    /// `None` for diverged runs.
    pub final_metric: Option<f64>,
    pub final_params: Vec<f64>,
}

impl RunTrace {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.records.last().map(|r| r.loss)
    }

    /// First step whose loss is at or below `threshold`.
    pub fn first_reach(&self, threshold: f64) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.loss <= threshold)
            .map(|r| r.step)
    }
}

enum Instance {
    Full(Box<dyn Problem>),
    Mlp {
        problem: MlpProblem,
        test: SyntheticDataset,
    },
}

impl Instance {
    fn problem(&self) -> &dyn Problem {
        match self {
            Instance::Full(p) => p.as_ref(),
            Instance::Mlp { problem, .. } => problem,
        }
    }
}

fn instantiate(spec: &RunSpec) -> Result<(Instance, ParamVector), HarnessError> {
    Ok(match &spec.problem {
        ProblemSpec::FactoredSurface(f) => {
            let form = match f.form {
                ToyForm::Squared => ToyLossForm::Squared,
                ToyForm::Literal => ToyLossForm::Literal,
            };
            (
                Instance::Full(Box::new(FactoredSurface { form })),
                ParamVector::new(f.start.to_vec()),
            )
        }
        ProblemSpec::Rosenbrock(r) => (
            Instance::Full(Box::new(rosenbrock(r.a, r.b)?)),
            ParamVector::new(r.start.to_vec()),
        ),
        ProblemSpec::L1Cone(c) => (
            Instance::Full(Box::new(l1_cone())),
            ParamVector::new(c.start.to_vec()),
        ),
        ProblemSpec::Quadratic(q) => {
            let mut rng = Rng::new(q.seed);
            let problem = random_quadratic(q.dim, &mut rng)?;
            let start = ParamVector::new((0..q.dim).map(|_| rng.uniform(-3.0, 3.0)).collect());
            (Instance::Full(Box::new(problem)), start)
        }
        ProblemSpec::Mlp(m) => {
            let data = SyntheticDataset::generate(m.samples, m.features, m.classes, m.data_seed)?;
            let (train, test) = data.split(m.train_fraction)?;
            if test.is_empty() {
                return Err(HarnessError::InvalidSpec("mlp test split is empty".into()));
            }
            let mut init = Rng::new(spec.seed).fork();
            let problem = make_mlp_problem(train, m.hidden, &mut init)?;
            let start = problem.initial_params().clone();
            (Instance::Mlp { problem, test }, start)
        }
    })
}

fn snapshot(w: &[f64]) -> Option<Vec<f64>> {
    (w.len() <= PARAM_SNAPSHOT_MAX_DIM).then(|| w.to_vec())
}

/// Runs `spec` to completion or divergence. A pure function of `spec`.
pub fn run_single(spec: &RunSpec) -> Result<RunTrace, HarnessError> {
    spec.validate()?;
    let (instance, mut w) = instantiate(spec)?;
    let problem = instance.problem();
    let mut opt = build_optimizer(spec.optimizer, &spec.hyper, problem.dim())?;
    let initial_loss = problem.loss(&w);

    let mut records = Vec::new();
    let mut diverged_at = None;
    let mut step = 0u64;

    match problem.samples() {
        None => {
            let mut grad = problem.grad(&w);
            for epoch in 1..=spec.epochs as u64 {
                step += 1;
                if !grad.is_finite() {
                    diverged_at = Some(step);
                    break;
                }
                let (next, report) = opt.step(&w, &grad)?;
                let (loss, next_grad) = problem.loss_and_grad(&next);
                if !loss.is_finite() || !next.is_finite() {
                    diverged_at = Some(step);
                    break;
                }
                records.push(TraceRecord {
                    step,
                    epoch,
                    loss,
                    step_norm: norm2(&report.step_direction)?,
                    effective_lr: report.effective_lr,
                    params: snapshot(&next),
                });
                w = next;
                grad = next_grad;
            }
        }
        Some(n) => {
            let batch = spec.batch_size.unwrap_or(DEFAULT_BATCH_SIZE).min(n);
            let mut shuffle = {
                let mut root = Rng::new(spec.seed);
                // The first fork drew the initial weights.
                let _init = root.fork();
                root.fork()
            };
            let mut order: Vec<usize> = (0..n).collect();
            'epochs: for epoch in 1..=spec.epochs as u64 {
                shuffle.shuffle(&mut order);
                for chunk in order.chunks(batch) {
                    step += 1;
                    let (loss, grad) = problem.batch_loss_and_grad(&w, chunk);
                    if !loss.is_finite() || !grad.is_finite() {
                        diverged_at = Some(step);
                        break 'epochs;
                    }
                    let (next, report) = opt.step(&w, &grad)?;
                    if !next.is_finite() {
                        diverged_at = Some(step);
                        break 'epochs;
                    }
                    records.push(TraceRecord {
                        step,
                        epoch,
                        loss,
                        step_norm: norm2(&report.step_direction)?,
                        effective_lr: report.effective_lr,
                        params: snapshot(&next),
                    });
                    w = next;
                }
            }
        }
    }

    let (metric, final_metric) = match &instance {
        Instance::Full(_) => (Metric::FinalLoss, records.last().map(|r| r.loss)),
        Instance::Mlp { problem, test } => (Metric::TestAccuracy, Some(problem.accuracy(&w, test))),
    };
    Ok(RunTrace {
        records,
        final_metric: if diverged_at.is_some() {
            None
        } else {
            final_metric
        },
        diverged_at,
        initial_loss,
        metric,
        final_params: w.into_inner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{HyperParams, MlpSpec, QuadraticSpec, RosenbrockSpec};
    use mas_core::OptimizerKind;

    fn rosen(kind: OptimizerKind) -> RunSpec {
        let hyper = HyperParams {
            lr: 1e-4,
            ..HyperParams::default()
        };
        RunSpec::new(
            ProblemSpec::Rosenbrock(RosenbrockSpec::default()),
            kind,
            hyper,
            1000,
        )
    }

    #[test]
    fn rosenbrock_descends_for_all_three() {
        for kind in [OptimizerKind::Sgd, OptimizerKind::Adam, OptimizerKind::Mas] {
            let t = run_single(&rosen(kind)).unwrap();
            assert_eq!(t.initial_loss, 6400.0);
            assert_eq!(t.records.len(), 1000);
            assert!(t.final_loss().unwrap() < 6400.0, "{kind}");
        }
    }

    #[test]
    fn rosenbrock_finals_are_frozen() {
        let finals: Vec<f64> = [OptimizerKind::Sgd, OptimizerKind::Adam, OptimizerKind::Mas]
            .iter()
            .map(|&k| run_single(&rosen(k)).unwrap().final_loss().unwrap())
            .collect();
        let frozen = ROSENBROCK_FINALS;
        for (a, b) in finals.iter().zip(frozen) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    // SGD, ADAM, MAS(0.5, 0.5); lr 1e-4, 1000 steps from (3, 1).
    const ROSENBROCK_FINALS: [f64; 3] = [
        0.126_252_564_072_218_58,
        5_726.448_719_473_234,
        0.002_362_018_354_652_589,
    ];

    #[test]
    fn same_spec_same_trace() {
        let spec = RunSpec {
            seed: 3,
            batch_size: Some(16),
            ..RunSpec::new(
                ProblemSpec::Mlp(MlpSpec {
                    samples: 120,
                    ..MlpSpec::default()
                }),
                OptimizerKind::Mas,
                HyperParams {
                    lr: 0.01,
                    ..HyperParams::default()
                },
                3,
            )
        };
        let a = run_single(&spec).unwrap();
        let b = run_single(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.metric, Metric::TestAccuracy);
        // 96 training samples in batches of 16.
        assert_eq!(a.records.len(), 18);
        assert_eq!(a.records.last().unwrap().epoch, 3);
        assert!(a.records.windows(2).all(|w| w[1].step == w[0].step + 1));
    }

    #[test]
    fn degenerate_mas_run_matches_adam_run() {
        let base = RunSpec::new(
            ProblemSpec::Quadratic(QuadraticSpec { dim: 5, seed: 2 }),
            OptimizerKind::Adam,
            HyperParams {
                lr: 0.01,
                lambda_a: 1.0,
                lambda_s: 0.0,
                ..HyperParams::default()
            },
            200,
        );
        let adam = run_single(&base).unwrap();
        let mas = run_single(&RunSpec {
            optimizer: OptimizerKind::Mas,
            ..base
        })
        .unwrap();
        for (a, m) in adam.records.iter().zip(&mas.records) {
            assert!((a.loss - m.loss).abs() <= 1e-12);
        }
    }

    #[test]
    fn blow_up_is_recorded_not_raised() {
        let spec = RunSpec::new(
            ProblemSpec::Rosenbrock(RosenbrockSpec::default()),
            OptimizerKind::Sgd,
            HyperParams {
                lr: 1.0,
                ..HyperParams::default()
            },
            100,
        );
        let t = run_single(&spec).unwrap();
        let at = t.diverged_at.unwrap();
        assert_eq!(t.records.len() as u64, at - 1);
        assert!(t.final_metric.is_none());
        assert!(t.records.iter().all(|r| r.loss.is_finite()));
    }

    #[test]
    fn snapshots_only_for_small_problems() {
        let small = run_single(&rosen(OptimizerKind::Sgd)).unwrap();
        assert_eq!(small.records[0].params.as_ref().unwrap().len(), 2);
        let big = RunSpec::new(
            ProblemSpec::Quadratic(QuadraticSpec { dim: 9, seed: 0 }),
            OptimizerKind::Sgd,
            HyperParams::default(),
            2,
        );
        assert!(run_single(&big).unwrap().records[0].params.is_none());
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = rosen(OptimizerKind::Sgd);
        s.epochs = 0;
        assert!(run_single(&s).is_err());
        let mut s = rosen(OptimizerKind::Sgd);
        s.batch_size = Some(4);
        assert!(run_single(&s).is_err());
        let mut s = rosen(OptimizerKind::Mas);
        s.hyper.lambda_a = 0.7;
        assert!(run_single(&s).is_err());
    }
}
