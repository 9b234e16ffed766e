//! What a run is: problem, optimizer, hyperparameters, budget and seed.

use mas_core::{
    Adam, AdamHyper, EpsPlacement, Mas, MasHyper, Optimizer, OptimizerKind, Sgd, SgdHyper,
};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToyForm {
    #[default]
    Squared,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FactoredSpec {
    pub form: ToyForm,
    pub start: [f64; 2],
}

impl Default for FactoredSpec {
    fn default() -> Self {
        Self {
            form: ToyForm::Squared,
            start: [1.5, 1.25],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RosenbrockSpec {
    pub a: f64,
    pub b: f64,
    pub start: [f64; 2],
}

impl Default for RosenbrockSpec {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 100.0,
            start: [3.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct L1ConeSpec {
    pub start: [f64; 2],
}

impl Default for L1ConeSpec {
    fn default() -> Self {
        Self { start: [3.0, 2.0] }
    }
}

/// A random quadratic. Both the matrix and the start point come from `seed`,
/// so every optimizer sees the same instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadraticSpec {
    pub dim: usize,
    pub seed: u64,
}

impl Default for QuadraticSpec {
    fn default() -> Self {
        Self { dim: 8, seed: 0 }
    }
}

/// Synthetic classification. The dataset is fixed by `data_seed`; the run
/// seed drives weight initialization and batch shuffling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpSpec {
    pub samples: usize,
    pub features: usize,
    pub classes: usize,
    pub hidden: usize,
    pub data_seed: u64,
    pub train_fraction: f64,
}

impl Default for MlpSpec {
    fn default() -> Self {
        Self {
            samples: 500,
            features: 8,
            classes: 4,
            hidden: 16,
            data_seed: 0,
            train_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    FactoredSurface(FactoredSpec),
    Rosenbrock(RosenbrockSpec),
    L1Cone(L1ConeSpec),
    Quadratic(QuadraticSpec),
    Mlp(MlpSpec),
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::FactoredSurface(_) => "factored_surface",
            ProblemSpec::Rosenbrock(_) => "rosenbrock",
            ProblemSpec::L1Cone(_) => "l1_cone",
            ProblemSpec::Quadratic(_) => "quadratic",
            ProblemSpec::Mlp(_) => "mlp",
        }
    }

    pub fn is_batched(&self) -> bool {
        matches!(self, ProblemSpec::Mlp(_))
    }
}

/// Every scalar the three optimizers take. Defaults follow the experimental
/// setup: `β1 = 0.9`, `β2 = 0.999`, `ε = 1e-8`, no AMSGrad, no dampening, no
/// Nesterov.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub lr: f64,
    /// ADAM's own learning rate; `lr` when unset.
    pub adam_lr: Option<f64>,
    pub momentum: f64,
    pub weight_decay: f64,
    pub dampening: f64,
    pub nesterov: bool,
    pub allow_nesterov_dampening: bool,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub amsgrad: bool,
    pub eps_placement: EpsPlacement,
    pub lambda_a: f64,
    pub lambda_s: f64,
    pub unconstrained_lambdas: bool,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            adam_lr: None,
            momentum: 0.0,
            weight_decay: 0.0,
            dampening: 0.0,
            nesterov: false,
            allow_nesterov_dampening: false,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            amsgrad: false,
            eps_placement: EpsPlacement::Increment,
            lambda_a: 0.5,
            lambda_s: 0.5,
            unconstrained_lambdas: false,
        }
    }
}

impl HyperParams {
    pub fn sgd(&self) -> SgdHyper {
        SgdHyper {
            eta: self.lr,
            gamma: self.weight_decay,
            mu: self.momentum,
            dampening: self.dampening,
            nesterov: self.nesterov,
            allow_nesterov_dampening: self.allow_nesterov_dampening,
        }
    }

    pub fn adam(&self) -> AdamHyper {
        AdamHyper {
            eta: self.adam_lr.unwrap_or(self.lr),
            gamma: self.weight_decay,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            amsgrad: self.amsgrad,
            eps_placement: self.eps_placement,
        }
    }

    pub fn mas(&self) -> mas_core::Result<MasHyper> {
        if self.unconstrained_lambdas {
            MasHyper::unconstrained(self.lambda_a, self.lambda_s, self.sgd(), self.adam())
        } else {
            MasHyper::new(self.lambda_a, self.lambda_s, self.sgd(), self.adam())
        }
    }

    /// Checks the hyperparameters the given optimizer actually reads.
    pub fn validate_for(&self, kind: OptimizerKind) -> mas_core::Result<()> {
        match kind {
            OptimizerKind::Sgd => self.sgd().validate(),
            OptimizerKind::Adam => self.adam().validate(),
            OptimizerKind::Mas => self.mas().map(|_| ()),
        }
    }
}

pub fn build_optimizer(
    kind: OptimizerKind,
    hyper: &HyperParams,
    dim: usize,
) -> mas_core::Result<Box<dyn Optimizer + Send>> {
    Ok(match kind {
        OptimizerKind::Sgd => Box::new(Sgd::new(hyper.sgd(), dim)?),
        OptimizerKind::Adam => Box::new(Adam::new(hyper.adam(), dim)?),
        OptimizerKind::Mas => Box::new(Mas::new(hyper.mas()?, dim)?),
    })
}

pub fn parse_optimizer(name: &str) -> Option<OptimizerKind> {
    match name.to_ascii_lowercase().as_str() {
        "sgd" => Some(OptimizerKind::Sgd),
        "adam" => Some(OptimizerKind::Adam),
        "mas" => Some(OptimizerKind::Mas),
        _ => None,
    }
}

/// Fully determines a run: equal specs give identical traces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemSpec,
    pub optimizer: OptimizerKind,
    pub hyper: HyperParams,
    /// For full-gradient problems one epoch is one optimizer step.
    pub epochs: usize,
    /// Mini-batch size; batched problems only. Defaults to
    /// [`DEFAULT_BATCH_SIZE`] when unset.
    pub batch_size: Option<usize>,
    pub seed: u64,
}

pub const DEFAULT_BATCH_SIZE: usize = 32;

impl RunSpec {
    pub fn new(
        problem: ProblemSpec,
        optimizer: OptimizerKind,
        hyper: HyperParams,
        epochs: usize,
    ) -> Self {
        Self {
            problem,
            optimizer,
            hyper,
            epochs,
            batch_size: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.epochs == 0 {
            return Err(HarnessError::InvalidSpec(
                "epochs must be at least 1".into(),
            ));
        }
        match self.batch_size {
            Some(0) => {
                return Err(HarnessError::InvalidSpec(
                    "batch_size must be at least 1".into(),
                ))
            }
            Some(_) if !self.problem.is_batched() => {
                return Err(HarnessError::InvalidSpec(format!(
                    "batch_size does not apply to the {} problem",
                    self.problem.name()
                )))
            }
            _ => {}
        }
        self.hyper.validate_for(self.optimizer)?;
        Ok(())
    }
}
