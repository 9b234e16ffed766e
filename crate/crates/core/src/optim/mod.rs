//! The three update rules.
//!
//! Each rule is split the same way: an increment function (`delta_*`) that
//! advances the optimizer state and returns the raw increment, and a step
//! function (`*_step`) that applies `w - lr·increment`. MAS is built from the
//! two increment functions and never re-evaluates the gradient.

pub mod adam;
pub mod mas;
pub mod sgd;

use alloc::vec::Vec;
use core::fmt;

pub use adam::{adam_step, delta_adam, Adam, AdamHyper, AdamState, EpsPlacement};
pub use mas::{mas_delta, mas_step, Mas, MasHyper, MasIncrement, MasState};
pub use sgd::{apply_weight_decay, delta_sgd, sgd_step, Sgd, SgdHyper, SgdState};

use crate::error::Result;
use crate::param::{GradVector, ParamVector};

/// What one step did to the parameters.
///
/// `step_direction` is exactly `effective_lr * raw_increment`, and the new
/// parameters are exactly `old - step_direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step_direction: GradVector,
    /// `η` for SGD, `η_a` for ADAM, `η_m` for MAS.
    pub effective_lr: f64,
    /// `v_{n_k}` for SGD, `d_k` for ADAM, `merged` for MAS.
    pub raw_increment: GradVector,
}

/// `w - lr·increment`, returning the new point and its report.
pub(crate) fn descend(
    w: &ParamVector,
    lr: f64,
    increment: GradVector,
) -> (ParamVector, StepReport) {
    let direction: Vec<f64> = increment.iter().map(|x| lr * x).collect();
    let next: Vec<f64> = w.iter().zip(&direction).map(|(w, s)| w - s).collect();
    (
        ParamVector::new(next),
        StepReport {
            step_direction: GradVector::new(direction),
            effective_lr: lr,
            raw_increment: increment,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Sgd,
    Adam,
    Mas,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
            OptimizerKind::Mas => "mas",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A stateful optimizer bound to a fixed parameter count.
pub trait Optimizer {
    fn kind(&self) -> OptimizerKind;

    fn dim(&self) -> usize;

    /// Number of completed steps.
    fn steps(&self) -> u64;

    fn step(&mut self, w: &ParamVector, grad: &GradVector) -> Result<(ParamVector, StepReport)>;
}
