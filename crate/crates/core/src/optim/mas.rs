//! MAS: a weighted mix of the ADAM and SGD increments and learning rates.
//!
//! ```text
//! d_k, η_a = Δ_ADAM(w_k, ∇)
//! v_{n_k}  = Δ_SGD(w_k, ∇)
//! merged   = λs·v_{n_k} + λa·d_k
//! η_m      = λs·η + λa·η_a
//! w_{k+1}  = w_k - η_m·merged
//! ```
//!
//! Both sub-optimizers see the same gradient; the objective is evaluated once
//! per step.

use super::adam::{delta_adam, AdamHyper, AdamState};
use super::sgd::{delta_sgd, SgdHyper, SgdState};
use super::{descend, Optimizer, OptimizerKind, StepReport};
use crate::error::{Error, Result};
use crate::param::{GradVector, ParamVector};

/// Allowed deviation of `λa + λs` from 1 for constrained mixes.
pub const LAMBDA_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasHyper {
    pub lambda_a: f64,
    pub lambda_s: f64,
    pub sgd: SgdHyper,
    pub adam: AdamHyper,
    /// Set by [`MasHyper::unconstrained`]: the weights need not sum to one.
    pub unconstrained: bool,
}

impl MasHyper {
    /// Mix with `λa + λs = 1`.
    pub fn new(lambda_a: f64, lambda_s: f64, sgd: SgdHyper, adam: AdamHyper) -> Result<Self> {
        let h = Self {
            lambda_a,
            lambda_s,
            sgd,
            adam,
            unconstrained: false,
        };
        h.validate()?;
        Ok(h)
    }

    /// Any nonnegative pair of weights.
    pub fn unconstrained(
        lambda_a: f64,
        lambda_s: f64,
        sgd: SgdHyper,
        adam: AdamHyper,
    ) -> Result<Self> {
        let h = Self {
            lambda_a,
            lambda_s,
            sgd,
            adam,
            unconstrained: true,
        };
        h.validate()?;
        Ok(h)
    }

    /// One learning rate for both components, default SGD and ADAM settings otherwise.
    pub fn with_shared_lr(eta: f64, lambda_a: f64, lambda_s: f64) -> Result<Self> {
        Self::new(lambda_a, lambda_s, SgdHyper::new(eta), AdamHyper::new(eta))
    }

    /// `η_m = λs·η + λa·η_a`, with `η` taken from the SGD component.
    pub fn merged_lr(&self) -> f64 {
        self.lambda_s * self.sgd.eta + self.lambda_a * self.adam.effective_lr()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("lambda_a", self.lambda_a), ("lambda_s", self.lambda_s)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidHyper { name, value });
            }
        }
        if !self.unconstrained && (self.lambda_a + self.lambda_s - 1.0).abs() > LAMBDA_SUM_TOLERANCE
        {
            return Err(Error::LambdaSum {
                lambda_a: self.lambda_a,
                lambda_s: self.lambda_s,
            });
        }
        self.sgd.validate()?;
        self.adam.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasState {
    pub sgd: SgdState,
    pub adam: AdamState,
}

impl MasState {
    pub fn new(dim: usize) -> Self {
        Self {
            sgd: SgdState::new(dim),
            adam: AdamState::new(dim),
        }
    }
}

/// Everything one MAS step computes before touching the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MasIncrement {
    /// `v_{n_k}` from the SGD component.
    pub sgd_increment: GradVector,
    /// `d_k` from the ADAM component.
    pub adam_increment: GradVector,
    /// `η` of the SGD component.
    pub eta: f64,
    pub eta_a: f64,
    /// `λs·v_{n_k} + λa·d_k`.
    pub merged: GradVector,
    /// `λs·η + λa·η_a`.
    pub eta_m: f64,
}

/// Advances both sub-states once and returns the merged increment.
pub fn mas_delta(
    state: &mut MasState,
    w: &ParamVector,
    grad: &GradVector,
    h: &MasHyper,
) -> Result<MasIncrement> {
    h.validate()?;
    // Validate both sub-steps up front so a failure leaves neither state advanced.
    crate::error::check_len(w.len(), state.sgd.v.len())?;
    crate::error::check_len(w.len(), state.adam.m.len())?;

    let (adam_increment, eta_a) = delta_adam(&mut state.adam, w, grad, &h.adam)?;
    let sgd_increment = delta_sgd(&mut state.sgd, w, grad, &h.sgd)?;
    let merged = GradVector::new(
        sgd_increment
            .iter()
            .zip(adam_increment.iter())
            .map(|(v, d)| h.lambda_s * v + h.lambda_a * d)
            .collect(),
    );
    let eta = h.sgd.eta;
    Ok(MasIncrement {
        sgd_increment,
        adam_increment,
        eta,
        eta_a,
        merged,
        eta_m: h.lambda_s * eta + h.lambda_a * eta_a,
    })
}

/// `w_{k+1} = w_k - η_m·merged`.
pub fn mas_step(
    state: &mut MasState,
    w: &ParamVector,
    grad: &GradVector,
    h: &MasHyper,
) -> Result<(ParamVector, StepReport)> {
    let inc = mas_delta(state, w, grad, h)?;
    Ok(descend(w, inc.eta_m, inc.merged))
}

#[derive(Debug, Clone)]
pub struct Mas {
    pub hyper: MasHyper,
    pub state: MasState,
}

impl Mas {
    pub fn new(hyper: MasHyper, dim: usize) -> Result<Self> {
        hyper.validate()?;
        Ok(Self {
            hyper,
            state: MasState::new(dim),
        })
    }
}

impl Optimizer for Mas {
    fn kind(&self) -> OptimizerKind {
        OptimizerKind::Mas
    }

    fn dim(&self) -> usize {
        self.state.sgd.v.len()
    }

    fn steps(&self) -> u64 {
        self.state.sgd.k
    }

    fn step(&mut self, w: &ParamVector, grad: &GradVector) -> Result<(ParamVector, StepReport)> {
        mas_step(&mut self.state, w, grad, &self.hyper)
    }
}
