//! SGD with weight decay, momentum, dampening and Nesterov momentum.

use alloc::vec;
use alloc::vec::Vec;

use super::{descend, Optimizer, OptimizerKind, StepReport};
use crate::error::{check_finite, check_len, Error, Result};
use crate::param::{GradVector, ParamVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdHyper {
    /// Learning rate `η`.
    pub eta: f64,
    /// Weight decay `γ`.
    pub gamma: f64,
    /// Momentum `μ`.
    pub mu: f64,
    /// Dampening `d`.
    pub dampening: f64,
    pub nesterov: bool,
    /// Permit Nesterov together with a nonzero dampening. Nesterov then reads
    /// the dampened buffer.
    pub allow_nesterov_dampening: bool,
}

impl SgdHyper {
    /// Plain SGD: no decay, no momentum.
    pub fn new(eta: f64) -> Self {
        Self {
            eta,
            gamma: 0.0,
            mu: 0.0,
            dampening: 0.0,
            nesterov: false,
            allow_nesterov_dampening: false,
        }
    }

    pub fn with_momentum(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_weight_decay(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_dampening(mut self, dampening: f64) -> Self {
        self.dampening = dampening;
        self
    }

    pub fn with_nesterov(mut self, nesterov: bool) -> Self {
        self.nesterov = nesterov;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidHyper {
                name: "eta",
                value: self.eta,
            });
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidHyper {
                name: "gamma",
                value: self.gamma,
            });
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(Error::InvalidHyper {
                name: "mu",
                value: self.mu,
            });
        }
        if !(0.0..1.0).contains(&self.dampening) {
            return Err(Error::InvalidHyper {
                name: "dampening",
                value: self.dampening,
            });
        }
        if self.nesterov {
            if self.mu == 0.0 {
                return Err(Error::Nesterov("requires momentum > 0"));
            }
            if self.dampening != 0.0 && !self.allow_nesterov_dampening {
                return Err(Error::Nesterov("requires dampening = 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgdState {
    /// Momentum buffer `v`, before any Nesterov look-ahead.
    pub v: Vec<f64>,
    /// Completed steps.
    pub k: u64,
}

impl SgdState {
    pub fn new(dim: usize) -> Self {
        Self {
            v: vec![0.0; dim],
            k: 0,
        }
    }
}

/// `∇̂ = ∇ + w·γ`.
pub fn apply_weight_decay(grad: &GradVector, w: &ParamVector, gamma: f64) -> Result<GradVector> {
    check_len(w.len(), grad.len())?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::InvalidHyper {
            name: "gamma",
            value: gamma,
        });
    }
    Ok(GradVector::new(
        grad.iter()
            .zip(w.iter())
            .map(|(g, w)| g + w * gamma)
            .collect(),
    ))
}

/// Advances the momentum buffer and returns the increment `v_{n_k}`.
///
/// The first step with momentum copies `∇̂` into the buffer without the
/// `(1 - d)` factor. With `μ = 0` the buffer is never touched and `∇̂` is
/// returned as is.
pub fn delta_sgd(
    state: &mut SgdState,
    w: &ParamVector,
    grad: &GradVector,
    h: &SgdHyper,
) -> Result<GradVector> {
    h.validate()?;
    check_len(w.len(), grad.len())?;
    check_len(w.len(), state.v.len())?;
    check_finite(grad)?;

    let mut g_hat = apply_weight_decay(grad, w, h.gamma)?;
    if h.mu != 0.0 {
        if state.k == 0 {
            state.v.copy_from_slice(&g_hat);
        } else {
            for (v, g) in state.v.iter_mut().zip(g_hat.iter()) {
                *v = *v * h.mu + g * (1.0 - h.dampening);
            }
        }
        if h.nesterov {
            for (g, v) in g_hat.as_mut_slice().iter_mut().zip(&state.v) {
                *g += v * h.mu;
            }
        } else {
            g_hat.as_mut_slice().copy_from_slice(&state.v);
        }
    }
    state.k += 1;
    Ok(g_hat)
}

/// `w_{k+1} = w_k - η·v_{n_k}`.
pub fn sgd_step(
    state: &mut SgdState,
    w: &ParamVector,
    grad: &GradVector,
    h: &SgdHyper,
) -> Result<(ParamVector, StepReport)> {
    let increment = delta_sgd(state, w, grad, h)?;
    Ok(descend(w, h.eta, increment))
}

#[derive(Debug, Clone)]
pub struct Sgd {
    pub hyper: SgdHyper,
    pub state: SgdState,
}

impl Sgd {
    pub fn new(hyper: SgdHyper, dim: usize) -> Result<Self> {
        hyper.validate()?;
        Ok(Self {
            hyper,
            state: SgdState::new(dim),
        })
    }
}

impl Optimizer for Sgd {
    fn kind(&self) -> OptimizerKind {
        OptimizerKind::Sgd
    }

    fn dim(&self) -> usize {
        self.state.v.len()
    }

    fn steps(&self) -> u64 {
        self.state.k
    }

    fn step(&mut self, w: &ParamVector, grad: &GradVector) -> Result<(ParamVector, StepReport)> {
        sgd_step(&mut self.state, w, grad, &self.hyper)
    }
}
