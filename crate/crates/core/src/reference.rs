//! Naive transcription of the three update rules, used as a test oracle.
//!
//! Nothing here calls into [`crate::optim`]. Each rule is written out line by
//! line over plain `Vec<f64>` buffers, with no shared helpers, so that an error
//! in the main implementation cannot be mirrored here by construction. The
//! hyperparameter structs are shared because they only carry data.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::optim::{AdamHyper, EpsPlacement, MasHyper, OptimizerKind, SgdHyper};

/// Hyperparameters for one oracle run.
#[derive(Debug, Clone, Copy)]
pub enum ReferenceHyper {
    Sgd(SgdHyper),
    Adam(AdamHyper),
    Mas(MasHyper),
}

impl ReferenceHyper {
    pub fn kind(&self) -> OptimizerKind {
        match self {
            ReferenceHyper::Sgd(_) => OptimizerKind::Sgd,
            ReferenceHyper::Adam(_) => OptimizerKind::Adam,
            ReferenceHyper::Mas(_) => OptimizerKind::Mas,
        }
    }
}

/// Every buffer any of the three rules needs.
#[derive(Debug, Clone)]
pub struct ReferenceState {
    pub k: u64,
    pub v: Vec<f64>,
    pub m: Vec<f64>,
    pub va: Vec<f64>,
    pub vhat: Vec<f64>,
}

impl ReferenceState {
    pub fn new(dim: usize) -> Self {
        ReferenceState {
            k: 0,
            v: vec![0.0; dim],
            m: vec![0.0; dim],
            va: vec![0.0; dim],
            vhat: vec![0.0; dim],
        }
    }
}

/// One step of the selected rule. Returns the new weights.
pub fn naive_reference_step(
    hyper: &ReferenceHyper,
    state: &mut ReferenceState,
    w: &[f64],
    grad: &[f64],
) -> Result<Vec<f64>> {
    let n = w.len();
    if grad.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: grad.len(),
        });
    }
    if state.v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: state.v.len(),
        });
    }
    for i in 0..n {
        if grad[i].is_nan() || grad[i].is_infinite() {
            return Err(Error::NonFinite {
                index: i,
                value: grad[i],
            });
        }
    }

    let mut out = vec![0.0; n];
    match hyper {
        ReferenceHyper::Sgd(h) => {
            let vn = reference_delta_sgd(h, state, w, grad);
            for i in 0..n {
                out[i] = w[i] - h.eta * vn[i];
            }
        }
        ReferenceHyper::Adam(h) => {
            let (d, eta_a) = reference_delta_adam(h, state, w, grad);
            for i in 0..n {
                out[i] = w[i] - eta_a * d[i];
            }
        }
        ReferenceHyper::Mas(h) => {
            let (d, eta_a) = reference_delta_adam(&h.adam, state, w, grad);
            let vn = reference_delta_sgd(&h.sgd, state, w, grad);
            let eta_m = h.lambda_s * h.sgd.eta + h.lambda_a * eta_a;
            for i in 0..n {
                let merged = h.lambda_s * vn[i] + h.lambda_a * d[i];
                out[i] = w[i] - eta_m * merged;
            }
        }
    }
    state.k += 1;
    Ok(out)
}

// Does not advance `state.k`; the caller does, once per step.
fn reference_delta_sgd(
    h: &SgdHyper,
    state: &mut ReferenceState,
    w: &[f64],
    grad: &[f64],
) -> Vec<f64> {
    let n = w.len();
    let mut g_hat = vec![0.0; n];
    for i in 0..n {
        g_hat[i] = grad[i] + w[i] * h.gamma;
    }
    if h.mu == 0.0 {
        return g_hat;
    }
    for i in 0..n {
        if state.k == 0 {
            state.v[i] = g_hat[i];
        } else {
            state.v[i] = state.v[i] * h.mu + g_hat[i] * (1.0 - h.dampening);
        }
    }
    let mut result = vec![0.0; n];
    for i in 0..n {
        if h.nesterov {
            result[i] = g_hat[i] + state.v[i] * h.mu;
        } else {
            result[i] = state.v[i];
        }
    }
    result
}

fn reference_delta_adam(
    h: &AdamHyper,
    state: &mut ReferenceState,
    w: &[f64],
    grad: &[f64],
) -> (Vec<f64>, f64) {
    let n = w.len();
    let mut d = vec![0.0; n];
    for i in 0..n {
        let g_hat = grad[i] + w[i] * h.gamma;
        state.m[i] = state.m[i] * h.beta1 + g_hat * (1.0 - h.beta1);
        state.va[i] = state.va[i] * h.beta2 + g_hat * g_hat * (1.0 - h.beta2);
        let mut second = state.va[i];
        if h.amsgrad {
            if state.va[i] > state.vhat[i] {
                state.vhat[i] = state.va[i];
            }
            second = state.vhat[i];
        }
        d[i] = match h.eps_placement {
            EpsPlacement::Increment => {
                libm::sqrt(1.0 - h.beta2) * state.m[i] / (libm::sqrt(second) + h.eps)
            }
            EpsPlacement::Denominator => {
                let denom = libm::sqrt(second) / (libm::sqrt(1.0 - h.beta2) + h.eps);
                if denom == 0.0 {
                    0.0
                } else {
                    state.m[i] / denom
                }
            }
        };
    }
    (d, h.eta / (1.0 - h.beta1))
}
