//! ADAM with a constant moment correction and optional AMSGrad.
//!
//! The moments are the usual exponential averages, but the correction factor
//! is the constant `√(1-β2)/(1-β1)` rather than the step-dependent
//! `√(1-β2^k)/(1-β1^k)`. It is split between the increment and the learning
//! rate:
//!
//! ```text
//! d_k = √(1-β2)·m_k / (√v_k + ε)
//! η_a = η / (1-β1)
//! w_{k+1} = w_k - η_a·d_k
//! ```
//!
//! where `v_k` is the running maximum `v̂_k` under AMSGrad, else `vᵃ_k`.

use alloc::vec;
use alloc::vec::Vec;

use super::{descend, Optimizer, OptimizerKind, StepReport};
use crate::error::{check_finite, check_len, Error, Result};
use crate::param::{GradVector, ParamVector};

/// Where `ε` enters the increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsPlacement {
    /// `d = √(1-β2)·m / (√v + ε)`.
    #[default]
    Increment,
    /// `d = m / (√v / (√(1-β2) + ε))`. Differs from [`Increment`](Self::Increment)
    /// by `O(ε)`. When `v = 0` (hence `m = 0`) the increment is taken as 0.
    Denominator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub eta: f64,
    /// Weight decay `γ`, folded into the gradient.
    pub gamma: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub amsgrad: bool,
    pub eps_placement: EpsPlacement,
}

impl AdamHyper {
    /// `β1 = 0.9`, `β2 = 0.999`, `ε = 1e-8`, no decay, no AMSGrad.
    pub fn new(eta: f64) -> Self {
        Self {
            eta,
            gamma: 0.0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            amsgrad: false,
            eps_placement: EpsPlacement::Increment,
        }
    }

    pub fn with_betas(mut self, beta1: f64, beta2: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_weight_decay(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_amsgrad(mut self, amsgrad: bool) -> Self {
        self.amsgrad = amsgrad;
        self
    }

    /// `η_a = η / (1 - β1)`.
    pub fn effective_lr(&self) -> f64 {
        self.eta / (1.0 - self.beta1)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("eta", self.eta, self.eta > 0.0 && self.eta.is_finite()),
            (
                "gamma",
                self.gamma,
                self.gamma >= 0.0 && self.gamma.is_finite(),
            ),
            ("beta1", self.beta1, (0.0..1.0).contains(&self.beta1)),
            ("beta2", self.beta2, (0.0..1.0).contains(&self.beta2)),
            ("eps", self.eps, self.eps > 0.0 && self.eps.is_finite()),
        ];
        match checks.iter().find(|(_, _, ok)| !ok) {
            Some(&(name, value, _)) => Err(Error::InvalidHyper { name, value }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    /// First moment `m`.
    pub m: Vec<f64>,
    /// Second moment `vᵃ`.
    pub va: Vec<f64>,
    /// Running maximum `v̂` of `vᵃ`; only advanced under AMSGrad.
    pub vhat: Vec<f64>,
    pub k: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        Self {
            m: vec![0.0; dim],
            va: vec![0.0; dim],
            vhat: vec![0.0; dim],
            k: 0,
        }
    }
}

/// Advances the moments and returns `(d_k, η_a)`.
pub fn delta_adam(
    state: &mut AdamState,
    w: &ParamVector,
    grad: &GradVector,
    h: &AdamHyper,
) -> Result<(GradVector, f64)> {
    h.validate()?;
    check_len(w.len(), grad.len())?;
    check_len(w.len(), state.m.len())?;
    check_len(w.len(), state.va.len())?;
    check_len(w.len(), state.vhat.len())?;
    check_finite(grad)?;

    let sqrt_one_minus_beta2 = libm::sqrt(1.0 - h.beta2);
    let mut d = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        let g_hat = grad[i] + w[i] * h.gamma;
        state.m[i] = state.m[i] * h.beta1 + g_hat * (1.0 - h.beta1);
        state.va[i] = state.va[i] * h.beta2 + g_hat * g_hat * (1.0 - h.beta2);
        let second = if h.amsgrad {
            state.vhat[i] = state.vhat[i].max(state.va[i]);
            state.vhat[i]
        } else {
            state.va[i]
        };
        let di = match h.eps_placement {
            EpsPlacement::Increment => {
                sqrt_one_minus_beta2 * state.m[i] / (libm::sqrt(second) + h.eps)
            }
            EpsPlacement::Denominator => {
                let denom = libm::sqrt(second) / (sqrt_one_minus_beta2 + h.eps);
                if denom == 0.0 {
                    0.0
                } else {
                    state.m[i] / denom
                }
            }
        };
        d.push(di);
    }
    state.k += 1;
    Ok((GradVector::new(d), h.effective_lr()))
}

/// `w_{k+1} = w_k - η_a·d_k`.
pub fn adam_step(
    state: &mut AdamState,
    w: &ParamVector,
    grad: &GradVector,
    h: &AdamHyper,
) -> Result<(ParamVector, StepReport)> {
    let (d, eta_a) = delta_adam(state, w, grad, h)?;
    Ok(descend(w, eta_a, d))
}

#[derive(Debug, Clone)]
pub struct Adam {
    pub hyper: AdamHyper,
    pub state: AdamState,
}

impl Adam {
    pub fn new(hyper: AdamHyper, dim: usize) -> Result<Self> {
        hyper.validate()?;
        Ok(Self {
            hyper,
            state: AdamState::new(dim),
        })
    }
}

impl Optimizer for Adam {
    fn kind(&self) -> OptimizerKind {
        OptimizerKind::Adam
    }

    fn dim(&self) -> usize {
        self.state.m.len()
    }

    fn steps(&self) -> u64 {
        self.state.k
    }

    fn step(&mut self, w: &ParamVector, grad: &GradVector) -> Result<(ParamVector, StepReport)> {
        adam_step(&mut self.state, w, grad, &self.hyper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> ParamVector {
        ParamVector::from(v)
    }

    fn g(v: &[f64]) -> GradVector {
        GradVector::from(v)
    }

    #[test]
    fn first_step_scalar() {
        let h = AdamHyper::new(0.001);
        let mut s = AdamState::new(1);
        let (d, eta_a) = delta_adam(&mut s, &p(&[1.0]), &g(&[1.0]), &h).unwrap();
        assert!((s.m[0] - 0.1).abs() < 1e-15);
        assert!((s.va[0] - 0.001).abs() < 1e-15);
        // √0.001·0.1 / (√0.001 + 1e-8), evaluated by hand
        assert!((d[0] - 0.099_999_968_377_233_4).abs() < 1e-15, "{}", d[0]);
        assert!((eta_a - 0.01).abs() < 1e-15);
    }

    #[test]
    fn first_step_update() {
        let h = AdamHyper::new(0.001);
        let (w, report) = adam_step(&mut AdamState::new(1), &p(&[1.0]), &g(&[1.0]), &h).unwrap();
        assert!((w[0] - (1.0 - 0.01 * 0.099_999_968_377_233_4)).abs() < 1e-15);
        assert!((w[0] - 0.999).abs() < 1e-9);
        assert!((report.effective_lr - 0.01).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        for placement in [EpsPlacement::Increment, EpsPlacement::Denominator] {
            let h = AdamHyper {
                eps_placement: placement,
                ..AdamHyper::new(0.001)
            };
            let mut s = AdamState::new(1);
            let (w, report) = adam_step(&mut s, &p(&[1.0]), &g(&[0.0]), &h).unwrap();
            assert_eq!(s.m, vec![0.0]);
            assert_eq!(s.va, vec![0.0]);
            assert_eq!(report.raw_increment.as_slice(), &[0.0]);
            assert_eq!(w.as_slice(), &[1.0]);
        }
    }

    #[test]
    fn amsgrad_keeps_the_larger_second_moment() {
        let h = AdamHyper::new(0.001).with_amsgrad(true);
        let mut s = AdamState::new(1);
        let w = p(&[1.0]);
        delta_adam(&mut s, &w, &g(&[1.0]), &h).unwrap();
        let va1 = s.va[0];
        delta_adam(&mut s, &w, &g(&[0.0]), &h).unwrap();
        let va2 = s.va[0];
        // vᵃ₁ = 0.001, vᵃ₂ = 0.999·0.001
        assert!((va1 - 0.001).abs() < 1e-15);
        assert!((va2 - 0.999 * 0.001).abs() < 1e-15);
        assert!(va2 < va1);
        assert_eq!(s.vhat[0], va1.max(va2));
    }

    #[test]
    fn denominator_placement_differs_by_order_eps() {
        let mut a = AdamState::new(1);
        let mut b = AdamState::new(1);
        let h = AdamHyper::new(0.001);
        let hb = AdamHyper {
            eps_placement: EpsPlacement::Denominator,
            ..h
        };
        let w = p(&[0.0]);
        let (da, _) = delta_adam(&mut a, &w, &g(&[3.0]), &h).unwrap();
        let (db, _) = delta_adam(&mut b, &w, &g(&[3.0]), &hb).unwrap();
        assert!((da[0] - db[0]).abs() < 1e-6);
        assert_ne!(da[0], db[0]);
    }

    #[test]
    fn weight_decay_enters_the_moments() {
        let h = AdamHyper::new(0.001).with_weight_decay(0.5);
        let mut s = AdamState::new(1);
        delta_adam(&mut s, &p(&[2.0]), &g(&[0.0]), &h).unwrap();
        assert!((s.m[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(AdamHyper::new(0.001)
            .with_betas(1.0, 0.999)
            .validate()
            .is_err());
        assert!(AdamHyper::new(0.001)
            .with_betas(0.9, -0.1)
            .validate()
            .is_err());
        assert!(AdamHyper::new(0.001).with_eps(0.0).validate().is_err());
        assert!(AdamHyper::new(-1.0).validate().is_err());
        let h = AdamHyper::new(0.001);
        let mut s = AdamState::new(2);
        assert!(matches!(
            delta_adam(&mut s, &p(&[0.0, 0.0]), &g(&[f64::INFINITY, 0.0]), &h),
            Err(Error::NonFinite { index: 0, .. })
        ));
        assert!(matches!(
            delta_adam(&mut s, &p(&[0.0]), &g(&[1.0]), &h),
            Err(Error::Dimension { .. })
        ));
    }
}
