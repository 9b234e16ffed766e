//! Gradient-based optimizers over flat `f64` parameter vectors.
//!
//! The crate provides three stateful update rules, each split into an
//! increment function and a weight update:
//!
//! - [`optim::sgd`]: SGD with weight decay, momentum, dampening and Nesterov.
//! - [`optim::adam`]: ADAM with a constant moment correction and optional AMSGrad.
//! - [`optim::mas`]: MAS, which mixes the two increments and the two learning
//!   rates with weights `lambda_a` (ADAM) and `lambda_s` (SGD):
//!
//! ```text
//! w_{k+1} = w_k - (λs·η + λa·η_a) · (λs·v_{n_k} + λa·d_k)
//! ```
//!
//! [`reference`] holds a second, deliberately naive transcription of the same
//! rules that the test suites use as an oracle. [`problems`] has the
//! differentiable objectives used for benchmarking: small analytic surfaces,
//! random quadratics, and a one-hidden-layer MLP on synthetic data.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is off.
//! All transcendental functions go through `libm`, so results are identical
//! across targets.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod optim;
pub mod param;
pub mod problems;
pub mod reference;
pub mod rng;

pub use error::{Error, Result};
pub use optim::{
    Adam, AdamHyper, AdamState, EpsPlacement, Mas, MasHyper, MasIncrement, MasState, Optimizer,
    OptimizerKind, Sgd, SgdHyper, SgdState, StepReport,
};
pub use param::{axpy, norm2, GradVector, ParamVector};
pub use problems::Problem;
pub use rng::Rng;
