//! Differentiable objectives.

mod mlp;
mod quadratic;
mod surfaces;

pub use mlp::{make_mlp_problem, MlpModel, MlpParams, MlpProblem, SyntheticDataset};
pub use quadratic::{random_quadratic, Quadratic};
pub use surfaces::{
    l1_cone, rosenbrock, toy_factored_surface, FactoredSurface, L1Cone, Rosenbrock, ToyLossForm,
};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::param::GradVector;

/// Step used by [`finite_diff_grad`] when checking analytic gradients.
pub const FINITE_DIFF_STEP: f64 = 1e-5;

/// A loss `L(w)` with an analytic gradient.
///
/// Methods taking `w` panic if `w.len() != self.dim()`.
pub trait Problem: Send + Sync {
    fn dim(&self) -> usize;

    fn loss(&self, w: &[f64]) -> f64;

    fn grad(&self, w: &[f64]) -> GradVector;

    fn loss_and_grad(&self, w: &[f64]) -> (f64, GradVector) {
        (self.loss(w), self.grad(w))
    }

    /// Sample count for mini-batching, or `None` for full-gradient problems.
    fn samples(&self) -> Option<usize> {
        None
    }

    /// Mean loss and gradient over the listed samples. Full-gradient problems
    /// ignore `batch`.
    fn batch_loss_and_grad(&self, w: &[f64], batch: &[usize]) -> (f64, GradVector) {
        let _ = batch;
        self.loss_and_grad(w)
    }
}

/// Central differences `(L(w + h·eᵢ) - L(w - h·eᵢ)) / 2h` of a problem's loss.
pub fn finite_diff_grad<P: Problem + ?Sized>(p: &P, w: &[f64], h: f64) -> Result<GradVector> {
    if w.len() != p.dim() {
        return Err(Error::Dimension {
            expected: p.dim(),
            found: w.len(),
        });
    }
    finite_diff_grad_fn(|x| p.loss(x), w, h)
}

/// Central differences of an arbitrary scalar function.
pub fn finite_diff_grad_fn<F>(f: F, w: &[f64], h: f64) -> Result<GradVector>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(
            "finite-difference step must be positive",
        ));
    }
    let mut probe: Vec<f64> = w.to_vec();
    let mut out = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        probe[i] = w[i] + h;
        let up = f(&probe);
        probe[i] = w[i] - h;
        let down = f(&probe);
        probe[i] = w[i];
        out.push((up - down) / (2.0 * h));
    }
    Ok(GradVector::new(out))
}

/// `|a - b| / max(|a|, |b|, floor)`: relative error, falling back to absolute
/// error for components smaller than `floor`.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
