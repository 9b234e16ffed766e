//! Two-parameter test surfaces.

use alloc::vec;

use super::Problem;
use crate::error::{Error, Result};
use crate::param::GradVector;

const TOY_X: [f64; 2] = [1.0, 2.0];
const TOY_Y: [f64; 2] = [2.0, 4.0];

/// How the factored surface turns predictions into a loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ToyLossForm {
    /// `Σ (pᵢ - yᵢ)²`, minimized on the hyperbola `w1·w2 = 2`.
    #[default]
    Squared,
    /// `Σ (pᵢ - yᵢ²)`, linear in `w1·w2` and unbounded below. Kept for inspection.
    Literal,
}

/// Predictions `pᵢ = w1·(w2·xᵢ)` for `x = [1, 2]` against targets `y = [2, 4]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FactoredSurface {
    pub form: ToyLossForm,
}

pub fn toy_factored_surface() -> FactoredSurface {
    FactoredSurface {
        form: ToyLossForm::Squared,
    }
}

impl FactoredSurface {
    pub fn literal() -> Self {
        Self {
            form: ToyLossForm::Literal,
        }
    }

    fn predict(w: &[f64], i: usize) -> f64 {
        w[0] * (w[1] * TOY_X[i])
    }
}

impl Problem for FactoredSurface {
    fn dim(&self) -> usize {
        2
    }

    fn loss(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), 2);
        (0..2)
            .map(|i| {
                let p = Self::predict(w, i);
                match self.form {
                    ToyLossForm::Squared => (p - TOY_Y[i]) * (p - TOY_Y[i]),
                    ToyLossForm::Literal => p - TOY_Y[i] * TOY_Y[i],
                }
            })
            .sum()
    }

    fn grad(&self, w: &[f64]) -> GradVector {
        assert_eq!(w.len(), 2);
        let mut g = vec![0.0; 2];
        for i in 0..2 {
            // ∂L/∂pᵢ
            let outer = match self.form {
                ToyLossForm::Squared => 2.0 * (Self::predict(w, i) - TOY_Y[i]),
                ToyLossForm::Literal => 1.0,
            };
            g[0] += outer * w[1] * TOY_X[i];
            g[1] += outer * w[0] * TOY_X[i];
        }
        GradVector::new(g)
    }
}

/// `z = (a - y)² + b·(y - x²)²` over `w = (x, y)`.
///
/// Note the first term is `(a - y)`, not the classical `(a - x)`; the minima
/// sit at `(±√a, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rosenbrock {
    pub a: f64,
    pub b: f64,
}

pub fn rosenbrock(a: f64, b: f64) -> Result<Rosenbrock> {
    if !(b > 0.0 && b.is_finite()) || !a.is_finite() {
        return Err(Error::InvalidArgument(
            "rosenbrock needs finite a and b > 0",
        ));
    }
    Ok(Rosenbrock { a, b })
}

impl Problem for Rosenbrock {
    fn dim(&self) -> usize {
        2
    }

    fn loss(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), 2);
        let (x, y) = (w[0], w[1]);
        let r = y - x * x;
        (self.a - y) * (self.a - y) + self.b * r * r
    }

    fn grad(&self, w: &[f64]) -> GradVector {
        assert_eq!(w.len(), 2);
        let (x, y) = (w[0], w[1]);
        let r = y - x * x;
        GradVector::new(vec![
            -4.0 * self.b * x * r,
            -2.0 * (self.a - y) + 2.0 * self.b * r,
        ])
    }
}

/// `z = |x|/10 + |y|`. The subgradient of `|t|` at `t = 0` is taken as 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct L1Cone;

pub fn l1_cone() -> L1Cone {
    L1Cone
}

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Problem for L1Cone {
    fn dim(&self) -> usize {
        2
    }

    fn loss(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), 2);
        w[0].abs() / 10.0 + w[1].abs()
    }

    fn grad(&self, w: &[f64]) -> GradVector {
        assert_eq!(w.len(), 2);
        GradVector::new(vec![sign(w[0]) / 10.0, sign(w[1])])
    }
}
