use alloc::vec;
use alloc::vec::Vec;

use super::Problem;
use crate::error::{Error, Result};
use crate::param::GradVector;
use crate::rng::Rng;

/// `L(w) = ½ (w - w*)ᵀ A (w - w*)` with `A` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    dim: usize,
    /// Row-major `dim × dim`.
    a: Vec<f64>,
    w_star: Vec<f64>,
}

impl Quadratic {
    /// `a` is row-major and must be symmetric; positive definiteness is the
    /// caller's responsibility.
    pub fn new(a: Vec<f64>, w_star: Vec<f64>) -> Result<Self> {
        let dim = w_star.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("quadratic needs dim >= 1"));
        }
        if a.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                found: a.len(),
            });
        }
        for i in 0..dim {
            for j in 0..i {
                if a[i * dim + j] != a[j * dim + i] {
                    return Err(Error::InvalidArgument("quadratic matrix must be symmetric"));
                }
            }
        }
        Ok(Self { dim, a, w_star })
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.w_star
    }

    fn residual(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.dim);
        w.iter().zip(&self.w_star).map(|(w, s)| w - s).collect()
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        self.a
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(r).map(|(a, r)| a * r).sum())
            .collect()
    }
}

/// `A = MᵀM/dim + I/10` with `M` uniform in `[-1, 1]`, and `w*` uniform in `[-2, 2]`.
pub fn random_quadratic(dim: usize, rng: &mut Rng) -> Result<Quadratic> {
    if dim == 0 {
        return Err(Error::InvalidArgument("quadratic needs dim >= 1"));
    }
    let m: Vec<f64> = (0..dim * dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let mut a = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let dot: f64 = (0..dim).map(|k| m[k * dim + i] * m[k * dim + j]).sum();
            let v = dot / dim as f64 + if i == j { 0.1 } else { 0.0 };
            a[i * dim + j] = v;
            a[j * dim + i] = v;
        }
    }
    let w_star = (0..dim).map(|_| rng.uniform(-2.0, 2.0)).collect();
    Quadratic::new(a, w_star)
}

impl Problem for Quadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn loss(&self, w: &[f64]) -> f64 {
        let r = self.residual(w);
        0.5 * r
            .iter()
            .zip(self.apply(&r))
            .map(|(r, ar)| r * ar)
            .sum::<f64>()
    }

    fn grad(&self, w: &[f64]) -> GradVector {
        GradVector::new(self.apply(&self.residual(w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{finite_diff_grad, relative_error, FINITE_DIFF_STEP};

    #[test]
    fn one_dimensional_by_hand() {
        let q = Quadratic::new(vec![2.0], vec![0.0]).unwrap();
        assert_eq!(q.loss(&[3.0]), 9.0);
        assert_eq!(q.grad(&[3.0]).as_slice(), &[6.0]);
    }

    #[test]
    fn zero_at_the_minimizer() {
        let mut rng = Rng::new(5);
        let q = random_quadratic(7, &mut rng).unwrap();
        let w = q.minimizer().to_vec();
        assert_eq!(q.loss(&w), 0.0);
        assert!(q.grad(&w).iter().all(|g| *g == 0.0));
    }

    #[test]
    fn nonnegative_and_fd_consistent() {
        let mut rng = Rng::new(11);
        for dim in [1, 2, 5, 16] {
            let q = random_quadratic(dim, &mut rng).unwrap();
            for _ in 0..20 {
                let w: Vec<f64> = (0..dim).map(|_| rng.uniform(-5.0, 5.0)).collect();
                assert!(q.loss(&w) >= 0.0);
                let a = q.grad(&w);
                let n = finite_diff_grad(&q, &w, FINITE_DIFF_STEP).unwrap();
                for i in 0..dim {
                    assert!(relative_error(a[i], n[i], 1e-8) <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(random_quadratic(0, &mut Rng::new(0)).is_err());
        assert!(Quadratic::new(vec![1.0, 2.0, 3.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Quadratic::new(vec![1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn same_seed_same_problem() {
        let a = random_quadratic(4, &mut Rng::new(3)).unwrap();
        let b = random_quadratic(4, &mut Rng::new(3)).unwrap();
        assert_eq!(a, b);
    }
}
