use mas_core::optim::{adam_step, mas_delta, mas_step, sgd_step};
use mas_core::problems::{random_quadratic, Problem};
use mas_core::reference::{naive_reference_step, ReferenceHyper, ReferenceState};
use mas_core::{
    AdamHyper, AdamState, EpsPlacement, GradVector, MasHyper, MasState, ParamVector, Rng, SgdHyper,
    SgdState,
};
use proptest::prelude::*;

fn sgd_hyper() -> impl Strategy<Value = SgdHyper> {
    (
        1e-4f64..0.1,
        prop_oneof![Just(0.0), 0.0f64..0.1],
        prop_oneof![Just(0.0), 0.0f64..0.99],
        prop_oneof![Just(0.0), 0.0f64..0.9],
        any::<bool>(),
    )
        .prop_map(|(eta, gamma, mu, dampening, nesterov)| {
            let nesterov = nesterov && mu > 0.0;
            SgdHyper {
                eta,
                gamma,
                mu,
                dampening: if nesterov { 0.0 } else { dampening },
                nesterov,
                allow_nesterov_dampening: false,
            }
        })
}

fn adam_hyper() -> impl Strategy<Value = AdamHyper> {
    (
        1e-4f64..0.1,
        prop_oneof![Just(0.0), 0.0f64..0.1],
        0.0f64..0.99,
        0.5f64..0.9999,
        1e-10f64..1e-6,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(eta, gamma, beta1, beta2, eps, amsgrad, alt)| AdamHyper {
            eta,
            gamma,
            beta1,
            beta2,
            eps,
            amsgrad,
            eps_placement: if alt {
                EpsPlacement::Denominator
            } else {
                EpsPlacement::Increment
            },
        })
}

fn mas_hyper() -> impl Strategy<Value = MasHyper> {
    (0.0f64..=1.0, sgd_hyper(), adam_hyper())
        .prop_map(|(la, sgd, adam)| MasHyper::new(la, 1.0 - la, sgd, adam).unwrap())
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        prop_assert!(
            (x - y).abs() <= tol,
            "{} vs {} (|Δ| = {})",
            x,
            y,
            (x - y).abs()
        );
    }
    Ok(())
}

fn random_grads(seed: u64, dim: usize, steps: usize) -> Vec<GradVector> {
    let mut rng = Rng::new(seed);
    (0..steps)
        .map(|_| GradVector::new((0..dim).map(|_| rng.uniform(-3.0, 3.0)).collect()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sgd_matches_reference(h in sgd_hyper(), seed in any::<u64>(), dim in 1usize..8) {
        let mut state = SgdState::new(dim);
        let mut oracle = ReferenceState::new(dim);
        let mut w = ParamVector::zeros(dim);
        let mut wo = vec![0.0; dim];
        for g in random_grads(seed, dim, 200) {
            w = sgd_step(&mut state, &w, &g, &h).unwrap().0;
            wo = naive_reference_step(&ReferenceHyper::Sgd(h), &mut oracle, &wo, &g).unwrap();
            assert_close(&w, &wo, 1e-12)?;
        }
    }

    #[test]
    fn adam_matches_reference(h in adam_hyper(), seed in any::<u64>(), dim in 1usize..8) {
        let mut state = AdamState::new(dim);
        let mut oracle = ReferenceState::new(dim);
        let mut w = ParamVector::zeros(dim);
        let mut wo = vec![0.0; dim];
        for g in random_grads(seed, dim, 200) {
            w = adam_step(&mut state, &w, &g, &h).unwrap().0;
            wo = naive_reference_step(&ReferenceHyper::Adam(h), &mut oracle, &wo, &g).unwrap();
            assert_close(&w, &wo, 1e-12)?;
        }
    }

    #[test]
    fn mas_matches_reference(h in mas_hyper(), seed in any::<u64>(), dim in 1usize..8) {
        let mut state = MasState::new(dim);
        let mut oracle = ReferenceState::new(dim);
        let mut w = ParamVector::zeros(dim);
        let mut wo = vec![0.0; dim];
        for g in random_grads(seed, dim, 200) {
            w = mas_step(&mut state, &w, &g, &h).unwrap().0;
            wo = naive_reference_step(&ReferenceHyper::Mas(h), &mut oracle, &wo, &g).unwrap();
            assert_close(&w, &wo, 1e-12)?;
        }
    }

    #[test]
    fn degenerate_weights_reduce_to_components(
        sgd in sgd_hyper(),
        adam_rest in adam_hyper(),
        seed in any::<u64>(),
        dim in 1usize..=64,
    ) {
        let adam = AdamHyper { eta: sgd.eta, ..adam_rest };
        let mut rng = Rng::new(seed);
        let q = random_quadratic(dim, &mut rng).unwrap();
        let start = ParamVector::new((0..dim).map(|_| rng.uniform(-3.0, 3.0)).collect());

        let as_adam = MasHyper::new(1.0, 0.0, sgd, adam).unwrap();
        let as_sgd = MasHyper::new(0.0, 1.0, sgd, adam).unwrap();
        let (mut m1, mut a) = (MasState::new(dim), AdamState::new(dim));
        let (mut m0, mut s) = (MasState::new(dim), SgdState::new(dim));
        let (mut wm1, mut wa, mut wm0, mut ws) =
            (start.clone(), start.clone(), start.clone(), start.clone());
        for _ in 0..200 {
            wm1 = mas_step(&mut m1, &wm1, &q.grad(&wm1), &as_adam).unwrap().0;
            wa = adam_step(&mut a, &wa, &q.grad(&wa), &adam).unwrap().0;
            wm0 = mas_step(&mut m0, &wm0, &q.grad(&wm0), &as_sgd).unwrap().0;
            ws = sgd_step(&mut s, &ws, &q.grad(&ws), &sgd).unwrap().0;
            assert_close(&wm1, &wa, 1e-12)?;
            assert_close(&wm0, &ws, 1e-12)?;
        }
    }

    #[test]
    fn merged_step_expands_into_four_terms(h in mas_hyper(), seed in any::<u64>(), dim in 1usize..8) {
        let mut state = MasState::new(dim);
        let mut w = ParamVector::zeros(dim);
        let (la, ls) = (h.lambda_a, h.lambda_s);
        for g in random_grads(seed, dim, 100) {
            let inc = mas_delta(&mut state, &w, &g, &h).unwrap();
            let lhs: Vec<f64> = inc.merged.iter().map(|m| inc.eta_m * m).collect();
            let rhs: Vec<f64> = inc
                .sgd_increment
                .iter()
                .zip(inc.adam_increment.iter())
                .map(|(v, d)| {
                    ls * ls * inc.eta * v
                        + la * la * inc.eta_a * d
                        + ls * la * inc.eta_a * v
                        + ls * la * inc.eta * d
                })
                .collect();
            assert_close(&lhs, &rhs, 1e-12)?;
            w = ParamVector::new(w.iter().zip(&lhs).map(|(w, s)| w - s).collect());
        }
    }

    #[test]
    fn amsgrad_max_never_decreases(h in adam_hyper(), seed in any::<u64>(), dim in 1usize..8) {
        let h = h.with_amsgrad(true);
        let mut state = AdamState::new(dim);
        let mut w = ParamVector::zeros(dim);
        let mut prev = state.vhat.clone();
        for g in random_grads(seed, dim, 100) {
            w = adam_step(&mut state, &w, &g, &h).unwrap().0;
            for ((vhat, va), before) in state.vhat.iter().zip(state.va.iter()).zip(prev.iter()) {
                prop_assert!(vhat >= before);
                prop_assert!(*va >= 0.0);
                prop_assert!(vhat >= va);
            }
            prev = state.vhat.clone();
        }
    }

    #[test]
    fn report_reconstructs_the_step(h in mas_hyper(), seed in any::<u64>(), dim in 1usize..8) {
        let mut state = MasState::new(dim);
        let mut w = ParamVector::zeros(dim);
        for g in random_grads(seed, dim, 50) {
            let (next, report) = mas_step(&mut state, &w, &g, &h).unwrap();
            for i in 0..dim {
                let rebuilt = w[i] - report.effective_lr * report.raw_increment[i];
                prop_assert!((next[i] - rebuilt).abs() <= 1e-15);
            }
            w = next;
        }
    }

    #[test]
    fn zero_gradient_fixed_point(h in mas_hyper(), w in proptest::collection::vec(-5.0f64..5.0, 1..8)) {
        let mut sgd = h.sgd;
        sgd.gamma = 0.0;
        let mut adam = h.adam;
        adam.gamma = 0.0;
        let h = MasHyper { sgd, adam, ..h };
        let w = ParamVector::new(w);
        let zero = GradVector::zeros(w.len());
        let dim = w.len();
        prop_assert_eq!(&sgd_step(&mut SgdState::new(dim), &w, &zero, &sgd).unwrap().0, &w);
        prop_assert_eq!(&adam_step(&mut AdamState::new(dim), &w, &zero, &adam).unwrap().0, &w);
        prop_assert_eq!(&mas_step(&mut MasState::new(dim), &w, &zero, &h).unwrap().0, &w);
    }

    #[test]
    fn agreement_boosts_the_merged_increment(
        v in 1e-3f64..10.0,
        d in 1e-3f64..1.0,
        la in 0.0f64..=1.0,
    ) {
        // Fixed magnitudes; only the relative sign changes.
        let ls = 1.0 - la;
        let same = (ls * v + la * d).abs();
        let opposite = (ls * -v + la * d).abs();
        prop_assert!(same >= opposite);
    }
}

#[test]
fn agreement_through_the_optimizer() {
    // μ = 0 and one coordinate: v_{n_k} = ∇, and d_k carries the sign of ∇.
    let h = MasHyper::with_shared_lr(0.01, 0.5, 0.5).unwrap();
    let w = ParamVector::new(vec![0.0]);
    let inc = mas_delta(&mut MasState::new(1), &w, &GradVector::new(vec![4.0]), &h).unwrap();
    assert!(inc.sgd_increment[0] > 0.0 && inc.adam_increment[0] > 0.0);
    let flipped = h.lambda_s * -inc.sgd_increment[0] + h.lambda_a * inc.adam_increment[0];
    assert!(inc.merged[0].abs() >= flipped.abs());
}

#[test]
fn independent_instances_agree() {
    let h = MasHyper::with_shared_lr(0.05, 0.4, 0.6).unwrap();
    let mut rng = Rng::new(17);
    let q = random_quadratic(6, &mut rng).unwrap();
    let mut a = mas_core::Mas::new(h, 6).unwrap();
    let mut b = mas_core::Mas::new(h, 6).unwrap();
    use mas_core::Optimizer;
    let mut wa = ParamVector::zeros(6);
    let mut wb = ParamVector::zeros(6);
    for _ in 0..100 {
        wa = a.step(&wa, &q.grad(&wa)).unwrap().0;
        wb = b.step(&wb, &q.grad(&wb)).unwrap().0;
        assert_eq!(wa, wb);
    }
    assert_eq!(a.steps(), 100);
}

#[test]
fn constant_gradient_hundred_steps_against_reference() {
    let h = AdamHyper::new(0.001);
    let mut state = AdamState::new(1);
    let mut oracle = ReferenceState::new(1);
    let mut w = ParamVector::new(vec![1.0]);
    let mut wo = vec![1.0];
    let g = GradVector::new(vec![1.0]);
    for _ in 0..100 {
        w = adam_step(&mut state, &w, &g, &h).unwrap().0;
        wo = naive_reference_step(&ReferenceHyper::Adam(h), &mut oracle, &wo, &g).unwrap();
    }
    assert!((w[0] - wo[0]).abs() <= 1e-12);
}
