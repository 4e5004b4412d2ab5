mod common;

use common::*;
use grushin::analysis::{certified_bound, gramian, GramianKind};
use grushin::grushin::inverse_residual;
use grushin::lti::*;
use grushin::numerics::{expm, inverse, matrix_exponential, solve_linear};
use grushin::{ComplexMatrix, ComplexVector, C64};

fn stable(seed: u64, n: usize, m: usize) -> StateSpaceSystem {
    let mut r = rng(seed);
    let a = &matrix(&mut r, n, n, 0.5) - &ComplexMatrix::identity(n).scale_real(0.3);
    StateSpaceSystem::collocated(a, matrix(&mut r, n, m, 1.0)).unwrap()
}

fn vector(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> ComplexVector {
    ComplexVector::new((0..n).map(|_| cplx(r)).collect()).unwrap()
}

#[test]
fn free_response_matches_exponential() {
    let sys = stable(1, 5, 2);
    let mut r = rng(2);
    let z0 = vector(&mut r, 5);
    let traj = simulate(&sys, &z0, &InputSignal::Zero, 3.0, 0.05).unwrap();
    assert_eq!(traj.states.len(), 61);
    for (t, z) in traj.times.iter().zip(&traj.states) {
        let want = matrix_exponential(sys.a(), *t).unwrap().mul_vec(&z0).unwrap();
        let err = (z - &want).norm() / want.norm();
        assert!(err < 1e-11, "t={t} err={err:e}");
    }
}

#[test]
fn constant_input_matches_augmented_exponential() {
    let sys = stable(3, 4, 2);
    let mut r = rng(4);
    let (z0, u) = (vector(&mut r, 4), vector(&mut r, 2));
    let t_end = 2.5;
    let traj = simulate(&sys, &z0, &InputSignal::Constant(u.clone()), t_end, 0.01).unwrap();
    let aug = ComplexMatrix::block2x2(
        sys.a(),
        sys.b(),
        &ComplexMatrix::zeros(2, 4),
        &ComplexMatrix::zeros(2, 2),
    )
    .unwrap();
    let e = expm(&aug.scale_real(t_end)).unwrap();
    let stacked = ComplexVector::new([z0.to_vec(), u.to_vec()].concat()).unwrap();
    let want = e.block(0, 0, 4, 6).mul_vec(&stacked).unwrap();
    let got = traj.states.last().unwrap();
    assert!((got - &want).norm() < 1e-11 * want.norm());
    let y = traj.outputs.last().unwrap();
    assert!((y - &sys.c().mul_vec(got).unwrap()).norm() < 1e-14);
}

#[test]
fn skew_generator_conserves_norm() {
    let mut r = rng(5);
    let a = skew(&mut r, &[-2.0, -0.5, 0.7, 1.3, 3.1]);
    let sys = StateSpaceSystem::new(a, matrix(&mut r, 5, 1, 1.0), None, None, true).unwrap();
    let z0 = vector(&mut r, 5);
    let traj = simulate(&sys, &z0, &InputSignal::Zero, 10.0, 0.01).unwrap();
    let n0 = z0.norm();
    let drift = traj
        .states
        .iter()
        .map(|z| (z.norm() - n0).abs())
        .fold(0.0, f64::max);
    assert!(drift < 1e-8 * n0, "drift {drift:e}");
}

#[test]
fn effective_hamiltonian_inverts_to_minus_transfer() {
    for seed in 0..20 {
        let sys = stable(100 + seed, 6, 3);
        let mut r = rng(seed);
        let lambda = cplx(&mut r) * 3.0;
        let Ok(inv) = grushin_at(&sys, lambda) else { continue };
        let h = transfer_function(&sys, lambda).unwrap();
        let got = -&inverse(&inv.e_minus_plus).unwrap();
        assert!(got.rel_distance(&h, 1e-12) < 1e-9 * inv.condition, "seed {seed}");
        let problem = grushin_problem(&sys, lambda).unwrap();
        assert!(inverse_residual(&problem, &inv) < 1e-12 * inv.condition);
    }
}

#[test]
fn resolvent_solves_shifted_system() {
    let sys = stable(7, 5, 1);
    let lambda = C64::new(0.4, 1.1);
    let r = resolvent(&sys, lambda).unwrap();
    let mut g = rng(8);
    let v = vector(&mut g, 5);
    let x = solve_linear(&sys.a().shifted_negation(lambda), &v).unwrap();
    assert!((&r.mul_vec(&v).unwrap() - &x).norm() < 1e-13 * x.norm());
}

#[test]
fn discrete_gramian_converges_at_second_order() {
    let sys = stable(3, 4, 2);
    let w = gramian(&sys, GramianKind::Controllability, 2.0).unwrap();
    let err = |dt: f64| {
        let m = controllability_map(&sys, 2.0, dt).unwrap();
        let approx = (&m * &m.adjoint()).scale_real(1.0 / dt);
        (&approx - &w).norm_fro() / w.norm_fro()
    };
    let (coarse, fine) = (err(1e-2), err(1e-3));
    assert!(fine < 1e-7, "fine {fine:e}");
    let ratio = coarse / fine;
    assert!((50.0..200.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn observation_gramian_from_observation_map() {
    let sys = stable(11, 3, 1);
    let w = gramian(&sys, GramianKind::Observability, 1.5).unwrap();
    let dt = 1e-3;
    let o = observation_map(&sys, 1.5, dt).unwrap();
    let approx = (&o.adjoint() * &o).scale_real(dt);
    assert!((&approx - &w).norm_fro() < 5e-3 * w.norm_fro());
}

#[test]
fn certified_constant_bounds_quadratic_form() {
    for seed in 0..30 {
        let mut r = rng(200 + seed);
        let n = 2 + (seed as usize % 5);
        let m = 1 + (seed as usize % n);
        let a = matrix(&mut r, n, n, 1.0);
        let sys = StateSpaceSystem::collocated(a, matrix(&mut r, n, m, 1.0)).unwrap();
        let lambda = cplx(&mut r) * 2.0;
        let Ok(bound) = certified_bound(&sys, lambda) else { continue };
        assert!(bound.hypothesis_ok);
        assert!(bound.certified_constant <= bound.true_constant * (1.0 + 1e-10));
        let op = grushin_problem(&sys, lambda).unwrap().matrix();
        for _ in 0..20 {
            let x = vector(&mut r, n + m);
            let lhs = op.mul_vec(&x).unwrap().norm().powi(2);
            assert!(lhs >= bound.certified_constant * x.norm().powi(2) * (1.0 - 1e-10));
        }
    }
}

#[test]
fn regularity_limit_recovers_feedthrough() {
    let mut r = rng(13);
    let a = &matrix(&mut r, 4, 4, 0.5) - &ComplexMatrix::identity(4);
    let d = matrix(&mut r, 2, 2, 1.0);
    let sys = StateSpaceSystem::new(a, matrix(&mut r, 4, 2, 1.0), Some(matrix(&mut r, 2, 4, 1.0)), Some(d.clone()), false)
        .unwrap();
    let est = regularity_limit(&sys, &default_regularity_grid()).unwrap();
    assert!((&est - &d).norm_max() < 1e-8);
}

#[test]
fn invalid_time_grids_are_rejected() {
    let sys = stable(1, 2, 1);
    let z0 = ComplexVector::zeros(2);
    for (t, dt) in [(1.0, 0.0), (1.0, -0.1), (0.01, 0.1), (f64::NAN, 0.1)] {
        assert!(matches!(
            simulate(&sys, &z0, &InputSignal::Zero, t, dt),
            Err(grushin::Error::InvalidGrid(_))
        ));
    }
    let samples = InputSignal::Samples(vec![ComplexVector::zeros(1); 3]);
    assert!(simulate(&sys, &z0, &samples, 1.0, 0.1).is_err());
}
