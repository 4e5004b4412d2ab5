mod common;

use common::*;
use grushin::iterate::{iterate_system, iterated_inverse_blocks, IterationSpec};
use grushin::lti::{default_regularity_grid, grushin_at, regularity_limit, StateSpaceSystem};
use grushin::numerics::{eigen, inverse};
use grushin::spectral::{spectral_projection, trace_counts, ContourSpec};
use grushin::{ComplexMatrix, Error, C64};

fn s2() -> StateSpaceSystem {
    let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
    let b = ComplexMatrix::from_real_rows(&[&[0.0], &[1.0]]).unwrap();
    StateSpaceSystem::collocated(a, b).unwrap()
}

fn exact_projector(a: &ComplexMatrix, contour: &ContourSpec) -> ComplexMatrix {
    let ev = eigen(a).unwrap();
    let mask: Vec<C64> = ev
        .values
        .iter()
        .map(|z| C64::new(if contour.encloses(*z) { 1.0 } else { 0.0 }, 0.0))
        .collect();
    let v = &ev.vectors;
    &(v * &ComplexMatrix::from_diagonal(&mask).unwrap()) * &inverse(v).unwrap()
}

#[test]
fn projection_matches_eigenprojector() {
    let mut r = rng(21);
    let v = well_conditioned(&mut r, 5, 10.0);
    let spectrum = [
        C64::new(0.1, 0.2),
        C64::new(-0.3, -0.1),
        C64::new(2.5, 0.0),
        C64::new(0.0, 3.0),
        C64::new(-2.8, 1.0),
    ];
    let a = &(&v * &ComplexMatrix::from_diagonal(&spectrum).unwrap()) * &inverse(&v).unwrap();
    let sys = StateSpaceSystem::collocated(a.clone(), matrix(&mut r, 5, 1, 1.0)).unwrap();
    let contour = ContourSpec::circle(C64::new(0.0, 0.0), 1.0).unwrap();
    let p = spectral_projection(&sys, &contour).unwrap();
    let err = (&p - &exact_projector(&a, &contour)).norm_max();
    assert!(err < 1e-8, "err {err:e}");
    assert!((&(&p * &p) - &p).norm_max() < 1e-8);
    assert!((p.trace() - C64::new(2.0, 0.0)).norm() < 1e-8);
}

#[test]
fn quadrature_error_decays_with_nodes() {
    let mut r = rng(22);
    let a = skew(&mut r, &[-1.5, 0.3, 2.0]);
    let sys = StateSpaceSystem::collocated(a.clone(), matrix(&mut r, 3, 1, 1.0)).unwrap();
    let center = C64::new(0.0, 0.2);
    let err = |nodes: usize| {
        let c = ContourSpec::new(center, 0.6, nodes).unwrap();
        (&spectral_projection(&sys, &c).unwrap() - &exact_projector(&a, &c)).norm_max()
    };
    let (coarse, fine) = (err(32), err(256));
    assert!(fine < 1e-8, "fine {fine:e}");
    assert!(fine < coarse);
}

#[test]
fn projectors_add_over_disjoint_contours() {
    let sys = s2();
    let upper = spectral_projection(&sys, &ContourSpec::circle(C64::new(0.0, 1.0), 0.5).unwrap()).unwrap();
    let lower = spectral_projection(&sys, &ContourSpec::circle(C64::new(0.0, -1.0), 0.5).unwrap()).unwrap();
    let whole = spectral_projection(&sys, &ContourSpec::circle(C64::new(0.0, 0.0), 2.0).unwrap()).unwrap();
    assert!((&(&upper + &lower) - &whole).norm_max() < 1e-12);
    assert!((&whole - &ComplexMatrix::identity(2)).norm_max() < 1e-12);
    assert!((&upper * &lower).norm_max() < 1e-12);
}

#[test]
fn contour_through_eigenvalue_is_refused() {
    let c = ContourSpec::circle(C64::new(0.0, 0.0), 1.0).unwrap();
    assert!(matches!(spectral_projection(&s2(), &c), Err(Error::ContourThroughSpectrum(_))));
    assert!(ContourSpec::new(C64::new(0.0, 0.0), 1.0, 8).is_err());
}

#[test]
fn constant_weight_counts_eigenvalues_minus_poles() {
    let c = ContourSpec::circle(C64::new(0.0, 0.0), 2.0).unwrap();
    let report = trace_counts(&s2(), &c, &[C64::new(1.0, 0.0)]).unwrap();
    assert_eq!(report.eig_inside, 2);
    let net = report.eig_inside as i64 - report.eh_poles_inside;
    assert!((report.lhs_count - C64::new(2.0, 0.0)).norm() < 1e-10);
    assert!((report.lhs_count - report.rhs_count - C64::new(net as f64, 0.0)).norm() < 1e-8);
}

#[test]
fn iteration_preserves_regularity_limit() {
    let mut r = rng(23);
    let a = &matrix(&mut r, 4, 4, 0.5) - &ComplexMatrix::identity(4);
    let d = matrix(&mut r, 2, 3, 1.0);
    let sys = StateSpaceSystem::new(a, matrix(&mut r, 4, 3, 1.0), Some(matrix(&mut r, 2, 4, 1.0)), Some(d.clone()), false)
        .unwrap();
    let spec = IterationSpec::new(matrix(&mut r, 3, 2, 1.0), matrix(&mut r, 1, 2, 1.0));
    let it = iterate_system(&sys, &spec).unwrap();
    let est = regularity_limit(&it, &default_regularity_grid()).unwrap();
    let want = &(&spec.n_plus * &d) * &spec.n_minus;
    assert!((&est - &want).norm_max() < 1e-8);
}

#[test]
fn composed_inverse_matches_direct() {
    for seed in 0..25 {
        let mut r = rng(300 + seed);
        let (n, m, q) = (5, 3, 2);
        let sys = StateSpaceSystem::new(
            matrix(&mut r, n, n, 0.6),
            matrix(&mut r, n, m, 1.0),
            Some(matrix(&mut r, m, n, 1.0)),
            None,
            false,
        )
        .unwrap();
        let spec = IterationSpec::new(matrix(&mut r, m, q, 1.0), matrix(&mut r, q, m, 1.0));
        let lambda = cplx(&mut r) * 2.0;
        let (Ok(composed), Ok(direct)) = (
            iterated_inverse_blocks(&sys, &spec, lambda),
            grushin_at(&iterate_system(&sys, &spec).unwrap(), lambda),
        ) else {
            continue;
        };
        let err = composed.matrix().rel_distance(&direct.matrix(), 1e-12);
        assert!(err < 1e-10 * direct.condition, "seed {seed}: {err:e}");
    }
}
