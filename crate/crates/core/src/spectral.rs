//! Contour integrals of the resolvent and of the transfer function.
//!
//! All integrals are taken over circles with the trapezoidal rule, which is
//! spectrally accurate for analytic periodic integrands:
//! `(1/2 pi i) \oint f = (1/N) sum_k f(l_k) (l_k - c)`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::lti::{grushin_at, StateSpaceSystem};
use crate::numerics::{eigenvalues, inverse, solve_matrix, ComplexMatrix, C64};

pub const DEFAULT_NODES: usize = 256;
const MIN_NODES: usize = 16;
const QUADRATURE_TOL: f64 = 1e-10;
const HALVING_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(center: C64, radius: f64, nodes: usize) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::NonFinite("contour center"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("contour radius {radius} must be positive")));
        }
        if nodes < MIN_NODES {
            return Err(Error::InvalidArgument(format!("{nodes} nodes, need at least {MIN_NODES}")));
        }
        Ok(Self {
            center,
            radius,
            nodes,
        })
    }

    /// Circle with [`DEFAULT_NODES`] nodes.
    pub fn circle(center: C64, radius: f64) -> Result<Self> {
        Self::new(center, radius, DEFAULT_NODES)
    }

    /// `l_k = c + r exp(2 pi i k / N)`.
    pub fn points(&self) -> Vec<C64> {
        (0..self.nodes)
            .map(|k| self.center + C64::from_polar(self.radius, TAU * k as f64 / self.nodes as f64))
            .collect()
    }

    pub fn encloses(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Worst trapezoid error factor `rho^N` over `spectrum`, with
    /// `rho = min(d / r, r / d)` and `d` the distance to the center.
    fn pole_error(&self, spectrum: &[C64]) -> f64 {
        spectrum
            .iter()
            .map(|z| {
                let d = (z - self.center).norm();
                let rho = if d < self.radius { d / self.radius } else { self.radius / d };
                rho.powi(self.nodes as i32)
            })
            .fold(0.0, f64::max)
    }
}

fn check_clear_of_spectrum(contour: &ContourSpec, spectrum: &[C64]) -> Result<()> {
    let err = contour.pole_error(spectrum);
    if err > QUADRATURE_TOL {
        return Err(Error::ContourThroughSpectrum(format!(
            "eigenvalue too close to the contour (quadrature error factor {err:.2e})"
        )));
    }
    Ok(())
}

/// Per-node evaluations in parallel, weighted and summed in index order.
fn node_values<T, F>(contour: &ContourSpec, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(C64) -> Result<T> + Sync,
{
    contour.points().into_par_iter().map(&f).collect()
}

fn weight(contour: &ContourSpec, z: C64) -> C64 {
    (z - contour.center) / contour.nodes as f64
}

/// Full-rule and even-node-subsampled sums of scalar integrand samples.
fn scalar_rule(contour: &ContourSpec, samples: &[C64]) -> (C64, C64) {
    let mut full = C64::new(0.0, 0.0);
    let mut half = C64::new(0.0, 0.0);
    for (k, (z, f)) in contour.points().into_iter().zip(samples).enumerate() {
        let w = weight(contour, z) * f;
        full += w;
        if k % 2 == 0 {
            half += w * 2.0;
        }
    }
    (full, half)
}

/// Riesz projector `(1/2 pi i) \oint (l I - A)^-1 dl`.
pub fn spectral_projection(system: &StateSpaceSystem, contour: &ContourSpec) -> Result<ComplexMatrix> {
    check_clear_of_spectrum(contour, &eigenvalues(system.a())?)?;
    let a = system.a();
    let terms = node_values(contour, |z| {
        let r = inverse(&a.shifted_negation(z)).map_err(|_| {
            Error::ContourThroughSpectrum(format!("resolvent singular at {z}"))
        })?;
        Ok(r.scale(weight(contour, z)))
    })?;
    let n = system.state_dim();
    Ok(terms
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, t| &acc + t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceCountReport {
    /// `(1/2 pi i) \oint tr (l - A)^-1 g(l) dl`.
    pub lhs_count: C64,
    /// `(1/2 pi i) \oint tr (d/dl H^-1) H g(l) dl`.
    pub rhs_count: C64,
    /// Eigenvalues of `A` strictly inside, from a dense eigensolver.
    pub eig_inside: usize,
    /// Poles of `E_-+` inside: the winding number of `det` of the Grushin
    /// matrix, `(1/2 pi i) \oint tr E(l) dl`.
    pub eh_poles_inside: i64,
}

fn eval_poly(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Both sides of the trace formula for polynomial weight `g` (coefficients in
/// ascending powers), together with the eigenvalue and pole counts.
///
/// Requires `D = 0` and as many outputs as inputs. `H'` is evaluated as
/// `-C (l - A)^-2 B`.
pub fn trace_counts(system: &StateSpaceSystem, contour: &ContourSpec, g: &[C64]) -> Result<TraceCountReport> {
    if g.is_empty() {
        return Err(Error::InvalidArgument("empty polynomial".into()));
    }
    if system.d().norm_max() != 0.0 {
        return Err(Error::InvalidArgument("trace formula needs D = 0".into()));
    }
    if system.output_dim() != system.input_dim() {
        return Err(dim_err(format!(
            "trace formula needs a square transfer function, got {}x{}",
            system.output_dim(),
            system.input_dim()
        )));
    }
    let spectrum = eigenvalues(system.a())?;
    check_clear_of_spectrum(contour, &spectrum)?;
    let a = system.a();
    let (b, c) = (system.b(), system.c());

    let samples = node_values(contour, |z| {
        let shifted = a.shifted_negation(z);
        let singular = |_| Error::ContourThroughSpectrum(format!("resolvent singular at {z}"));
        let gz = eval_poly(g, z);
        let lhs = inverse(&shifted).map_err(singular)?.trace() * gz;
        let x = solve_matrix(&shifted, b).map_err(singular)?;
        let h = c * &x;
        let dh = -&(c * &solve_matrix(&shifted, &x).map_err(singular)?);
        let y = solve_matrix(&h, &dh)
            .map_err(|_| Error::TransferSingularOnContour(format!("H singular at {z}")))?;
        let rhs = -y.trace() * gz;
        let eh = grushin_at(system, z)
            .map_err(|_| Error::TransferSingularOnContour(format!("Grushin problem ill-posed at {z}")))?
            .e
            .trace();
        Ok([lhs, rhs, eh])
    })?;
    let column = |i: usize| samples.iter().map(|s| s[i]).collect::<Vec<_>>();
    let (lhs, _) = scalar_rule(contour, &column(0));
    let (rhs, rhs_half) = scalar_rule(contour, &column(1));
    let (eh, eh_half) = scalar_rule(contour, &column(2));
    if (rhs - rhs_half).norm() > HALVING_TOL * (1.0 + rhs.norm()) || (eh - eh_half).norm() > HALVING_TOL {
        return Err(Error::TransferSingularOnContour(
            "zero of the transfer function too close to the contour".into(),
        ));
    }
    Ok(TraceCountReport {
        lhs_count: lhs,
        rhs_count: rhs,
        eig_inside: spectrum.iter().filter(|z| contour.encloses(**z)).count(),
        eh_poles_inside: eh.re.round() as i64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> StateSpaceSystem {
        StateSpaceSystem::collocated(
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[0.0], &[1.0]]).unwrap(),
        )
        .unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn contour_validation() {
        assert!(ContourSpec::new(c(0.0, 0.0), 0.0, 256).is_err());
        assert!(ContourSpec::new(c(0.0, 0.0), 1.0, 8).is_err());
        let k = ContourSpec::circle(c(1.0, 0.0), 2.0).unwrap();
        assert_eq!(k.points().len(), 256);
        assert!((k.points()[0] - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn projection_onto_single_eigenvalue() {
        let p = spectral_projection(&s2(), &ContourSpec::circle(c(0.0, 1.0), 0.5).unwrap()).unwrap();
        let want = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.0, -0.5)], vec![c(0.0, 0.5), c(0.5, 0.0)]]).unwrap();
        assert!((&p - &want).norm_max() < 1e-12);
        assert!((&(&p * &p) - &p).norm_max() < 1e-8);
    }

    #[test]
    fn projection_empty_and_full() {
        let empty = spectral_projection(&s2(), &ContourSpec::circle(c(5.0, 0.0), 1.0).unwrap()).unwrap();
        assert!(empty.norm_max() < 1e-10);
        let full = spectral_projection(&s2(), &ContourSpec::circle(c(0.0, 0.0), 2.0).unwrap()).unwrap();
        assert!((&full - &ComplexMatrix::identity(2)).norm_max() < 1e-12);
    }

    #[test]
    fn contour_through_eigenvalue_rejected() {
        let k = ContourSpec::circle(c(0.0, 0.0), 1.0).unwrap();
        assert!(matches!(spectral_projection(&s2(), &k), Err(Error::ContourThroughSpectrum(_))));
    }

    #[test]
    fn trace_counts_single_eigenvalue() {
        let k = ContourSpec::circle(c(0.0, 1.0), 0.5).unwrap();
        let r = trace_counts(&s2(), &k, &[c(1.0, 0.0)]).unwrap();
        assert!((r.lhs_count - c(1.0, 0.0)).norm() < 1e-8);
        assert!((r.rhs_count - c(1.0, 0.0)).norm() < 1e-8);
        assert_eq!((r.eig_inside, r.eh_poles_inside), (1, 0));
    }

    #[test]
    fn trace_counts_with_pole_inside() {
        let k = ContourSpec::circle(c(0.0, 0.0), 2.0).unwrap();
        let r = trace_counts(&s2(), &k, &[c(1.0, 0.0)]).unwrap();
        assert!((r.lhs_count - c(2.0, 0.0)).norm() < 1e-8);
        assert!((r.rhs_count - c(1.0, 0.0)).norm() < 1e-8);
        assert_eq!((r.eig_inside, r.eh_poles_inside), (2, 1));
    }

    #[test]
    fn trace_counts_weighted() {
        let k = ContourSpec::circle(c(0.0, 1.0), 0.5).unwrap();
        let r = trace_counts(&s2(), &k, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((r.lhs_count - c(0.0, 1.0)).norm() < 1e-8);
        assert!((r.rhs_count - c(0.0, 1.0)).norm() < 1e-8);
    }

    #[test]
    fn transfer_zero_on_contour() {
        // H has a zero at 0, which lies on this circle.
        let k = ContourSpec::circle(c(0.5, 0.0), 0.5).unwrap();
        assert!(matches!(
            trace_counts(&s2(), &k, &[c(1.0, 0.0)]),
            Err(Error::TransferSingularOnContour(_))
        ));
    }
}
