//! Gramians, Hautus margins and the certified lower bound for Grushin problems.

use std::f64::consts::TAU;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::lti::{grushin_problem, StateSpaceSystem};
use crate::numerics::{
    condition_number, eigen, eigenvalues, expm, inverse, min_singular_value, pseudo_inverse,
    rank, singular_values, ComplexMatrix, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GramianKind {
    Observability,
    Controllability,
}

impl FromStr for GramianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "observability" | "o" => Ok(Self::Observability),
            "controllability" | "c" => Ok(Self::Controllability),
            other => Err(Error::InvalidArgument(format!("unknown Gramian kind {other:?}"))),
        }
    }
}

/// Finite-horizon Gramian by a Van Loan block exponential.
///
/// Controllability: `exp([[-A, B B^*], [0, A^*]] T)` gives `W_c = F22^* F12`.
/// Observability: `exp([[A^*, C^* C], [0, -A]] T)` gives `W_o = F12 F11^*`.
pub fn gramian(system: &StateSpaceSystem, kind: GramianKind, t_end: f64) -> Result<ComplexMatrix> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon {t_end} must be positive")));
    }
    let n = system.state_dim();
    let a = system.a();
    let zero = ComplexMatrix::zeros(n, n);
    let w = match kind {
        GramianKind::Controllability => {
            let q = system.b() * &system.b().adjoint();
            let m = ComplexMatrix::block2x2(&-a, &q, &zero, &a.adjoint())?;
            let f = expm(&m.scale_real(t_end))?;
            &f.block(n, n, n, n).adjoint() * &f.block(0, n, n, n)
        }
        GramianKind::Observability => {
            let q = &system.c().adjoint() * system.c();
            let m = ComplexMatrix::block2x2(&a.adjoint(), &q, &zero, &-a)?;
            let f = expm(&m.scale_real(t_end))?;
            &f.block(0, n, n, n) * &f.block(0, 0, n, n).adjoint()
        }
    };
    Ok((&w + &w.adjoint()).scale_real(0.5))
}

/// `2 pi / g`, with `g` the smallest distance between distinct eigenvalues
/// of `A` (taken as 1 when the spectrum is a single point).
pub fn default_observation_time(system: &StateSpaceSystem) -> Result<f64> {
    let ev = eigenvalues(system.a())?;
    let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut gap = f64::INFINITY;
    for (i, x) in ev.iter().enumerate() {
        for y in &ev[i + 1..] {
            let d = (x - y).norm();
            if d > 1e-8 * scale {
                gap = gap.min(d);
            }
        }
    }
    Ok(TAU / if gap.is_finite() { gap } else { 1.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HautusReport {
    pub grid: Vec<f64>,
    pub per_freq_margin: Vec<f64>,
    pub margin: f64,
    pub argmin_freq: f64,
    /// For skew-adjoint generators: whether the minimizer lies within one
    /// grid step of an eigenfrequency.
    pub near_eigenfrequency: Option<bool>,
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidGrid("frequency grid contains non-finite values".into()));
    }
    Ok(())
}

fn max_step(grid: &[f64]) -> f64 {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// The user grid plus the imaginary parts of `spectrum` that fall inside
/// its range, sorted and without duplicates.
pub fn refine_grid(grid: &[f64], spectrum: &[C64]) -> Vec<f64> {
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = grid.to_vec();
    out.extend(spectrum.iter().map(|z| z.im).filter(|w| *w >= lo && *w <= hi));
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    out
}

/// Evaluates `f` over `grid` in parallel and reduces to the first minimum.
pub(crate) fn sweep<F>(grid: Vec<f64>, f: F) -> Result<HautusReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let per_freq_margin: Vec<f64> = grid.par_iter().map(|&w| f(w)).collect::<Result<_>>()?;
    let (idx, margin) = per_freq_margin
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    Ok(HautusReport {
        argmin_freq: grid[idx],
        grid,
        per_freq_margin,
        margin,
        near_eigenfrequency: None,
    })
}

fn stacked(system: &StateSpaceSystem, omega: f64) -> Result<ComplexMatrix> {
    let top = system.a().shifted_negation(C64::new(0.0, omega));
    ComplexMatrix::vstack(&[&top, system.c()])
}

fn flag_eigenfrequency(report: &mut HautusReport, system: &StateSpaceSystem, spectrum: &[C64], user_grid: &[f64]) {
    if system.is_skew_adjoint() {
        let step = max_step(user_grid);
        let near = spectrum
            .iter()
            .any(|z| (z.im - report.argmin_freq).abs() <= step.max(1e-12));
        report.near_eigenfrequency = Some(near);
    }
}

/// `sigma_min([i w I - A; C])^2` over the grid refined at eigenfrequencies.
pub fn hautus_margin(system: &StateSpaceSystem, omega_grid: &[f64]) -> Result<HautusReport> {
    validate_grid(omega_grid)?;
    let spectrum = eigenvalues(system.a())?;
    let grid = refine_grid(omega_grid, &spectrum);
    let mut report = sweep(grid, |w| Ok(min_singular_value(&stacked(system, w)?).powi(2)))?;
    flag_eigenfrequency(&mut report, system, &spectrum, omega_grid);
    Ok(report)
}

/// Hautus margin measured in the weighted state norm `|V W^{-1/2} V^{-1} z|`,
/// where `V` holds the eigenvectors of `A` and `W = diag(weights)`.
///
/// The margin at `w` is `sigma_min([i w I - A; C] S)^2` with
/// `S = I + V diag(sqrt(w_n) - 1) V^{-1}`; unit weights give `S = I` exactly.
pub fn weighted_hautus(system: &StateSpaceSystem, weights: &[f64], omega_grid: &[f64]) -> Result<HautusReport> {
    let n = system.state_dim();
    if weights.len() != n {
        return Err(Error::InvalidWeights(format!("{} weights for {n} modes", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidWeights(format!("weight {w} is not strictly positive")));
    }
    validate_grid(omega_grid)?;
    let eig = eigen(system.a())?;
    let cond = condition_number(&eig.vectors);
    if !(cond <= 1e12) {
        return Err(Error::NonDiagonalizable(cond));
    }
    let v_inv = inverse(&eig.vectors)?;
    let shift: Vec<C64> = weights.iter().map(|w| C64::new(w.sqrt() - 1.0, 0.0)).collect();
    let s = &ComplexMatrix::identity(n) + &(&(&eig.vectors * &ComplexMatrix::from_diagonal(&shift)?) * &v_inv);
    let grid = refine_grid(omega_grid, &eig.values);
    let mut report = sweep(grid, |w| Ok(min_singular_value(&(&stacked(system, w)? * &s)).powi(2)))?;
    flag_eigenfrequency(&mut report, system, &eig.values, omega_grid);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedBound {
    /// Lower bound obtained from the projection argument.
    pub certified_constant: f64,
    /// `sigma_min` of the assembled Grushin matrix, squared.
    pub true_constant: f64,
    /// `true_constant - certified_constant`.
    pub gap: f64,
    /// `|P_+|` with `P_+ = pinv(B^*)`.
    pub right_inverse_norm: f64,
    /// `|(lambda - A) Pi|`, `Pi` the orthogonal projector onto `Im B`.
    pub restricted_norm: f64,
    /// `|Pi (lambda - A) (I - Pi)|`.
    pub cross_norm: f64,
    /// Smallest singular value of `(I - Pi)(lambda - A)` on `ker B^*`.
    pub compression_lower: f64,
    pub hypothesis_ok: bool,
}

/// Explicit lower bound `C` with `|v|^2 + |v_+|^2 >= C (|u|^2 + |u_-|^2)`
/// for the problem `[[lambda - A, B], [B^*, 0]]`.
///
/// Splitting `u = Pi u + w` with `Pi u = P_+ v_+`, the bounds
///
/// ```text
///   |Pi u| <= p b
///   |w|    <= (a + r p b) / g
///   |u_-|  <= p a + p s |w| + p^2 r b
/// ```
///
/// (`a = |v|`, `b = |v_+|`, `p = |P_+|`, `r`, `s`, `g` as in
/// [`CertifiedBound`]) give `|(u, u_-)| <= |M| |(v, v_+)|` for a 3x2
/// coefficient matrix `M`, hence `C = 1 / |M|_2^2`.
pub fn certified_bound(system: &StateSpaceSystem, lambda: C64) -> Result<CertifiedBound> {
    if !system.is_collocated() || system.d().norm_max() != 0.0 {
        return Err(Error::HypothesisViolated("certified bound needs C = B^* and D = 0".into()));
    }
    let b = system.b();
    let (n, m) = b.shape();
    if b.norm_max() == 0.0 || rank(b, 0.0) < m {
        return Err(Error::HypothesisViolated(format!(
            "B^* is not surjective (rank {} < {m})",
            rank(b, 0.0)
        )));
    }
    let problem = grushin_problem(system, lambda)?;
    let assembled = problem.matrix();
    let s_all = singular_values(&assembled);
    let s_min = *s_all.last().expect("non-empty");
    if s_min < (n + m) as f64 * f64::EPSILON * s_all[0] {
        return Err(Error::IllPosed(format!("sigma_min = {s_min:.3e}")));
    }
    let true_constant = s_min * s_min;

    let p_plus = pseudo_inverse(&b.adjoint(), 0.0)?;
    let pi = &p_plus * &b.adjoint();
    let q = &ComplexMatrix::identity(n) - &pi;
    let op = problem.p();
    let p = p_plus.norm_2();
    let r = (op * &pi).norm_2();
    let s = (&(&pi * op) * &q).norm_2();

    let mut rows: Vec<[f64; 2]> = vec![[0.0, p]];
    let mut g = f64::INFINITY;
    if n > m {
        let comp = &(&q * op) * &q;
        g = singular_values(&comp)[n - m - 1];
        if !(g > 0.0) {
            return Err(Error::IllPosed("compression on ker B^* is singular".into()));
        }
        rows.push([1.0 / g, r * p / g]);
        rows.push([p + p * s / g, p * p * r + p * s * r * p / g]);
    } else {
        rows.push([p, p * p * r]);
    }
    let coeffs: Vec<f64> = rows.iter().flatten().copied().collect();
    let m_norm = ComplexMatrix::new(
        rows.len(),
        2,
        coeffs.into_iter().map(|x| C64::new(x, 0.0)).collect(),
    )?
    .norm_2();
    let certified_constant = 1.0 / (m_norm * m_norm);
    Ok(CertifiedBound {
        certified_constant,
        true_constant,
        gap: true_constant - certified_constant,
        right_inverse_norm: p,
        restricted_norm: r,
        cross_norm: s,
        compression_lower: if g.is_finite() { g } else { 0.0 },
        hypothesis_ok: true,
    })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min(matrix: &ComplexMatrix) -> Result<f64> {
    crate::numerics::hermitian_eigenvalues(matrix)?
        .first()
        .copied()
        .ok_or_else(|| dim_err("empty matrix"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn s2() -> StateSpaceSystem {
        StateSpaceSystem::new(real(&[&[0.0, 1.0], &[-1.0, 0.0]]), real(&[&[0.0], &[1.0]]), None, None, true).unwrap()
    }

    fn scalar_zero() -> StateSpaceSystem {
        StateSpaceSystem::collocated(real(&[&[0.0]]), real(&[&[1.0]])).unwrap()
    }

    fn diag_i_2i(c: &[f64]) -> StateSpaceSystem {
        let a = ComplexMatrix::from_diagonal(&[C64::new(0.0, 1.0), C64::new(0.0, 2.0)]).unwrap();
        StateSpaceSystem::new(a, real(&[&[1.0], &[0.0]]), Some(real(&[c])), None, true).unwrap()
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn gramian_examples() {
        let w = gramian(&scalar_zero(), GramianKind::Observability, 2.0).unwrap();
        assert!((w[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-14);
        let w = gramian(&s2(), GramianKind::Observability, 2.0 * PI).unwrap();
        assert!(w.rel_distance(&ComplexMatrix::identity(2).scale_real(PI), 1.0) < 1e-12);
        let no_b = StateSpaceSystem::new(real(&[&[0.0, 1.0], &[-1.0, 0.0]]), ComplexMatrix::zeros(2, 1), None, None, false).unwrap();
        assert_eq!(gramian(&no_b, GramianKind::Controllability, 1.0).unwrap().norm_max(), 0.0);
        assert!(gramian(&s2(), GramianKind::Controllability, 0.0).is_err());
    }

    #[test]
    fn gramian_kind_parses() {
        assert_eq!("observability".parse::<GramianKind>().unwrap(), GramianKind::Observability);
        assert!("x".parse::<GramianKind>().is_err());
    }

    #[test]
    fn hautus_scalar() {
        let r = hautus_margin(&scalar_zero(), &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.grid, vec![-1.0, 0.0, 1.0]);
        for (got, want) in r.per_freq_margin.iter().zip([2.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((r.margin - 1.0).abs() < 1e-14);
        assert_eq!(r.argmin_freq, 0.0);
        assert_eq!(r.near_eigenfrequency, None);
    }

    #[test]
    fn hautus_invisible_mode() {
        let r = hautus_margin(&diag_i_2i(&[1.0, 0.0]), &linspace(0.0, 3.0, 31)).unwrap();
        assert!(r.margin < 1e-20);
        assert!((r.argmin_freq - 2.0).abs() < 1e-12);
        assert_eq!(r.near_eigenfrequency, Some(true));
    }

    #[test]
    fn hautus_s2_observable() {
        let r = hautus_margin(&s2(), &linspace(-5.0, 5.0, 1001)).unwrap();
        assert!(r.margin > 0.1);
        assert!(matches!(hautus_margin(&s2(), &[]), Err(Error::EmptyGrid)));
    }

    #[test]
    fn weighted_reduces_to_plain() {
        let grid = linspace(-5.0, 5.0, 101);
        let plain = hautus_margin(&s2(), &grid).unwrap();
        let weighted = weighted_hautus(&s2(), &[1.0, 1.0], &grid).unwrap();
        assert_eq!(plain, weighted);
    }

    #[test]
    fn weighted_monotone_in_weight() {
        let sys = diag_i_2i(&[1.0, 1.0]);
        let grid = linspace(0.0, 3.0, 61);
        let margins: Vec<f64> = [0.25, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&w| weighted_hautus(&sys, &[1.0, w], &grid).unwrap().margin)
            .collect();
        assert!(margins.windows(2).all(|p| p[1] >= p[0] - 1e-14), "{margins:?}");
        assert!(margins[4] > margins[0]);
    }

    #[test]
    fn weighted_rejects_bad_weights() {
        assert!(matches!(weighted_hautus(&s2(), &[1.0, 0.0], &[0.0]), Err(Error::InvalidWeights(_))));
        assert!(matches!(weighted_hautus(&s2(), &[1.0], &[0.0]), Err(Error::InvalidWeights(_))));
        let jordan = StateSpaceSystem::collocated(real(&[&[0.0, 1.0], &[0.0, 0.0]]), real(&[&[0.0], &[1.0]])).unwrap();
        assert!(matches!(weighted_hautus(&jordan, &[1.0, 1.0], &[0.0]), Err(Error::NonDiagonalizable(_))));
    }

    #[test]
    fn certified_scalar_is_sharp() {
        let cb = certified_bound(&scalar_zero(), C64::new(1.0, 0.0)).unwrap();
        let want = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((cb.true_constant - want).abs() < 1e-14);
        assert!(cb.certified_constant > 0.0 && cb.certified_constant <= cb.true_constant * (1.0 + 1e-9));
        assert!((cb.certified_constant - want).abs() < 1e-12);
    }

    #[test]
    fn certified_s2() {
        let cb = certified_bound(&s2(), C64::new(1.0, 0.0)).unwrap();
        let a = real(&[&[1.0, -1.0, 0.0], &[1.0, 1.0, 1.0], &[0.0, 1.0, 0.0]]);
        assert!((cb.true_constant - min_singular_value(&a).powi(2)).abs() < 1e-14);
        assert!(cb.certified_constant > 0.0 && cb.certified_constant <= cb.true_constant);
        assert!((cb.restricted_norm - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn certified_rejects_zero_b() {
        let sys = StateSpaceSystem::collocated(real(&[&[0.0]]), real(&[&[0.0]])).unwrap();
        assert!(matches!(certified_bound(&sys, C64::new(1.0, 0.0)), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn observation_time_from_gap() {
        let t = default_observation_time(&diag_i_2i(&[1.0, 0.0])).unwrap();
        assert!((t - TAU).abs() < 1e-12);
    }
}
