//! Exponential moment families and reachable-space weights.
//!
//! Modes follow the convention `A phi_n = -lambda_n phi_n`. With `psi_n` the
//! biorthogonal family, the moment functions are
//! `e_n(t) = exp(-conj(lambda_n) t) B^* psi_n` on `(0, T)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::lti::StateSpaceSystem;
use crate::numerics::{condition_number, eigen, hermitian_eigenvalues, inverse, ComplexMatrix, ComplexVector, C64};

const BIORTHOGONAL_TOL: f64 = 1e-10;
const SERIES_CUTOFF: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalSystem {
    /// `lambda_n`, so that `A phi_n = -lambda_n phi_n`.
    pub eigenvalues: Vec<C64>,
    /// Columns `phi_n`.
    pub basis: ComplexMatrix,
    /// Columns `psi_n` with `<phi_m, psi_n> = delta_mn`.
    pub biorthogonal: ComplexMatrix,
    pub b_star_psi: Vec<ComplexVector>,
}

impl ModalSystem {
    /// Validates shapes and biorthogonality.
    pub fn new(
        eigenvalues: Vec<C64>,
        basis: ComplexMatrix,
        biorthogonal: ComplexMatrix,
        b_star_psi: Vec<ComplexVector>,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 || basis.shape() != (n, n) || biorthogonal.shape() != (n, n) || b_star_psi.len() != n {
            return Err(dim_err(format!(
                "{n} eigenvalues, basis {:?}, biorthogonal {:?}, {} moment vectors",
                basis.shape(),
                biorthogonal.shape(),
                b_star_psi.len()
            )));
        }
        let m = b_star_psi[0].dim();
        if b_star_psi.iter().any(|v| v.dim() != m) {
            return Err(dim_err("moment vectors have different dimensions"));
        }
        let defect = (&(&biorthogonal.adjoint() * &basis) - &ComplexMatrix::identity(n)).norm_max();
        if defect > BIORTHOGONAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "families are not biorthogonal (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            eigenvalues,
            basis,
            biorthogonal,
            b_star_psi,
        })
    }

    /// Orthonormal modes `phi_n = psi_n = e_n`.
    pub fn diagonal(eigenvalues: Vec<C64>, b_star_psi: Vec<ComplexVector>) -> Result<Self> {
        let n = eigenvalues.len();
        Self::new(eigenvalues, ComplexMatrix::identity(n), ComplexMatrix::identity(n), b_star_psi)
    }

    /// Modes of a diagonalizable system. Eigenvalues of `A` are negated;
    /// `psi_n` are the columns of `(V^-1)^*`.
    pub fn from_system(system: &StateSpaceSystem) -> Result<Self> {
        let eig = eigen(system.a())?;
        let cond = condition_number(&eig.vectors);
        if !(cond <= 1e12) {
            return Err(Error::NonDiagonalizable(cond));
        }
        let psi = inverse(&eig.vectors)?.adjoint();
        let b_star_psi = &system.b().adjoint() * &psi;
        let moments = (0..psi.cols()).map(|j| b_star_psi.column(j)).collect();
        let lambdas = eig.values.iter().map(|z| -z).collect();
        let n = psi.cols();
        let defect = (&(&psi.adjoint() * &eig.vectors) - &ComplexMatrix::identity(n)).norm_max();
        if defect > BIORTHOGONAL_TOL * cond.max(1.0) {
            return Err(Error::NonDiagonalizable(cond));
        }
        Ok(Self {
            eigenvalues: lambdas,
            basis: eig.vectors,
            biorthogonal: psi,
            b_star_psi: moments,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// `int_0^T exp(-s t) dt`, with a Taylor expansion for small `|s T|`.
pub fn exp_integral(s: C64, t: f64) -> Result<C64> {
    let x = s * t;
    let value = if x.norm() < SERIES_CUTOFF {
        // (1 - e^{-x}) / x = sum_k (-x)^k / (k + 1)!
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..7 {
            term *= -x / (k + 1) as f64;
            sum += term;
        }
        sum * t
    } else {
        (C64::new(1.0, 0.0) - (-x).exp()) / s
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow)
    }
}

fn check_horizon(t_end: f64) -> Result<()> {
    if t_end.is_finite() && t_end > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("horizon {t_end} must be positive")))
    }
}

/// `G_mn = <e_n, e_m>_{L^2(0,T)} = <B^* psi_n, B^* psi_m> I(conj(l_n) + l_m, T)`.
pub fn moment_gram(modal: &ModalSystem, t_end: f64) -> Result<ComplexMatrix> {
    check_horizon(t_end)?;
    let n = modal.len();
    let mut g = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let ip = modal.b_star_psi[j].inner_product(&modal.b_star_psi[i]);
            if ip == C64::new(0.0, 0.0) {
                continue;
            }
            let s = modal.eigenvalues[j].conj() + modal.eigenvalues[i];
            g[(i, j)] = ip * exp_integral(s, t_end)?;
        }
    }
    ComplexMatrix::try_from_dmatrix(g).map_err(|_| Error::Overflow)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachableDescription {
    /// `|e_n|^2` in `L^2(0, T)`.
    pub weights: Vec<f64>,
    pub frame_lower: f64,
    pub frame_upper: f64,
    pub time_horizon: f64,
}

/// Moment weights and the frame bounds of the weight-normalized Gram matrix.
pub fn reachable_weights(modal: &ModalSystem, t_end: f64) -> Result<ReachableDescription> {
    let g = moment_gram(modal, t_end)?;
    let weights: Vec<f64> = (0..g.rows()).map(|i| g[(i, i)].re).collect();
    let w_max = weights.iter().copied().fold(0.0, f64::max);
    if let Some(index) = weights.iter().position(|&w| !(w > f64::EPSILON * w_max)) {
        return Err(Error::DegenerateMode { index });
    }
    let scale: Vec<C64> = weights.iter().map(|w| C64::new(1.0 / w.sqrt(), 0.0)).collect();
    let d = ComplexMatrix::from_diagonal(&scale)?;
    let normalized = &(&d * &g) * &d;
    let ev = hermitian_eigenvalues(&normalized)?;
    Ok(ReachableDescription {
        weights,
        frame_lower: ev[0],
        frame_upper: *ev.last().expect("non-empty"),
        time_horizon: t_end,
    })
}
