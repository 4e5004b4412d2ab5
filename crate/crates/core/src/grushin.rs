//! Bordered ("Grushin") problems and their Schur-complement dictionary.
//!
//! For `P: n x n`, `R_-: n x m`, `R_+: m' x n` and a corner `m' x m`, the
//! problem
//!
//! ```text
//!   P u + R_- u_- = v
//!   R_+ u + corner u_- = v_+
//! ```
//!
//! is well-posed when the assembled matrix is invertible. Its inverse is split
//! into `E, E_+, E_-, E_-+`; `P` is invertible exactly when `E_-+` is, and then
//! `P^-1 = E - E_+ E_-+^-1 E_-`.

use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::numerics::{min_singular_value, solve_matrix, ComplexMatrix, Lu};

#[derive(Debug, Clone, PartialEq)]
pub struct GrushinProblem {
    p: ComplexMatrix,
    r_minus: ComplexMatrix,
    r_plus: ComplexMatrix,
    corner: ComplexMatrix,
}

/// Blocks of the inverse of a well-posed [`GrushinProblem`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrushinInverse {
    pub e: ComplexMatrix,
    pub e_plus: ComplexMatrix,
    pub e_minus: ComplexMatrix,
    /// The effective Hamiltonian.
    pub e_minus_plus: ComplexMatrix,
    /// Spectral condition number of the assembled matrix (1 when unknown).
    pub condition: f64,
}

impl GrushinProblem {
    /// Checks shapes and stores the four blocks.
    pub fn assemble(
        p: ComplexMatrix,
        r_minus: ComplexMatrix,
        r_plus: ComplexMatrix,
        corner: ComplexMatrix,
    ) -> Result<Self> {
        let n = p.rows();
        if !p.is_square() {
            return Err(dim_err(format!("P must be square, got {:?}", p.shape())));
        }
        if r_minus.rows() != n {
            return Err(dim_err(format!(
                "R_- has {} rows, P is {n}x{n}",
                r_minus.rows()
            )));
        }
        if r_plus.cols() != n {
            return Err(dim_err(format!(
                "R_+ has {} columns, P is {n}x{n}",
                r_plus.cols()
            )));
        }
        if corner.shape() != (r_plus.rows(), r_minus.cols()) {
            return Err(dim_err(format!(
                "corner is {:?}, expected {:?}",
                corner.shape(),
                (r_plus.rows(), r_minus.cols())
            )));
        }
        Ok(Self {
            p,
            r_minus,
            r_plus,
            corner,
        })
    }

    /// Problem with a zero corner.
    pub fn bordered(p: ComplexMatrix, r_minus: ComplexMatrix, r_plus: ComplexMatrix) -> Result<Self> {
        let corner = ComplexMatrix::zeros(r_plus.rows(), r_minus.cols());
        Self::assemble(p, r_minus, r_plus, corner)
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn r_minus(&self) -> &ComplexMatrix {
        &self.r_minus
    }

    pub fn r_plus(&self) -> &ComplexMatrix {
        &self.r_plus
    }

    pub fn corner(&self) -> &ComplexMatrix {
        &self.corner
    }

    /// `n`, the size of `P`.
    pub fn state_dim(&self) -> usize {
        self.p.rows()
    }

    /// `(m, m')`: widths of `R_-` and heights of `R_+`.
    pub fn border_dims(&self) -> (usize, usize) {
        (self.r_minus.cols(), self.r_plus.rows())
    }

    /// The dense `(n + m') x (n + m)` matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::block2x2(&self.p, &self.r_minus, &self.r_plus, &self.corner)
            .expect("shapes validated at assembly")
    }
}

impl GrushinInverse {
    /// The dense inverse `[[E, E_+], [E_-, E_-+]]`.
    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::block2x2(&self.e, &self.e_plus, &self.e_minus, &self.e_minus_plus)
            .expect("blocks produced by inversion tile")
    }

    fn block_scale(&self) -> f64 {
        [&self.e, &self.e_plus, &self.e_minus, &self.e_minus_plus]
            .iter()
            .map(|b| b.norm_fro())
            .fold(0.0, f64::max)
    }
}

/// Inverts the assembled matrix by LU with one step of refinement.
///
/// The problem is declared ill-posed when `sigma_min < (n + m) eps sigma_max`.
/// Only index-zero problems (`m == m'`) can be inverted.
pub fn invert_grushin(problem: &GrushinProblem) -> Result<GrushinInverse> {
    let n = problem.state_dim();
    let (m, m_prime) = problem.border_dims();
    if m != m_prime {
        return Err(dim_err(format!(
            "border widths {m} and {m_prime} differ; only index-zero problems are invertible"
        )));
    }
    let a = problem.matrix();
    let size = n + m;
    if size == 0 {
        return Err(dim_err("empty Grushin problem"));
    }
    let svd = a.inner().clone().svd(true, true);
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let s_min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if s_max == 0.0 || s_min < size as f64 * f64::EPSILON * s_max {
        return Err(Error::IllPosed(format!(
            "sigma_min = {s_min:.3e}, sigma_max = {s_max:.3e}"
        )));
    }
    let lu = Lu::factorize(&a).map_err(|e| match e {
        Error::Singular(msg) => Error::IllPosed(msg),
        other => other,
    })?;
    let mut full = lu.inverse();
    let residual = &ComplexMatrix::identity(size) - &(&a * &full);
    full = &full + &lu.solve_matrix(&residual)?;
    if !full.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(GrushinInverse {
        e: full.block(0, 0, n, n),
        e_plus: full.block(0, n, n, m),
        e_minus: full.block(n, 0, m, n),
        e_minus_plus: full.block(n, n, m, m),
        condition: s_max / s_min,
    })
}

/// The effective Hamiltonian `E_-+` of a well-posed problem.
pub fn effective_hamiltonian(problem: &GrushinProblem) -> Result<ComplexMatrix> {
    Ok(invert_grushin(problem)?.e_minus_plus)
}

/// `E - E_+ E_-+^-1 E_-`, which equals `P^-1` when `P` is invertible.
///
/// `E_-+` counts as singular when its smallest singular value is below
/// `16 (n + m) eps cond |blocks|`, the attainable accuracy of the inversion.
pub fn recover_inverse(inverse: &GrushinInverse) -> Result<ComplexMatrix> {
    let emp = &inverse.e_minus_plus;
    if !emp.is_square() {
        return Err(dim_err(format!(
            "E_-+ is {:?}; recovery needs a square effective Hamiltonian",
            emp.shape()
        )));
    }
    let dim = (inverse.e.rows() + emp.rows()) as f64;
    let tol = 16.0 * dim * f64::EPSILON * inverse.condition.max(1.0) * inverse.block_scale();
    if emp.rows() > 0 && min_singular_value(emp) <= tol {
        return Err(Error::EffectiveHamiltonianSingular);
    }
    let correction = solve_matrix(emp, &inverse.e_minus).map_err(|e| match e {
        Error::Singular(_) => Error::EffectiveHamiltonianSingular,
        other => other,
    })?;
    Ok(&inverse.e - &(&inverse.e_plus * &correction))
}

/// `|A E - I|_F`, the well-posedness witness for a computed inverse.
pub fn inverse_residual(problem: &GrushinProblem, inverse: &GrushinInverse) -> f64 {
    let prod = &problem.matrix() * &inverse.matrix();
    (&prod - &ComplexMatrix::identity(prod.rows())).norm_fro()
}
