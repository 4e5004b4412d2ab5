//! SVD- and Schur-based decompositions.

use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{ComplexMatrix, ComplexVector, C64, ONE, ZERO};
use crate::error::{dim_err, Error, Result};

/// Singular values in descending order.
pub fn singular_values(matrix: &ComplexMatrix) -> Vec<f64> {
    if matrix.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = matrix.inner().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Smallest of the `min(rows, cols)` singular values; zero for empty input.
pub fn min_singular_value(matrix: &ComplexMatrix) -> f64 {
    singular_values(matrix).last().copied().unwrap_or(0.0)
}

/// Spectral condition number; infinite when rank-deficient.
pub fn condition_number(matrix: &ComplexMatrix) -> f64 {
    let s = singular_values(matrix);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Default relative rank tolerance `max(rows, cols) * eps`.
pub fn default_rank_tol(matrix: &ComplexMatrix) -> f64 {
    matrix.rows().max(matrix.cols()) as f64 * f64::EPSILON
}

/// Moore–Penrose pseudoinverse.
///
/// Singular values below `rank_tol * sigma_max` are discarded; `rank_tol == 0`
/// selects [`default_rank_tol`].
pub fn pseudo_inverse(matrix: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    if !(rank_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("rank tolerance {rank_tol}")));
    }
    let (r, c) = matrix.shape();
    if matrix.is_empty() {
        return Ok(ComplexMatrix::zeros(c, r));
    }
    let tol = if rank_tol == 0.0 {
        default_rank_tol(matrix)
    } else {
        rank_tol
    };
    let svd = matrix.inner().clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tol * s_max;
    let mut out = DMatrix::<C64>::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk) * C64::new(1.0 / s, 0.0);
        }
    }
    Ok(ComplexMatrix::from_inner(out))
}

/// Numerical rank at relative tolerance `rank_tol` (0 selects the default).
pub fn rank(matrix: &ComplexMatrix, rank_tol: f64) -> usize {
    let s = singular_values(matrix);
    let tol = if rank_tol == 0.0 {
        default_rank_tol(matrix)
    } else {
        rank_tol
    };
    let cutoff = tol * s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > cutoff && x > 0.0).count()
}

/// Eigenvalues and unit-norm right eigenvectors of a general square matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Columns are eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
}

fn schur(matrix: &ComplexMatrix) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    if !matrix.is_square() {
        return Err(dim_err(format!(
            "eigenvalues of non-square {:?} matrix",
            matrix.shape()
        )));
    }
    let s = matrix
        .inner()
        .clone()
        .try_schur(f64::EPSILON, 100 * matrix.rows().max(10))
        .ok_or(Error::NoConvergence)?;
    Ok(s.unpack())
}

/// Eigenvalues from the complex Schur form.
pub fn eigenvalues(matrix: &ComplexMatrix) -> Result<Vec<C64>> {
    let (_, t) = schur(matrix)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigen-decomposition via Schur form and triangular back-substitution.
///
/// Near-equal diagonal entries are separated by a small perturbation, so a
/// defective matrix yields nearly parallel eigenvectors rather than an error;
/// callers that need diagonalizability inspect the condition number of
/// `vectors`.
pub fn eigen(matrix: &ComplexMatrix) -> Result<EigenDecomposition> {
    let (q, t) = schur(matrix)?;
    let n = t.nrows();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut x = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        x[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            x[(i, k)] = -s / d;
        }
    }
    let mut v = q * x;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
    }
    Ok(EigenDecomposition {
        values: (0..n).map(|i| t[(i, i)]).collect(),
        vectors: ComplexMatrix::from_inner(v),
    })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the Hermitian part `(M + M^H) / 2` is used.
pub fn hermitian_eigenvalues(matrix: &ComplexMatrix) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(dim_err("Hermitian eigenvalues of a non-square matrix"));
    }
    if matrix.is_empty() {
        return Ok(Vec::new());
    }
    let h = (matrix.inner() + matrix.inner().adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Orthogonal projector onto the column space of `matrix`.
pub fn range_projector(matrix: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let pinv = pseudo_inverse(matrix, rank_tol)?;
    Ok(matrix * &pinv)
}

/// Column `j` of the identity.
pub fn unit_vector(dim: usize, j: usize) -> ComplexVector {
    let mut v = vec![ZERO; dim];
    v[j] = ONE;
    ComplexVector::new(v).expect("finite")
}
