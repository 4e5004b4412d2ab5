//! LU factorization with partial pivoting.

use nalgebra::{DMatrix, DVector};

use super::matrix::{ComplexMatrix, ComplexVector, C64, ZERO};
use crate::error::{dim_err, Error, Result};

/// `P A = L U` with unit-lower `L` stored below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DMatrix<C64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes a square matrix.
    ///
    /// A pivot with modulus at or below `n * eps * |A|_inf` is reported as
    /// [`Error::Singular`].
    pub fn factorize(matrix: &ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(dim_err(format!(
                "LU of non-square {:?} matrix",
                matrix.shape()
            )));
        }
        let n = matrix.rows();
        let tol = n as f64 * f64::EPSILON * matrix.norm_inf();
        let mut lu = matrix.inner().clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (piv, piv_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_abs <= tol {
                return Err(Error::Singular(format!("pivot {k} is {piv_abs:.3e}")));
            }
            if piv != k {
                lu.swap_rows(piv, k);
                perm.swap(piv, k);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / d;
                lu[(i, k)] = l;
                if l != ZERO {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    fn solve_in_place(&self, x: &mut [C64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
    }

    pub fn solve(&self, rhs: &ComplexVector) -> Result<ComplexVector> {
        if rhs.dim() != self.dim() {
            return Err(dim_err(format!(
                "rhs of length {} for a {}x{} system",
                rhs.dim(),
                self.dim(),
                self.dim()
            )));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        self.solve_in_place(&mut x);
        Ok(ComplexVector::from_inner(DVector::from_vec(x)))
    }

    /// Solves `A X = rhs` column by column.
    pub fn solve_matrix(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rhs.rows() != self.dim() {
            return Err(dim_err(format!(
                "rhs with {} rows for a {}x{} system",
                rhs.rows(),
                self.dim(),
                self.dim()
            )));
        }
        let mut out = DMatrix::zeros(rhs.rows(), rhs.cols());
        let mut col = vec![ZERO; self.dim()];
        for j in 0..rhs.cols() {
            for (i, &p) in self.perm.iter().enumerate() {
                col[i] = rhs[(p, j)];
            }
            self.solve_in_place(&mut col);
            out.column_mut(j).copy_from_slice(&col);
        }
        Ok(ComplexMatrix::from_inner(out))
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let id = ComplexMatrix::identity(self.dim());
        self.solve_matrix(&id).expect("identity has matching shape")
    }
}

/// Solves `matrix * x = rhs`.
pub fn solve_linear(matrix: &ComplexMatrix, rhs: &ComplexVector) -> Result<ComplexVector> {
    if matrix.rows() != rhs.dim() {
        return Err(dim_err(format!(
            "{:?} matrix with rhs of length {}",
            matrix.shape(),
            rhs.dim()
        )));
    }
    Lu::factorize(matrix)?.solve(rhs)
}

/// Solves `matrix * X = rhs` for a block of right-hand sides.
pub fn solve_matrix(matrix: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    Lu::factorize(matrix)?.solve_matrix(rhs)
}

pub fn inverse(matrix: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::factorize(matrix)?.inverse())
}
