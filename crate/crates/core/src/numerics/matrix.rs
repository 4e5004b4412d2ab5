use std::fmt;
use std::ops::{Add, Deref, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{dim_err, Error, Result};

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix with finite entries.
///
/// Construction from user data rejects NaN/Inf. The matrix is immutable; every
/// operation returns a new value. Read access to the underlying
/// [`nalgebra::DMatrix`] is available through `Deref`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

/// Dense complex vector with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(dim_err(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Builds a real matrix from rows of equal length.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(dim_err("ragged rows"));
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(r, c, entries)
    }

    /// Builds a complex matrix from rows of equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(dim_err("ragged rows"));
        }
        Self::new(r, c, rows.concat())
    }

    /// Wraps an nalgebra matrix after checking finiteness.
    pub fn try_from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        if diag.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("diagonal"));
        }
        Ok(Self(DMatrix::from_diagonal(&DVector::from_column_slice(
            diag,
        ))))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.dim());
        if columns.iter().any(|c| c.dim() != rows) {
            return Err(dim_err("columns of unequal length"));
        }
        Ok(Self(DMatrix::from_fn(rows, columns.len(), |i, j| {
            columns[j][i]
        })))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn norm_fro(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_max(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    pub fn norm_2(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector(self.0.column(j).into_owned())
    }

    /// Copy of the `nrows x ncols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> Self {
        Self(self.0.view((r0, c0), (nrows, ncols)).into_owned())
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn block2x2(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        if tl.rows() != tr.rows()
            || bl.rows() != br.rows()
            || tl.cols() != bl.cols()
            || tr.cols() != br.cols()
        {
            return Err(dim_err(format!(
                "blocks {:?} {:?} / {:?} {:?} do not tile",
                tl.shape(),
                tr.shape(),
                bl.shape(),
                br.shape()
            )));
        }
        let (r, c) = (tl.rows() + bl.rows(), tl.cols() + tr.cols());
        let mut m = DMatrix::zeros(r, c);
        m.view_mut((0, 0), tl.shape()).copy_from(&tl.0);
        m.view_mut((0, tl.cols()), tr.shape()).copy_from(&tr.0);
        m.view_mut((tl.rows(), 0), bl.shape()).copy_from(&bl.0);
        m.view_mut((tl.rows(), tl.cols()), br.shape()).copy_from(&br.0);
        Ok(Self(m))
    }

    /// Stacks matrices of equal width on top of each other.
    pub fn vstack(parts: &[&Self]) -> Result<Self> {
        let cols = parts.first().map_or(0, |p| p.cols());
        if parts.iter().any(|p| p.cols() != cols) {
            return Err(dim_err("vstack of matrices with unequal widths"));
        }
        let rows = parts.iter().map(|p| p.rows()).sum();
        let mut m = DMatrix::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            m.view_mut((r0, 0), p.shape()).copy_from(&p.0);
            r0 += p.rows();
        }
        Ok(Self(m))
    }

    /// Places matrices of equal height side by side.
    pub fn hstack(parts: &[&Self]) -> Result<Self> {
        let rows = parts.first().map_or(0, |p| p.rows());
        if parts.iter().any(|p| p.rows() != rows) {
            return Err(dim_err("hstack of matrices with unequal heights"));
        }
        let cols = parts.iter().map(|p| p.cols()).sum();
        let mut m = DMatrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            m.view_mut((0, c0), p.shape()).copy_from(&p.0);
            c0 += p.cols();
        }
        Ok(Self(m))
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols() != v.dim() {
            return Err(dim_err(format!(
                "{:?} matrix times vector of length {}",
                self.shape(),
                v.dim()
            )));
        }
        Ok(ComplexVector(&self.0 * &v.0))
    }

    /// Checked product; the `*` operator panics on mismatched shapes instead.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(dim_err(format!(
                "product of {:?} and {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    /// `lambda * I - self` for square matrices.
    pub fn shifted_negation(&self, lambda: C64) -> Self {
        let mut m = -&self.0;
        for i in 0..self.rows().min(self.cols()) {
            m[(i, i)] += lambda;
        }
        Self(m)
    }

    /// Relative Frobenius distance `|self - other| / max(|other|, floor)`.
    pub fn rel_distance(&self, other: &Self, floor: f64) -> f64 {
        (&self.0 - &other.0).norm() / other.norm_fro().max(floor)
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;
    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.shape())?;
        f.debug_list().entries(self.0.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>())).finish()
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .0
            .row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(D::Error::custom(format!(
                "row {i} has {} entries, expected {cols}",
                rows[i].len()
            )));
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::new(rows.len(), cols, entries).map_err(D::Error::custom)
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub(crate) fn from_inner(v: DVector<C64>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn inner(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn to_vec(&self) -> Vec<C64> {
        self.0.as_slice().to_vec()
    }

    /// Hermitian inner product `<self, other>`, conjugate-linear in `other`.
    pub fn inner_product(&self, other: &Self) -> C64 {
        other.0.dotc(&self.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }
}

impl Deref for ComplexVector {
    type Target = DVector<C64>;
    fn deref(&self) -> &DVector<C64> {
        &self.0
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<'a> Add<&'a ComplexVector> for &'a ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &'a ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexVector> for &'a ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &'a ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 - &rhs.0)
    }
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.0.iter().map(|z| [z.re, z.im]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        ComplexVector::new(v.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .map_err(D::Error::custom)
    }
}
