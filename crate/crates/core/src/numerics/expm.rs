//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! (degrees 3, 5, 7, 9, 13), following Higham's 2005 parameter choices.

use nalgebra::DMatrix;

use super::lu::Lu;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{dim_err, Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1512.0,
    56.0,
    1.0,
];
const PADE_9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `exp(matrix * t)`.
pub fn matrix_exponential(matrix: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !matrix.is_square() {
        return Err(dim_err(format!(
            "exponential of non-square {:?} matrix",
            matrix.shape()
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    expm(&matrix.scale_real(t))
}

/// `exp(a)`.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let norm = a.norm_one();
    if !norm.is_finite() {
        return Err(Error::Overflow);
    }
    let a = a.inner();
    let id = DMatrix::<C64>::identity(n, n);

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            let (u, v) = low_degree_terms(a, &id, coeffs);
            return finish(pade_quotient(&u, &v)?, 0);
        }
    }

    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let scaled = a * C64::new(2f64.powi(-s), 0.0);
    let (u, v) = degree_13_terms(&scaled, &id);
    finish(pade_quotient(&u, &v)?, s as u32)
}

fn low_degree_terms(a: &DMatrix<C64>, id: &DMatrix<C64>, b: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
    let a2 = a * a;
    let mut powers = vec![id.clone()];
    for _ in 1..b.len() / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut odd = DMatrix::zeros(a.nrows(), a.ncols());
    let mut even = DMatrix::zeros(a.nrows(), a.ncols());
    for (k, p) in powers.iter().enumerate() {
        odd += p * C64::new(b[2 * k + 1], 0.0);
        even += p * C64::new(b[2 * k], 0.0);
    }
    (a * odd, even)
}

fn degree_13_terms(a: &DMatrix<C64>, id: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let b = |k: usize| C64::new(PADE_13[k], 0.0);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = a * (inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + id * b(1));
    let inner_v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + id * b(0);
    (u, v)
}

fn pade_quotient(u: &DMatrix<C64>, v: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let den = ComplexMatrix::try_from_dmatrix(v - u).map_err(|_| Error::Overflow)?;
    let num = ComplexMatrix::try_from_dmatrix(v + u).map_err(|_| Error::Overflow)?;
    let lu = Lu::factorize(&den).map_err(|_| Error::Overflow)?;
    Ok(lu.solve_matrix(&num)?.into_inner())
}

fn finish(mut r: DMatrix<C64>, squarings: u32) -> Result<ComplexMatrix> {
    for _ in 0..squarings {
        r = &r * &r;
    }
    ComplexMatrix::try_from_dmatrix(r).map_err(|_| Error::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn series_exp(a: &ComplexMatrix, terms: usize) -> ComplexMatrix {
        let mut sum = ComplexMatrix::identity(a.rows());
        let mut term = ComplexMatrix::identity(a.rows());
        for k in 1..terms {
            term = (&term * a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn zero_generator() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(matrix_exponential(&z, 2.5).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn quarter_rotation_matches_power_series() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let e = matrix_exponential(&a, FRAC_PI_2).unwrap();
        let oracle = series_exp(&a.scale_real(FRAC_PI_2), 40);
        assert!(e.rel_distance(&oracle, 1.0) < 1e-14);
        assert!(e.rel_distance(&a, 1.0) < 1e-14);
    }

    #[test]
    fn diagonal_case_every_pade_degree() {
        for &x in &[1e-3, 0.2, 0.9, 2.0, 5.0, 40.0, -30.0] {
            let d = ComplexMatrix::from_diagonal(&[C64::new(x, 0.0), C64::new(0.0, x), C64::new(-x, 0.5 * x)]).unwrap();
            let e = expm(&d).unwrap();
            for i in 0..3 {
                let want = d[(i, i)].exp();
                assert!((e[(i, i)] - want).norm() <= 1e-12 * want.norm().max(1e-300), "x={x} i={i}");
            }
        }
    }

    #[test]
    fn overflow_reported() {
        let d = ComplexMatrix::from_real_diagonal(&[800.0]).unwrap();
        assert!(matches!(expm(&d), Err(Error::Overflow)));
    }

    #[test]
    fn non_square_rejected() {
        assert!(matrix_exponential(&ComplexMatrix::zeros(2, 3), 1.0).is_err());
    }
}
