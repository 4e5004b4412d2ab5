#![allow(dead_code)]

use grushin::{ComplexMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cplx(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| cplx(rng) * scale).collect();
    ComplexMatrix::new(rows, cols, entries).unwrap()
}

pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let q = matrix(rng, n, n, 1.0).inner().clone().qr().q();
    ComplexMatrix::try_from_dmatrix(q).unwrap()
}

/// `V` with condition number at most `max_cond`, obtained by rejection.
pub fn well_conditioned(rng: &mut ChaCha8Rng, n: usize, max_cond: f64) -> ComplexMatrix {
    loop {
        let v = &ComplexMatrix::identity(n) + &matrix(rng, n, n, 0.4);
        if grushin::numerics::condition_number(&v) <= max_cond {
            return v;
        }
    }
}

/// Skew-adjoint `U diag(i theta) U^*`, exactly skew after antisymmetrization.
pub fn skew(rng: &mut ChaCha8Rng, thetas: &[f64]) -> ComplexMatrix {
    let n = thetas.len();
    let u = unitary(rng, n);
    let d: Vec<C64> = thetas.iter().map(|t| C64::new(0.0, *t)).collect();
    let a = &(&u * &ComplexMatrix::from_diagonal(&d).unwrap()) * &u.adjoint();
    (&a - &a.adjoint()).scale_real(0.5)
}

/// Frequencies with pairwise spacing at least `gap`.
pub fn spaced_frequencies(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut x = rng.gen_range(-3.0..-1.0);
    for _ in 0..n {
        out.push(x);
        x += gap + rng.gen_range(0.0..1.0);
    }
    out
}

pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|j| lo + (hi - lo) * j as f64 / steps as f64).collect()
}
