//! Finite-dimensional state-space systems `z' = A z + B u`, `y = C z + D u`.

use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::grushin::{invert_grushin, GrushinInverse, GrushinProblem};
use crate::numerics::{expm, inverse, solve_matrix, ComplexMatrix, ComplexVector, C64};

const SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpaceSystem {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
    skew_adjoint: bool,
}

impl StateSpaceSystem {
    /// Builds a system; `c` defaults to `B^*` and `d` to zero.
    ///
    /// With `skew_adjoint` set, `|A^* + A|_F <= 1e-12 |A|_F` is enforced.
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: Option<ComplexMatrix>,
        d: Option<ComplexMatrix>,
        skew_adjoint: bool,
    ) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || n == 0 {
            return Err(dim_err(format!("A must be square and non-empty, got {:?}", a.shape())));
        }
        if b.rows() != n || b.cols() == 0 {
            return Err(dim_err(format!("B is {:?}, expected {n}xm with m >= 1", b.shape())));
        }
        let c = c.unwrap_or_else(|| b.adjoint());
        if c.cols() != n || c.rows() == 0 {
            return Err(dim_err(format!("C is {:?}, expected px{n} with p >= 1", c.shape())));
        }
        let d = d.unwrap_or_else(|| ComplexMatrix::zeros(c.rows(), b.cols()));
        if d.shape() != (c.rows(), b.cols()) {
            return Err(dim_err(format!(
                "D is {:?}, expected {:?}",
                d.shape(),
                (c.rows(), b.cols())
            )));
        }
        if skew_adjoint {
            let defect = (&a.adjoint() + &a).norm_fro();
            if defect > SKEW_TOL * a.norm_fro() {
                return Err(Error::NotSkewAdjoint(defect));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            skew_adjoint,
        })
    }

    /// The standing convention `C = B^*`, `D = 0`.
    pub fn collocated(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        Self::new(a, b, None, None, false)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn is_skew_adjoint(&self) -> bool {
        self.skew_adjoint
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    /// True when `C = B^*` exactly.
    pub fn is_collocated(&self) -> bool {
        self.c == self.b.adjoint()
    }

    /// `(A^*, C^*, B^*, D^*)`, or `(-A, ...)` for skew-adjoint systems.
    pub fn dual(&self) -> Self {
        let a = if self.skew_adjoint {
            -&self.a
        } else {
            self.a.adjoint()
        };
        Self {
            a,
            b: self.c.adjoint(),
            c: self.b.adjoint(),
            d: self.d.adjoint(),
            skew_adjoint: self.skew_adjoint,
        }
    }
}

/// `(lambda I - A)^-1`.
pub fn resolvent(system: &StateSpaceSystem, lambda: C64) -> Result<ComplexMatrix> {
    check_scalar(lambda)?;
    inverse(&system.a.shifted_negation(lambda))
}

/// `H(lambda) = D + C (lambda I - A)^-1 B`.
pub fn transfer_function(system: &StateSpaceSystem, lambda: C64) -> Result<ComplexMatrix> {
    check_scalar(lambda)?;
    let x = solve_matrix(&system.a.shifted_negation(lambda), &system.b)?;
    Ok(&system.d + &(&system.c * &x))
}

/// The bordered problem `[[lambda I - A, B], [C, D]]` at `lambda`.
pub fn grushin_problem(system: &StateSpaceSystem, lambda: C64) -> Result<GrushinProblem> {
    check_scalar(lambda)?;
    GrushinProblem::assemble(
        system.a.shifted_negation(lambda),
        system.b.clone(),
        system.c.clone(),
        system.d.clone(),
    )
}

/// Inverts [`grushin_problem`].
pub fn grushin_at(system: &StateSpaceSystem, lambda: C64) -> Result<GrushinInverse> {
    invert_grushin(&grushin_problem(system, lambda)?)
}

fn check_scalar(lambda: C64) -> Result<()> {
    if lambda.re.is_finite() && lambda.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("lambda"))
    }
}

/// Piecewise-constant input held on each simulation interval.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    Zero,
    Constant(ComplexVector),
    /// One sample per interval (`K` values) or per grid point (`K + 1`).
    Samples(Vec<ComplexVector>),
}

impl InputSignal {
    fn at(&self, k: usize, m: usize) -> ComplexVector {
        match self {
            Self::Zero => ComplexVector::zeros(m),
            Self::Constant(u) => u.clone(),
            Self::Samples(s) => s[k.min(s.len() - 1)].clone(),
        }
    }

    fn validate(&self, m: usize, steps: usize) -> Result<()> {
        let check = |u: &ComplexVector| {
            if u.dim() == m {
                Ok(())
            } else {
                Err(dim_err(format!("input sample has dim {}, expected {m}", u.dim())))
            }
        };
        match self {
            Self::Zero => Ok(()),
            Self::Constant(u) => check(u),
            Self::Samples(s) => {
                if s.len() != steps && s.len() != steps + 1 {
                    return Err(Error::InvalidGrid(format!(
                        "{} input samples for {steps} steps",
                        s.len()
                    )));
                }
                s.iter().try_for_each(check)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexVector>,
    pub outputs: Vec<ComplexVector>,
    /// Effective step `t_end / K`.
    pub dt: f64,
}

/// Uniform grid: `K = round(t_end / dt)` steps of length `t_end / K`.
pub fn time_grid(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt.is_finite() && t_end.is_finite()) || dt <= 0.0 {
        return Err(Error::InvalidGrid(format!("dt = {dt}, t_end = {t_end}")));
    }
    if t_end < dt * (1.0 - 1e-12) {
        return Err(Error::InvalidGrid(format!("t_end = {t_end} shorter than dt = {dt}")));
    }
    let steps = (t_end / dt).round().max(1.0);
    if steps > 1e8 {
        return Err(Error::InvalidGrid(format!("{steps} steps")));
    }
    Ok((steps as usize, t_end / steps))
}

/// Exact one-step propagators `(exp(A h), int_0^h exp(A s) ds B)` from
/// `exp([[A, B], [0, 0]] h)`.
pub fn discretize(system: &StateSpaceSystem, h: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (n, m) = (system.state_dim(), system.input_dim());
    let aug = ComplexMatrix::block2x2(
        &system.a,
        &system.b,
        &ComplexMatrix::zeros(m, n),
        &ComplexMatrix::zeros(m, m),
    )?;
    let e = expm(&aug.scale_real(h))?;
    Ok((e.block(0, 0, n, n), e.block(0, n, n, m)))
}

pub fn simulate(
    system: &StateSpaceSystem,
    z0: &ComplexVector,
    input: &InputSignal,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let (steps, h) = time_grid(t_end, dt)?;
    if z0.dim() != system.state_dim() {
        return Err(dim_err(format!(
            "z0 has dim {}, expected {}",
            z0.dim(),
            system.state_dim()
        )));
    }
    input.validate(system.input_dim(), steps)?;
    let (phi, gamma) = discretize(system, h)?;
    let m = system.input_dim();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut outputs = Vec::with_capacity(steps + 1);
    let mut z = z0.clone();
    for k in 0..=steps {
        let u = input.at(k, m);
        times.push(k as f64 * h);
        outputs.push(&system.c.mul_vec(&z)? + &system.d.mul_vec(&u)?);
        states.push(z.clone());
        if k < steps {
            z = &phi.mul_vec(&z)? + &gamma.mul_vec(&u)?;
        }
    }
    if states.iter().any(|s| s.iter().any(|x| !x.re.is_finite() || !x.im.is_finite())) {
        return Err(Error::Overflow);
    }
    Ok(Trajectory {
        times,
        states,
        outputs,
        dt: h,
    })
}

/// `n x (m K)` matrix sending stacked interval inputs to `z(t_end)`.
///
/// Column block `j` is `Phi^(K-1-j) Gamma`. No `sqrt(dt)` factor is applied,
/// so `map map^* / dt` approximates the controllability Gramian.
pub fn controllability_map(system: &StateSpaceSystem, t_end: f64, dt: f64) -> Result<ComplexMatrix> {
    let (steps, h) = time_grid(t_end, dt)?;
    let (phi, gamma) = discretize(system, h)?;
    let (n, m) = (system.state_dim(), system.input_dim());
    let mut out = nalgebra::DMatrix::<C64>::zeros(n, m * steps);
    let mut block = gamma.into_inner();
    for j in (0..steps).rev() {
        out.view_mut((0, j * m), (n, m)).copy_from(&block);
        block = phi.inner() * &block;
    }
    ComplexMatrix::try_from_dmatrix(out).map_err(|_| Error::Overflow)
}

/// `(p K) x n` matrix sending `z0` to the stacked outputs `C Phi^k z0`,
/// `k = 0..K-1`. No `sqrt(dt)` factor is applied.
pub fn observation_map(system: &StateSpaceSystem, t_end: f64, dt: f64) -> Result<ComplexMatrix> {
    let (steps, h) = time_grid(t_end, dt)?;
    let (phi, _) = discretize(system, h)?;
    let (n, p) = (system.state_dim(), system.output_dim());
    let mut out = nalgebra::DMatrix::<C64>::zeros(p * steps, n);
    let mut block = system.c.inner().clone();
    for k in 0..steps {
        out.view_mut((k * p, 0), (p, n)).copy_from(&block);
        block = &block * phi.inner();
    }
    ComplexMatrix::try_from_dmatrix(out).map_err(|_| Error::Overflow)
}

/// Relative Frobenius discrepancy between `c(T)^*` and `sqrt(dt) Lambda_T Psi^d_T`.
///
/// `c(T)` is the controllability map scaled by `1/sqrt(dt)`, `Lambda_T`
/// reverses the time blocks and `Psi^d` is the observation map of the pair
/// `(A^*, B^*)` (or `(-A, B^*)` for skew-adjoint systems). The discrepancy is
/// `O(dt)`.
pub fn adjoint_factorization_check(system: &StateSpaceSystem, t_end: f64, dt: f64) -> Result<f64> {
    let (steps, h) = time_grid(t_end, dt)?;
    let c_adj = controllability_map(system, t_end, dt)?.adjoint().scale_real(1.0 / h.sqrt());
    let dual_a = if system.skew_adjoint {
        -&system.a
    } else {
        system.a.adjoint()
    };
    let dual = StateSpaceSystem::new(
        dual_a,
        system.c.adjoint(),
        Some(system.b.adjoint()),
        None,
        false,
    )?;
    let psi = observation_map(&dual, t_end, dt)?;
    let m = system.input_dim();
    let mut reflected = nalgebra::DMatrix::<C64>::zeros(m * steps, system.state_dim());
    for j in 0..steps {
        let src = psi.inner().rows(m * (steps - 1 - j), m);
        reflected.rows_mut(m * j, m).copy_from(&src);
    }
    let rhs = ComplexMatrix::from_inner(reflected).scale_real(h.sqrt());
    let denom = c_adj.norm_fro();
    let diff = (&c_adj - &rhs).norm_fro();
    Ok(if denom > 0.0 { diff / denom } else { diff })
}

/// Eleven points log-spaced on `[1e1, 1e6]`.
pub fn default_regularity_grid() -> Vec<f64> {
    (0..=10).map(|k| 10f64.powf(1.0 + 0.5 * k as f64)).collect()
}

/// Limit of `H(lambda)` as `lambda -> +inf` along the real axis.
///
/// Two-term Richardson extrapolation in `1/lambda` on the last two grid
/// points: `(l2 H(l2) - l1 H(l1)) / (l2 - l1)`.
pub fn regularity_limit(system: &StateSpaceSystem, lambda_grid: &[f64]) -> Result<ComplexMatrix> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if lambda_grid.iter().any(|x| !x.is_finite())
        || lambda_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidGrid("lambda grid must be finite and strictly increasing".into()));
    }
    let samples: Vec<ComplexMatrix> = lambda_grid
        .iter()
        .map(|&l| transfer_function(system, C64::new(l, 0.0)))
        .collect::<Result<_>>()?;
    let k = samples.len();
    if k == 1 || samples.windows(2).all(|w| w[0] == w[1]) {
        return Ok(samples[k - 1].clone());
    }
    let (l1, l2) = (lambda_grid[k - 2], lambda_grid[k - 1]);
    let num = &samples[k - 1].scale_real(l2) - &samples[k - 2].scale_real(l1);
    Ok(num.scale_real(1.0 / (l2 - l1)))
}
