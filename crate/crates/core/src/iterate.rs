//! Nesting a second Grushin problem on the effective Hamiltonian.
//!
//! Given couplings `N_-: C^q -> C^m` and `N_+: C^p -> C^r`, the iterated system
//! `(A, B N_-, N_+ C, N_+ D N_-)` has transfer function `N_+ H N_-`. Its
//! Grushin inverse can be composed from the base inverse `E` and the inverse
//! `F` of `[[E_-+, N_-], [N_+, 0]]`:
//!
//! ```text
//!   [[E - E_+ F E_-,  E_+ F_+],
//!    [F_- E_-,        -F_-+  ]]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::grushin::{invert_grushin, GrushinInverse, GrushinProblem};
use crate::lti::{grushin_at, StateSpaceSystem};
use crate::numerics::{condition_number, ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSpec {
    /// `m x q`.
    pub n_minus: ComplexMatrix,
    /// `r x p`.
    pub n_plus: ComplexMatrix,
}

impl IterationSpec {
    pub fn new(n_minus: ComplexMatrix, n_plus: ComplexMatrix) -> Self {
        Self { n_minus, n_plus }
    }

    /// `N_- = I_m`, `N_+ = I_p`.
    pub fn identity(system: &StateSpaceSystem) -> Self {
        Self {
            n_minus: ComplexMatrix::identity(system.input_dim()),
            n_plus: ComplexMatrix::identity(system.output_dim()),
        }
    }

    fn check(&self, system: &StateSpaceSystem) -> Result<()> {
        if self.n_minus.rows() != system.input_dim() || self.n_minus.cols() == 0 {
            return Err(dim_err(format!(
                "N_- is {:?}, expected {}xq",
                self.n_minus.shape(),
                system.input_dim()
            )));
        }
        if self.n_plus.cols() != system.output_dim() || self.n_plus.rows() == 0 {
            return Err(dim_err(format!(
                "N_+ is {:?}, expected rx{}",
                self.n_plus.shape(),
                system.output_dim()
            )));
        }
        Ok(())
    }
}

/// `(A, B N_-, N_+ C, N_+ D N_-)`.
pub fn iterate_system(system: &StateSpaceSystem, spec: &IterationSpec) -> Result<StateSpaceSystem> {
    spec.check(system)?;
    StateSpaceSystem::new(
        system.a().clone(),
        system.b() * &spec.n_minus,
        Some(&spec.n_plus * system.c()),
        Some(&(&spec.n_plus * system.d()) * &spec.n_minus),
        system.is_skew_adjoint(),
    )
}

/// Inverse of the iterated Grushin problem by the composition formula.
///
/// Both stages must be well-posed; the error names the failing one.
pub fn iterated_inverse_blocks(
    system: &StateSpaceSystem,
    spec: &IterationSpec,
    lambda: C64,
) -> Result<GrushinInverse> {
    spec.check(system)?;
    if system.d().norm_max() != 0.0 {
        return Err(Error::InvalidArgument("iteration needs D = 0".into()));
    }
    if spec.n_minus.cols() != spec.n_plus.rows() {
        return Err(dim_err(format!(
            "N_- has {} columns but N_+ has {} rows",
            spec.n_minus.cols(),
            spec.n_plus.rows()
        )));
    }
    let base = grushin_at(system, lambda).map_err(|e| stage("base", e))?;
    let secondary = GrushinProblem::bordered(
        base.e_minus_plus.clone(),
        spec.n_minus.clone(),
        spec.n_plus.clone(),
    )?;
    let f = invert_grushin(&secondary).map_err(|e| stage("secondary", e))?;

    let e = &base.e - &(&(&base.e_plus * &f.e) * &base.e_minus);
    let e_plus = &base.e_plus * &f.e_plus;
    let e_minus = &f.e_minus * &base.e_minus;
    let e_minus_plus = -&f.e_minus_plus;
    let full = ComplexMatrix::block2x2(&e, &e_plus, &e_minus, &e_minus_plus)?;
    Ok(GrushinInverse {
        e,
        e_plus,
        e_minus,
        e_minus_plus,
        condition: condition_number(&full),
    })
}

fn stage(name: &str, err: Error) -> Error {
    match err {
        Error::IllPosed(msg) => Error::IllPosed(format!("{name} stage: {msg}")),
        other => other,
    }
}
