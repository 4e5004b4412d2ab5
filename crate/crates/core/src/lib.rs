//! Linear control systems as Grushin problems.
//!
//! A finite-dimensional system `z' = A z + B u`, `y = C z + D u` is studied
//! through the bordered operator
//!
//! ```text
//!   A(lambda) = [ lambda I - A   B ]
//!               [ C              D ]
//! ```
//!
//! whose inverse carries both the resolvent and the transfer function (through
//! the effective Hamiltonian `E_-+`). Its singular values quantify
//! observability. The modules build on each other:
//!
//! - [`numerics`]: dense complex LU, SVD, Schur eigensolver, matrix exponential.
//! - [`grushin`]: assembly and inversion of bordered problems, Schur identities.
//! - [`lti`]: state-space systems, transfer functions, simulation, input/output maps.
//! - [`analysis`]: Gramians, Hautus margins, certified lower bounds.
//! - [`spectral`]: contour projections and trace/zero-pole counts.
//! - [`iterate`]: nesting a second Grushin problem on the effective Hamiltonian.
//! - [`riesz`]: exponential moment families and reachable-space weights.
//! - [`wave`]: modal truncation of a damped wave equation.

pub mod analysis;
pub mod error;
pub mod grushin;
pub mod iterate;
pub mod lti;
pub mod numerics;
pub mod riesz;
pub mod spectral;
pub mod wave;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ComplexVector, C64};
