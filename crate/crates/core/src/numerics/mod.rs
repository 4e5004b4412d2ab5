//! Dense complex linear algebra used by every other module.

mod decomp;
mod expm;
mod lu;
mod matrix;

pub use decomp::{
    condition_number, default_rank_tol, eigen, eigenvalues, hermitian_eigenvalues,
    min_singular_value, pseudo_inverse, range_projector, rank, singular_values, unit_vector,
    EigenDecomposition,
};
pub use expm::{expm, matrix_exponential};
pub use lu::{inverse, solve_linear, solve_matrix, Lu};
pub use matrix::{ComplexMatrix, ComplexVector, C64};
