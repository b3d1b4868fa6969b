//! Dense symmetric linear algebra and the proximal maps used by the solvers.

mod eigen;
mod matrix;
mod prox;

pub use eigen::{eigh, eigh_with_basis, spectral_norm, sym_spectral_norm, EigDecomp};
pub use matrix::{Matrix, SymMatrix};
pub use prox::{project_simplex, project_spectrahedron, project_spectrahedron_with_basis, soft_threshold};

pub(crate) use prox::soft_scalar;
