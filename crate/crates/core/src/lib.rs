//! Sparse principal component support recovery from incomplete, noisy
//! symmetric matrices.
//!
//! The estimator solves the ℓ1-penalized semidefinite relaxation
//!
//! ```text
//!     maximize  ⟨M, X⟩ − ρ‖X‖₁,₁   subject to  X ⪰ 0, tr X = 1
//! ```
//!
//! on the zero-imputed observation `M` and reads the support off the diagonal
//! of the optimizer. Around that estimator the crate provides:
//!
//! * [`numerics`]: dense symmetric linear algebra (Jacobi eigensolver,
//!   spectral norm, simplex/spectrahedron projection, soft thresholding).
//! * [`graph`]: observation graphs and their structural quantities
//!   (degrees, algebraic connectivity, irregularity).
//! * [`sdp`]: the ADMM solver, KKT diagnostics and the primal-dual witness
//!   certificate.
//! * [`spca`]: support recovery, the AIC-type tuning criterion, the
//!   theoretical tuning parameter, the rescaled parameter and the
//!   sufficient-condition report.
//! * [`bounds`]: executable checks of the deterministic difference bound and
//!   the sub-Gaussian tail bound on a sampling pattern.
//! * [`baselines`]: diagonal thresholding, iterative thresholding and
//!   nuclear-norm completion followed by the SDP.
//! * [`harness`]: instance generation, CSV ingestion/emission and the
//!   Monte-Carlo experiment runner.
//!
//! Index sets are 0-based throughout the library.

pub mod baselines;
pub mod bounds;
mod error;
pub mod graph;
pub mod harness;
pub mod numerics;
pub mod sdp;
pub mod spca;

pub use error::{Error, Result};
pub use graph::{BipartiteSubgraph, ObservationGraph};
pub use numerics::{EigDecomp, Matrix, SymMatrix};
pub use sdp::{SdpSolution, WitnessReport};
pub use spca::{ConditionReport, TuningTrace};
