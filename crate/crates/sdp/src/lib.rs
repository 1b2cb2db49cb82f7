//! Primal-dual interior-point solver for real symmetric cone programs,
//! Hermitian-to-real reductions, and SDPA sparse I/O.

mod error;
pub mod hermitian;
pub mod program;
pub mod sdpa;
pub mod solver;

pub use error::SolverError;
pub use hermitian::{HermitianConstraint, HermitianEntry, HermitianFunctional, HermitianProgram, RealForm};
pub use program::{Block, BlockKind, ConicProgram, Constraint, Entry, Functional, Relation, Sense};
pub use solver::{solve, SolverOptions, SolverResult, Status};
