//! C⁰ interior penalty finite elements with Hermite cubic triangles for the
//! sixth-order gradient-elastic Kirchhoff plate
//!
//! ```text
//! Δ²w − ι²Δ³w = f  in Ω,    w = ∂n w = ∂nn w = 0  on ∂Ω.
//! ```
//!
//! A typical pipeline is mesh → [`assembly::FeSpace`] → [`assembly::assemble`]
//! → [`solver::solve`] → [`analysis::error_norms`]; [`study::run_study`]
//! wraps it for convergence tables.

pub mod analysis;
pub mod assembly;
pub mod element;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod study;

pub use analysis::{error_norms, DiscreteFunction, ErrorReport};
pub use assembly::{assemble, AssembledSystem, FeSpace};
pub use mesh::{DiagonalPattern, Mesh};
pub use problems::ManufacturedProblem;
pub use quadrature::QuadratureConfig;
pub use solver::{solve, SolveReport, SolverOptions};
