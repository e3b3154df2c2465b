//! Harmonic functions, capacity of ends and conjugate-differential periods on
//! triangulated surfaces.
//!
//! The crate is organised by task:
//!
//! * [`mesh`]: scenario generators, refinement, validation and the mesh file format;
//! * [`dec`]: differentials, conjugate differentials, the cotangent Laplacian and energies;
//! * [`solver`]: Laplace solves with Dirichlet/Neumann data and Green's functions;
//! * [`ends`]: exhaustions, capacity, end classification and barrier checks;
//! * [`kahler`]: defining functions, potential metrics and completeness;
//! * [`cohomology`]: homology bases, periods and Betti lower bounds;
//! * [`cli`]: configuration, pipelines, convergence studies and reports.
//!
//! Sign convention: `L` is the positive semidefinite cotangent Laplacian, so the
//! continuum Laplacian is `-L` after mass normalization and "harmonic" means `Lf = 0`
//! at interior vertices.

pub mod error;
pub mod exec;
pub mod cli;
pub mod cohomology;
pub mod dec;
pub mod ends;
pub mod kahler;
pub mod mesh;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use mesh::SurfaceMesh;
