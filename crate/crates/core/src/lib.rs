//! Numerical machinery for Fourier–Mukai transforms on K3 surfaces with
//! rank-2 kernels, computed on Chern characters over a Néron–Severi lattice.

pub mod arith;
pub mod cli;
pub mod displayed;
pub mod error;
pub mod kernel;
pub mod lattice;
pub mod matrix;
pub mod moduli;
pub mod mukai;
pub mod pic1;
pub mod reflexive;
pub mod surface;
pub mod transform;

pub use error::{Error, Result};
pub use kernel::{KernelSpec, ValidityReport, Verdict};
pub use lattice::{DivisorClass, NsLattice};
pub use mukai::{ChernCharacter, MukaiVector};
pub use surface::SurfaceSpec;
pub use transform::CohTransform;
