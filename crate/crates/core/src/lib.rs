//! Numerical loop-group construction of minimal surfaces in the
//! 3-dimensional Heisenberg group Nil₃.
//!
//! The pipeline goes: holomorphic potential → solution of dC = Cη →
//! SU(1,1) Iwasawa factorization on a sampling grid → Sym formula →
//! immersion into Nil₃, together with symmetry classification for
//! degree-one (equivariant) potentials and verification tooling
//! (Dirac residuals, mean curvature, closing conditions).

pub mod dpw;
pub mod equivariant;
pub mod error;
pub mod factorization;
pub mod loop_core;
pub mod mat2;
pub mod nil3;
pub mod potentials;

pub use error::{Error, Result};
pub use loop_core::{LambdaGrid, TwistedLoop};
pub use mat2::{Mat2, C64};
