//! Exact calculus for flavoured KLRW algebras and abelian Coulomb branches.

pub mod coulomb;
pub mod cover;
pub mod enumerate;
pub mod error;
pub mod klrw;
pub mod km;
pub mod par;
pub mod poly;
pub mod quiver;
pub mod ratfunc;
pub mod render;
pub mod scalar;
pub mod seq;
pub mod suite;
pub mod zc;

pub use error::{KlrwError, Result};
pub use par::Exec;
