//! Exact computation of inverse Kazhdan–Lusztig values `m_v^w(1)` on the
//! subregular cell of the affine Weyl groups of types B_n, C_n, F4 and G2.

pub mod affine;
pub mod cache;
pub mod cell;
pub mod character;
pub mod closed;
pub mod error;
pub mod hecke;
pub mod laurent;
pub mod linalg;
pub mod module;
pub mod quasipoly;
pub mod rootdata;
pub mod verify;
pub mod weight;
pub mod weyl;

pub use error::{Error, Result};
