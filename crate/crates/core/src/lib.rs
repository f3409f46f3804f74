//! Free Stein discrepancy, irregularity and dimension for tuples of noncommutative random
//! variables, computed through degree-truncated Gram problems over moment inner products.

pub mod closedform;
pub mod error;
pub mod linalg;
pub mod ncalg;
pub mod quad;
pub mod stein;
pub mod trace;

pub use error::{Error, Result};
