//! Exact noncommutative polynomial calculus over indeterminates and a finite-dimensional B.

pub mod calculus;
pub mod coeff;
pub mod kernel;
pub mod parse;
pub mod poly;
pub mod serial;
pub mod system;
pub mod tensor;
pub mod word;

pub use calculus::{diff_quotient, jacobian, mai_kernel, transform_kernel};
pub use coeff::Coeff;
pub use kernel::KernelMatrix;
pub use parse::{parse_poly, parse_tuple};
pub use poly::NCPoly;
pub use system::{BAlgebra, GeneratorSystem};
pub use tensor::TensorPoly;
pub use word::{Letter, Word};
