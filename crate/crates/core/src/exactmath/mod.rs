//! Exact arithmetic: rationals, polynomials, matrices, real algebraic
//! numbers and the number field they generate.

pub mod field;
pub mod matrix;
pub mod nf_linalg;
pub mod poly;
pub mod rational;
pub mod roots;

pub use field::{nf_arith, nf_sign, NFElement, NfOp};
pub use matrix::RationalMatrix;
pub use nf_linalg::NfMatrix;
pub use poly::Polynomial;
pub use rational::{int, parse_rational, rat, Rational};
pub use roots::{isolate_real_roots, largest_real_root, root_multiplicity, AlgebraicNumber, RootInterval};
