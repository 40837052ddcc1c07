//! Numerical laboratory for periodic quantum modular forms.
//!
//! A quantum modular form of weight `k` is a function `f` on the rationals
//! which is (possibly twisted) 1-periodic and whose modularity defect
//!
//! ```text
//! h(x) = f(x) - θ^{±3} |x|^{-k} f(-1/x)
//! ```
//!
//! is regular on the real line. This crate evaluates such forms at
//! rationals by iterating the reciprocity relation along the continued
//! fraction expansion, computes the two real-line extensions (convergent
//! limits for `Re k < 0`, the reversed-fraction series for `Re k > 0`) and
//! provides the empirical-distribution machinery used to study the values
//! `{f(a/q) : (a, q) = 1}` as `q` grows.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command-line front end live in the `qmf-lab` crate.

#![no_std]
// Float methods come from `num_traits::Float` (libm). When a dependency links
// std, as the test builds do, the inherent methods shadow it and the
// imports look unused; they carry `#[allow(unused_imports)]` for that.

extern crate alloc;

pub mod cf;
pub mod dist;
pub mod engine;
mod error;
pub mod forms;
pub mod rational;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rational::Rational;

/// All analytic outputs are pairs of binary64 reals.
pub type ComplexValue = Complex64;
