//! Numerical core of the mutrans toolkit.
//!
//! Model boundary symbols and their transmission/index checks live in [`symcore`],
//! multiplicative factorization in [`wienerhopf`], discrete Fourier multipliers in
//! [`fourierops`], weighted spaces and boundary traces in [`muspace`], the half-line
//! model solver in [`halfline`] and interval problems for fractional powers in
//! [`fracdomain`].

pub mod error;
pub mod fit;
pub mod fourierops;
pub mod fracdomain;
pub mod halfline;
pub mod muspace;
pub mod quad;
pub mod special;
pub mod symcore;
pub mod wienerhopf;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64 as C64;
