//! Schrödinger operators `-Δ + q` with distributional potentials.
//!
//! The potential datum is always a structural representative: a primitive
//! `u` with `q = u'` on an interval, or a vector field `V` with `q = div V`
//! on a bounded planar domain. Operators are realized through the
//! quasi-derivative `y' - u y` (1D) and the sesquilinear form
//! `(∇f, ∇g) - (V·∇f, g) - (f V, ∇g)` (nD), which stay meaningful when `q`
//! itself is not a function.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `Float` supplies libm-backed math on toolchains whose `core` lacks the
// inherent float methods; elsewhere the inherent methods shadow it
#![allow(unused_imports)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod femnd;
pub mod numerics;
pub mod potentials;
pub mod quasi1d;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;
