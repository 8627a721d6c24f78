//! Numerical laboratory for the dissipative KdV family
//! `u_t + u_xxx + |D_x|^{2α} u + u u_x = 0`, `0 < α ≤ 1`.
// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bilinear;
pub mod bourgain;
pub mod error;
pub mod evolution;
pub mod expint;
pub mod fft;
pub mod harness;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
