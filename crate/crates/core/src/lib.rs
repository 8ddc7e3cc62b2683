//! Random graphs whose vertex degrees are constrained to a set Δ, studied
//! around their shifted phase transition `m = α(Δ)·n`.
//!
//! The crate is `no_std` (with `alloc`). It covers:
//!
//! * [`degset`]: the degree set, its exponential generating function and
//!   characteristic functions;
//! * [`critical`]: the critical point (ẑ, α) and the saddle constants, tree
//!   functions and the saddle function `h(z; r)`;
//! * [`asymptotics`]: critical-window special functions and the closed-form
//!   predictions (excess distribution, planarity, 2-path constants);
//! * [`sampler`]: the recursive degree-sequence sampler with configuration
//!   pairing and rejection;
//! * [`graph`] and [`stats`]: cores, kernels and exact extremal statistics of
//!   the complex part.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod critical;
pub mod degset;
mod error;
pub mod graph;
pub mod math;
pub mod mp;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
