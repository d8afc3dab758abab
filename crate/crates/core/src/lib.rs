//! Refinement of semidefinite program solutions by projection and rescaling.
//!
//! The crate works over `K = S^{r_1}_+ x ... x S^{r_p}_+ x R^d_+` and needs only `alloc`.
//! A bisection on the optimal value calls a projection-and-rescaling feasibility oracle on
//! homogenized subspaces; oracle outputs become primal or dual solutions, improving rays or
//! reducing directions. The [`refine::postprocess`] driver threads a warm start through both
//! refinement loops, and [`status`] decides strong feasibility through auxiliary problems.

#![no_std]
// `!(a > b)` is used on purpose so NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod jordan;
pub mod metrics;
pub mod models;
pub mod operators;
pub mod prsolver;
pub mod refine;
pub mod status;

pub use error::{Error, Result};

#[cfg(test)]
mod testutil;
