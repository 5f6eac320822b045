//! Numerical laboratory for the one-sided nonlocal Fisher-KPP free-boundary
//! problem
//!
//! ```text
//! u_t = d ∫_0^∞ J(x - y) u(t, y) dy - d u + f(u),   0 ≤ x < h(t)
//! u(t, x) = 0,                                       x ≥ h(t)
//! h'(t) = μ ∫_0^h ∫_h^∞ J(x - y) u(t, x) dy dx
//! ```
//!
//! together with its steady state, semi-wave and half-line companions, and
//! the post-processing that turns simulations into spreading-speed,
//! accelerated-spreading and level-set measurements.
//!
//! Each capability has a runnable example under `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod free_boundary;
pub mod grid_field;
pub mod halfline;
pub mod kernels;
pub mod quadrature;
pub mod reaction;
pub mod semiwave;
pub mod stationary;

pub use error::{Error, Result};
pub use grid_field::{Field, Stencil};
pub use kernels::{FirstMoment, Kernel, KernelFamily, KernelSpec, TailExtrapolation, TruncatedKernel};
pub use reaction::{Reaction, ReactionSpec};
