//! Numerics for a particle-decay clock in a cavity, at rest and under uniform
//! acceleration: special functions of imaginary order, adaptive quadrature,
//! worldline kinematics, and the decay probabilities and rates built on them.

// `!(x > 0.0)` rejects NaN along with the out-of-range values; the long
// literals are published coefficients kept verbatim.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod accelerated;
pub mod cli;
pub mod error;
pub mod kinematics;
pub mod oracle;
pub mod quadrature;
pub mod specialfn;
pub mod stationary;
pub mod verify;

pub use error::Error;
