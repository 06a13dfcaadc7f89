//! Energy/mass ratios of balls and infinite cylinders for liquid-drop
//! energies with Riesz, truncated-Coulomb and Yukawa interaction kernels.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod certify;
pub mod cylinder;
pub mod error;
pub mod kernels;
pub mod numerics;
pub mod oracle;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
