#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::should_implement_trait)]
//! Discrete second moments of the Riemann zeta function over vertical
//! arithmetic progressions `½ + i(an + b)`.

pub mod cli;
pub mod diophantine;
pub mod divisor;
pub mod error;
pub mod expsum;
pub mod moments;
pub mod numerics;
pub mod zeta;

pub use error::{Error, Result};
