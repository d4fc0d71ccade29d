//! Outage probability and ergodic capacity of two-user downlink NOMA over
//! fluctuating two-ray (FTR) fading.

pub mod error;
pub mod ftr;
pub mod gpa;
pub mod montecarlo;
pub mod noma;
pub mod opa;
pub mod par;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
