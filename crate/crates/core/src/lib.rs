//! Symmetric polynomial landscapes, their orbit-space quotients, and the
//! critical-point statistics that separate symmetric from asymmetric minima.

pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod poly;
pub mod quotient;
pub mod rng;
pub mod search;
pub mod shape;
pub mod symmetry;

pub use error::{Error, Result};
pub use poly::{MultiPoly, Scalar};
pub use rng::RngStream;
