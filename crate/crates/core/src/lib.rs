//! Strong-coupling expansion solutions of radial Schrödinger equations.

pub mod chebyshev;
pub mod coulomb;
pub mod error;
pub mod hierarchy;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod scaling;
pub mod yukawa;

pub use error::{Error, Result};
