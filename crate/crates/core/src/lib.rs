pub mod bounds;
pub mod cli;
pub mod constants;
pub mod error;
pub mod pde;
pub mod rayleigh;
pub mod specfun;
pub mod varmin;

pub use error::{Error, Result};
