pub mod bundle;
pub mod census;
pub mod cli;
pub mod curve;
pub mod decimal;
pub mod error;
pub mod exec;
pub mod gf;
pub mod linsys;
pub mod picard;

pub use error::{Error, Result};
