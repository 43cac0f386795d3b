pub mod builder;
pub mod cli;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod report;
pub mod spectral;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
