pub mod error;
pub mod geom2d;
pub mod specfun;
pub mod disc_spectrum;
pub mod solver;

pub use error::{Error, ErrorKind, Result};
pub mod tdiam;
pub mod verify;
pub mod cli;
