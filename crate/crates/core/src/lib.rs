pub mod algebra;
pub mod chern;
pub mod cli;
pub mod error;
pub mod expr;
pub mod localize;
pub mod model;
pub mod residue;
pub mod verify;

pub use error::{Error, Result};
