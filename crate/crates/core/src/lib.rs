pub mod bench;
pub mod circuit;
pub mod cost;
pub mod error;
pub mod gadget;
pub mod noise;
pub mod passes;
pub mod qasm;
pub mod su4;

pub use error::{Error, Result};
