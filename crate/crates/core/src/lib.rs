//! Time-frequency quantization on finite cyclic groups.

pub mod cli;
pub mod error;
pub mod gabor;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod opnorms;
pub mod quant;
pub mod rng;
pub mod spaces;
pub mod timefreq;
pub mod weights;

pub use error::{Error, Result};
