//! Jacquet-module bounds and ε-criteria for discrete series of classical
//! p-adic groups, parametrized by cuspidal data, Jordan blocks and ε.

pub mod error;
pub mod gen;
pub mod jacquet;
pub mod jordan;
pub mod multiseg;
pub mod symbols;
pub mod tempered;

pub use error::{Error, Result};
