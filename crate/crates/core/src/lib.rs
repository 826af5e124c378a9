//! Dense-coding capacities for group-restricted encodings, with tools to decide
//! whether a receiver's quantum memory raises the rate over a fixed measurement.

pub mod capacity;
pub mod channels;
pub mod checker;
pub mod config;
pub mod construct;
pub mod error;
pub mod group;
pub mod io;
pub mod linalg;
pub mod random;
pub mod reproduce;
pub mod state;

pub use config::Tolerances;
pub use error::{Error, Result};
