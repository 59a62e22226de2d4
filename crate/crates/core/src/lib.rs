//! Simulation and exact-formula toolkit for the KPZ fixed point as seen by
//! polynuclear growth, Dyson Brownian motion and determinantal kernels.

pub mod batch;
pub mod dyson;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod oracles;
pub mod png;
pub mod rng;
pub mod stats;

pub use batch::Execution;
pub use error::{Error, Result};
