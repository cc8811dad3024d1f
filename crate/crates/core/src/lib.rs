//! Random walks in i.i.d. random environments with a forbidden direction.
//!
//! The crate simulates such walks, extracts regeneration blocks, computes
//! quenched quantities exactly in one dimension, and estimates the limiting
//! velocity and diffusion coefficients by formula and by Monte Carlo.

mod error;
pub mod env;
pub mod estimators;
pub mod exactq;
mod linalg;
pub mod renewal;
pub mod rng;
pub mod stats;
pub mod walk;

pub use env::{EnvironmentLaw, LatticeVector};
pub use error::{Result, RwreError};
