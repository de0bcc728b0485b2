//! Numerical spectral geometry on the round 2-sphere: spherical harmonics,
//! the Schrödinger operator `−Δ/2 + V`, classical and quantum averaging,
//! geometric control conditions and observability diagnostics.

pub mod averaging;
pub mod cli;
pub mod config;
pub mod control;
pub mod error;
pub mod geom;
pub mod harmonics;
pub mod observability;
pub mod operator;
pub mod radon;

pub use error::{Error, Result};
