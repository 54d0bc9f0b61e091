//! Cohomological dynamics of Noetherian maps `f = L∘J` on projective space.

pub mod asymptotics;
pub mod cohmodel;
pub mod error;
pub mod exactmath;
pub mod grid;
pub mod noether;
pub mod pipeline;
pub mod positivity;
pub mod potentials;
pub mod spectral;

pub use error::{Error, Result};
