//! Generalized toric codes on periodic cubic lattices.

pub mod error;
pub mod gauge_mc;
pub mod gf2;
pub mod homology;
pub mod lattice;
pub mod memory_sim;
pub mod partitions;
pub mod stabilizer;
pub mod stats;
pub mod thermal_exact;

pub use error::{Error, Result};
