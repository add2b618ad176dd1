//! Benchmark bodies, kept in a library so the bench target stays a thin
//! list of groups.

pub mod spectral;
pub mod sphere;
pub mod structure;
pub mod torus;
