//! Discrete Wigner functions of pure states on the quantized torus and
//! sphere, the quantized sawtooth map and kicked top, and the statistics of
//! Wigner values and nodal structure in chaotic and random states.

pub mod autocorr;
pub mod dynamics;
pub mod error;
pub mod relaxation;
pub mod spectral;
pub mod sphere;
pub mod state;
pub mod stats;
pub mod torus;
pub mod wfl;

pub use autocorr::{autocorrelation_torus, Autocorrelation};
pub use dynamics::{Geometry, InitialState, MapConfig, Propagator, WignerSampler};
pub use error::{Error, Result};
pub use relaxation::{relaxation_scan, RelaxationSeries};
pub use spectral::{
    goe_ensemble_excess, propagator_matrix, unitary_eigensystem, EigenSystem, ExcessDistribution,
};
pub use sphere::{SphereTransform, SphereWigner, Spin, TopParams};
pub use state::{random_state, QuantumState, RngStream};
pub use stats::{moments_and_excess, Histogram, StatsSummary, WeightedSamples};
pub use torus::{wigner_torus, TorusMapParams, TorusWigner};
pub use wfl::{find_zeros, random_wfl, structure_statistics, StructureStats, WFLine};
