//! Infinitesimal rigidity of planar rod configurations.
//!
//! A rod configuration realizes an incidence geometry `S = (P, L, I)` with each
//! line a rigid body through its points. Its rigidity is decided by playing the
//! (2,3)-pebble game on a cone graph of `S`, and cross-checked against the exact
//! rank of the concurrence matrix of a random realization of the cone
//! incidence geometry `S^C`.

pub mod analysis;
pub mod cone;
pub mod generate;
pub mod geometry;
pub mod oracle;
pub mod pebble;
pub mod render;

pub use analysis::{
    canonical_subgraph, check_body_joint_counts, decide_minimal_rigidity, decide_rod_rigidity, Agreement,
    AnalysisError, CanonicalSubgraph, DecideOptions, Field, Mode, RigidityVerdict,
};
pub use cone::{ConeGraph, ConeIncidenceGeometry};
pub use geometry::{GeometryError, Incidence, IncidenceGeometry, SubsetSupport};
pub use pebble::{play, Classification, PebbleState, PebbleVerdict};
