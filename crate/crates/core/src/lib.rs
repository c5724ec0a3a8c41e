//! Measuring how meaningful a set of discovered binary attributes is.
//!
//! Attributes are ±1 vectors over a fixed instance set. A discovered set is
//! scored by how well a human-labelled Meaningful Subspace reconstructs it,
//! either by unconstrained least squares or by convex combinations of the
//! meaningful attributes. The crate also ships the discovery baselines that
//! produce such sets and the keyword pipeline that names their bits.

pub mod attribute;
pub mod bench;
pub mod discovery;
pub mod distance;
pub mod error;
pub mod keywords;
pub mod oracle;
pub mod simplex;
pub mod synthetic;

pub use attribute::{
    binarize, concat, random_attribute_set, AttributeMatrix, AttributeVector, FeatureMatrix, LabelVector,
};
pub use distance::{
    distance_cvx, distance_plain, rank_methods, reconstruct_cvx, reconstruct_ls, DistanceMode, MeaningfulSubspace,
    RankedMethod, ReconstructionResult,
};
pub use error::{Error, Result};
pub use oracle::brute_force_cvx_oracle;
pub use simplex::{project_simplex, SolverConfig};
