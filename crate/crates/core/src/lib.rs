//! Truth discovery for crowdsourced answers.
//!
//! Workers answer the same set of questions; the library estimates each
//! worker's fault level from the distances between workers' reports and
//! aggregates the reports with fault-derived weights. Three domains are
//! supported end to end: real-valued answers, categorical labels, and
//! rankings (including raw, possibly cyclic pairwise comparisons).

pub mod aggregate;
pub mod dataio;
pub mod domain;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod noise;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` aliases for the generic core types.
pub type Answer64 = domain::Answer<f64>;
pub type Instance64 = domain::Instance<f64>;
pub type Population64 = domain::Population<f64>;
pub type ProtoPopulation64 = domain::ProtoPopulation<f64>;
pub type FaultEstimate64 = estimate::FaultEstimate<f64>;
pub type WeightVector64 = aggregate::WeightVector<f64>;
pub type MethodResult64 = pipeline::MethodResult<f64>;
