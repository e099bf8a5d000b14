//! Graph signal sampling by randomized local aggregations.
//!
//! Measurements are random Gaussian combinations of a node's closed
//! neighborhood, taken at a sampling set that contains a dominating set of
//! the (possibly multi-hop) aggregation graph. The crate bundles the
//! sampler, reconstruction by least squares or basis pursuit, comparison
//! samplers and a reproducible experiment harness.

pub mod baselines;
pub mod error;
pub mod graph;
pub mod harness;
pub mod par;
pub mod recon;
pub mod rng;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, NodeSet};

pub use recon::{ReconResult, Reconstruction, SparseSignalSpec, SupportModel};
pub use sampler::{Growth, SamplingOperator, SamplingPlan, Strategy};
pub use spectral::{CoherenceReport, OrthoBasis};
