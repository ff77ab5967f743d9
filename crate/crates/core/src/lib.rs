//! Citation projection graphs: extraction, structural metrics, degree-preserving
//! null models, normalized impact strata and the statistics that tie them
//! together.

pub mod error;
pub mod graph;
pub mod impact;
pub mod metrics;
pub mod nullmodel;
pub mod pipeline;
pub mod projection;
pub mod report;
pub mod rng;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{CitationGraph, GraphBuilder, PaperId, PaperMeta};
pub use metrics::{ConstraintVariant, Metric, MetricVector};
pub use projection::{project, ProjectionPair};
