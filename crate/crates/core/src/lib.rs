//! Random-walk sampling over random-order graph streams.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`] and [`template`]: simple graphs, walks and walk templates.
//! * [`stream`]: timestamped random-order streams and a low-space generator
//!   of sorted uniform timestamps.
//! * [`sampler`]: the single-pass walk sampler (template walks built with
//!   reservoir sampling over timestamp windows, then rejection sampling).
//! * [`estimators`]: average return probability and set PageRank built on
//!   sampled walks.
//! * [`oracle`]: exact brute-force references and distribution comparators.
//! * [`lower_bound`]: hard-instance generators for the Indexing reduction and
//!   a protocol harness for black-box stream algorithms.
//! * [`generate`]: deterministic test-bed graph families.

pub mod estimators;
pub mod generate;
pub mod graph;
pub mod lower_bound;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod stream;
pub mod template;

pub use graph::{Graph, GraphError, Vertex, Walk};
pub use sampler::{SamplerConfig, SamplerError};
pub use stream::{make_stream, Stream, TimestampedEdge};
pub use template::{conforms, enumerate_templates, template_of, WalkTemplate};
