//! Citation-flow trade indicators between subject categories.
//!
//! Journal-level citation edges are aggregated into square field-by-field
//! flow matrices (row = citing field, column = cited field) with every
//! citation credited to all categories of a multi-assigned journal. On top
//! of those matrices the crate computes exports, imports, self-dependence,
//! net flows, knowledge surplus, partner counts, growth dynamics, the
//! distribution diagnostics used to describe indicator vectors, and a
//! ten-type taxonomy of fields.
//!
//! With the default `parallel` feature, matrix aggregation and per-field
//! indicator evaluation run on rayon. The `*_sequential` entry points are
//! always available and produce identical results.

pub mod archive;
pub mod cli;
pub mod error;
pub mod ingest;
pub mod metrics;
mod par;
pub mod report;
pub mod stats;
pub mod synth;
pub mod taxonomy;

pub use error::{Error, Result};
pub use ingest::{
    build_flow_matrix, build_flow_matrix_sequential, grand_total_citations, parse_category_map,
    parse_edges, parse_publications, CategoryMap, CitationEdge, FieldFlowMatrix, PublicationCounts,
    UnmappedPolicy,
};
pub use metrics::{DynamicsRecord, FieldIndicators, SurplusMode};
