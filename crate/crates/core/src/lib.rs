//! Hypergraph active learning by shortest-shortest-path bisection.
//!
//! Start with [`hypergraph::Hypergraph`] and [`labels::LabelFunction`], analyze
//! a labeling with [`cut::structural_params`], and run a learner from
//! [`engine`] against an oracle from [`oracle`].

pub mod bounds;
pub mod cut;
pub mod datagen;
pub mod engine;
pub mod harness;
pub mod hypergraph;
pub mod labels;
pub mod oracle;

pub use cut::{CutProfile, StructuralParams, INFINITE};
pub use hypergraph::{EdgeId, HyperPath, Hypergraph, NodeId};
pub use labels::{ClassId, LabelFunction};
