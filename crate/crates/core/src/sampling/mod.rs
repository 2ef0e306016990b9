//! Uniform spanning trees: Wilson's algorithm, the free, wired and
//! root-wired laws on finite boxes, and exact enumeration for small graphs.

mod enumerate;
mod forest;
mod laws;
mod wilson;

pub use enumerate::{
    enumerate_spanning_trees, enumerate_spanning_trees_capped, matrix_tree_determinant,
    SpanningDistribution, DEFAULT_EDGE_CAP,
};
pub use forest::{Forest, RootedTree};
pub(crate) use laws::tree_component;
pub use laws::{
    condition_on_edge, sample_free, sample_wired, sample_wsf_o, RootWiredSampler, WiredSample,
    WiredSampler, WsfOSample,
};
pub use wilson::{wilson_ust, WilsonSampler};
