//! Uniform spanning trees and forests on finite weighted networks, together
//! with the electrical and isoperimetric quantities that control them.
//!
//! Everything here is a pure function of an immutable [`Network`]. Infinite
//! graphs are never represented directly: every "to infinity" quantity is
//! computed on a finite truncation whose exterior has been identified to a
//! single *wired* vertex.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the parallel experiment driver live in the companion `wsf-lab` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catalog;
pub mod electrical;
pub mod ends;
mod error;
pub mod isoperimetry;
pub mod lattice;
mod linalg;
pub mod network;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use lattice::{build_lattice_box, BoundaryMode, LatticeBox, LatticeBoxSpec};
pub use network::{Edge, EdgeId, Embedding, Network, OrientedEdge, PiConvention};
pub use rng::RngStream;
