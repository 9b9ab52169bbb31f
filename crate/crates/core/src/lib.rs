//! Sparse supports for hypergraphs defined by non-piercing subgraphs of
//! bounded-treewidth and outerplanar host graphs.
//!
//! The crate is organised bottom-up: [`model`] holds graphs, colorings,
//! families and supports; [`treedecomp`] the tree decomposition toolbox;
//! [`primal`], [`dual`] and [`intersection`] the bounded-treewidth
//! constructions; [`cyclesupport`] the outerplanar constructions;
//! [`generators`] instance generators; and [`verify`] the brute-force oracles.

pub mod cyclesupport;
pub mod dual;
mod error;
pub mod generators;
pub mod intersection;
pub mod model;
pub mod primal;
pub mod treedecomp;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    Color, Coloring, FamilyName, Graph, GraphSystem, IntersectionSystem, Provenance, SubgraphFamily, Support,
    SupportKind,
};
pub use treedecomp::TreeDecomposition;
