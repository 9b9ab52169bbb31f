//! Graphs, colorings, subgraph families, systems and supports.

mod family;
mod graph;
pub(crate) mod sets;
mod support;

pub(crate) use family::{connected_sorted, containment_maximal_sets};
pub use family::{
    containment_maximal, induced_connected, is_non_piercing, ContainmentReduction, FamilyName, GraphSystem,
    IntersectionSystem, NonPiercing, SubgraphFamily,
};
pub use graph::{Color, Coloring, Graph};
pub use support::{attach_pendants, Provenance, Support, SupportKind};
