use thiserror::Error;

use crate::cyclesupport::{PatternWitness, StrongAxaxWitness};
use crate::model::FamilyName;
use crate::treedecomp::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("member {index} of family {family} is empty")]
    EmptyMember { family: FamilyName, index: usize },
    #[error("member {index} of family {family} does not induce a connected subgraph")]
    DisconnectedMember { family: FamilyName, index: usize },
    #[error("coloring has {got} entries, graph has {expected} vertices")]
    ColoringLength { expected: usize, got: usize },
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(Violation),
    #[error("tree decomposition has no root")]
    Unrooted,
    #[error("node {0} is not in the tree decomposition")]
    NoSuchNode(usize),
    #[error("graph has {n} vertices, above the configured limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("decomposition is not easy: member {member} meets adhesion set {adhesion:?} of node {node} only in red vertices")]
    NotEasy { node: usize, adhesion: Vec<usize>, member: usize },
    #[error("members {first} and {second} pierce: removing one disconnects the other")]
    Piercing { first: usize, second: usize },
    #[error("family is not axax-free: {0:?}")]
    NotAxaxFree(PatternWitness),
    #[error("system is not strong axax-free: {0:?}")]
    NotStrongAxaxFree(StrongAxaxWitness),
    #[error("graph is not outerplanar")]
    NotOuterplanar,
    #[error("support labels do not match the hypergraph: {0}")]
    LabelMismatch(String),
    #[error("successor {0} is not a label of the support")]
    SuccessorMissing(usize),
    #[error("member {0} is not a single run")]
    MultiRunMember(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
