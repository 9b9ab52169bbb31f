use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::graph::Graph;
use crate::error::{Error, Result};

/// Which construction produced a support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SupportKind {
    Primal,
    Dual,
    Intersection,
    OuterplanarPrimal,
    OuterplanarDual,
    OuterplanarIntersection,
}

impl SupportKind {
    pub const ALL: [SupportKind; 6] = [
        SupportKind::Primal,
        SupportKind::Dual,
        SupportKind::Intersection,
        SupportKind::OuterplanarPrimal,
        SupportKind::OuterplanarDual,
        SupportKind::OuterplanarIntersection,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SupportKind::Primal => "primal",
            SupportKind::Dual => "dual",
            SupportKind::Intersection => "intersection",
            SupportKind::OuterplanarPrimal => "outerplanar-primal",
            SupportKind::OuterplanarDual => "outerplanar-dual",
            SupportKind::OuterplanarIntersection => "outerplanar-intersection",
        }
    }

    /// The hypergraph flavour checked by the oracle.
    pub fn base(&self) -> SupportKind {
        match self {
            SupportKind::Primal | SupportKind::OuterplanarPrimal => SupportKind::Primal,
            SupportKind::Dual | SupportKind::OuterplanarDual => SupportKind::Dual,
            _ => SupportKind::Intersection,
        }
    }

    pub fn is_outerplanar(&self) -> bool {
        matches!(
            self,
            SupportKind::OuterplanarPrimal
                | SupportKind::OuterplanarDual
                | SupportKind::OuterplanarIntersection
        )
    }
}

impl fmt::Display for SupportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SupportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SupportKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown support kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub kind: SupportKind,
    /// Width bound promised by the construction, saturating at `u64::MAX`.
    pub width_bound: Option<u64>,
    /// Width of the decomposition the construction certifies for the support.
    pub width: Option<usize>,
    /// Cyclic order of label positions on the outer face.
    pub embedding: Option<Vec<usize>>,
}

impl Provenance {
    pub fn new(kind: SupportKind) -> Self {
        Provenance { kind, width_bound: None, width: None, embedding: None }
    }
}

/// A graph over logical labels. Edges join label positions `(i, j)`, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    pub labels: Vec<usize>,
    pub edges: BTreeSet<(usize, usize)>,
    pub provenance: Provenance,
}

impl Support {
    pub fn new(kind: SupportKind, labels: Vec<usize>) -> Self {
        Support { labels, edges: BTreeSet::new(), provenance: Provenance::new(kind) }
    }

    /// Builds a support from edges given as label values.
    pub fn from_label_edges<I>(kind: SupportKind, labels: Vec<usize>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut s = Support::new(kind, labels);
        let pos = s.positions();
        for (a, b) in edges {
            let (&i, &j) = match (pos.get(&a), pos.get(&b)) {
                (Some(i), Some(j)) => (i, j),
                _ => return Err(Error::LabelMismatch(format!("edge ({a}, {b}) uses unknown label"))),
            };
            s.add_edge(i, j);
        }
        Ok(s)
    }

    pub fn positions(&self) -> BTreeMap<usize, usize> {
        self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    pub fn position_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Adds the edge between positions `i` and `j`; loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.edges.insert((i.min(j), i.max(j)));
        }
    }

    pub fn has_label_edge(&self, a: usize, b: usize) -> bool {
        match (self.position_of(a), self.position_of(b)) {
            (Some(i), Some(j)) => self.edges.contains(&(i.min(j), i.max(j))),
            _ => false,
        }
    }

    /// Edges as label values.
    pub fn label_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(i, j)| (self.labels[i], self.labels[j])).collect()
    }

    /// The support as a graph on label positions.
    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.labels.len());
        for &(i, j) in &self.edges {
            g.add_edge(i, j);
        }
        g
    }

    /// Sorts labels increasingly, remapping edges and embedding.
    pub fn canonicalize(&mut self) {
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.sort_by_key(|&i| self.labels[i]);
        let mut new_pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_pos[old] = new;
        }
        self.labels = order.iter().map(|&i| self.labels[i]).collect();
        self.edges = self
            .edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (new_pos[i], new_pos[j]);
                (a.min(b), a.max(b))
            })
            .collect();
        if let Some(emb) = &mut self.provenance.embedding {
            for p in emb.iter_mut() {
                *p = new_pos[*p];
            }
        }
    }
}

/// Adds every removed member as a pendant label adjacent to its successor.
pub fn attach_pendants(mut support: Support, successor: &BTreeMap<usize, usize>) -> Result<Support> {
    let pos = support.positions();
    let mut extra = Vec::new();
    for (&removed, &succ) in successor {
        let &p = pos.get(&succ).ok_or(Error::SuccessorMissing(succ))?;
        extra.push((removed, p));
    }
    for (removed, p) in extra {
        support.labels.push(removed);
        let q = support.labels.len() - 1;
        support.add_edge(p, q);
        // A pendant drawn next to its neighbour crosses nothing.
        if let Some(emb) = &mut support.provenance.embedding {
            let at = emb.iter().position(|&x| x == p).map_or(emb.len(), |i| i + 1);
            emb.insert(at, q);
        }
    }
    Ok(support)
}
