use std::collections::BTreeMap;
use std::fmt;

use super::graph::{Coloring, Graph};
use super::sets;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyName {
    H,
    K,
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyName::H => write!(f, "H"),
            FamilyName::K => write!(f, "K"),
        }
    }
}

/// Ordered list of nonempty vertex sets. Identity is positional, so two
/// members may span the same vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphFamily {
    name: FamilyName,
    members: Vec<Vec<usize>>,
}

impl SubgraphFamily {
    /// Sorts each member and rejects empty ones.
    pub fn new(name: FamilyName, members: Vec<Vec<usize>>) -> Result<Self> {
        let members: Vec<Vec<usize>> = members.into_iter().map(sets::normalize).collect();
        if let Some(index) = members.iter().position(Vec::is_empty) {
            return Err(Error::EmptyMember { family: name, index });
        }
        Ok(SubgraphFamily { name, members })
    }

    pub fn name(&self) -> FamilyName {
        self.name
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &[usize] {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// For every vertex `v < n`, the indices of members containing it.
    pub fn incidence(&self, n: usize) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); n];
        for (i, m) in self.members.iter().enumerate() {
            for &v in m {
                inc[v].push(i);
            }
        }
        inc
    }

    fn check_in(&self, g: &Graph, connected: bool) -> Result<()> {
        for (index, m) in self.members.iter().enumerate() {
            g.check_vertices(m)?;
            if connected && !connected_sorted(g, m) {
                return Err(Error::DisconnectedMember { family: self.name, index });
            }
        }
        Ok(())
    }
}

/// Host graph, coloring and one family of connected subgraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSystem {
    pub graph: Graph,
    pub coloring: Coloring,
    pub h: SubgraphFamily,
}

impl GraphSystem {
    pub fn new(graph: Graph, coloring: Option<Coloring>, h: SubgraphFamily) -> Result<Self> {
        let n = graph.vertex_count();
        let coloring = coloring.unwrap_or_else(|| Coloring::all_blue(n));
        if coloring.len() != n {
            return Err(Error::ColoringLength { expected: n, got: coloring.len() });
        }
        h.check_in(&graph, true)?;
        Ok(GraphSystem { graph, coloring, h })
    }
}

/// Host graph with two families of connected subgraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionSystem {
    pub graph: Graph,
    pub h: SubgraphFamily,
    pub k: SubgraphFamily,
}

impl IntersectionSystem {
    pub fn new(graph: Graph, h: SubgraphFamily, k: SubgraphFamily) -> Result<Self> {
        h.check_in(&graph, true)?;
        k.check_in(&graph, true)?;
        Ok(IntersectionSystem { graph, h, k })
    }
}

/// True iff the subgraph induced on `s` is connected; the empty set is not.
pub fn induced_connected(g: &Graph, s: &[usize]) -> Result<bool> {
    g.check_vertices(s)?;
    let s = sets::normalize(s.to_vec());
    Ok(connected_sorted(g, &s))
}

pub(crate) fn connected_sorted(g: &Graph, s: &[usize]) -> bool {
    if s.is_empty() {
        return false;
    }
    let mut seen = vec![false; s.len()];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut count = 1;
    while let Some(i) = stack.pop() {
        let u = s[i];
        let nb = g.neighbors(u);
        if nb.len() <= s.len() {
            for &w in nb {
                if let Ok(j) = s.binary_search(&w) {
                    if !seen[j] {
                        seen[j] = true;
                        count += 1;
                        stack.push(j);
                    }
                }
            }
        } else {
            for (j, &w) in s.iter().enumerate() {
                if !seen[j] && nb.binary_search(&w).is_ok() {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
    }
    count == s.len()
}

/// Outcome of a non-piercing test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonPiercing {
    Holds,
    /// `first \ second` is nonempty and disconnected.
    Violated {
        first: usize,
        second: usize,
    },
}

impl NonPiercing {
    pub fn holds(&self) -> bool {
        matches!(self, NonPiercing::Holds)
    }
}

/// Checks every ordered pair; reports the lexicographically first violation.
pub fn is_non_piercing(g: &Graph, fam: &SubgraphFamily) -> Result<NonPiercing> {
    fam.check_in(g, true)?;
    let inc = fam.incidence(g.vertex_count());
    for (i, hi) in fam.members().iter().enumerate() {
        // Disjoint pairs leave `hi` whole, which is connected.
        let mut partners: Vec<usize> = hi.iter().flat_map(|&v| inc[v].iter().copied()).collect();
        partners.sort_unstable();
        partners.dedup();
        for j in partners {
            if j == i {
                continue;
            }
            let diff = sets::difference(hi, fam.member(j));
            if !diff.is_empty() && !connected_sorted(g, &diff) {
                return Ok(NonPiercing::Violated { first: i, second: j });
            }
        }
    }
    Ok(NonPiercing::Holds)
}

/// Maximal members under inclusion plus the map sending each removed member
/// to a containing maximal member (lowest index). Duplicate vertex sets keep
/// their lowest-index copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainmentReduction {
    /// Indices (into the input family) of the kept members, increasing.
    pub kept: Vec<usize>,
    /// Removed member index -> kept member index.
    pub successor: BTreeMap<usize, usize>,
}

impl ContainmentReduction {
    pub fn family(&self, fam: &SubgraphFamily) -> SubgraphFamily {
        SubgraphFamily {
            name: fam.name(),
            members: self.kept.iter().map(|&i| fam.member(i).to_vec()).collect(),
        }
    }
}

pub fn containment_maximal(fam: &SubgraphFamily) -> ContainmentReduction {
    containment_maximal_sets(fam.members())
}

pub(crate) fn containment_maximal_sets(members: &[Vec<usize>]) -> ContainmentReduction {
    let n = members.iter().flat_map(|m| m.iter()).max().map_or(0, |&v| v + 1);
    let mut inc = vec![Vec::new(); n];
    for (i, m) in members.iter().enumerate() {
        for &v in m {
            inc[v].push(i);
        }
    }
    let dominated_by = |i: usize| -> Option<usize> {
        let m = &members[i];
        let v = *m.iter().min_by_key(|&&v| inc[v].len())?;
        inc[v]
            .iter()
            .copied()
            .find(|&j| j != i && sets::is_subset(m, &members[j]) && (members[j].len() > m.len() || j < i))
    };
    let mut kept = Vec::new();
    let mut parent = vec![None; members.len()];
    for (i, p) in parent.iter_mut().enumerate() {
        match dominated_by(i) {
            Some(j) => *p = Some(j),
            None => kept.push(i),
        }
    }
    // Follow dominators up to a kept member; chains strictly grow or
    // strictly decrease in index, so they terminate.
    let mut successor = BTreeMap::new();
    for i in 0..members.len() {
        let mut j = i;
        while let Some(p) = parent[j] {
            j = p;
        }
        if j != i {
            successor.insert(i, j);
        }
    }
    // Prefer the lowest-index kept container when several exist.
    let mut is_kept = vec![false; members.len()];
    for &k in &kept {
        is_kept[k] = true;
    }
    for (&i, s) in successor.iter_mut() {
        let m = &members[i];
        let v = *m.iter().min_by_key(|&&v| inc[v].len()).expect("members are nonempty");
        if let Some(&best) = inc[v].iter().find(|&&k| is_kept[k] && sets::is_subset(m, &members[k])) {
            *s = best;
        }
    }
    ContainmentReduction { kept, successor }
}
