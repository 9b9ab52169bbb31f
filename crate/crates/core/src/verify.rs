//! Brute-force oracles: support validity, exact treewidth, outerplanarity
//! and forced lower-bound structure.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::generators::{LowerBoundInstance, LowerBoundKind};
use crate::model::{sets, Graph, GraphSystem, IntersectionSystem, Support, SupportKind};

/// Hyperedges over logical labels, each tagged with the object inducing it
/// (member index for primal, vertex for dual, K index for intersection).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub kind: SupportKind,
    pub labels: Vec<usize>,
    pub hyperedges: Vec<(usize, Vec<usize>)>,
}

impl Hypergraph {
    /// Blue traces `b(H)` over the blue vertices.
    pub fn primal(sys: &GraphSystem) -> Self {
        let labels = sys.coloring.blue_vertices();
        let hyperedges = sys
            .h
            .members()
            .iter()
            .enumerate()
            .map(|(i, m)| (i, m.iter().copied().filter(|&v| sys.coloring.is_blue(v)).collect()))
            .collect();
        Hypergraph { kind: SupportKind::Primal, labels, hyperedges }
    }

    /// `H_v` for every vertex `v < n`, over member indices.
    pub fn dual(n: usize, members: &[Vec<usize>]) -> Self {
        let mut inc = vec![Vec::new(); n];
        for (i, m) in members.iter().enumerate() {
            for &v in m {
                inc[v].push(i);
            }
        }
        Hypergraph {
            kind: SupportKind::Dual,
            labels: (0..members.len()).collect(),
            hyperedges: inc.into_iter().enumerate().collect(),
        }
    }

    /// `H_K` for every `K`, over indices of `h`.
    pub fn intersection(h: &[Vec<usize>], k: &[Vec<usize>]) -> Self {
        let hyperedges = k
            .iter()
            .enumerate()
            .map(|(j, km)| {
                let hit =
                    h.iter().enumerate().filter(|(_, hm)| sets::intersects(hm, km)).map(|(i, _)| i).collect();
                (j, hit)
            })
            .collect();
        Hypergraph { kind: SupportKind::Intersection, labels: (0..h.len()).collect(), hyperedges }
    }

    pub fn intersection_of(sys: &IntersectionSystem) -> Self {
        Hypergraph::intersection(sys.h.members(), sys.k.members())
    }
}

/// A hyperedge whose labels split into several components of the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportViolation {
    /// Tag of the hyperedge (see [`Hypergraph`]).
    pub hyperedge: usize,
    /// Components of the induced subgraph, as label values.
    pub components: Vec<Vec<usize>>,
}

/// Returns the first hyperedge that is disconnected in the support, if any.
pub fn check_support(hg: &Hypergraph, support: &Support) -> Result<Option<SupportViolation>> {
    let mut want = hg.labels.clone();
    want.sort_unstable();
    let mut have = support.labels.clone();
    have.sort_unstable();
    if want != have {
        return Err(Error::LabelMismatch(format!(
            "expected {} labels, support has {}",
            want.len(),
            have.len()
        )));
    }
    let pos = support.positions();
    let g = support.graph();
    for (tag, edge) in &hg.hyperedges {
        if edge.len() <= 1 {
            continue;
        }
        let verts: Vec<usize> = sets::normalize(edge.iter().map(|l| pos[l]).collect());
        let comps = g.induced(&verts).components();
        if comps.len() > 1 {
            let components = comps
                .into_iter()
                .map(|c| c.into_iter().map(|i| support.labels[verts[i]]).collect())
                .collect();
            return Ok(Some(SupportViolation { hyperedge: *tag, components }));
        }
    }
    Ok(None)
}

/// Default vertex limit for [`exact_treewidth`].
pub const TREEWIDTH_LIMIT: usize = 20;

/// Exact treewidth by a memoised search over elimination prefixes, one
/// width at a time between a degeneracy lower bound and a greedy upper bound.
pub fn exact_treewidth(g: &Graph, limit: usize) -> Result<usize> {
    let n = g.vertex_count();
    let limit = limit.min(64);
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    let mut tw = 0;
    for comp in g.components() {
        let sub = g.induced(&comp);
        tw = tw.max(component_treewidth(&sub));
    }
    Ok(tw)
}

fn component_treewidth(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n <= 1 {
        return 0;
    }
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | (1 << w))).collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let lower = degeneracy(&adj, full);
    let upper = greedy_width(&adj, full);
    for k in lower..upper {
        let mut failed = HashSet::new();
        if feasible(&adj, full, 0, k, &mut failed) {
            return k;
        }
    }
    upper
}

/// Vertices outside `gone ∪ {v}` adjacent to `v` or to a component of
/// `gone` touching `v`.
fn boundary(adj: &[u64], gone: u64, v: usize) -> u64 {
    let mut seen = 1u64 << v;
    let mut frontier = seen;
    let mut reach = 0u64;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        reach |= adj[u];
        let fresh = adj[u] & gone & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    reach & !gone & !(1u64 << v)
}

fn feasible(adj: &[u64], full: u64, gone: u64, k: usize, failed: &mut HashSet<u64>) -> bool {
    let left = full & !gone;
    if left.count_ones() as usize <= k + 1 {
        return true;
    }
    if failed.contains(&gone) {
        return false;
    }
    let mut bits = left;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let q = boundary(adj, gone, v);
        if q.count_ones() as usize > k {
            continue;
        }
        // A vertex whose boundary is a clique can always go first.
        let clique = {
            let mut ok = true;
            let mut b = q;
            while b != 0 && ok {
                let u = b.trailing_zeros() as usize;
                b &= b - 1;
                let others = q & !(1u64 << u);
                ok = others & !boundary(adj, gone, u) == 0;
            }
            ok
        };
        if feasible(adj, full, gone | (1u64 << v), k, failed) {
            return true;
        }
        if clique {
            break;
        }
    }
    failed.insert(gone);
    false
}

fn degeneracy(adj: &[u64], full: u64) -> usize {
    let mut left = full;
    let mut best = 0;
    while left != 0 {
        let mut bits = left;
        let mut pick = (usize::MAX, 0);
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let d = (adj[v] & left).count_ones() as usize;
            if d < pick.0 {
                pick = (d, v);
            }
        }
        best = best.max(pick.0);
        left &= !(1u64 << pick.1);
    }
    best
}

fn greedy_width(adj: &[u64], full: u64) -> usize {
    let mut gone = 0u64;
    let mut width = 0;
    while gone != full {
        let mut bits = full & !gone;
        let mut pick = (usize::MAX, 0);
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let d = boundary(adj, gone, v).count_ones() as usize;
            if d < pick.0 {
                pick = (d, v);
            }
        }
        width = width.max(pick.0);
        gone |= 1u64 << pick.1;
    }
    width
}

/// Outerplanarity by degree-two reductions inside each biconnected block.
pub fn is_outerplanar(g: &Graph) -> bool {
    let n = g.vertex_count();
    if n >= 2 && g.edge_count() > 2 * n - 3 {
        return false;
    }
    g.blocks().into_iter().filter(|b| b.len() >= 3).all(|b| block_outerplanar(&g.induced(&b)))
}

fn block_outerplanar(g: &Graph) -> bool {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut edges = g.edge_count();
    while alive.len() > 3 {
        if edges > 2 * alive.len() - 3 {
            return false;
        }
        let Some(&v) = alive.iter().find(|&&v| adj[v].len() == 2) else {
            return false;
        };
        let (a, b) = {
            let mut it = adj[v].iter();
            (*it.next().unwrap(), *it.next().unwrap())
        };
        // a-b must lie on the outer face once v is gone.
        if !connected_avoiding(&adj, &alive, &[v, a, b]) {
            return false;
        }
        adj[a].remove(&v);
        adj[b].remove(&v);
        adj[v].clear();
        alive.remove(&v);
        edges -= 2;
        if adj[a].insert(b) {
            adj[b].insert(a);
            edges += 1;
        }
    }
    true
}

fn connected_avoiding(adj: &[BTreeSet<usize>], alive: &BTreeSet<usize>, skip: &[usize]) -> bool {
    let rest: Vec<usize> = alive.iter().copied().filter(|v| !skip.contains(v)).collect();
    let Some(&start) = rest.first() else {
        return true;
    };
    let mut seen: HashSet<usize> = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !skip.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == rest.len()
}

/// Edges every valid support of a lower-bound instance must contain, next
/// to the grid they are claimed to form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedStructure {
    /// Forced edges as label pairs `(a, b)`, `a < b`.
    pub edges: BTreeSet<(usize, usize)>,
    /// The N×N grid over the instance's coordinate labels.
    pub grid: BTreeSet<(usize, usize)>,
}

impl ForcedStructure {
    pub fn forms_grid(&self) -> bool {
        self.edges == self.grid
    }

    /// The forced edges as a graph over the instance's grid labels, listed
    /// row-major.
    pub fn grid_graph(&self, lb: &LowerBoundInstance) -> Graph {
        let labels: Vec<usize> = lb.grid_labels.iter().flatten().copied().collect();
        let pos = |l: usize| labels.iter().position(|&x| x == l);
        let mut g = Graph::new(labels.len());
        for &(a, b) in &self.edges {
            if let (Some(i), Some(j)) = (pos(a), pos(b)) {
                g.add_edge(i, j);
            }
        }
        g
    }
}

/// Derives forced edges from definitions only: a member with exactly two
/// blue vertices forces their edge (primal); a vertex in exactly two members
/// forces their adjacency (dual).
pub fn forced_edges(lb: &LowerBoundInstance) -> Result<ForcedStructure> {
    let sys = &lb.system;
    let mut edges = BTreeSet::new();
    match lb.kind {
        LowerBoundKind::Primal => {
            for m in sys.h.members() {
                let blue: Vec<usize> = m.iter().copied().filter(|&v| sys.coloring.is_blue(v)).collect();
                if blue.len() == 2 {
                    edges.insert((blue[0], blue[1]));
                }
            }
        }
        LowerBoundKind::Dual => {
            for owners in sys.h.incidence(sys.graph.vertex_count()) {
                if owners.len() == 2 {
                    edges.insert((owners[0], owners[1]));
                }
            }
        }
    }
    let n = lb.big_n;
    if lb.grid_labels.len() != n || lb.grid_labels.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("grid label table is not N x N".into()));
    }
    let mut grid = BTreeSet::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                grid.insert(key(lb.grid_labels[i][j], lb.grid_labels[i + 1][j]));
            }
            if j + 1 < n {
                grid.insert(key(lb.grid_labels[i][j], lb.grid_labels[i][j + 1]));
            }
        }
    }
    Ok(ForcedStructure { edges, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Color, Coloring, FamilyName, SubgraphFamily};

    fn grid(a: usize) -> Graph {
        let mut g = Graph::new(a * a);
        for i in 0..a {
            for j in 0..a {
                if i + 1 < a {
                    g.add_edge(i * a + j, (i + 1) * a + j);
                }
                if j + 1 < a {
                    g.add_edge(i * a + j, i * a + j + 1);
                }
            }
        }
        g
    }

    #[test]
    fn treewidth_small_families() {
        let tree = Graph::from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(exact_treewidth(&tree, 20).unwrap(), 1);
        assert_eq!(exact_treewidth(&Graph::complete(5), 20).unwrap(), 4);
        for n in 3..9 {
            assert_eq!(exact_treewidth(&Graph::cycle(n), 20).unwrap(), 2);
        }
        for a in 2..=4 {
            assert_eq!(exact_treewidth(&grid(a), 20).unwrap(), a);
        }
        assert!(matches!(exact_treewidth(&Graph::path(21), 20), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn outerplanar_basics() {
        assert!(is_outerplanar(&Graph::cycle(7)));
        assert!(!is_outerplanar(&Graph::complete(4)));
        let k23 = Graph::from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert!(!is_outerplanar(&k23));
        // Hexagon with an inner triangle of chords.
        let mut hex = Graph::cycle(6);
        hex.add_edge(1, 3);
        hex.add_edge(3, 5);
        hex.add_edge(5, 1);
        assert!(is_outerplanar(&hex));
        // Two triangles sharing a cut vertex.
        let bow = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert!(is_outerplanar(&bow));
    }

    #[test]
    fn star_primal_violation_names_member() {
        // K_{1,4}, red centre, members {v_i, v0, v_j}.
        let g = Graph::from_edges(5, (1..5).map(|i| (0, i))).unwrap();
        let mut colors = vec![Color::Blue; 5];
        colors[0] = Color::Red;
        let mut members = Vec::new();
        for i in 1..5 {
            for j in i + 1..5 {
                members.push(vec![0, i, j]);
            }
        }
        let h = SubgraphFamily::new(FamilyName::H, members).unwrap();
        let sys = GraphSystem::new(g, Some(Coloring::new(colors)), h).unwrap();
        let hg = Hypergraph::primal(&sys);
        let mut edges = Vec::new();
        for i in 1..5 {
            for j in i + 1..5 {
                edges.push((i, j));
            }
        }
        let full = Support::from_label_edges(SupportKind::Primal, vec![1, 2, 3, 4], edges.clone()).unwrap();
        assert_eq!(check_support(&hg, &full).unwrap(), None);
        edges.retain(|&e| e != (2, 3));
        let missing = Support::from_label_edges(SupportKind::Primal, vec![1, 2, 3, 4], edges).unwrap();
        let v = check_support(&hg, &missing).unwrap().unwrap();
        assert_eq!(sys.h.member(v.hyperedge), &[0, 2, 3]);
        assert_eq!(v.components, vec![vec![2], vec![3]]);
    }

    #[test]
    fn empty_hypergraph_is_vacuous() {
        let hg = Hypergraph::intersection(&[vec![0], vec![1]], &[]);
        let s = Support::new(SupportKind::Intersection, vec![0, 1]);
        assert_eq!(check_support(&hg, &s).unwrap(), None);
        let wrong = Support::new(SupportKind::Intersection, vec![0]);
        assert!(matches!(check_support(&hg, &wrong), Err(Error::LabelMismatch(_))));
    }
}
