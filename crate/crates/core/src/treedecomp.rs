//! Tree decompositions: validation, rooting and binarization, chordal
//! completion, restriction, and construction from elimination orderings.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{sets, Graph};

/// Bags indexed by dense node ids, tree edges, optional root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    tree_edges: Vec<(usize, usize)>,
    root: Option<usize>,
}

impl TreeDecomposition {
    /// Bags are sorted; tree edges are stored as given.
    pub fn new(bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>, root: Option<usize>) -> Self {
        TreeDecomposition { bags: bags.into_iter().map(sets::normalize).collect(), tree_edges, root }
    }

    /// One bag holding every vertex.
    pub fn trivial(n: usize) -> Self {
        TreeDecomposition::new(vec![(0..n).collect()], Vec::new(), Some(0))
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, x: usize) -> &[usize] {
        &self.bags[x]
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Largest bag size minus one (0 for an empty decomposition).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub(crate) fn bag_mut(&mut self, x: usize) -> &mut Vec<usize> {
        &mut self.bags[x]
    }

    /// Parent/child structure; fails without a root or if the edges do not
    /// form a tree.
    pub fn rooted(&self) -> Result<Rooted> {
        let root = self.root.ok_or(Error::Unrooted)?;
        if let Some(v) = check_tree(self.bags.len(), &self.tree_edges, Some(root)) {
            return Err(Error::InvalidDecomposition(v));
        }
        Ok(Rooted::build(self.bags.len(), &self.tree_edges, root))
    }
}

/// First failing property reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoNodes,
    TreeEdgeOutOfRange { x: usize, y: usize },
    NotATree { nodes: usize, edges: usize },
    TreeDisconnected,
    RootOutOfRange(usize),
    BagVertexOutOfRange { node: usize, vertex: usize },
    VertexUncovered(usize),
    EdgeNotCovered(usize, usize),
    VertexSubtreeDisconnected(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoNodes => write!(f, "decomposition has no nodes"),
            Violation::TreeEdgeOutOfRange { x, y } => write!(f, "tree edge ({x}, {y}) names a missing node"),
            Violation::NotATree { nodes, edges } => {
                write!(f, "{edges} tree edges on {nodes} nodes do not form a tree")
            }
            Violation::TreeDisconnected => write!(f, "tree edges do not connect all nodes"),
            Violation::RootOutOfRange(r) => write!(f, "root {r} is not a node"),
            Violation::BagVertexOutOfRange { node, vertex } => {
                write!(f, "bag {node} holds vertex {vertex} outside the graph")
            }
            Violation::VertexUncovered(v) => write!(f, "vertex {v} lies in no bag"),
            Violation::EdgeNotCovered(u, v) => write!(f, "edge not covered: ({u}, {v})"),
            Violation::VertexSubtreeDisconnected(v) => {
                write!(f, "bags containing vertex {v} are not connected in the tree")
            }
        }
    }
}

fn check_tree(nodes: usize, edges: &[(usize, usize)], root: Option<usize>) -> Option<Violation> {
    if nodes == 0 {
        return Some(Violation::NoNodes);
    }
    if let Some(&(x, y)) = edges.iter().find(|&&(x, y)| x >= nodes || y >= nodes || x == y) {
        return Some(Violation::TreeEdgeOutOfRange { x, y });
    }
    if edges.len() + 1 != nodes {
        return Some(Violation::NotATree { nodes, edges: edges.len() });
    }
    let mut adj = vec![Vec::new(); nodes];
    for &(x, y) in edges {
        adj[x].push(y);
        adj[y].push(x);
    }
    let mut seen = vec![false; nodes];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    if count != nodes {
        return Some(Violation::TreeDisconnected);
    }
    match root {
        Some(r) if r >= nodes => Some(Violation::RootOutOfRange(r)),
        _ => None,
    }
}

/// Checks tree-ness, vertex and edge coverage, and subtree connectivity,
/// in that order.
pub fn validate(g: &Graph, td: &TreeDecomposition) -> std::result::Result<(), Violation> {
    if let Some(v) = check_tree(td.node_count(), &td.tree_edges, td.root) {
        return Err(v);
    }
    let n = g.vertex_count();
    let mut nodes_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(Violation::BagVertexOutOfRange { node: x, vertex: v });
            }
            nodes_of[v].push(x);
        }
    }
    if let Some(v) = (0..n).find(|&v| nodes_of[v].is_empty()) {
        return Err(Violation::VertexUncovered(v));
    }
    for (u, v) in g.edges() {
        if !sets::intersects(&nodes_of[u], &nodes_of[v]) {
            return Err(Violation::EdgeNotCovered(u, v));
        }
    }
    // The nodes holding v span a forest; it is a tree iff it has |nodes|-1 edges.
    let mut shared = vec![0usize; n];
    for &(x, y) in &td.tree_edges {
        for v in sets::intersection(&td.bags[x], &td.bags[y]) {
            shared[v] += 1;
        }
    }
    if let Some(v) = (0..n).find(|&v| shared[v] + 1 != nodes_of[v].len()) {
        return Err(Violation::VertexSubtreeDisconnected(v));
    }
    Ok(())
}

pub(crate) fn ensure_valid(g: &Graph, td: &TreeDecomposition) -> Result<()> {
    validate(g, td).map_err(Error::InvalidDecomposition)
}

/// Parent pointers, children lists and Euler-tour intervals of a rooted tree.
#[derive(Debug, Clone)]
pub struct Rooted {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    preorder: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl Rooted {
    fn build(nodes: usize, edges: &[(usize, usize)], root: usize) -> Rooted {
        let mut adj = vec![Vec::new(); nodes];
        for &(x, y) in edges {
            adj[x].push(y);
            adj[y].push(x);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut parent = vec![None; nodes];
        let mut children = vec![Vec::new(); nodes];
        let mut preorder = Vec::with_capacity(nodes);
        let mut tin = vec![0; nodes];
        let mut tout = vec![0; nodes];
        let mut stack = vec![(root, usize::MAX, false)];
        while let Some((x, p, done)) = stack.pop() {
            if done {
                tout[x] = preorder.len();
                continue;
            }
            tin[x] = preorder.len();
            preorder.push(x);
            if p != usize::MAX {
                parent[x] = Some(p);
                children[p].push(x);
            }
            stack.push((x, p, true));
            for &y in adj[x].iter().rev() {
                if y != p {
                    stack.push((y, x, false));
                }
            }
        }
        Rooted { root, parent, children, preorder, tin, tout }
    }

    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// Children before parents; siblings in increasing id order.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.preorder.len());
        let mut stack = vec![(self.root, 0usize)];
        while let Some((x, i)) = stack.pop() {
            if i < self.children[x].len() {
                stack.push((x, i + 1));
                stack.push((self.children[x][i], 0));
            } else {
                out.push(x);
            }
        }
        out
    }

    /// True iff `y` lies in the subtree rooted at `x`.
    pub fn in_subtree(&self, x: usize, y: usize) -> bool {
        self.tin[x] <= self.tin[y] && self.tin[y] < self.tout[x]
    }

    /// Nodes of the subtree rooted at `x`, in preorder.
    pub fn subtree(&self, x: usize) -> &[usize] {
        &self.preorder[self.tin[x]..self.tout[x]]
    }
}

/// Per-vertex bookkeeping for "which side of a tree edge" queries.
#[derive(Debug, Clone)]
pub(crate) struct SideIndex {
    rooted: Rooted,
    top: Vec<usize>,
}

impl SideIndex {
    pub fn new(td: &TreeDecomposition, n: usize) -> Result<Self> {
        let rooted = td.rooted()?;
        let mut top = vec![usize::MAX; n];
        for &x in rooted.preorder() {
            for &v in td.bag(x) {
                if top[v] == usize::MAX {
                    top[v] = x;
                }
            }
        }
        Ok(SideIndex { rooted, top })
    }

    pub fn rooted(&self) -> &Rooted {
        &self.rooted
    }

    /// True iff `v` belongs to the union of bags of the subtree at `x`.
    pub fn below(&self, td: &TreeDecomposition, x: usize, v: usize) -> bool {
        let t = self.top[v];
        t != usize::MAX && (self.rooted.in_subtree(x, t) || sets::contains(td.bag(x), v))
    }
}

/// Roots the tree at `root` (default: the stored root, else node 0) and
/// splits nodes with more than two children into chains of copies.
pub fn binarize_and_root(td: &TreeDecomposition, root: Option<usize>) -> Result<TreeDecomposition> {
    let root = root.or(td.root).unwrap_or(0);
    if let Some(v) = check_tree(td.node_count(), &td.tree_edges, Some(root)) {
        return Err(Error::InvalidDecomposition(v));
    }
    let r = Rooted::build(td.node_count(), &td.tree_edges, root);
    let mut bags = td.bags.clone();
    let mut edges = Vec::new();
    for &x in r.preorder() {
        let kids = &r.children[x];
        if kids.len() <= 2 {
            edges.extend(kids.iter().map(|&c| (x, c)));
            continue;
        }
        let mut holder = x;
        for (i, &c) in kids.iter().enumerate() {
            if i + 2 == kids.len() {
                edges.push((holder, c));
                edges.push((holder, kids[i + 1]));
                break;
            }
            edges.push((holder, c));
            bags.push(td.bags[x].clone());
            let copy = bags.len() - 1;
            edges.push((holder, copy));
            holder = copy;
        }
    }
    Ok(TreeDecomposition { bags, tree_edges: edges, root: Some(root) })
}

/// Adds every missing intra-bag edge.
pub fn chordal_complete(g: &Graph, td: &TreeDecomposition) -> Result<Graph> {
    ensure_valid(g, td)?;
    let mut out = g.clone();
    for bag in &td.bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                out.add_edge(u, v);
            }
        }
    }
    Ok(out)
}

/// The decomposition of the subtree at `x` (node ids renumbered in
/// preorder, `x` becomes node 0) and the union of its bags.
pub fn restrict(td: &TreeDecomposition, x: usize) -> Result<(TreeDecomposition, Vec<usize>)> {
    if x >= td.node_count() {
        return Err(Error::NoSuchNode(x));
    }
    let r = td.rooted()?;
    let nodes = r.subtree(x);
    let mut index = vec![usize::MAX; td.node_count()];
    for (i, &y) in nodes.iter().enumerate() {
        index[y] = i;
    }
    let bags: Vec<Vec<usize>> = nodes.iter().map(|&y| td.bags[y].clone()).collect();
    let edges =
        nodes.iter().filter_map(|&y| r.parent[y].filter(|_| y != x).map(|p| (index[p], index[y]))).collect();
    let verts = sets::normalize(bags.iter().flatten().copied().collect());
    Ok((TreeDecomposition { bags, tree_edges: edges, root: Some(0) }, verts))
}

/// Decomposition induced by eliminating vertices in `order`: node `i` holds
/// `order[i]` and its later neighbours in the fill graph.
pub fn from_elimination_order(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition::trivial(0);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().filter(|&w| pos[w] > i).collect();
        for (a, &u) in later.iter().enumerate() {
            for &w in &later[a + 1..] {
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
        parent[i] = later.iter().map(|&w| pos[w]).min();
        let mut bag = later;
        bag.push(v);
        bags.push(bag);
    }
    // Roots of separate components hang off the last node.
    let last = n - 1;
    let edges = (0..n).filter(|&i| i != last).map(|i| (parent[i].unwrap_or(last), i)).collect();
    TreeDecomposition::new(bags, edges, Some(last))
}

/// Minimum fill-in elimination ordering (ties: smaller degree, then id).
pub fn min_fill_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut adj: Vec<HashSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let fill = |adj: &[HashSet<usize>], v: usize| -> usize {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !adj[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    };
    let mut key: Vec<(usize, usize)> = (0..n).map(|v| (fill(&adj, v), adj[v].len())).collect();
    let mut queue: BTreeSet<(usize, usize, usize)> = (0..n).map(|v| (key[v].0, key[v].1, v)).collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some((_, _, v)) = queue.pop_first() {
        done[v] = true;
        order.push(v);
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &u in &nb {
            adj[u].remove(&v);
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[v].clear();
        let mut touched: BTreeSet<usize> = nb.iter().copied().collect();
        for &u in &nb {
            touched.extend(adj[u].iter().copied());
        }
        for u in touched {
            if done[u] {
                continue;
            }
            let k = (fill(&adj, u), adj[u].len());
            if k != key[u] {
                queue.remove(&(key[u].0, key[u].1, u));
                key[u] = k;
                queue.insert((k.0, k.1, u));
            }
        }
    }
    order
}

/// Table size caps the subset dynamic programme regardless of configuration.
pub const EXACT_HARD_LIMIT: usize = 26;

/// Optimal elimination ordering by dynamic programming over vertex subsets.
pub fn exact_order(g: &Graph, limit: usize) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    let limit = limit.min(EXACT_HARD_LIMIT);
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w))).collect();
    // Neighbours of v outside s ∪ {v} reachable through s.
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = seen;
        let mut reach = 0u32;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            reach |= adj[u];
            let fresh = adj[u] & s & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        (reach & !s & !(1u32 << v)).count_ones()
    };
    let full = (1u32 << n) - 1;
    let size = 1usize << n;
    let mut best = vec![u8::MAX; size];
    let mut last = vec![0u8; size];
    best[0] = 0;
    for s in 1..=full {
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let w = best[rest as usize].max(q(rest, v) as u8);
            if w < best[s as usize] {
                best[s as usize] = w;
                last[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok(order)
}

/// How [`build_decomposition`] obtains a decomposition.
#[derive(Debug, Clone)]
pub enum BuildMode {
    ExactSmall { limit: usize },
    MinFill,
    Provided(TreeDecomposition),
}

impl BuildMode {
    pub const DEFAULT_EXACT_LIMIT: usize = 20;

    pub fn exact() -> Self {
        BuildMode::ExactSmall { limit: Self::DEFAULT_EXACT_LIMIT }
    }
}

pub fn build_decomposition(g: &Graph, mode: BuildMode) -> Result<TreeDecomposition> {
    match mode {
        BuildMode::ExactSmall { limit } => Ok(from_elimination_order(g, &exact_order(g, limit)?)),
        BuildMode::MinFill => Ok(from_elimination_order(g, &min_fill_order(g))),
        BuildMode::Provided(td) => {
            ensure_valid(g, &td)?;
            Ok(td)
        }
    }
}

/// Adhesion set between `x` and its parent.
pub fn adhesion(td: &TreeDecomposition, x: usize, parent: usize) -> Vec<usize> {
    sets::intersection(td.bag(x), td.bag(parent))
}
