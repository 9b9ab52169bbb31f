use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list. Repeated edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            g.adj[u] = (0..n).filter(|&v| v != u).collect();
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::new(n);
        for i in 0..n {
            if n > 1 {
                g.add_edge(i, (i + 1) % n);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(self.add_edge(u, v))
    }

    /// Inserts `{u, v}`; returns false if it was already present.
    ///
    /// Panics on out-of-range endpoints or loops; use [`Graph::try_add_edge`]
    /// for untrusted input.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v, "self-loop at {u}");
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(i) => {
                self.adj[u].insert(i, v);
                let j = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(j, u);
                true
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        match self.adj[u].binary_search(&v) {
            Ok(i) => {
                self.adj[u].remove(i);
                let j = self.adj[v].binary_search(&u).unwrap();
                self.adj[v].remove(j);
                true
            }
            Err(_) => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Subgraph induced on `verts` (sorted, distinct), relabelled by position.
    pub fn induced(&self, verts: &[usize]) -> Graph {
        let mut g = Graph::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for &w in &self.adj[u] {
                if w > u {
                    if let Ok(j) = verts.binary_search(&w) {
                        g.adj[i].push(j);
                        g.adj[j].push(i);
                    }
                }
            }
        }
        for nb in &mut g.adj {
            nb.sort_unstable();
        }
        g
    }

    pub fn check_vertices(&self, verts: &[usize]) -> Result<()> {
        let n = self.vertex_count();
        match verts.iter().find(|&&v| v >= n) {
            Some(&v) => Err(Error::VertexOutOfRange { vertex: v, n }),
            None => Ok(()),
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.components().len() == 1
    }

    /// Biconnected blocks as vertex sets. Isolated vertices form no block;
    /// a bridge forms a two-vertex block.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut edge_stack: Vec<(usize, usize)> = Vec::new();
        let mut blocks = Vec::new();
        // iterative DFS: (vertex, parent, next neighbour index)
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            stack.push((root, usize::MAX, 0));
            while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
                if *idx < self.adj[u].len() {
                    let w = self.adj[u][*idx];
                    *idx += 1;
                    if w == parent {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        edge_stack.push((u, w));
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, u, 0));
                    } else if disc[w] < disc[u] {
                        edge_stack.push((u, w));
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[u]);
                        if low[u] >= disc[parent] {
                            let mut block = Vec::new();
                            while let Some((a, b)) = edge_stack.pop() {
                                block.push(a);
                                block.push(b);
                                if (a, b) == (parent, u) {
                                    break;
                                }
                            }
                            block.sort_unstable();
                            block.dedup();
                            blocks.push(block);
                        }
                    }
                }
            }
        }
        blocks
    }
}

/// Vertex color: blue vertices are the points of the primal hypergraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
}

/// Total map from vertices to colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring(Vec<Color>);

impl Coloring {
    pub fn new(colors: Vec<Color>) -> Self {
        Coloring(colors)
    }

    pub fn all_blue(n: usize) -> Self {
        Coloring(vec![Color::Blue; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn color(&self, v: usize) -> Color {
        self.0[v]
    }

    pub fn is_blue(&self, v: usize) -> bool {
        self.0[v] == Color::Blue
    }

    pub fn colors(&self) -> &[Color] {
        &self.0
    }

    /// Blue vertices in increasing order.
    pub fn blue_vertices(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.is_blue(v)).collect()
    }
}
