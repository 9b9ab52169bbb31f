//! Instance generators: lower-bound families, random clique systems on
//! chordal hosts of bounded treewidth, and random outerplanar systems.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{connected_sorted, sets, Color, Coloring, FamilyName, Graph, GraphSystem, SubgraphFamily};
use crate::treedecomp::TreeDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundKind {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundInstance {
    pub system: GraphSystem,
    pub kind: LowerBoundKind,
    pub m: usize,
    /// `⌊m/2⌋`
    pub n: usize,
    /// `C(n, ⌊n/2⌋)`, the side of the forced grid.
    pub big_n: usize,
    /// Support label at each grid coordinate (blue vertex for primal,
    /// member index for dual).
    pub grid_labels: Vec<Vec<usize>>,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn lb_params(m: usize) -> Result<(usize, usize)> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("m must be at least 2, got {m}")));
    }
    let n = m / 2;
    Ok((n, binomial(n, n / 2)))
}

/// Host `K_{2n, |B|}` between red `R ∪ C` and a blue N×N grid; each member
/// holds two grid-adjacent blue vertices plus `R_i ∪ C_j`.
pub fn gen_primal_lb(m: usize) -> Result<LowerBoundInstance> {
    let (n, big_n) = lb_params(m)?;
    let rs = subsets(n, n / 2);
    let r_set = |i: usize| rs[i].clone();
    let c_set = |j: usize| rs[j].iter().map(|&c| n + c).collect::<Vec<_>>();
    let b = |i: usize, j: usize| 2 * n + i * big_n + j;
    let total = 2 * n + big_n * big_n;
    let mut g = Graph::new(total);
    for red in 0..2 * n {
        for blue in 2 * n..total {
            g.add_edge(red, blue);
        }
    }
    let mut members = Vec::new();
    for i in 0..big_n {
        for j in 0..big_n.saturating_sub(1) {
            let mut h = vec![b(i, j), b(i, j + 1)];
            h.extend(r_set(i));
            h.extend(c_set(j + 1));
            members.push(h);
        }
    }
    for i in 0..big_n.saturating_sub(1) {
        for j in 0..big_n {
            let mut h = vec![b(i, j), b(i + 1, j)];
            h.extend(r_set(i + 1));
            h.extend(c_set(j));
            members.push(h);
        }
    }
    let mut colors = vec![Color::Red; 2 * n];
    colors.resize(total, Color::Blue);
    let h = SubgraphFamily::new(FamilyName::H, members)?;
    let system = GraphSystem::new(g, Some(Coloring::new(colors)), h)?;
    let grid_labels = (0..big_n).map(|i| (0..big_n).map(|j| b(i, j)).collect()).collect();
    Ok(LowerBoundInstance { system, kind: LowerBoundKind::Primal, m, n, big_n, grid_labels })
}

/// Host `K_{2n, |B|}` between `R ∪ C` and the covered cells of a
/// (2N+1)×(2N+1) grid. Member `(p, q)` covers the 2×2 block with corner
/// `(1+p+q, N+p−q)` plus `R_p ∪ C_q` (subsets of size `⌈n/2⌉`); blocks of
/// grid neighbours share exactly one cell.
pub fn gen_dual_lb(m: usize) -> Result<LowerBoundInstance> {
    let (n, big_n) = lb_params(m)?;
    let rs = subsets(n, n.div_ceil(2));
    debug_assert_eq!(rs.len(), big_n);
    let side = 2 * big_n + 1;
    let corner = |p: usize, q: usize| (1 + p + q, big_n + p - q);
    let mut covered = BTreeSet::new();
    for p in 0..big_n {
        for q in 0..big_n {
            let (x, y) = corner(p, q);
            for (dx, dy) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                covered.insert((x + dx) * side + (y + dy));
            }
        }
    }
    let cells: Vec<usize> = covered.into_iter().collect();
    let id = |x: usize, y: usize| 2 * n + cells.binary_search(&(x * side + y)).unwrap();
    let total = 2 * n + cells.len();
    let mut g = Graph::new(total);
    for red in 0..2 * n {
        for blue in 2 * n..total {
            g.add_edge(red, blue);
        }
    }
    let mut members = Vec::new();
    for p in 0..big_n {
        for q in 0..big_n {
            let (x, y) = corner(p, q);
            let mut h: Vec<usize> =
                [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(dx, dy)| id(x + dx, y + dy)).collect();
            h.extend(rs[p].iter().copied());
            h.extend(rs[q].iter().map(|&c| n + c));
            members.push(h);
        }
    }
    let h = SubgraphFamily::new(FamilyName::H, members)?;
    let inc = h.incidence(total);
    if let Some(v) = (2 * n..total).find(|&v| inc[v].len() > 2) {
        return Err(Error::Internal(format!("grid cell {v} lies in more than two members")));
    }
    let system = GraphSystem::new(g, None, h)?;
    let grid_labels = (0..big_n).map(|p| (0..big_n).map(|q| p * big_n + q).collect()).collect();
    Ok(LowerBoundInstance { system, kind: LowerBoundKind::Dual, m, n, big_n, grid_labels })
}

/// Parameters for [`gen_clique_system`].
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueParams {
    pub t: usize,
    /// Number of host vertices (at least `t + 1`).
    pub n: usize,
    pub members: usize,
    /// Size of the K family; `None` for a plain graph system.
    pub k_members: Option<usize>,
    /// Probability that a vertex is red.
    pub red_fraction: f64,
    pub seed: u64,
}

impl CliqueParams {
    pub fn new(t: usize, n: usize, members: usize, seed: u64) -> Self {
        CliqueParams { t, n, members, k_members: None, red_fraction: 0.3, seed }
    }
}

/// A random chordal host together with the decomposition it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueInstance {
    pub graph: Graph,
    pub coloring: Coloring,
    pub h: SubgraphFamily,
    pub k: Option<SubgraphFamily>,
    pub td: TreeDecomposition,
}

impl CliqueInstance {
    pub fn system(&self) -> Result<GraphSystem> {
        GraphSystem::new(self.graph.clone(), Some(self.coloring.clone()), self.h.clone())
    }
}

/// Random tree of `(t+1)`-bags glued along at most `t` vertices; members
/// are random nonempty subsets of random bags, hence cliques.
pub fn gen_clique_system(p: &CliqueParams) -> Result<CliqueInstance> {
    if p.n < p.t + 1 {
        return Err(Error::InvalidParameter(format!(
            "n = {} is smaller than a bag of size t + 1 = {}",
            p.n,
            p.t + 1
        )));
    }
    if !(0.0..=1.0).contains(&p.red_fraction) {
        return Err(Error::InvalidParameter("red fraction must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut bags: Vec<Vec<usize>> = vec![(0..=p.t).collect()];
    let mut edges = Vec::new();
    let mut next = p.t + 1;
    while next < p.n {
        let parent = rng.gen_range(0..bags.len());
        let overlap = if p.t == 0 { 0 } else { rng.gen_range(1..=p.t.min(bags[parent].len())) };
        let mut bag: Vec<usize> = bags[parent].choose_multiple(&mut rng, overlap).copied().collect();
        let fresh = (p.t + 1 - overlap).min(p.n - next);
        bag.extend(next..next + fresh);
        next += fresh;
        bags.push(sets::normalize(bag));
        edges.push((parent, bags.len() - 1));
    }
    let mut g = Graph::new(p.n);
    for bag in &bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                g.add_edge(u, v);
            }
        }
    }
    let colors =
        (0..p.n).map(|_| if rng.gen_bool(p.red_fraction) { Color::Red } else { Color::Blue }).collect();
    let sample = |count: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
        (0..count)
            .map(|_| {
                let bag = &bags[rng.gen_range(0..bags.len())];
                let size = rng.gen_range(1..=bag.len());
                bag.choose_multiple(rng, size).copied().collect()
            })
            .collect()
    };
    let h = SubgraphFamily::new(FamilyName::H, sample(p.members, &mut rng))?;
    let k = match p.k_members {
        Some(c) => Some(SubgraphFamily::new(FamilyName::K, sample(c, &mut rng))?),
        None => None,
    };
    let td = TreeDecomposition::new(bags, edges, Some(0));
    Ok(CliqueInstance { graph: g, coloring: Coloring::new(colors), h, k, td })
}

/// A random maximal outerplanar host with non-piercing families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterplanarInstance {
    pub graph: Graph,
    pub h: SubgraphFamily,
    pub k: SubgraphFamily,
    /// True if some member could not be placed within the retry budget.
    pub budget_exhausted: bool,
}

/// Default attempts per member before giving up.
pub const RETRY_BUDGET: usize = 1000;

/// Triangulates a random polygon, relabels vertices at random, then grows
/// members by random expansion (biased towards the boundary), rejecting
/// any that would pierce an accepted member.
pub fn gen_outerplanar_system(
    n: usize,
    h_count: usize,
    k_count: usize,
    seed: u64,
) -> Result<OuterplanarInstance> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(&mut rng);
    let mut g = Graph::new(n);
    for i in 0..n {
        g.add_edge(label[i], label[(i + 1) % n]);
    }
    let mut polygons = vec![(0..n).collect::<Vec<usize>>()];
    while let Some(poly) = polygons.pop() {
        if poly.len() <= 3 {
            continue;
        }
        let k = rng.gen_range(1..poly.len() - 1);
        let (a, c, b) = (poly[0], poly[k], poly[poly.len() - 1]);
        g.add_edge(label[a], label[c]);
        g.add_edge(label[c], label[b]);
        polygons.push(poly[..=k].to_vec());
        polygons.push(poly[k..].to_vec());
    }
    let cycle_next: Vec<(usize, usize)> = {
        let mut nb = vec![(0, 0); n];
        for i in 0..n {
            nb[label[i]] = (label[(i + n - 1) % n], label[(i + 1) % n]);
        }
        nb
    };
    let max_size = (n / 3).max(1);
    let mut exhausted = false;
    let mut grow_family = |count: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
        let mut accepted: Vec<Vec<usize>> = Vec::new();
        'member: for _ in 0..count {
            for _ in 0..RETRY_BUDGET {
                let cand = grow(&g, &cycle_next, max_size, rng);
                if accepted.iter().all(|old| {
                    let a = sets::difference(&cand, old);
                    let b = sets::difference(old, &cand);
                    (a.is_empty() || connected_sorted(&g, &a)) && (b.is_empty() || connected_sorted(&g, &b))
                }) {
                    accepted.push(cand);
                    continue 'member;
                }
            }
            exhausted = true;
            break;
        }
        accepted
    };
    let h = grow_family(h_count, &mut rng);
    let k = grow_family(k_count, &mut rng);
    Ok(OuterplanarInstance {
        h: SubgraphFamily::new(FamilyName::H, h)?,
        k: SubgraphFamily::new(FamilyName::K, k)?,
        graph: g,
        budget_exhausted: exhausted,
    })
}

fn grow(g: &Graph, cycle_nb: &[(usize, usize)], max_size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.vertex_count();
    let size = rng.gen_range(1..=max_size);
    let mut set = vec![rng.gen_range(0..n)];
    let mut tries = 0;
    while set.len() < size && tries < 20 * size {
        tries += 1;
        let &u = set.choose(rng).unwrap();
        let w = if rng.gen_bool(0.7) {
            let (a, b) = cycle_nb[u];
            if rng.gen_bool(0.5) {
                a
            } else {
                b
            }
        } else {
            *g.neighbors(u).choose(rng).unwrap()
        };
        if !set.contains(&w) {
            set.push(w);
        }
    }
    sets::normalize(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_non_piercing;

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(binomial(6, 3), 20);
    }

    #[test]
    fn primal_lb_counts() {
        let lb = gen_primal_lb(4).unwrap();
        assert_eq!((lb.n, lb.big_n), (2, 2));
        assert_eq!(lb.system.h.len(), 4);
        assert_eq!(lb.system.coloring.blue_vertices().len(), 4);
        let lb = gen_primal_lb(6).unwrap();
        assert_eq!(lb.big_n, 3);
        assert_eq!(lb.system.h.len(), 2 * 3 * 2);
        let lb = gen_primal_lb(2).unwrap();
        assert_eq!(lb.system.coloring.blue_vertices().len(), 1);
        assert!(lb.system.h.is_empty());
        assert!(gen_primal_lb(1).is_err());
    }

    #[test]
    fn dual_lb_membership() {
        for m in [2, 4, 6] {
            let lb = gen_dual_lb(m).unwrap();
            let sys = &lb.system;
            assert_eq!(sys.h.len(), lb.big_n * lb.big_n);
            let inc = sys.h.incidence(sys.graph.vertex_count());
            let twice = (2 * lb.n..sys.graph.vertex_count()).filter(|&v| inc[v].len() == 2).count();
            // one shared cell per grid edge
            assert_eq!(twice, 2 * lb.big_n * (lb.big_n - 1));
            assert!(is_non_piercing(&sys.graph, &sys.h).unwrap().holds());
        }
    }

    #[test]
    fn clique_systems_are_reproducible() {
        let p = CliqueParams::new(3, 40, 50, 7);
        let a = gen_clique_system(&p).unwrap();
        let b = gen_clique_system(&p).unwrap();
        assert_eq!(a, b);
        let sys = a.system().unwrap();
        assert!(is_non_piercing(&sys.graph, &sys.h).unwrap().holds());
        assert!(a.td.width() <= 3);
    }

    #[test]
    fn t_zero_gives_forest() {
        let inst = gen_clique_system(&CliqueParams::new(0, 10, 5, 1)).unwrap();
        assert_eq!(inst.graph.edge_count(), 0);
        assert!(inst.h.members().iter().all(|m| m.len() == 1));
    }

    #[test]
    fn outerplanar_families_are_non_piercing() {
        let inst = gen_outerplanar_system(20, 10, 10, 3).unwrap();
        assert_eq!(inst.graph.edge_count(), 2 * 20 - 3);
        assert!(is_non_piercing(&inst.graph, &inst.h).unwrap().holds());
        assert!(is_non_piercing(&inst.graph, &inst.k).unwrap().holds());
        let tri = gen_outerplanar_system(3, 2, 2, 0).unwrap();
        assert_eq!(tri.graph.edge_count(), 3);
    }
}
