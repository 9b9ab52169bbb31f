//! Dual supports on bounded-treewidth hosts: sparsity, the clique-per-bag
//! construction, and sparsification by pushing members apart.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{
    attach_pendants, connected_sorted, containment_maximal, is_non_piercing, sets, ContainmentReduction,
    Graph, GraphSystem, SubgraphFamily, Support, SupportKind,
};
use crate::primal::incidence;
use crate::treedecomp::{
    binarize_and_root, chordal_complete, ensure_valid, from_elimination_order, min_fill_order, SideIndex,
    TreeDecomposition,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparsityReport {
    /// Largest number of members meeting a single bag.
    pub k: usize,
    pub worst_bag: usize,
}

fn members_per_bag(members: &[Vec<usize>], td: &TreeDecomposition, n: usize) -> Vec<Vec<usize>> {
    let inc = incidence(members, n);
    td.bags()
        .iter()
        .map(|bag| {
            let mut hit: Vec<usize> = bag.iter().flat_map(|&v| inc[v].iter().copied()).collect();
            hit.sort_unstable();
            hit.dedup();
            hit
        })
        .collect()
}

pub fn sparsity(g: &Graph, fam: &SubgraphFamily, td: &TreeDecomposition) -> Result<SparsityReport> {
    ensure_valid(g, td)?;
    Ok(sparsity_of(fam.members(), td, g.vertex_count()))
}

pub(crate) fn sparsity_of(members: &[Vec<usize>], td: &TreeDecomposition, n: usize) -> SparsityReport {
    let per_bag = members_per_bag(members, td, n);
    let (worst_bag, hit) = per_bag
        .iter()
        .enumerate()
        .max_by_key(|(i, h)| (h.len(), std::cmp::Reverse(*i)))
        .expect("decompositions have at least one node");
    SparsityReport { k: hit.len(), worst_bag }
}

/// Clique on the members meeting each bag, over positions in `members`.
/// Returns the edges and the width of the induced decomposition.
pub(crate) fn sds_edges(
    members: &[Vec<usize>],
    td: &TreeDecomposition,
    n: usize,
) -> (BTreeSet<(usize, usize)>, usize) {
    let mut edges = BTreeSet::new();
    let mut width = 0;
    for hit in members_per_bag(members, td, n) {
        width = width.max(hit.len().saturating_sub(1));
        for (i, &a) in hit.iter().enumerate() {
            for &b in &hit[i + 1..] {
                edges.insert((a, b));
            }
        }
    }
    (edges, width)
}

/// Algorithm k-SDS: a dual support over member indices whose width is at
/// most the sparsity of `td` minus one.
pub fn k_sds(g: &Graph, fam: &SubgraphFamily, td: &TreeDecomposition) -> Result<Support> {
    ensure_valid(g, td)?;
    for (index, m) in fam.members().iter().enumerate() {
        g.check_vertices(m)?;
        if !connected_sorted(g, m) {
            return Err(Error::DisconnectedMember { family: fam.name(), index });
        }
    }
    let (edges, width) = sds_edges(fam.members(), td, g.vertex_count());
    let mut s = Support::new(SupportKind::Dual, (0..fam.len()).collect());
    s.edges = edges;
    s.provenance.width = Some(width);
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushEntry {
    pub pushed: usize,
    pub pusher: usize,
    /// Tree edge `(child, parent)` where the push happened.
    pub adhesion_edge: (usize, usize),
    pub before: Vec<usize>,
    pub after: Vec<usize>,
    /// Vertex set of the pusher at the time of the push.
    pub pusher_set: Vec<usize>,
    /// `(u, v)` with `u` in `after` and `v` in the pusher.
    pub connecting_edge: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushLedger {
    pub entries: Vec<PushEntry>,
    /// `H′`, index-aligned with the input family.
    pub final_family: Vec<Vec<usize>>,
    /// Member index -> lowest index with the same final vertex set.
    pub unique_map: Vec<usize>,
}

impl PushLedger {
    /// Indices that represent themselves in `unique(H′)`.
    pub fn representatives(&self) -> Vec<usize> {
        (0..self.unique_map.len()).filter(|&i| self.unique_map[i] == i).collect()
    }
}

/// Pushes members apart in post-order over the tree edges. `td` must be a
/// rooted decomposition of `host`; the family must be non-piercing and
/// containment-free in `host`.
pub(crate) fn push_members(
    host: &Graph,
    members: &[Vec<usize>],
    td: &TreeDecomposition,
) -> Result<PushLedger> {
    let side = SideIndex::new(td, host.vertex_count())?;
    let inc = incidence(members, host.vertex_count());
    let mut cur: Vec<Vec<usize>> = members.to_vec();
    let mut pushed = vec![false; members.len()];
    let mut entries = Vec::new();
    for x in side.rooted().postorder() {
        let Some(z) = side.rooted().parent[x] else { continue };
        let a = sets::intersection(td.bag(x), td.bag(z));
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for &v in &a {
            for &i in &inc[v] {
                if seen.insert(i) {
                    let s = sets::intersection(&cur[i], &a);
                    if !s.is_empty() {
                        groups.entry(s).or_default().push(i);
                    }
                }
            }
        }
        for group in groups.into_values() {
            if group.len() < 2 {
                continue;
            }
            let below = |i: usize| -> Vec<usize> {
                cur[i].iter().copied().filter(|&v| side.below(td, x, v)).collect()
            };
            let restricted: Vec<Vec<usize>> = group.iter().map(|&i| below(i)).collect();
            let p = (0..group.len()).min_by_key(|&k| (restricted[k].len(), group[k])).unwrap();
            let pusher = group[p];
            for (k, &h) in group.iter().enumerate() {
                if h == pusher {
                    continue;
                }
                let diff = sets::difference(&restricted[k], &restricted[p]);
                if diff.is_empty() {
                    continue;
                }
                if pushed[h] {
                    return Err(Error::Internal(format!("member {h} pushed twice")));
                }
                if sets::difference(&cur[h], &cur[pusher]) != diff || !connected_sorted(host, &diff) {
                    return Err(Error::Piercing { first: h, second: pusher });
                }
                let connecting = diff
                    .iter()
                    .find_map(|&u| restricted[p].iter().find(|&&v| host.has_edge(u, v)).map(|&v| (u, v)))
                    .ok_or(Error::Piercing { first: h, second: pusher })?;
                entries.push(PushEntry {
                    pushed: h,
                    pusher,
                    adhesion_edge: (x, z),
                    before: cur[h].clone(),
                    after: diff.clone(),
                    pusher_set: cur[pusher].clone(),
                    connecting_edge: connecting,
                });
                cur[h] = diff;
                pushed[h] = true;
            }
        }
    }
    let mut first: BTreeMap<&[usize], usize> = BTreeMap::new();
    let unique_map = cur.iter().enumerate().map(|(i, m)| *first.entry(m.as_slice()).or_insert(i)).collect();
    Ok(PushLedger { entries, final_family: cur, unique_map })
}

/// Sparsifies a non-piercing, containment-free system over a rooted binary
/// decomposition of its chordal completion.
pub fn push_sparsify(sys: &GraphSystem, td: &TreeDecomposition) -> Result<PushLedger> {
    ensure_valid(&sys.graph, td)?;
    let host = chordal_complete(&sys.graph, td)?;
    push_members(&host, sys.h.members(), td)
}

/// `2^{4(t+1)}`, saturating.
pub fn width_bound(t: usize) -> u64 {
    1u64.checked_shl(4 * (t as u32 + 1)).unwrap_or(u64::MAX)
}

#[derive(Debug, Clone)]
pub struct DualOutcome {
    pub support: Support,
    pub reduction: ContainmentReduction,
    /// Present when the family was non-piercing and sparsified. Member
    /// indices refer to positions in `reduction.kept`.
    pub ledger: Option<PushLedger>,
    /// Sparsity of `unique(H′)` on the decomposition used.
    pub sparsity: usize,
    pub decomposition: TreeDecomposition,
    pub non_piercing: bool,
}

/// Assembles a support over the kept members from the clique-per-bag edges
/// on the representatives, duplicate-to-representative edges and
/// pushed-to-pusher edges, then re-attaches contained members as pendants.
///
/// A duplicate touching only its representative is not enough: two members
/// pushed by the same pusher onto the same set lose the same vertex, and
/// the representative need not contain it. The pushed-to-pusher edge
/// closes that gap.
pub(crate) fn assemble(
    kind: SupportKind,
    total: usize,
    reduction: &ContainmentReduction,
    unique_map: &[usize],
    pushes: &[(usize, usize)],
    sds: (BTreeSet<(usize, usize)>, usize),
    reps: &[usize],
) -> Result<Support> {
    let kept = &reduction.kept;
    let mut support = Support::new(kind, kept.clone());
    for &(a, b) in &sds.0 {
        support.add_edge(reps[a], reps[b]);
    }
    let before = support.edges.len();
    for &(a, b) in pushes {
        support.add_edge(a, b);
    }
    let pushes_covered = support.edges.len() == before;
    for (i, &r) in unique_map.iter().enumerate() {
        support.add_edge(i, r);
    }
    let mut support = attach_pendants(support, &reduction.successor)?;
    support.canonicalize();
    debug_assert_eq!(support.labels, (0..total).collect::<Vec<_>>());
    let g = support.graph();
    let mut width = from_elimination_order(&g, &min_fill_order(&g)).width();
    if pushes_covered && unique_map.iter().enumerate().all(|(i, &r)| i == r) {
        // The bag cliques plus pendants are already a decomposition.
        width = width.min(sds.1.max(usize::from(!support.edges.is_empty())));
    }
    support.provenance.width = Some(width);
    Ok(support)
}

/// Containment reduction, push sparsification, k-SDS on `unique(H′)`, then
/// duplicates and contained members as pendants.
///
/// Families that pierce skip the push (it relies on non-piercing) and get
/// k-SDS on the maximal members directly; no width bound is claimed then.
pub fn dual_support(sys: &GraphSystem, td: &TreeDecomposition) -> Result<DualOutcome> {
    ensure_valid(&sys.graph, td)?;
    let non_piercing = is_non_piercing(&sys.graph, &sys.h)?.holds();
    let td_b = binarize_and_root(td, None)?;
    let host = chordal_complete(&sys.graph, &td_b)?;
    let reduction = containment_maximal(&sys.h);
    let kept = reduction.family(&sys.h);
    let n = sys.graph.vertex_count();
    let (ledger, final_family, unique_map) = if non_piercing {
        let ledger = push_members(&host, kept.members(), &td_b)?;
        let fam = ledger.final_family.clone();
        let map = ledger.unique_map.clone();
        (Some(ledger), fam, map)
    } else {
        (None, kept.members().to_vec(), (0..kept.len()).collect())
    };
    let reps: Vec<usize> = (0..unique_map.len()).filter(|&i| unique_map[i] == i).collect();
    let rep_sets: Vec<Vec<usize>> = reps.iter().map(|&i| final_family[i].clone()).collect();
    let sparsity = if rep_sets.is_empty() { 0 } else { sparsity_of(&rep_sets, &td_b, n).k };
    let sds = sds_edges(&rep_sets, &td_b, n);
    let pushes: Vec<(usize, usize)> =
        ledger.iter().flat_map(|l| l.entries.iter().map(|e| (e.pushed, e.pusher))).collect();
    let mut support = assemble(SupportKind::Dual, sys.h.len(), &reduction, &unique_map, &pushes, sds, &reps)?;
    if non_piercing {
        support.provenance.width_bound = Some(width_bound(td.width()));
    }
    Ok(DualOutcome { support, reduction, ledger, sparsity, decomposition: td_b, non_piercing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_support, Hypergraph};

    fn family(name: crate::model::FamilyName, members: Vec<Vec<usize>>) -> Result<SubgraphFamily> {
        SubgraphFamily::new(name, members)
    }

    fn dual_star(n: usize) -> GraphSystem {
        // leaf for each pair {i, j}; member i holds the centre and its pairs
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        let g = Graph::from_edges(pairs.len() + 1, (1..=pairs.len()).map(|l| (0, l))).unwrap();
        let members = (0..n)
            .map(|i| {
                let mut m = vec![0];
                m.extend(pairs.iter().enumerate().filter(|(_, p)| p.0 == i || p.1 == i).map(|(l, _)| l + 1));
                m
            })
            .collect();
        GraphSystem::new(g, None, family(crate::model::FamilyName::H, members).unwrap()).unwrap()
    }

    #[test]
    fn disjoint_members_are_one_sparse() {
        let g = Graph::path(4);
        let fam = family(crate::model::FamilyName::H, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let td =
            TreeDecomposition::new(vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![(0, 1), (1, 2)], Some(0));
        assert_eq!(sparsity(&g, &fam, &td).unwrap().k, 2);
        let td2 =
            TreeDecomposition::new(vec![vec![0, 1], vec![2, 3], vec![1, 2]], vec![(0, 2), (2, 1)], Some(0));
        let s = k_sds(&g, &fam, &td2).unwrap();
        assert_eq!(s.edges.len(), 1);
        let fam = family(crate::model::FamilyName::H, vec![vec![0], vec![3]]).unwrap();
        assert_eq!(sparsity(&g, &fam, &td).unwrap().k, 1);
        assert!(k_sds(&g, &fam, &td).unwrap().edges.is_empty());
    }

    #[test]
    fn shared_vertex_gives_full_sparsity() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let fam = family(crate::model::FamilyName::H, vec![vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        let td =
            TreeDecomposition::new(vec![vec![0, 1], vec![0, 2], vec![0, 3]], vec![(0, 1), (0, 2)], Some(0));
        let r = sparsity(&g, &fam, &td).unwrap();
        assert_eq!(r.k, 3);
    }

    #[test]
    fn path_members_share_a_bag() {
        let g = Graph::path(3);
        let fam = family(crate::model::FamilyName::H, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)], Some(0));
        let s = k_sds(&g, &fam, &td).unwrap();
        assert!(s.has_label_edge(0, 1));
    }

    #[test]
    fn star_three_is_triangle() {
        let sys = dual_star(3);
        let td = TreeDecomposition::new((1..=3).map(|l| vec![0, l]).collect(), vec![(0, 1), (0, 2)], Some(0));
        let out = dual_support(&sys, &td).unwrap();
        assert_eq!(out.support.edges.len(), 3);
        let hg = Hypergraph::dual(4, sys.h.members());
        assert_eq!(check_support(&hg, &out.support).unwrap(), None);
    }

    #[test]
    fn single_member() {
        let g = Graph::path(2);
        let sys = GraphSystem::new(g, None, family(crate::model::FamilyName::H, vec![vec![0, 1]]).unwrap())
            .unwrap();
        let out = dual_support(&sys, &TreeDecomposition::trivial(2)).unwrap();
        assert_eq!(out.support.labels, vec![0]);
        assert!(out.support.edges.is_empty());
    }

    #[test]
    fn one_push_keeps_difference_connected() {
        // Path 0-1-2-3-4-5; decomposition along the path, root at the end.
        let g = Graph::path(6);
        let fam = family(crate::model::FamilyName::H, vec![vec![1, 2, 3], vec![2, 3, 4, 5]]).unwrap();
        let bags: Vec<Vec<usize>> = (0..5).map(|i| vec![i, i + 1]).collect();
        let td = TreeDecomposition::new(bags, (0..4).map(|i| (i + 1, i)).collect(), Some(4));
        let sys = GraphSystem::new(g.clone(), None, fam).unwrap();
        let ledger = push_sparsify(&sys, &td).unwrap();
        assert_eq!(ledger.entries.len(), 1);
        let e = &ledger.entries[0];
        assert_eq!(e.after, sets::difference(&e.before, &e.pusher_set));
        assert!(connected_sorted(&g, &e.after));
        assert!(g.has_edge(e.connecting_edge.0, e.connecting_edge.1));
    }

    #[test]
    fn disjoint_members_are_never_pushed() {
        let g = Graph::path(6);
        let fam = family(crate::model::FamilyName::H, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let sys = GraphSystem::new(g, None, fam).unwrap();
        let bags: Vec<Vec<usize>> = (0..5).map(|i| vec![i, i + 1]).collect();
        let td = TreeDecomposition::new(bags, (0..4).map(|i| (i, i + 1)).collect(), Some(0));
        assert!(push_sparsify(&sys, &td).unwrap().entries.is_empty());
    }

    #[test]
    fn random_systems_are_supported() {
        use crate::generators::{gen_clique_system, CliqueParams};
        let mut pushed = 0;
        let mut np = 0;
        for seed in 0..200 {
            let t = 1 + (seed as usize % 3);
            let inst = gen_clique_system(&CliqueParams::new(t, 14, 9, seed)).unwrap();
            let sys = GraphSystem::new(inst.graph.clone(), None, inst.h.clone()).unwrap();
            let out = dual_support(&sys, &inst.td).unwrap();
            let hg = Hypergraph::dual(sys.graph.vertex_count(), sys.h.members());
            assert_eq!(check_support(&hg, &out.support).unwrap(), None, "seed {seed}");
            if let Some(l) = &out.ledger {
                np += 1;
                pushed += l.entries.len();
                assert!(out.sparsity as u64 <= width_bound(inst.td.width()));
            }
        }
        assert!(np > 0 && pushed > 0, "{np} {pushed}");
    }

    #[test]
    fn bound_formula() {
        assert_eq!(width_bound(2), 4096);
        assert_eq!(width_bound(3), 65536);
        assert_eq!(width_bound(20), u64::MAX);
    }
}
