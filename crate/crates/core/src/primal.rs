//! Primal supports on bounded-treewidth hosts: the easy-decomposition test,
//! the make-easy augmentation and projection of bags onto blue vertices.
//!
//! A member only needs a blue vertex in an adhesion set when its blue
//! vertices lie on both sides of that adhesion set. Members whose blue
//! part sits on one side never need a path through the separator, and
//! asking more is impossible in general (a clique inside one bag may meet
//! an adhesion set in red vertices only).

use crate::error::{Error, Result};
use crate::model::{is_non_piercing, sets, Coloring, Graph, GraphSystem, Support, SupportKind};
use crate::treedecomp::{binarize_and_root, ensure_valid, SideIndex, TreeDecomposition};

/// Outcome of [`is_easy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EasyReport {
    pub easy: bool,
    /// First failure in post-order: (child node, adhesion set, member).
    pub witness: Option<(usize, Vec<usize>, usize)>,
}

/// Members that must reach across the edge above `x`: blue vertices on both
/// sides, at least one vertex in `adhesion`, none of them blue. `td` is the
/// decomposition `side` was built from; augmentation never changes which
/// vertices lie below a node, so the index stays valid.
fn starved(
    members: &[Vec<usize>],
    inc: &[Vec<usize>],
    coloring: &Coloring,
    td: &TreeDecomposition,
    side: &SideIndex,
    x: usize,
    adhesion: &[usize],
) -> Vec<usize> {
    let mut cand: Vec<usize> = adhesion.iter().flat_map(|&v| inc[v].iter().copied()).collect();
    cand.sort_unstable();
    cand.dedup();
    cand.retain(|&i| {
        let m = &members[i];
        if m.iter().any(|&v| coloring.is_blue(v) && sets::contains(adhesion, v)) {
            return false;
        }
        let (mut inside, mut outside) = (false, false);
        for &v in m.iter().filter(|&&v| coloring.is_blue(v)) {
            if side.below(td, x, v) {
                inside = true;
            } else {
                outside = true;
            }
        }
        inside && outside
    });
    cand
}

pub(crate) fn easy_report(
    g: &Graph,
    coloring: &Coloring,
    members: &[Vec<usize>],
    td: &TreeDecomposition,
) -> Result<EasyReport> {
    ensure_valid(g, td)?;
    let side = SideIndex::new(td, g.vertex_count())?;
    let inc = incidence(members, g.vertex_count());
    for x in side.rooted().postorder() {
        let Some(p) = side.rooted().parent[x] else { continue };
        let a = sets::intersection(td.bag(x), td.bag(p));
        if let Some(&i) = starved(members, &inc, coloring, td, &side, x, &a).first() {
            return Ok(EasyReport { easy: false, witness: Some((x, a, i)) });
        }
    }
    Ok(EasyReport { easy: true, witness: None })
}

pub(crate) fn incidence(members: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); n];
    for (i, m) in members.iter().enumerate() {
        for &v in m {
            inc[v].push(i);
        }
    }
    inc
}

/// Tests easiness of a rooted decomposition (binary or not).
pub fn is_easy(sys: &GraphSystem, td: &TreeDecomposition) -> Result<EasyReport> {
    easy_report(&sys.graph, &sys.coloring, sys.h.members(), td)
}

pub(crate) fn make_easy_members(
    g: &Graph,
    coloring: &Coloring,
    members: &[Vec<usize>],
    td: &TreeDecomposition,
) -> Result<TreeDecomposition> {
    ensure_valid(g, td)?;
    let mut out = td.clone();
    let side = SideIndex::new(td, g.vertex_count())?;
    let inc = incidence(members, g.vertex_count());
    let order = side.rooted().postorder();
    for &rho in &order {
        for &x in &side.rooted().children[rho] {
            loop {
                let a = sets::intersection(out.bag(x), out.bag(rho));
                let needy = starved(members, &inc, coloring, td, &side, x, &a);
                // Serve the member with the smallest part below x first:
                // its blue vertex tends to serve the others as well.
                let pick = needy.iter().copied().min_by_key(|&i| {
                    let below = members[i].iter().filter(|&&v| side.below(td, x, v)).count();
                    (below, i)
                });
                let Some(i) = pick else { break };
                let b = members[i]
                    .iter()
                    .copied()
                    .find(|&v| coloring.is_blue(v) && sets::contains(out.bag(x), v))
                    .ok_or_else(|| Error::Internal(format!("member {i} has no blue vertex in bag {x}")))?;
                let bag = out.bag_mut(rho);
                let at = bag.binary_search(&b).unwrap_err();
                bag.insert(at, b);
            }
        }
    }
    Ok(out)
}

/// Adds blue vertices to parent bags, bottom-up, until every member that
/// needs to cross an adhesion set finds a blue vertex there. Roots and
/// binarizes the input first.
pub fn make_easy(sys: &GraphSystem, td: &TreeDecomposition) -> Result<TreeDecomposition> {
    let td = binarize_and_root(td, None)?;
    make_easy_members(&sys.graph, &sys.coloring, sys.h.members(), &td)
}

/// Projects every bag onto its blue vertices and makes each projection a
/// clique. Refuses decompositions that are not easy.
pub fn primal_support(sys: &GraphSystem, easy_td: &TreeDecomposition) -> Result<Support> {
    let report = is_easy(sys, easy_td)?;
    if let Some((node, adhesion, member)) = report.witness {
        return Err(Error::NotEasy { node, adhesion, member });
    }
    let labels = sys.coloring.blue_vertices();
    let mut support = Support::new(SupportKind::Primal, labels);
    let pos = support.positions();
    let mut width = 0;
    for bag in easy_td.bags() {
        let blue: Vec<usize> = bag.iter().filter(|&&v| sys.coloring.is_blue(v)).map(|v| pos[v]).collect();
        width = width.max(blue.len().saturating_sub(1));
        for (i, &a) in blue.iter().enumerate() {
            for &b in &blue[i + 1..] {
                support.add_edge(a, b);
            }
        }
    }
    support.provenance.width = Some(width);
    Ok(support)
}

/// `2^{t+2} + t`, saturating.
pub fn width_bound(t: usize) -> u64 {
    1u64.checked_shl((t + 2) as u32).unwrap_or(u64::MAX).saturating_add(t as u64)
}

/// Result of the full primal pipeline.
#[derive(Debug, Clone)]
pub struct PrimalOutcome {
    pub support: Support,
    pub easy_td: TreeDecomposition,
    /// Width of the input decomposition.
    pub input_width: usize,
    pub non_piercing: bool,
}

/// Root, binarize, make easy, project. The width bound is only claimed for
/// non-piercing families; the support itself is valid either way.
pub fn build_primal(sys: &GraphSystem, td: &TreeDecomposition) -> Result<PrimalOutcome> {
    ensure_valid(&sys.graph, td)?;
    let non_piercing = is_non_piercing(&sys.graph, &sys.h)?.holds();
    let easy_td = make_easy(sys, td)?;
    let mut support = primal_support(sys, &easy_td)?;
    if non_piercing {
        support.provenance.width_bound = Some(width_bound(td.width()));
    }
    Ok(PrimalOutcome { support, easy_td, input_width: td.width(), non_piercing })
}
