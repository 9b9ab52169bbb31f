//! Intersection supports on bounded-treewidth hosts: K-easiness through the
//! primal machinery under the coloring "covered by both families", then
//! sparsification and clique-per-bag as for dual supports.
//!
//! K-easiness is checked in the two-sided form used by the primal module:
//! a member of K needs an H-covered vertex in an adhesion set only when its
//! H-covered vertices lie on both sides of it. A member of K that no H
//! touches has no H to offer anywhere, so the one-sided form is not
//! attainable in general.

use crate::dual::{assemble, push_members, sds_edges, sparsity_of, width_bound as dual_bound, PushLedger};
use crate::error::Result;
use crate::model::{
    containment_maximal, is_non_piercing, Color, Coloring, IntersectionSystem, Support, SupportKind,
};
use crate::primal::{easy_report, make_easy_members, width_bound as primal_bound};
use crate::treedecomp::{binarize_and_root, chordal_complete, ensure_valid, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KEasyReport {
    pub easy: bool,
    /// `(K index, adhesion set, child node)` of the first failure in post-order.
    pub witness: Option<(usize, Vec<usize>, usize)>,
}

/// Blue iff the vertex lies in some member of H and some member of K.
pub fn phi(sys: &IntersectionSystem) -> Coloring {
    let n = sys.graph.vertex_count();
    let mut in_h = vec![false; n];
    let mut in_k = vec![false; n];
    for m in sys.h.members() {
        for &v in m {
            in_h[v] = true;
        }
    }
    for m in sys.k.members() {
        for &v in m {
            in_k[v] = true;
        }
    }
    Coloring::new((0..n).map(|v| if in_h[v] && in_k[v] { Color::Blue } else { Color::Red }).collect())
}

pub fn is_k_easy(sys: &IntersectionSystem, td: &TreeDecomposition) -> Result<KEasyReport> {
    let r = easy_report(&sys.graph, &phi(sys), sys.k.members(), td)?;
    Ok(KEasyReport { easy: r.easy, witness: r.witness.map(|(x, a, k)| (k, a, x)) })
}

/// Roots and binarizes `td`, then makes it K-easy under [`phi`].
pub fn make_k_easy(sys: &IntersectionSystem, td: &TreeDecomposition) -> Result<TreeDecomposition> {
    let td = binarize_and_root(td, None)?;
    make_easy_members(&sys.graph, &phi(sys), sys.k.members(), &td)
}

/// Widths and bounds along the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WidthLedger {
    /// Width of the input decomposition.
    pub t: usize,
    /// Width of the K-easy decomposition.
    pub t_prime: usize,
    pub t_prime_bound: u64,
    /// Largest number of sparsified members meeting one bag.
    pub sparsity: usize,
    pub sparsity_bound: u64,
    /// Width of the support produced.
    pub width: usize,
    pub width_bound: u64,
}

#[derive(Debug, Clone)]
pub struct IntersectionOutcome {
    pub support: Support,
    pub k_easy_td: TreeDecomposition,
    /// Present when H was non-piercing and sparsified. Member indices refer
    /// to the containment-maximal members of H.
    pub ledger: Option<PushLedger>,
    pub widths: WidthLedger,
    pub h_non_piercing: bool,
    pub k_non_piercing: bool,
}

impl IntersectionOutcome {
    pub fn non_piercing(&self) -> bool {
        self.h_non_piercing && self.k_non_piercing
    }
}

/// K-easy decomposition, containment reduction of H, push sparsification
/// over the completed host, clique-per-bag, then re-attachment.
pub fn intersection_support(sys: &IntersectionSystem, td: &TreeDecomposition) -> Result<IntersectionOutcome> {
    ensure_valid(&sys.graph, td)?;
    let h_np = is_non_piercing(&sys.graph, &sys.h)?.holds();
    let k_np = is_non_piercing(&sys.graph, &sys.k)?.holds();
    let k_easy_td = make_k_easy(sys, td)?;
    let host = chordal_complete(&sys.graph, &k_easy_td)?;
    let reduction = containment_maximal(&sys.h);
    let kept = reduction.family(&sys.h);
    let n = sys.graph.vertex_count();
    let (ledger, final_family, unique_map) = if h_np {
        let ledger = push_members(&host, kept.members(), &k_easy_td)?;
        let fam = ledger.final_family.clone();
        let map = ledger.unique_map.clone();
        (Some(ledger), fam, map)
    } else {
        (None, kept.members().to_vec(), (0..kept.len()).collect())
    };
    let reps: Vec<usize> = (0..unique_map.len()).filter(|&i| unique_map[i] == i).collect();
    let rep_sets: Vec<Vec<usize>> = reps.iter().map(|&i| final_family[i].clone()).collect();
    let sparsity = if rep_sets.is_empty() { 0 } else { sparsity_of(&rep_sets, &k_easy_td, n).k };
    let sds = sds_edges(&rep_sets, &k_easy_td, n);
    let pushes: Vec<(usize, usize)> =
        ledger.iter().flat_map(|l| l.entries.iter().map(|e| (e.pushed, e.pusher))).collect();
    let mut support =
        assemble(SupportKind::Intersection, sys.h.len(), &reduction, &unique_map, &pushes, sds, &reps)?;
    let t = td.width();
    let t_prime = k_easy_td.width();
    let t_prime_bound = primal_bound(t);
    let sparsity_bound = dual_bound(usize::try_from(t_prime_bound).unwrap_or(usize::MAX).min(64));
    let widths = WidthLedger {
        t,
        t_prime,
        t_prime_bound,
        sparsity,
        sparsity_bound,
        width: support.provenance.width.unwrap_or(0),
        width_bound: sparsity_bound,
    };
    if h_np && k_np {
        support.provenance.width_bound = Some(widths.width_bound);
    }
    Ok(IntersectionOutcome { support, k_easy_td, ledger, widths, h_non_piercing: h_np, k_non_piercing: k_np })
}
