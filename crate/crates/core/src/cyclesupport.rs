//! Outerplanar supports through cycle systems: runs and chords on a cycle,
//! alternation patterns, reduction, and the split-and-glue construction.
//!
//! Vertices of a cycle on `n` vertices are `0..n` in clockwise order. A
//! partial support is kept as an edge set together with a cyclic order of
//! its labels in which every edge is a non-crossing chord.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{
    sets, Coloring, ContainmentReduction, FamilyName, Graph, GraphSystem, IntersectionSystem, Support,
    SupportKind,
};
use crate::treedecomp::{from_elimination_order, min_fill_order};

/// A cycle `0..n` with two families of vertex subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSystem {
    n: usize,
    h: Vec<Vec<usize>>,
    k: Vec<Vec<usize>>,
}

impl CycleSystem {
    pub fn new(n: usize, h: Vec<Vec<usize>>, k: Vec<Vec<usize>>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let norm = |fam: Vec<Vec<usize>>, name: FamilyName| -> Result<Vec<Vec<usize>>> {
            fam.into_iter()
                .enumerate()
                .map(|(index, m)| {
                    let m = sets::normalize(m);
                    if m.is_empty() {
                        return Err(Error::EmptyMember { family: name, index });
                    }
                    if let Some(&v) = m.iter().find(|&&v| v >= n) {
                        return Err(Error::VertexOutOfRange { vertex: v, n });
                    }
                    Ok(m)
                })
                .collect()
        };
        Ok(CycleSystem { n, h: norm(h, FamilyName::H)?, k: norm(k, FamilyName::K)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[Vec<usize>] {
        &self.h
    }

    pub fn k(&self) -> &[Vec<usize>] {
        &self.k
    }

    pub fn family(&self, name: FamilyName) -> &[Vec<usize>] {
        match name {
            FamilyName::H => &self.h,
            FamilyName::K => &self.k,
        }
    }
}

/// The clockwise arc `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub start: usize,
    pub end: usize,
}

impl Run {
    pub fn len(&self, n: usize) -> usize {
        (self.end + n - self.start) % n + 1
    }

    pub fn contains(&self, n: usize, v: usize) -> bool {
        (v + n - self.start) % n <= (self.end + n - self.start) % n
    }

    pub fn vertices(&self, n: usize) -> Vec<usize> {
        arc(n, self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunDecomposition {
    pub member: usize,
    pub runs: Vec<Run>,
    /// `chord_lengths[i] = |arc[end_i, start_{i+1}]|`.
    pub chord_lengths: Vec<usize>,
    /// Index `i` of the shortest chord `{end_i, start_{i+1}}`.
    pub min_chord: Option<usize>,
}

impl RunDecomposition {
    pub fn chord(&self, i: usize) -> (usize, usize) {
        (self.runs[i].end, self.runs[(i + 1) % self.runs.len()].start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexCycle {
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternWitness {
    pub family: FamilyName,
    pub first: usize,
    pub second: usize,
    /// Four vertices in cyclic order, alternating between the two members.
    pub vertices: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrongAxaxWitness {
    Axax(PatternWitness),
    /// Disjoint `h` and `k` alternating around the cycle.
    Intersection {
        h: usize,
        k: usize,
        vertices: [usize; 4],
    },
}

/// Clockwise arc `[i, j]`.
fn arc(n: usize, i: usize, j: usize) -> Vec<usize> {
    let len = (j + n - i) % n + 1;
    (0..len).map(|d| (i + d) % n).collect()
}

/// True iff `v` lies in the open clockwise arc `(i, j)`.
fn in_open_arc(n: usize, i: usize, j: usize, v: usize) -> bool {
    let d = (v + n - i) % n;
    d > 0 && d < (j + n - i) % n
}

/// Maximal runs of a sorted nonempty set, sorted by start. A full cycle is
/// the single run `[0, n-1]`.
fn runs_of(n: usize, set: &[usize]) -> Vec<Run> {
    if set.len() >= n {
        return vec![Run { start: 0, end: n - 1 }];
    }
    let mut mask = vec![false; n];
    for &v in set {
        mask[v] = true;
    }
    let mut runs = Vec::new();
    for &s in set {
        if !mask[(s + n - 1) % n] {
            let mut e = s;
            while mask[(e + 1) % n] {
                e = (e + 1) % n;
            }
            runs.push(Run { start: s, end: e });
        }
    }
    runs
}

fn run_count(n: usize, set: &[usize]) -> usize {
    if set.len() >= n {
        return 1;
    }
    let mut mask = vec![false; n];
    for &v in set {
        mask[v] = true;
    }
    set.iter().filter(|&&v| !mask[(v + n - 1) % n]).count()
}

/// `N = Σ (runs - 1)` over a family.
fn excess<'a>(n: usize, fam: impl IntoIterator<Item = &'a Vec<usize>>) -> usize {
    fam.into_iter().map(|m| run_count(n, m) - 1).sum()
}

fn decompose(n: usize, member: usize, set: &[usize]) -> RunDecomposition {
    let runs = runs_of(n, set);
    let k = runs.len();
    let chord_lengths: Vec<usize> = if k == 1 {
        Vec::new()
    } else {
        (0..k).map(|i| (runs[(i + 1) % k].start + n - runs[i].end) % n + 1).collect()
    };
    let min_chord = (0..chord_lengths.len()).min_by_key(|&i| (chord_lengths[i], i));
    RunDecomposition { member, runs, chord_lengths, min_chord }
}

pub fn run_decompose(cs: &CycleSystem, fam: FamilyName, member: usize) -> Result<RunDecomposition> {
    let set = cs
        .family(fam)
        .get(member)
        .ok_or_else(|| Error::InvalidParameter(format!("no member {member} in {fam}")))?;
    Ok(decompose(cs.n, member, set))
}

/// Shortest chord of a multi-run set: `(length, u, v)` with the set missing
/// the open arc `(u, v)`.
fn min_chord(n: usize, set: &[usize]) -> Option<(usize, usize, usize)> {
    let d = decompose(n, 0, set);
    d.min_chord.map(|i| {
        let (u, v) = d.chord(i);
        (d.chord_lengths[i], u, v)
    })
}

/// Four vertices from four cyclic blocks alternating A, B, A, B, if the
/// tagged vertices form at least four blocks.
fn alternation(tags: &[u8]) -> Option<[usize; 4]> {
    let n = tags.len();
    let tagged: Vec<usize> = (0..n).filter(|&v| tags[v] != 0).collect();
    let m = tagged.len();
    // Start at an A vertex whose predecessor among tagged vertices is not A.
    let start = (0..m).find(|&i| tags[tagged[i]] == 1 && tags[tagged[(i + m - 1) % m]] != 1)?;
    let mut out = [0; 4];
    let mut found = 0;
    let mut last = 0u8;
    for d in 0..m {
        let v = tagged[(start + d) % m];
        if tags[v] != last {
            last = tags[v];
            out[found] = v;
            found += 1;
            if found == 4 {
                return Some(out);
            }
        }
    }
    None
}

fn masks(n: usize, fam: &[Vec<usize>]) -> Vec<Vec<bool>> {
    fam.iter()
        .map(|m| {
            let mut mask = vec![false; n];
            for &v in m {
                mask[v] = true;
            }
            mask
        })
        .collect()
}

/// First ordered pair `(i, j)` with `a ∈ i∖j`, `x ∈ j∖i` alternating when
/// `both_outside`, or `x ∈ j` otherwise.
fn pattern(n: usize, fam: &[Vec<usize>], both_outside: bool) -> Option<(usize, usize, [usize; 4])> {
    let mk = masks(n, fam);
    let mut tags = vec![0u8; n];
    for i in 0..fam.len() {
        for j in 0..fam.len() {
            if i == j {
                continue;
            }
            for v in 0..n {
                tags[v] = match (mk[i][v], mk[j][v]) {
                    (true, false) => 1,
                    (false, true) => 2,
                    (true, true) if !both_outside => 2,
                    _ => 0,
                };
            }
            if let Some(w) = alternation(&tags) {
                return Some((i, j, w));
            }
        }
    }
    None
}

fn axax_raw(n: usize, fam: &[Vec<usize>], name: FamilyName) -> Option<PatternWitness> {
    pattern(n, fam, false).map(|(first, second, vertices)| PatternWitness {
        family: name,
        first,
        second,
        vertices,
    })
}

/// `None` when the family is axax-free, else the first offending pair.
pub fn classify_axax(cs: &CycleSystem, fam: FamilyName) -> Option<PatternWitness> {
    axax_raw(cs.n, cs.family(fam), fam)
}

/// `None` when the family is abab-free, else the first offending pair.
pub fn classify_abab(cs: &CycleSystem, fam: FamilyName) -> Option<PatternWitness> {
    pattern(cs.n, cs.family(fam), true).map(|(first, second, vertices)| PatternWitness {
        family: fam,
        first,
        second,
        vertices,
    })
}

fn intersection_raw(n: usize, h: &[Vec<usize>], k: &[Vec<usize>]) -> Option<StrongAxaxWitness> {
    let hm = masks(n, h);
    let km = masks(n, k);
    let mut tags = vec![0u8; n];
    for (i, hs) in h.iter().enumerate() {
        for (j, ks) in k.iter().enumerate() {
            if sets::intersects(hs, ks) {
                continue;
            }
            for v in 0..n {
                tags[v] = if hm[i][v] {
                    1
                } else if km[j][v] {
                    2
                } else {
                    0
                };
            }
            if let Some(vertices) = alternation(&tags) {
                return Some(StrongAxaxWitness::Intersection { h: i, k: j, vertices });
            }
        }
    }
    None
}

fn strong_raw(n: usize, h: &[Vec<usize>], k: &[Vec<usize>]) -> Option<StrongAxaxWitness> {
    axax_raw(n, h, FamilyName::H)
        .or_else(|| axax_raw(n, k, FamilyName::K))
        .map(StrongAxaxWitness::Axax)
        .or_else(|| intersection_raw(n, h, k))
}

/// `None` when both families are axax-free and every alternating `(H, K)`
/// pair intersects.
pub fn classify_strong_axax(cs: &CycleSystem) -> Option<StrongAxaxWitness> {
    strong_raw(cs.n, &cs.h, &cs.k)
}

/// A reduced system with the maps back to the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced {
    pub system: CycleSystem,
    /// New vertex -> old vertex.
    pub vertex_map: Vec<usize>,
    /// New member index -> old member index, per family. Members left
    /// empty are dropped.
    pub h_index: Vec<usize>,
    pub k_index: Vec<usize>,
}

struct RawReduced {
    n: usize,
    vertex_map: Vec<usize>,
    h: Vec<(usize, Vec<usize>)>,
    k: Vec<(usize, Vec<usize>)>,
}

fn reduce_raw(n: usize, h: &[Vec<usize>], k: &[Vec<usize>]) -> RawReduced {
    let mut in_h = vec![false; n];
    let mut in_k = vec![false; n];
    h.iter().flatten().for_each(|&v| in_h[v] = true);
    k.iter().flatten().for_each(|&v| in_k[v] = true);
    let vertex_map: Vec<usize> = (0..n).filter(|&v| in_h[v] && in_k[v]).collect();
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in vertex_map.iter().enumerate() {
        new_id[v] = i;
    }
    let restrict = |fam: &[Vec<usize>]| -> Vec<(usize, Vec<usize>)> {
        fam.iter()
            .enumerate()
            .filter_map(|(i, m)| {
                let r: Vec<usize> =
                    m.iter().filter(|&&v| new_id[v] != usize::MAX).map(|&v| new_id[v]).collect();
                (!r.is_empty()).then_some((i, r))
            })
            .collect()
    };
    RawReduced { n: vertex_map.len(), h: restrict(h), k: restrict(k), vertex_map }
}

/// Drops every vertex outside `(∪H) ∩ (∪K)` and splices the cycle.
pub fn reduce(cs: &CycleSystem) -> Result<Reduced> {
    let r = reduce_raw(cs.n, &cs.h, &cs.k);
    let (h_index, h): (Vec<usize>, Vec<Vec<usize>>) = r.h.into_iter().unzip();
    let (k_index, k): (Vec<usize>, Vec<Vec<usize>>) = r.k.into_iter().unzip();
    Ok(Reduced { system: CycleSystem::new(r.n, h, k)?, vertex_map: r.vertex_map, h_index, k_index })
}

/// Single-run `inner` lies inside `outer` avoiding both its ends. A full
/// cycle has ends `0` and `n-1`.
fn strictly_inside(n: usize, inner: &[usize], outer: &[usize]) -> bool {
    if inner.len() >= outer.len() || !sets::is_subset(inner, outer) {
        return false;
    }
    let r = runs_of(n, outer)[0];
    !sets::contains(inner, r.start) && !sets::contains(inner, r.end)
}

fn single_run(n: usize, fam: &[(usize, Vec<usize>)]) -> Result<()> {
    match fam.iter().find(|(_, m)| run_count(n, m) != 1) {
        Some(&(label, _)) => Err(Error::MultiRunMember(label)),
        None => Ok(()),
    }
}

/// Keeps the members not strictly inside another; each removed member maps
/// to the lowest-label kept member strictly containing it.
fn strict_reduce_raw(n: usize, fam: &[(usize, Vec<usize>)]) -> Result<(Fam, Vec<(usize, usize)>)> {
    single_run(n, fam)?;
    let inside: Vec<bool> =
        fam.iter().map(|(_, a)| fam.iter().any(|(_, b)| strictly_inside(n, a, b))).collect();
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (i, (label, set)) in fam.iter().enumerate() {
        if inside[i] {
            let succ = fam
                .iter()
                .enumerate()
                .filter(|&(j, (_, b))| !inside[j] && strictly_inside(n, set, b))
                .map(|(_, (l, _))| *l)
                .min()
                .ok_or_else(|| Error::Internal(format!("no maximal run above {label}")))?;
            removed.push((*label, succ));
        } else {
            kept.push((*label, set.clone()));
        }
    }
    Ok((kept, removed))
}

/// Maximal members of a single-run family under strict containment.
pub fn strict_containment_maximal(cs: &CycleSystem, fam: FamilyName) -> Result<ContainmentReduction> {
    let labelled: Vec<(usize, Vec<usize>)> = cs.family(fam).iter().cloned().enumerate().collect();
    let (kept, removed) = strict_reduce_raw(cs.n, &labelled)?;
    Ok(ContainmentReduction {
        kept: kept.into_iter().map(|(l, _)| l).collect(),
        successor: removed.into_iter().collect(),
    })
}

/// Lex cyclic order; ties between equal runs go by `rank`, then label.
fn lex_order(n: usize, fam: &[(usize, Vec<usize>)], rank: &BTreeMap<usize, usize>) -> Result<Vec<usize>> {
    single_run(n, fam)?;
    let mut keyed: Vec<(usize, usize, usize, usize)> = fam
        .iter()
        .map(|(label, m)| {
            let r = runs_of(n, m)[0];
            (r.start, r.len(n), rank.get(label).copied().unwrap_or(*label), *label)
        })
        .collect();
    keyed.sort_unstable();
    Ok(keyed.into_iter().map(|k| k.3).collect())
}

/// Members of a strict-containment-free single-run family in lex cyclic order.
pub fn lex_cycle(cs: &CycleSystem, fam: FamilyName) -> Result<LexCycle> {
    let labelled: Vec<(usize, Vec<usize>)> = cs.family(fam).iter().cloned().enumerate().collect();
    ensure_strict_free(cs.n, &labelled)?;
    Ok(LexCycle { order: lex_order(cs.n, &labelled, &BTreeMap::new())? })
}

fn ensure_strict_free(n: usize, fam: &[(usize, Vec<usize>)]) -> Result<()> {
    single_run(n, fam)?;
    for (la, a) in fam {
        if let Some((lb, _)) = fam.iter().find(|(_, b)| strictly_inside(n, a, b)) {
            return Err(Error::InvalidParameter(format!("run {la} is strictly inside run {lb}")));
        }
    }
    Ok(())
}

/// A support under construction: edges over labels and a cyclic order of
/// its labels in which no two edges cross.
#[derive(Debug, Clone, Default)]
struct Partial {
    edges: BTreeSet<(usize, usize)>,
    order: Vec<usize>,
}

impl Partial {
    fn add(&mut self, a: usize, b: usize) {
        if a != b {
            self.edges.insert((a.min(b), a.max(b)));
        }
    }

    fn cycle(order: Vec<usize>) -> Self {
        let mut p = Partial { edges: BTreeSet::new(), order };
        let m = p.order.len();
        if m >= 2 {
            for i in 0..m {
                let (a, b) = (p.order[i], p.order[(i + 1) % m]);
                p.add(a, b);
            }
        }
        p
    }

    fn rotated_to(&self, a: usize) -> Vec<usize> {
        let i = self.order.iter().position(|&x| x == a).expect("label present");
        self.order[i..].iter().chain(&self.order[..i]).copied().collect()
    }

    /// Hangs each removed label off its successor, latest removal first.
    fn attach(&mut self, removed: &[(usize, usize)]) -> Result<()> {
        for &(label, succ) in removed.iter().rev() {
            let at = self.order.iter().position(|&x| x == succ).ok_or(Error::SuccessorMissing(succ))?;
            if self.order.contains(&label) {
                return Err(Error::Internal(format!("label {label} placed twice")));
            }
            self.order.insert(at + 1, label);
            self.add(label, succ);
        }
        Ok(())
    }

    /// Rotation starting at `a` and ending at `b`, reversing if needed.
    fn span(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut r = self.rotated_to(a);
        if r.last() == Some(&b) {
            return Some(r);
        }
        if r.get(1) == Some(&b) {
            r[1..].reverse();
            return Some(r);
        }
        None
    }
}

/// Union of two partial supports sharing at most two labels; two shared
/// labels must be consecutive in both orders.
fn glue(a: Partial, b: Partial) -> Result<Partial> {
    let in_b: BTreeSet<usize> = b.order.iter().copied().collect();
    let shared: Vec<usize> = a.order.iter().copied().filter(|x| in_b.contains(x)).collect();
    let order = match shared.as_slice() {
        [] => a.order.iter().chain(&b.order).copied().collect(),
        &[s] => {
            let ra = a.rotated_to(s);
            let rb = b.rotated_to(s);
            ra.into_iter().chain(rb.into_iter().skip(1)).collect()
        }
        &[s, t] => {
            let ra = a.span(s, t).ok_or_else(|| Error::Internal(format!("{s} and {t} not consecutive")))?;
            let rb = b.span(t, s).ok_or_else(|| Error::Internal(format!("{t} and {s} not consecutive")))?;
            let mut order = ra;
            order.extend(&rb[1..rb.len() - 1]);
            order
        }
        _ => return Err(Error::Internal(format!("gluing along {} labels", shared.len()))),
    };
    let mut edges = a.edges;
    edges.extend(b.edges);
    Ok(Partial { edges, order })
}

type Fam = Vec<(usize, Vec<usize>)>;

/// Maps a set onto the positions of `verts` (a list of cycle vertices).
fn relabel(set: &[usize], pos: &[usize]) -> Vec<usize> {
    sets::normalize(set.iter().filter(|&&v| pos[v] != usize::MAX).map(|&v| pos[v]).collect())
}

/// H single runs, K arbitrary and axax-free: split at the shortest chord
/// of K until every K is a single run, then glue lex cycles along the pair
/// of members sitting on the chord.
/// `rank` orders members whose runs coincide, by their position in the lex
/// order one level up.
fn basecase(
    mut n: usize,
    mut fam: Fam,
    mut ks: Vec<Vec<usize>>,
    mut rank: BTreeMap<usize, usize>,
) -> Result<Partial> {
    let mut parts = Vec::new();
    let (acc, last) = loop {
        let (kept, removed) = strict_reduce_raw(n, &fam)?;
        fam = kept;
        let total = excess(n, &ks);
        if total == 0 {
            break (Partial::cycle(lex_order(n, &fam, &rank)?), removed);
        }
        let (_, u0, v0) = ks
            .iter()
            .enumerate()
            .filter_map(|(j, m)| min_chord(n, m).map(|(len, u, v)| (len, j, u, v)))
            .min()
            .map(|(len, _, u, v)| (len, u, v))
            .expect("some K has two runs");
        let cl = arc(n, v0, u0);
        let cr = arc(n, u0, v0);
        let mut pos_l = vec![usize::MAX; n];
        let mut pos_r = vec![usize::MAX; n];
        cl.iter().enumerate().for_each(|(i, &v)| pos_l[v] = i);
        cr.iter().enumerate().for_each(|(i, &v)| pos_r[v] = i);
        let from = (v0 + 1) % n;
        let mut keyed: Vec<(usize, usize, usize, usize)> = fam
            .iter()
            .map(|(l, m)| {
                let r = runs_of(n, m)[0];
                let start = if m.len() >= n { from } else { r.start };
                ((start + n - from) % n, r.len(n), rank.get(l).copied().unwrap_or(*l), *l)
            })
            .collect();
        keyed.sort_unstable();
        rank = keyed.iter().enumerate().map(|(i, k)| (k.3, i)).collect();
        // Shared members: the one reaching furthest into the left arc from
        // u0 (walking back) and from v0 (walking forward); ties go to the
        // smaller right part, then to the end of the right block.
        let reach = |m: &[usize], walk: &mut dyn Iterator<Item = usize>| {
            walk.take_while(|&v| sets::contains(m, v)).count()
        };
        let pick = |end: usize, forward: bool| {
            fam.iter()
                .filter(|(_, m)| sets::contains(m, end))
                .map(|(l, m)| {
                    let len = if forward {
                        reach(m, &mut cl.iter().copied())
                    } else {
                        reach(m, &mut cl.iter().rev().copied())
                    };
                    let right_len = m.iter().filter(|&&v| pos_r[v] != usize::MAX).count();
                    // The u0 member opens the right block, the v0 member closes it.
                    let r = if forward { usize::MAX - rank[l] } else { rank[l] };
                    (std::cmp::Reverse(len), right_len, r, *l)
                })
                .min()
                .map(|k| k.3)
        };
        let (a, b) = (pick(u0, false), pick(v0, true));
        let mut right: Fam = Vec::new();
        let mut left: Fam = Vec::new();
        for (l, m) in &fam {
            let r = relabel(m, &pos_r);
            if !r.is_empty() {
                right.push((*l, r));
            }
            if m.iter().all(|&v| pos_r[v] == usize::MAX) || Some(*l) == a || Some(*l) == b {
                left.push((*l, relabel(m, &pos_l)));
            }
        }
        let ks_left: Vec<Vec<usize>> =
            ks.iter().map(|m| relabel(m, &pos_l)).filter(|m| !m.is_empty()).collect();
        if excess(cl.len(), &ks_left) >= total {
            return Err(Error::Internal("split did not join two runs of K".into()));
        }
        let (right, inner) = strict_reduce_raw(cr.len(), &right)?;
        let mut q = Partial::cycle(lex_order(cr.len(), &right, &rank)?);
        q.attach(&inner)?;
        parts.push((q, removed));
        n = cl.len();
        fam = left;
        ks = ks_left;
    };
    unwind(acc, last, parts)
}

/// Glues each level's right part onto the support of its left part, then
/// hangs the members that level removed off their successors.
fn unwind(
    mut acc: Partial,
    last: Vec<(usize, usize)>,
    parts: Vec<(Partial, Vec<(usize, usize)>)>,
) -> Result<Partial> {
    acc.attach(&last)?;
    for (q, removed) in parts.into_iter().rev() {
        acc = glue(q, acc)?;
        acc.attach(&removed)?;
    }
    Ok(acc)
}

/// Containment-free reduction, then split off the members crossing the
/// shortest chord of H and splice the chord's open arc out of the cycle,
/// until H is made of single runs.
fn general(mut n: usize, mut fam: Fam, mut ks: Vec<Vec<usize>>) -> Result<Partial> {
    let mut parts = Vec::new();
    let (acc, last) = loop {
        let sets_only: Vec<Vec<usize>> = fam.iter().map(|(_, m)| m.clone()).collect();
        let red = crate::model::containment_maximal_sets(&sets_only);
        let removed: Vec<(usize, usize)> =
            red.successor.iter().map(|(&i, &j)| (fam[i].0, fam[j].0)).collect();
        fam = red.kept.iter().map(|&i| fam[i].clone()).collect();
        let total = excess(n, fam.iter().map(|(_, m)| m));
        if total == 0 {
            break (basecase(n, fam, ks, BTreeMap::new())?, removed);
        }
        let (_, h0, u0, v0) = fam
            .iter()
            .filter_map(|(l, m)| min_chord(n, m).map(|(len, u, v)| (len, *l, u, v)))
            .min()
            .expect("some H has two runs");
        let closed = sets::normalize(arc(n, u0, v0));
        let cl = arc(n, v0, u0);
        let mut pos_l = vec![usize::MAX; n];
        cl.iter().enumerate().for_each(|(i, &v)| pos_l[v] = i);
        let mut right: Fam = Vec::new();
        let mut left: Fam = Vec::new();
        for (l, m) in &fam {
            if *l == h0 {
                left.push((*l, relabel(m, &pos_l)));
            } else if m.iter().any(|&v| in_open_arc(n, u0, v0, v)) {
                let outside = m.iter().any(|&v| !sets::contains(&closed, v));
                if outside && !sets::contains(m, u0) && !sets::contains(m, v0) {
                    return Err(Error::Internal(format!("member {l} crosses the chord of {h0}")));
                }
                right.push((*l, sets::intersection(m, &closed)));
            } else {
                left.push((*l, relabel(m, &pos_l)));
            }
        }
        // Members sharing a right part keep the order of their runs on the
        // whole cycle, read from just after v0.
        let from = (v0 + 1) % n;
        let mut keyed: Vec<(usize, usize, usize)> = right
            .iter()
            .map(|(l, part)| {
                let whole = &fam.iter().find(|(x, _)| x == l).expect("member").1;
                let r = runs_of(n, whole).into_iter().find(|r| r.contains(n, part[0])).expect("run");
                ((r.start + n - from) % n, r.len(n), *l)
            })
            .collect();
        keyed.push((n, 0, h0));
        keyed.sort_unstable();
        let rank: BTreeMap<usize, usize> = keyed.iter().enumerate().map(|(i, k)| (k.2, i)).collect();
        right.push((h0, sets::normalize(cl.clone())));
        let ks_left: Vec<Vec<usize>> =
            ks.iter().map(|m| relabel(m, &pos_l)).filter(|m| !m.is_empty()).collect();
        if excess(cl.len(), left.iter().map(|(_, m)| m)) >= total {
            return Err(Error::Internal("split did not reduce the run count of H".into()));
        }
        single_run(n, &right)?;
        parts.push((basecase(n, right, ks, rank)?, removed));
        n = cl.len();
        fam = left;
        ks = ks_left;
    };
    unwind(acc, last, parts)
}

/// Outerplanar intersection support over labels `0..h.len()` for a strong
/// axax-free system on a cycle of any length.
fn solve(n: usize, h: &[Vec<usize>], k: &[Vec<usize>]) -> Result<Partial> {
    let r = reduce_raw(n, h, k);
    let ks: Vec<Vec<usize>> = r.k.into_iter().map(|(_, m)| m).collect();
    let mut out = match r.n {
        0 => Partial::default(),
        1 | 2 => {
            // Path: members on the first vertex only, on both, on the second only.
            let mut keyed: Vec<(usize, usize)> =
                r.h.iter().map(|(l, m)| (if m.len() == 2 { 1 } else { 2 * m[0] }, *l)).collect();
            keyed.sort_unstable();
            let order: Vec<usize> = keyed.into_iter().map(|(_, l)| l).collect();
            let mut p = Partial { edges: BTreeSet::new(), order: order.clone() };
            for w in order.windows(2) {
                p.add(w[0], w[1]);
            }
            p
        }
        m => general(m, r.h, ks)?,
    };
    let placed: BTreeSet<usize> = out.order.iter().copied().collect();
    if placed.len() != out.order.len() {
        return Err(Error::Internal("label placed twice".into()));
    }
    out.order.extend((0..h.len()).filter(|l| !placed.contains(l)));
    Ok(out)
}

fn to_support(kind: SupportKind, labels: Vec<usize>, p: Partial) -> Support {
    // Internal labels are positions into `labels`.
    let mut s = Support::new(kind, labels);
    for &(a, b) in &p.edges {
        s.add_edge(a, b);
    }
    s.provenance.embedding = Some(p.order);
    let g = s.graph();
    s.provenance.width = Some(from_elimination_order(&g, &min_fill_order(&g)).width());
    s.provenance.width_bound = Some(2);
    s
}

/// The lex cycle of H as a support; every member must be a single run and
/// H strict-containment free.
pub fn single_run_support(cs: &CycleSystem) -> Result<Support> {
    let labelled: Fam = cs.h.iter().cloned().enumerate().collect();
    ensure_strict_free(cs.n, &labelled)?;
    let kl: Fam = cs.k.iter().cloned().enumerate().collect();
    single_run(cs.n, &kl)?;
    let p = Partial::cycle(lex_order(cs.n, &labelled, &BTreeMap::new())?);
    Ok(to_support(SupportKind::OuterplanarIntersection, (0..cs.h.len()).collect(), p))
}

/// Support with outer cycle the lex cycle of H, for single-run H and
/// axax-free K.
pub fn support_multi_run_k(cs: &CycleSystem) -> Result<Support> {
    let labelled: Fam = cs.h.iter().cloned().enumerate().collect();
    ensure_strict_free(cs.n, &labelled)?;
    if let Some(w) = classify_axax(cs, FamilyName::K) {
        return Err(Error::NotAxaxFree(w));
    }
    let p = basecase(cs.n, labelled, cs.k.clone(), BTreeMap::new())?;
    Ok(to_support(SupportKind::OuterplanarIntersection, (0..cs.h.len()).collect(), p))
}

/// Refuses systems that are not strong axax-free.
pub fn outerplanar_intersection_support(cs: &CycleSystem) -> Result<Support> {
    if let Some(w) = classify_strong_axax(cs) {
        return Err(Error::NotStrongAxaxFree(w));
    }
    let p = solve(cs.n, &cs.h, &cs.k)?;
    Ok(to_support(SupportKind::OuterplanarIntersection, (0..cs.h.len()).collect(), p))
}

fn singletons(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|v| vec![v]).collect()
}

/// Dual support with every vertex as a K; K of `cs` is ignored.
pub fn outerplanar_dual_support(cs: &CycleSystem) -> Result<Support> {
    if let Some(w) = classify_axax(cs, FamilyName::H) {
        return Err(Error::NotAxaxFree(w));
    }
    let p = solve(cs.n, &cs.h, &singletons(cs.n))?;
    Ok(to_support(SupportKind::OuterplanarDual, (0..cs.h.len()).collect(), p))
}

/// A cyclic order of all vertices in which every edge of the graph is a
/// non-crossing chord: the outer face walk of an outerplanar embedding,
/// keeping first visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterCycle {
    pub order: Vec<usize>,
    /// `position[v]` is the index of `v` in `order`.
    pub position: Vec<usize>,
}

impl OuterCycle {
    pub fn project(&self, set: &[usize]) -> Vec<usize> {
        sets::normalize(set.iter().map(|&v| self.position[v]).collect())
    }
}

/// Hamiltonian cycle of a biconnected outerplanar block by peeling
/// degree-two vertices.
fn block_cycle(g: &Graph, block: &[usize]) -> Result<Vec<usize>> {
    if block.len() <= 2 {
        return Ok(block.to_vec());
    }
    let local = |v: usize| block.binary_search(&v).ok();
    let m = block.len();
    let mut adj: Vec<BTreeSet<usize>> =
        block.iter().map(|&v| g.neighbors(v).iter().filter_map(|&w| local(w)).collect()).collect();
    let mut alive = vec![true; m];
    let mut queue: Vec<usize> = (0..m).filter(|&v| adj[v].len() == 2).collect();
    let mut peeled = Vec::new();
    let mut left = m;
    while left > 3 {
        let v = loop {
            let v = queue.pop().ok_or(Error::NotOuterplanar)?;
            if alive[v] && adj[v].len() == 2 {
                break v;
            }
        };
        let mut it = adj[v].iter();
        let (a, b) = (*it.next().unwrap(), *it.next().unwrap());
        adj[a].remove(&v);
        adj[b].remove(&v);
        adj[a].insert(b);
        adj[b].insert(a);
        alive[v] = false;
        left -= 1;
        peeled.push((v, a, b));
        queue.extend([a, b].into_iter().filter(|&x| adj[x].len() == 2));
    }
    let rest: Vec<usize> = (0..m).filter(|&v| alive[v]).collect();
    let mut next = vec![usize::MAX; m];
    let mut prev = vec![usize::MAX; m];
    for i in 0..3 {
        next[rest[i]] = rest[(i + 1) % 3];
        prev[rest[(i + 1) % 3]] = rest[i];
    }
    for &(v, a, b) in peeled.iter().rev() {
        let (x, y) = if next[a] == b {
            (a, b)
        } else if next[b] == a {
            (b, a)
        } else {
            return Err(Error::NotOuterplanar);
        };
        next[x] = v;
        prev[v] = x;
        next[v] = y;
        prev[y] = v;
    }
    let mut order = vec![rest[0]];
    let mut cur = next[rest[0]];
    while cur != rest[0] {
        order.push(cur);
        cur = next[cur];
    }
    Ok(order.into_iter().map(|i| block[i]).collect())
}

/// True iff no two edges cross as chords of the cyclic order.
fn chords_noncrossing(order_pos: &[usize], edges: &[(usize, usize)]) -> bool {
    let n = order_pos.len();
    let mut opens: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); n];
    let chords: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(u, v)| {
            let (p, q) = (order_pos[u], order_pos[v]);
            (p.min(q), p.max(q))
        })
        .collect();
    for (i, &(p, q)) in chords.iter().enumerate() {
        opens[p].push(i);
        closes[q].push(i);
    }
    let mut stack: Vec<usize> = Vec::new();
    for x in 0..n {
        closes[x].sort_by_key(|&i| std::cmp::Reverse(chords[i].0));
        for &i in &closes[x] {
            if stack.pop() != Some(i) {
                return false;
            }
        }
        opens[x].sort_by_key(|&i| std::cmp::Reverse(chords[i].1));
        stack.extend(&opens[x]);
    }
    true
}

pub fn outer_cycle(g: &Graph) -> Result<OuterCycle> {
    let n = g.vertex_count();
    let blocks = g.blocks();
    let mut blocks_of = vec![Vec::new(); n];
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            blocks_of[v].push(i);
        }
    }
    let cycles: Vec<Vec<usize>> = blocks.iter().map(|b| block_cycle(g, b)).collect::<Result<_>>()?;
    let mut emitted = vec![false; n];
    let mut used = vec![false; blocks.len()];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if emitted[root] {
            continue;
        }
        emitted[root] = true;
        order.push(root);
        // Stack of (block cycle rotated to its entry vertex, next index).
        let mut stack: Vec<(Vec<usize>, usize)> = Vec::new();
        let enter = |v: usize, used: &mut Vec<bool>, stack: &mut Vec<(Vec<usize>, usize)>| {
            for &b in blocks_of[v].iter().rev() {
                if !used[b] {
                    used[b] = true;
                    let c = &cycles[b];
                    let i = c.iter().position(|&x| x == v).unwrap();
                    let rot: Vec<usize> = c[i..].iter().chain(&c[..i]).copied().collect();
                    stack.push((rot, 1));
                }
            }
        };
        enter(root, &mut used, &mut stack);
        while let Some((cyc, i)) = stack.last_mut() {
            if *i >= cyc.len() {
                stack.pop();
                continue;
            }
            let v = cyc[*i];
            *i += 1;
            if !emitted[v] {
                emitted[v] = true;
                order.push(v);
            }
            enter(v, &mut used, &mut stack);
        }
    }
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    if !chords_noncrossing(&position, &g.edges()) {
        return Err(Error::NotOuterplanar);
    }
    Ok(OuterCycle { order, position })
}

/// Projects an outerplanar intersection system onto its outer cycle and
/// builds an outerplanar intersection support over the members of H.
pub fn build_outerplanar_intersection(sys: &IntersectionSystem) -> Result<Support> {
    outerplanar_intersection_of(&sys.graph, sys.h.members(), sys.k.members())
}

/// As [`build_outerplanar_intersection`], for members given as plain vertex
/// sets. Only their traces on the outer cycle matter, so they need not
/// induce connected subgraphs.
pub fn outerplanar_intersection_of(g: &Graph, h: &[Vec<usize>], k: &[Vec<usize>]) -> Result<Support> {
    let oc = outer_cycle(g)?;
    let n = g.vertex_count();
    let h = project_all(g, &oc, h)?;
    let k = project_all(g, &oc, k)?;
    if let Some(w) = strong_raw(n, &h, &k) {
        return Err(Error::NotStrongAxaxFree(unproject_strong(w, &oc)));
    }
    let p = solve(n, &h, &k)?;
    Ok(to_support(SupportKind::OuterplanarIntersection, (0..h.len()).collect(), p))
}

fn project_all(g: &Graph, oc: &OuterCycle, fam: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    fam.iter()
        .map(|m| {
            g.check_vertices(m)?;
            Ok(oc.project(m))
        })
        .collect()
}

/// Outerplanar dual support: intersection support against single vertices.
pub fn build_outerplanar_dual(sys: &GraphSystem) -> Result<Support> {
    outerplanar_dual_of(&sys.graph, sys.h.members())
}

pub fn outerplanar_dual_of(g: &Graph, h: &[Vec<usize>]) -> Result<Support> {
    let oc = outer_cycle(g)?;
    let n = g.vertex_count();
    let h = project_all(g, &oc, h)?;
    if let Some(w) = axax_raw(n, &h, FamilyName::H) {
        return Err(Error::NotAxaxFree(unproject(w, &oc)));
    }
    let p = solve(n, &h, &singletons(n))?;
    Ok(to_support(SupportKind::OuterplanarDual, (0..h.len()).collect(), p))
}

/// Outerplanar primal support: blue vertices as the members supported,
/// members of H as the sets to keep connected.
pub fn build_outerplanar_primal(sys: &GraphSystem) -> Result<Support> {
    outerplanar_primal_of(&sys.graph, &sys.coloring, sys.h.members())
}

pub fn outerplanar_primal_of(g: &Graph, coloring: &Coloring, h: &[Vec<usize>]) -> Result<Support> {
    let oc = outer_cycle(g)?;
    let n = g.vertex_count();
    if coloring.len() != n {
        return Err(Error::ColoringLength { expected: n, got: coloring.len() });
    }
    let blue = coloring.blue_vertices();
    let singles: Vec<Vec<usize>> = blue.iter().map(|&b| vec![oc.position[b]]).collect();
    let k = project_all(g, &oc, h)?;
    if let Some(w) = axax_raw(n, &k, FamilyName::H) {
        return Err(Error::NotAxaxFree(unproject(w, &oc)));
    }
    let p = solve(n, &singles, &k)?;
    Ok(to_support(SupportKind::OuterplanarPrimal, blue, p))
}

fn unproject(mut w: PatternWitness, oc: &OuterCycle) -> PatternWitness {
    w.vertices = w.vertices.map(|p| oc.order[p]);
    w
}

fn unproject_strong(w: StrongAxaxWitness, oc: &OuterCycle) -> StrongAxaxWitness {
    match w {
        StrongAxaxWitness::Axax(p) => StrongAxaxWitness::Axax(unproject(p, oc)),
        StrongAxaxWitness::Intersection { h, k, vertices } => {
            StrongAxaxWitness::Intersection { h, k, vertices: vertices.map(|p| oc.order[p]) }
        }
    }
}

/// Embedding check for a support: its recorded order puts every label on
/// one face.
pub fn embedding_is_outerplanar(s: &Support) -> bool {
    let Some(order) = &s.provenance.embedding else { return false };
    let m = s.labels.len();
    if order.len() != m {
        return false;
    }
    let mut pos = vec![usize::MAX; m];
    for (i, &p) in order.iter().enumerate() {
        if p >= m || pos[p] != usize::MAX {
            return false;
        }
        pos[p] = i;
    }
    let edges: Vec<(usize, usize)> = s.edges.iter().copied().collect();
    chords_noncrossing(&pos, &edges)
}

/// Map from label to the K members an `H` label meets, for diagnostics.
pub fn hits(h: &[Vec<usize>], k: &[Vec<usize>]) -> BTreeMap<usize, Vec<usize>> {
    h.iter()
        .enumerate()
        .map(|(i, hm)| {
            (i, k.iter().enumerate().filter(|(_, km)| sets::intersects(hm, km)).map(|(j, _)| j).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_support, is_outerplanar, Hypergraph};

    fn cs(n: usize, h: Vec<Vec<usize>>, k: Vec<Vec<usize>>) -> CycleSystem {
        CycleSystem::new(n, h, k).unwrap()
    }

    fn asteroidal_h() -> Vec<Vec<usize>> {
        vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0], vec![1, 3, 5]]
    }

    #[test]
    fn runs_and_chords() {
        let c = cs(7, vec![vec![1, 2, 5]], vec![]);
        let d = run_decompose(&c, FamilyName::H, 0).unwrap();
        assert_eq!(d.runs, vec![Run { start: 1, end: 2 }, Run { start: 5, end: 5 }]);
        assert_eq!(d.chord_lengths, vec![4, 4]);
        assert_eq!(d.min_chord, Some(0));
        let full = cs(5, vec![(0..5).collect()], vec![]);
        assert_eq!(run_decompose(&full, FamilyName::H, 0).unwrap().min_chord, None);
        let wrap = cs(6, vec![vec![0, 1, 5]], vec![]);
        assert_eq!(run_decompose(&wrap, FamilyName::H, 0).unwrap().runs, vec![Run { start: 5, end: 1 }]);
    }

    #[test]
    fn asteroidal_is_abab_free_not_axax_free() {
        let c = cs(6, asteroidal_h(), vec![]);
        let w = classify_axax(&c, FamilyName::H).unwrap();
        assert!(w.first == 3 || w.second == 3);
        assert_eq!(classify_abab(&c, FamilyName::H), None);
        assert!(matches!(outerplanar_dual_support(&c), Err(Error::NotAxaxFree(_))));
    }

    #[test]
    fn crossing_pairs_are_abab() {
        let c = cs(4, vec![vec![0, 2], vec![1, 3]], vec![]);
        assert!(classify_abab(&c, FamilyName::H).is_some());
        let nested = cs(6, vec![vec![0, 1, 2, 3], vec![1, 2]], vec![]);
        assert_eq!(classify_axax(&nested, FamilyName::H), None);
    }

    #[test]
    fn alternating_sequence_violates_intersection() {
        let h = vec![vec![0, 4], vec![1], vec![2, 3], vec![5, 6]];
        let k = vec![vec![0, 1], vec![1, 2], vec![3, 5], vec![0, 6], vec![1, 6], vec![3, 4]];
        let c = cs(7, h, k);
        assert_eq!(classify_axax(&c, FamilyName::H), None);
        assert_eq!(classify_axax(&c, FamilyName::K), None);
        match classify_strong_axax(&c) {
            Some(StrongAxaxWitness::Intersection { h, k, .. }) => assert_eq!((h, k), (0, 2)),
            other => panic!("{other:?}"),
        }
        let r = reduce(&c).unwrap();
        assert_eq!(r.vertex_map, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn strict_and_weak_containment() {
        let c = cs(8, vec![vec![1, 2, 3, 4], vec![2, 3], vec![1, 2], vec![5, 6]], vec![]);
        let r = strict_containment_maximal(&c, FamilyName::H).unwrap();
        assert_eq!(r.kept, vec![0, 2, 3]);
        assert_eq!(r.successor.get(&1), Some(&0));
    }

    #[test]
    fn lex_cycle_orders() {
        let c = cs(6, vec![vec![2, 3, 4], vec![0, 1, 2], vec![4, 5, 0]], vec![]);
        assert_eq!(lex_cycle(&c, FamilyName::H).unwrap().order, vec![1, 0, 2]);
        let shared = cs(6, vec![vec![1, 2, 3], vec![1, 2]], vec![]);
        assert_eq!(lex_cycle(&shared, FamilyName::H).unwrap().order, vec![1, 0]);
    }

    #[test]
    fn three_arcs_give_triangle() {
        let h = vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]];
        let c = cs(6, h.clone(), h.clone());
        let s = single_run_support(&c).unwrap();
        assert_eq!(s.edges.len(), 3);
        let hg = Hypergraph::intersection(&h, &h);
        assert_eq!(check_support(&hg, &s).unwrap(), None);
    }

    #[test]
    fn one_k_with_two_runs() {
        let h = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5], vec![5, 0]];
        let c = cs(6, h, vec![vec![0, 3]]);
        let s = support_multi_run_k(&c).unwrap();
        assert_eq!(check_support(&Hypergraph::intersection(c.h(), c.k()), &s).unwrap(), None);
        assert!(is_outerplanar(&s.graph()));
        assert!(embedding_is_outerplanar(&s));
    }

    #[test]
    fn outer_cycle_of_fan_and_tree() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (0, 3)]).unwrap();
        let oc = outer_cycle(&g).unwrap();
        assert_eq!(oc.order.len(), 5);
        let tree = Graph::from_edges(6, [(0, 1), (0, 2), (2, 3), (2, 4), (1, 5)]).unwrap();
        assert_eq!(outer_cycle(&tree).unwrap().order.len(), 6);
        assert!(outer_cycle(&Graph::complete(4)).is_err());
        let k23 = Graph::from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert!(outer_cycle(&k23).is_err());
    }

    #[test]
    fn random_outerplanar_instances() {
        use crate::generators::gen_outerplanar_system;
        for seed in 0..60 {
            let inst = gen_outerplanar_system(14, 6, 5, seed).unwrap();
            let sys = IntersectionSystem::new(inst.graph.clone(), inst.h.clone(), inst.k.clone()).unwrap();
            let s = build_outerplanar_intersection(&sys).unwrap();
            let hg = Hypergraph::intersection_of(&sys);
            assert_eq!(check_support(&hg, &s).unwrap(), None, "seed {seed}");
            assert!(is_outerplanar(&s.graph()), "seed {seed}");
            assert!(embedding_is_outerplanar(&s), "seed {seed}");
        }
    }
}
