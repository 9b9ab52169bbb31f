//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; any failure makes the
//! process exit nonzero.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use npsupport::cyclesupport::{
    build_outerplanar_intersection, classify_abab, classify_axax, classify_strong_axax, CycleSystem,
    StrongAxaxWitness,
};
use npsupport::dual::dual_support;
use npsupport::generators::{
    gen_clique_system, gen_dual_lb, gen_outerplanar_system, gen_primal_lb, CliqueParams,
};
use npsupport::intersection::{intersection_support, is_k_easy};
use npsupport::model::{induced_connected, is_non_piercing};
use npsupport::primal::build_primal;
use npsupport::treedecomp::{build_decomposition, chordal_complete, BuildMode};
use npsupport::verify::{check_support, exact_treewidth, forced_edges, is_outerplanar, Hypergraph};
use npsupport::{Color, Coloring, FamilyName, Graph, GraphSystem, IntersectionSystem, SubgraphFamily};

type Outcome = Result<String, String>;

fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}

fn meets(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|x| b.contains(x))
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn h_family(members: Vec<Vec<usize>>) -> SubgraphFamily {
    SubgraphFamily::new(FamilyName::H, members).unwrap()
}

fn binom(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn exact_td(g: &Graph) -> npsupport::TreeDecomposition {
    build_decomposition(g, BuildMode::exact()).unwrap()
}

fn star_primal() -> Outcome {
    for n in 3..=8 {
        let g = Graph::from_edges(n + 1, (1..=n).map(|i| (0, i))).unwrap();
        let mut colors = vec![Color::Blue; n + 1];
        colors[0] = Color::Red;
        let mut members = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                members.push(vec![0, i, j]);
            }
        }
        let sys = GraphSystem::new(g, Some(Coloring::new(colors)), h_family(members)).unwrap();
        let out = build_primal(&sys, &exact_td(&sys.graph)).map_err(|e| e.to_string())?;
        for i in 1..=n {
            for j in i + 1..=n {
                ensure!(out.support.has_label_edge(i, j), "n = {n}: leaves {i}, {j} not adjacent");
            }
        }
        let v = check_support(&Hypergraph::primal(&sys), &out.support).map_err(|e| e.to_string())?;
        ensure!(v.is_none(), "n = {n}: oracle {v:?}");
    }
    Ok("K_n on the leaves for n = 3..8".into())
}

fn star_dual() -> Outcome {
    for n in 3..=6 {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let g = Graph::from_edges(pairs.len() + 1, (1..=pairs.len()).map(|l| (0, l))).unwrap();
        let members = (0..n)
            .map(|i| {
                let mut m = vec![0];
                m.extend(pairs.iter().enumerate().filter(|(_, p)| p.0 == i || p.1 == i).map(|(l, _)| l + 1));
                m
            })
            .collect();
        let sys = GraphSystem::new(g, None, h_family(members)).unwrap();
        let out = dual_support(&sys, &exact_td(&sys.graph)).map_err(|e| e.to_string())?;
        for &(i, j) in &pairs {
            ensure!(out.support.has_label_edge(i, j), "n = {n}: members {i}, {j} not adjacent");
        }
        let hg = Hypergraph::dual(sys.graph.vertex_count(), sys.h.members());
        let v = check_support(&hg, &out.support).map_err(|e| e.to_string())?;
        ensure!(v.is_none(), "n = {n}: oracle {v:?}");
    }
    Ok("K_n over the members for n = 3..6".into())
}

fn clique(t: usize, seed: u64, k: Option<usize>) -> npsupport::generators::CliqueInstance {
    let mut p = CliqueParams::new(t, 10 * (t + 1), 60, seed);
    p.k_members = k;
    p.red_fraction = 0.5;
    gen_clique_system(&p).unwrap()
}

fn primal_bound() -> Outcome {
    let mut notes = Vec::new();
    for t in [2usize, 3, 4] {
        let bound = (1usize << (t + 2)) + t;
        let mut worst = 0;
        for seed in 0..100 {
            let inst = clique(t, seed, None);
            let sys = inst.system().unwrap();
            let out = build_primal(&sys, &inst.td).map_err(|e| format!("t {t} seed {seed}: {e}"))?;
            let w = out.support.provenance.width.unwrap_or(usize::MAX);
            ensure!(w <= bound, "t {t} seed {seed}: width {w} > {bound}");
            let v = check_support(&Hypergraph::primal(&sys), &out.support).map_err(|e| e.to_string())?;
            ensure!(v.is_none(), "t {t} seed {seed}: oracle {v:?}");
            worst = worst.max(w);
        }
        notes.push(format!("t={t} max {worst}/{bound}"));
    }
    Ok(notes.join(", "))
}

fn dual_bound() -> Outcome {
    let mut notes = Vec::new();
    let mut entries = 0;
    for t in [2usize, 3] {
        let bound = 1usize << (4 * (t + 1));
        let mut worst = 0;
        for seed in 0..100 {
            let inst = clique(t, seed, None);
            let sys = inst.system().unwrap();
            let ctx = format!("t {t} seed {seed}");
            let out = dual_support(&sys, &inst.td).map_err(|e| format!("{ctx}: {e}"))?;
            let w = out.support.provenance.width.unwrap_or(usize::MAX);
            ensure!(w <= bound && out.sparsity <= bound, "{ctx}: width {w}, sparsity {}", out.sparsity);
            let hg = Hypergraph::dual(sys.graph.vertex_count(), sys.h.members());
            let v = check_support(&hg, &out.support).map_err(|e| e.to_string())?;
            ensure!(v.is_none(), "{ctx}: oracle {v:?}");
            let host = chordal_complete(&sys.graph, &out.decomposition).unwrap();
            let ledger = out.ledger.as_ref().ok_or(format!("{ctx}: no push ledger"))?;
            for e in &ledger.entries {
                ensure!(
                    e.after == minus(&e.before, &e.pusher_set),
                    "{ctx}: {e:?} is not before minus pusher"
                );
                ensure!(induced_connected(&host, &e.after).unwrap_or(false), "{ctx}: {e:?} disconnected");
                let (u, x) = e.connecting_edge;
                ensure!(
                    e.after.contains(&u) && e.pusher_set.contains(&x) && host.has_edge(u, x),
                    "{ctx}: {e:?} lacks a connecting edge"
                );
            }
            entries += ledger.entries.len();
            worst = worst.max(w);
        }
        notes.push(format!("t={t} max {worst}/{bound}"));
    }
    Ok(format!("{}, {entries} push entries checked", notes.join(", ")))
}

fn intersection_pipeline() -> Outcome {
    let t = 2usize;
    // 2^(2^(t+4) + 4(t+1)) does not fit in 64 bits for t = 2.
    let exp = (1u32 << (t + 4)) + 4 * (t as u32 + 1);
    let mut worst = 0;
    for seed in 0..100 {
        let inst = clique(t, seed, Some(20));
        let sys =
            IntersectionSystem::new(inst.graph.clone(), inst.h.clone(), inst.k.clone().unwrap()).unwrap();
        let ctx = format!("seed {seed}");
        let out = intersection_support(&sys, &inst.td).map_err(|e| format!("{ctx}: {e}"))?;
        let v = check_support(&Hypergraph::intersection_of(&sys), &out.support).map_err(|e| e.to_string())?;
        ensure!(v.is_none(), "{ctx}: oracle {v:?}");
        let w = out.widths;
        let tp_bound = (1usize << (t + 2)) + t;
        ensure!(w.t <= t && w.t <= w.t_prime && w.t_prime <= tp_bound, "{ctx}: t ledger {w:?}");
        let sp_bound = 4 * (w.t_prime as u32 + 1);
        ensure!(sp_bound >= 64 || w.sparsity < 1usize << sp_bound, "{ctx}: sparsity ledger {w:?}");
        ensure!(exp >= 64 || w.width < 1usize << exp, "{ctx}: width ledger {w:?}");
        ensure!(is_k_easy(&sys, &out.k_easy_td).map(|r| r.easy).unwrap_or(false), "{ctx}: not K-easy");
        worst = worst.max(w.width);
    }
    Ok(format!("100 seeds at t=2, max width {worst} vs 2^{exp}"))
}

fn lower_bounds() -> Outcome {
    let mut notes = Vec::new();
    for m in [2usize, 4, 6] {
        let half = m / 2;
        let big_n = binom(half, half / 2);
        for lb in [gen_primal_lb(m), gen_dual_lb(m)] {
            let lb = lb.map_err(|e| e.to_string())?;
            let ctx = format!("m {m} {:?}", lb.kind);
            let np = is_non_piercing(&lb.system.graph, &lb.system.h).map_err(|e| e.to_string())?;
            ensure!(np.holds(), "{ctx}: pierces {np:?}");
            ensure!(lb.big_n == big_n, "{ctx}: N = {} expected {big_n}", lb.big_n);
            let forced = forced_edges(&lb).map_err(|e| e.to_string())?;
            ensure!(forced.forms_grid(), "{ctx}: forced edges are not the grid");
            let grid = forced.grid_graph(&lb);
            let mut want = BTreeSet::new();
            for i in 0..big_n {
                for j in 0..big_n {
                    if i + 1 < big_n {
                        want.insert((i * big_n + j, (i + 1) * big_n + j));
                    }
                    if j + 1 < big_n {
                        want.insert((i * big_n + j, i * big_n + j + 1));
                    }
                }
            }
            ensure!(grid.edges().into_iter().collect::<BTreeSet<_>>() == want, "{ctx}: not an N x N grid");
            if m == 4 {
                let tw = exact_treewidth(&grid, 64).map_err(|e| e.to_string())?;
                let formula = (2f64.powi(half as i32) / (m as f64).sqrt()).ceil() as usize;
                ensure!(tw == 2 && formula == 2, "{ctx}: grid treewidth {tw}, formula {formula}");
            }
            let host_tw = exact_treewidth(&lb.system.graph, 64).map_err(|e| e.to_string())?;
            ensure!(host_tw <= m, "{ctx}: host treewidth {host_tw} > {m}");
        }
        notes.push(format!("m={m} N={big_n}"));
    }
    Ok(notes.join(", "))
}

fn outerplanar_pipeline() -> Outcome {
    let mut largest = 0;
    for seed in 0..200u64 {
        let n = 4 + (seed as usize * 7) % 27;
        let inst = gen_outerplanar_system(n, n / 2 + 2, n / 2 + 1, seed).map_err(|e| e.to_string())?;
        let sys = IntersectionSystem::new(inst.graph, inst.h, inst.k).unwrap();
        let s = build_outerplanar_intersection(&sys).map_err(|e| format!("seed {seed}: {e}"))?;
        let v = check_support(&Hypergraph::intersection_of(&sys), &s).map_err(|e| e.to_string())?;
        ensure!(v.is_none(), "seed {seed}: oracle {v:?}");
        ensure!(is_outerplanar(&s.graph()), "seed {seed}: support not outerplanar");
        largest = largest.max(n);
    }
    Ok(format!("200 instances, n up to {largest}"))
}

fn refused_by_cli(json: &str, kind: &str) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = dir.path().join("i.json");
    std::fs::write(&p, json).map_err(|e| e.to_string())?;
    let o = Command::new(env!("CARGO_BIN_EXE_npsupport"))
        .args(["build", "--kind", kind, "--input", Path::new(&p).to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(o.status.code() == Some(3), "{kind}: exit {:?}", o.status.code());
    Ok(())
}

fn counterexamples() -> Outcome {
    let ast = vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0], vec![1, 3, 5]];
    let c = CycleSystem::new(6, ast.clone(), vec![]).unwrap();
    ensure!(classify_abab(&c, FamilyName::H).is_none(), "asteroidal is not abab-free");
    ensure!(classify_axax(&c, FamilyName::H).is_some(), "asteroidal is axax-free");
    for i in 0..3 {
        let pair = CycleSystem::new(6, vec![ast[i].clone(), ast[3].clone()], vec![]).unwrap();
        ensure!(classify_axax(&pair, FamilyName::H).is_some(), "H4 and H{} are no axax-pair", i + 1);
    }
    let h = vec![vec![0, 4], vec![1], vec![2, 3], vec![5, 6]];
    let k = vec![vec![0, 1], vec![1, 2], vec![3, 5], vec![0, 6], vec![1, 6], vec![3, 4]];
    let c = CycleSystem::new(7, h.clone(), k.clone()).unwrap();
    ensure!(classify_axax(&c, FamilyName::H).is_none(), "alternating H is not axax-free");
    ensure!(classify_axax(&c, FamilyName::K).is_none(), "alternating K is not axax-free");
    match classify_strong_axax(&c) {
        Some(StrongAxaxWitness::Intersection { h: hi, k: ki, vertices }) => {
            ensure!(!meets(&h[hi], &k[ki]), "witness H{} K{} intersect", hi + 1, ki + 1);
            let mut v = vertices;
            v.sort_unstable();
            let tags: Vec<bool> = v.iter().map(|x| h[hi].contains(x)).collect();
            let alternate = tags == [true, false, true, false] || tags == [false, true, false, true];
            let owned = v.iter().all(|x| h[hi].contains(x) != k[ki].contains(x));
            ensure!(alternate && owned, "witness {vertices:?} does not alternate");
        }
        other => return Err(format!("alternating sequence gives {other:?}")),
    }
    let cycle = |n: usize| (0..n).map(|i| format!("[{i},{}]", (i + 1) % n)).collect::<Vec<_>>().join(",");
    let j = |n: usize, h: &[Vec<usize>], k: &[Vec<usize>]| {
        format!(r#"{{"graph":{{"n":{n},"edges":[{}]}},"H":{h:?},"K":{k:?}}}"#, cycle(n))
    };
    let singles: Vec<Vec<usize>> = (0..6).map(|v| vec![v]).collect();
    refused_by_cli(&j(6, &ast, &singles), "outerplanar-intersection")?;
    refused_by_cli(&j(6, &ast, &singles), "outerplanar-dual")?;
    refused_by_cli(&j(7, &h, &k), "outerplanar-intersection")?;
    Ok("asteroidal and alternating sequence classified and refused (exit 3)".into())
}

/// Treewidth by trying every elimination order; for tiny graphs only.
fn brute_treewidth(g: &Graph) -> usize {
    fn go(adj: &mut Vec<BTreeSet<usize>>, alive: &mut Vec<bool>, left: usize, best: &mut usize, cur: usize) {
        if cur >= *best {
            return;
        }
        if left == 0 {
            *best = cur;
            return;
        }
        for v in 0..adj.len() {
            if !alive[v] {
                continue;
            }
            let nb: Vec<usize> = adj[v].iter().copied().filter(|&w| alive[w]).collect();
            let saved = adj.clone();
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
            alive[v] = false;
            go(adj, alive, left - 1, best, cur.max(nb.len()));
            alive[v] = true;
            *adj = saved;
        }
    }
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut best = n - 1;
    go(&mut adj, &mut vec![true; n], n, &mut best, 0);
    best
}

fn oracle_consistency() -> Outcome {
    let (mut outer, mut brute) = (0, 0);
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=10);
        let p = [0.15, 0.3, 0.5, 0.8][seed as usize % 4];
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        let tw = exact_treewidth(&g, 20).map_err(|e| e.to_string())?;
        let td = build_decomposition(&g, BuildMode::exact()).map_err(|e| e.to_string())?;
        ensure!(td.width() == tw, "seed {seed}: exact decomposition width {} vs treewidth {tw}", td.width());
        if n <= 7 {
            let b = brute_treewidth(&g);
            ensure!(b == tw, "seed {seed}: brute force {b} vs {tw}");
            brute += 1;
        }
        if is_outerplanar(&g) {
            ensure!(tw <= 2, "seed {seed}: outerplanar with treewidth {tw}");
            outer += 1;
        }
    }
    Ok(format!("500 graphs, {outer} outerplanar, {brute} also brute-forced"))
}

fn scale_smoke() -> Outcome {
    let limit = Duration::from_secs(60);
    let inst = gen_clique_system(&CliqueParams::new(3, 1000, 1000, 1)).map_err(|e| e.to_string())?;
    let sys = inst.system().unwrap();
    let t0 = Instant::now();
    let p = build_primal(&sys, &inst.td).map_err(|e| e.to_string())?;
    let tp = t0.elapsed();
    ensure!(check_support(&Hypergraph::primal(&sys), &p.support).unwrap().is_none(), "primal oracle");
    let t0 = Instant::now();
    let d = dual_support(&sys, &inst.td).map_err(|e| e.to_string())?;
    let td = t0.elapsed();
    ensure!(
        check_support(&Hypergraph::dual(1000, sys.h.members()), &d.support).unwrap().is_none(),
        "dual oracle"
    );
    let o = gen_outerplanar_system(500, 250, 250, 1).map_err(|e| e.to_string())?;
    let osys = IntersectionSystem::new(o.graph, o.h, o.k).unwrap();
    let t0 = Instant::now();
    let s = build_outerplanar_intersection(&osys).map_err(|e| e.to_string())?;
    let to = t0.elapsed();
    ensure!(check_support(&Hypergraph::intersection_of(&osys), &s).unwrap().is_none(), "outerplanar oracle");
    ensure!(tp < limit && td < limit && to < limit, "too slow: {tp:?} {td:?} {to:?}");
    Ok(format!(
        "primal {:.2}s, dual {:.2}s, outerplanar {:.2}s",
        tp.as_secs_f64(),
        td.as_secs_f64(),
        to.as_secs_f64()
    ))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("star primal", 1, star_primal),
        ("star dual", 1, star_dual),
        ("primal width bound", 60, primal_bound),
        ("dual width bound", 120, dual_bound),
        ("intersection pipeline", 120, intersection_pipeline),
        ("lower bounds", 30, lower_bounds),
        ("outerplanar pipeline", 60, outerplanar_pipeline),
        ("counterexample fidelity", 1, counterexamples),
        ("oracle cross-consistency", 60, oracle_consistency),
        ("polynomial-scale smoke", 180, scale_smoke),
    ];
    let mut failed = 0;
    for (i, (name, secs, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut res = f();
        let took = start.elapsed();
        if res.is_ok() && took > Duration::from_secs(*secs) {
            res = Err(format!("took {:.2}s, limit {secs}s", took.as_secs_f64()));
        }
        let (tag, msg) = match &res {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!("criterion {:>2} {tag} {name} [{:.2}s]: {msg}", i + 1, took.as_secs_f64());
        failed += usize::from(res.is_err());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
