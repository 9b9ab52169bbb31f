//! Batch sweeps over seeded generator grids, one CSV row per cell.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use npsupport::cyclesupport::embedding_is_outerplanar;
use npsupport::generators::{gen_clique_system, gen_outerplanar_system, CliqueParams};

use crate::commands::{build_support, verify_support, Kind};
use crate::io::{CmdResult, Failure, Instance};

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Treewidths of the clique hosts; ignored for outerplanar kinds.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub t: Vec<usize>,
    /// Host sizes; defaults to 4(t+1) for cliques and 20 for outerplanar.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub members: usize,
    /// Size of K for intersection kinds; members/2 when absent.
    #[arg(long)]
    pub k_members: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_start: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub kind: String,
    pub t: usize,
    pub n: usize,
    #[serde(rename = "|H|")]
    pub h: usize,
    #[serde(rename = "|K|")]
    pub k: usize,
    pub width_achieved: usize,
    pub width_bound: Option<u64>,
    pub oracle_pass: bool,
    pub wall_ms: f64,
}

impl Row {
    pub fn within_bound(&self) -> bool {
        self.width_bound.is_none_or(|b| self.width_achieved as u64 <= b)
    }
}

/// One cell of the grid: `(t, n, seed)`.
pub type Cell = (usize, usize, u64);

fn is_outerplanar_kind(k: Kind) -> bool {
    matches!(k, Kind::OuterplanarPrimal | Kind::OuterplanarDual | Kind::OuterplanarIntersection)
}

fn needs_k(k: Kind) -> bool {
    matches!(k, Kind::Intersection | Kind::OuterplanarIntersection)
}

pub fn cells(a: &SweepArgs) -> Vec<Cell> {
    let ts: Vec<usize> = if is_outerplanar_kind(a.kind) { vec![2] } else { a.t.clone() };
    let mut out = Vec::new();
    for &t in &ts {
        let ns = if !a.n.is_empty() {
            a.n.clone()
        } else if is_outerplanar_kind(a.kind) {
            vec![20]
        } else {
            vec![4 * (t + 1)]
        };
        for &n in &ns {
            out.extend((a.seed_start..a.seed_start + a.seeds).map(|s| (t, n, s)));
        }
    }
    out
}

/// Generates, builds and checks one cell. Outerplanar hosts are reported
/// with `t = 2`, their treewidth bound.
pub fn run_cell(a: &SweepArgs, (t, n, seed): Cell) -> CmdResult<Row> {
    let k_count = if needs_k(a.kind) { a.k_members.unwrap_or(a.members / 2) } else { 0 };
    let (inst, td) = if is_outerplanar_kind(a.kind) {
        let o = gen_outerplanar_system(n, a.members, k_count, seed)?;
        let k = needs_k(a.kind).then(|| o.k.members().to_vec());
        (Instance { graph: o.graph, coloring: None, h: o.h.members().to_vec(), k }, None)
    } else {
        let mut p = CliqueParams::new(t, n, a.members, seed);
        p.k_members = needs_k(a.kind).then_some(k_count);
        let c = gen_clique_system(&p)?;
        let inst = Instance {
            graph: c.graph,
            coloring: Some(c.coloring),
            h: c.h.members().to_vec(),
            k: c.k.map(|k| k.members().to_vec()),
        };
        (inst, Some(c.td))
    };
    let start = Instant::now();
    let (support, _) = build_support(a.kind, &inst, || {
        td.ok_or_else(|| Failure::Internal("clique instance without decomposition".into()))
    })?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut oracle_pass = verify_support(a.kind.into(), &inst, &support).is_ok();
    if is_outerplanar_kind(a.kind) {
        oracle_pass &= embedding_is_outerplanar(&support);
    }
    Ok(Row {
        kind: support.provenance.kind.as_str().to_string(),
        t,
        n,
        h: inst.h.len(),
        k: inst.k.as_ref().map_or(0, Vec::len),
        width_achieved: support.provenance.width.unwrap_or(0),
        width_bound: support.provenance.width_bound,
        oracle_pass,
        wall_ms: (wall_ms * 1e3).round() / 1e3,
    })
}

/// Runs every cell in parallel; rows come back sorted by cell.
pub fn sweep(a: &SweepArgs) -> CmdResult<Vec<Row>> {
    let mut rows: Vec<(Cell, Row)> =
        cells(a).into_par_iter().map(|c| run_cell(a, c).map(|r| (c, r))).collect::<CmdResult<_>>()?;
    rows.sort_by_key(|(c, _)| *c);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn to_csv(rows: &[Row]) -> CmdResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))
}

pub fn cmd_sweep(a: &SweepArgs) -> CmdResult<()> {
    let rows = sweep(a)?;
    crate::io::write_text(&to_csv(&rows)?, a.output.as_deref())?;
    let failures = rows.iter().filter(|r| !r.oracle_pass).count();
    let over = rows.iter().filter(|r| !r.within_bound()).count();
    let summary = json!({ "rows": rows.len(), "oracle_failures": failures, "bound_violations": over });
    if failures + over > 0 {
        return Err(Failure::Oracle(summary));
    }
    eprintln!("{summary}");
    Ok(())
}
