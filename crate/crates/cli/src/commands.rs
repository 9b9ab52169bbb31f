//! The build, gen, check and verify subcommands.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use npsupport::cyclesupport::{
    classify_abab, classify_axax, classify_strong_axax, outer_cycle, outerplanar_dual_of,
    outerplanar_intersection_of, outerplanar_primal_of, CycleSystem, OuterCycle, PatternWitness,
    StrongAxaxWitness,
};
use npsupport::dual::dual_support;
use npsupport::generators::{
    gen_clique_system, gen_dual_lb, gen_outerplanar_system, gen_primal_lb, CliqueParams,
};
use npsupport::intersection::{intersection_support, is_k_easy};
use npsupport::model::{is_non_piercing, NonPiercing};
use npsupport::primal::{build_primal, is_easy};
use npsupport::treedecomp::{build_decomposition, BuildMode};
use npsupport::verify::{check_support, exact_treewidth, is_outerplanar, Hypergraph, TREEWIDTH_LIMIT};
use npsupport::{FamilyName, Graph, SubgraphFamily, Support, SupportKind, TreeDecomposition};

use crate::io::{
    graph_dot, pattern_json, read_instance, read_support, read_td, strong_json, support_dot, violation_json,
    write_json, write_text, CmdResult, DecompositionJson, Failure, Instance, SupportJson,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Primal,
    Dual,
    Intersection,
    OuterplanarPrimal,
    OuterplanarDual,
    OuterplanarIntersection,
}

impl From<Kind> for SupportKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Primal => SupportKind::Primal,
            Kind::Dual => SupportKind::Dual,
            Kind::Intersection => SupportKind::Intersection,
            Kind::OuterplanarPrimal => SupportKind::OuterplanarPrimal,
            Kind::OuterplanarDual => SupportKind::OuterplanarDual,
            Kind::OuterplanarIntersection => SupportKind::OuterplanarIntersection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TdMode {
    /// Exact up to `--exact-limit` vertices, min-fill above.
    Auto,
    Exact,
    MinFill,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub input: PathBuf,
    /// Decomposition JSON; built from the host when absent.
    #[arg(long)]
    pub td: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub td_mode: TdMode,
    #[arg(long, default_value_t = TREEWIDTH_LIMIT)]
    pub exact_limit: usize,
    /// Support JSON destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Audit dump (push ledger, width ledger) for the treewidth pipelines.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
}

pub fn decomposition(
    g: &Graph,
    td: Option<&Path>,
    mode: TdMode,
    limit: usize,
) -> CmdResult<TreeDecomposition> {
    let mode = match (td, mode) {
        (Some(p), _) => BuildMode::Provided(read_td(p)?),
        (None, TdMode::Exact) => BuildMode::ExactSmall { limit },
        (None, TdMode::MinFill) => BuildMode::MinFill,
        (None, TdMode::Auto) if g.vertex_count() <= limit => BuildMode::ExactSmall { limit },
        (None, TdMode::Auto) => BuildMode::MinFill,
    };
    Ok(build_decomposition(g, mode)?)
}

/// Builds the support of `kind` together with an optional audit record.
pub fn build_support(
    kind: Kind,
    inst: &Instance,
    td: impl FnOnce() -> CmdResult<TreeDecomposition>,
) -> CmdResult<(Support, Option<Value>)> {
    Ok(match kind {
        Kind::Primal => {
            let out = build_primal(&inst.graph_system()?, &td()?)?;
            let audit = json!({
                "input_width": out.input_width,
                "easy_width": out.easy_td.width(),
                "non_piercing": out.non_piercing,
                "easy_td": DecompositionJson::from_td(&out.easy_td),
            });
            (out.support, Some(audit))
        }
        Kind::Dual => {
            let out = dual_support(&inst.graph_system()?, &td()?)?;
            let ledger = out.ledger.as_ref().map(|l| {
                json!({
                    "entries": l.entries.iter().map(|e| json!({
                        "pushed": out.reduction.kept[e.pushed],
                        "pusher": out.reduction.kept[e.pusher],
                        "adhesion_edge": e.adhesion_edge,
                        "before": e.before,
                        "after": e.after,
                        "pusher_set": e.pusher_set,
                        "connecting_edge": e.connecting_edge,
                    })).collect::<Vec<_>>(),
                    "final_family": l.final_family,
                })
            });
            let audit = json!({
                "kept": out.reduction.kept,
                "sparsity": out.sparsity,
                "non_piercing": out.non_piercing,
                "push_ledger": ledger,
            });
            (out.support, Some(audit))
        }
        Kind::Intersection => {
            let out = intersection_support(&inst.intersection_system()?, &td()?)?;
            let w = out.widths;
            let audit = json!({
                "t": w.t,
                "t_prime": w.t_prime,
                "t_prime_bound": w.t_prime_bound,
                "sparsity": w.sparsity,
                "sparsity_bound": w.sparsity_bound,
                "width": w.width,
                "width_bound": w.width_bound,
                "h_non_piercing": out.h_non_piercing,
                "k_non_piercing": out.k_non_piercing,
            });
            (out.support, Some(audit))
        }
        Kind::OuterplanarPrimal => {
            (outerplanar_primal_of(&inst.graph, &inst.coloring_or_blue(), &inst.h)?, None)
        }
        Kind::OuterplanarDual => (outerplanar_dual_of(&inst.graph, &inst.h)?, None),
        Kind::OuterplanarIntersection => {
            (outerplanar_intersection_of(&inst.graph, &inst.h, inst.k_or_err()?)?, None)
        }
    })
}

/// The hypergraph a support of `kind` must realise. Built from the raw
/// instance so that it also covers members that are disconnected in the host.
pub fn hypergraph(kind: SupportKind, inst: &Instance) -> CmdResult<Hypergraph> {
    let n = inst.graph.vertex_count();
    Ok(match kind.base() {
        SupportKind::Primal => {
            let c = inst.coloring_or_blue();
            Hypergraph {
                kind: SupportKind::Primal,
                labels: c.blue_vertices(),
                hyperedges: inst
                    .h
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (i, m.iter().copied().filter(|&v| c.is_blue(v)).collect()))
                    .collect(),
            }
        }
        SupportKind::Dual => Hypergraph::dual(n, &inst.h),
        _ => Hypergraph::intersection(&inst.h, inst.k_or_err()?),
    })
}

/// Oracle plus the structural claims recorded in the provenance.
pub fn verify_support(kind: SupportKind, inst: &Instance, s: &Support) -> CmdResult<()> {
    if s.provenance.kind != kind {
        return Err(Failure::Oracle(json!({
            "error": "kind-mismatch", "expected": kind.as_str(), "found": s.provenance.kind.as_str(),
        })));
    }
    let hg = hypergraph(kind, inst)?;
    match check_support(&hg, s) {
        Err(e) => return Err(Failure::Oracle(json!({ "error": "labels", "message": e.to_string() }))),
        Ok(Some(v)) => return Err(Failure::Oracle(violation_json(&v))),
        Ok(None) => {}
    }
    if kind.is_outerplanar() && !is_outerplanar(&s.graph()) {
        return Err(Failure::Oracle(json!({ "error": "support-not-outerplanar" })));
    }
    if let (Some(w), Some(b)) = (s.provenance.width, s.provenance.width_bound) {
        if w as u64 > b {
            return Err(Failure::Oracle(json!({ "error": "width-bound", "width": w, "bound": b })));
        }
    }
    Ok(())
}

pub fn cmd_build(a: &BuildArgs) -> CmdResult<()> {
    let inst = read_instance(&a.input)?;
    let td = || decomposition(&inst.graph, a.td.as_deref(), a.td_mode, a.exact_limit);
    let (support, audit) = build_support(a.kind, &inst, td)?;
    write_json(&SupportJson::from_support(&support), a.output.as_deref())?;
    if let Some(p) = &a.dot {
        write_text(&support_dot(&support), Some(p))?;
    }
    if let (Some(p), Some(audit)) = (&a.ledger, audit) {
        write_json(&audit, Some(p))?;
    }
    if a.verify {
        verify_support(a.kind.into(), &inst, &support)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    PrimalLb,
    DualLb,
    CliqueRandom,
    OuterplanarRandom,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: GenFamily,
    /// Lower-bound parameter.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub t: usize,
    /// Host size; defaults to 4(t+1) for cliques and 20 for outerplanar.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub members: usize,
    /// Size of K; no K family when absent.
    #[arg(long)]
    pub k_members: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    pub red_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Writes the generator's own decomposition (clique-random only).
    #[arg(long)]
    pub td_out: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

fn need_m(a: &GenArgs) -> CmdResult<usize> {
    a.m.ok_or_else(|| Failure::Input("--m is required for lower-bound families".into()))
}

pub fn generate(a: &GenArgs) -> CmdResult<(Instance, Option<TreeDecomposition>)> {
    Ok(match a.family {
        GenFamily::PrimalLb => {
            let lb = gen_primal_lb(need_m(a)?)?;
            let s = lb.system;
            let inst =
                Instance { graph: s.graph, coloring: Some(s.coloring), h: s.h.members().to_vec(), k: None };
            (inst, None)
        }
        GenFamily::DualLb => {
            let s = gen_dual_lb(need_m(a)?)?.system;
            (Instance { graph: s.graph, coloring: None, h: s.h.members().to_vec(), k: None }, None)
        }
        GenFamily::CliqueRandom => {
            let mut p = CliqueParams::new(a.t, a.n.unwrap_or(4 * (a.t + 1)), a.members, a.seed);
            p.k_members = a.k_members;
            p.red_fraction = a.red_fraction;
            let c = gen_clique_system(&p)?;
            let inst = Instance {
                graph: c.graph,
                coloring: Some(c.coloring),
                h: c.h.members().to_vec(),
                k: c.k.map(|k| k.members().to_vec()),
            };
            (inst, Some(c.td))
        }
        GenFamily::OuterplanarRandom => {
            let o = gen_outerplanar_system(a.n.unwrap_or(20), a.members, a.k_members.unwrap_or(0), a.seed)?;
            let k = a.k_members.map(|_| o.k.members().to_vec());
            (Instance { graph: o.graph, coloring: None, h: o.h.members().to_vec(), k }, None)
        }
    })
}

pub fn cmd_gen(a: &GenArgs) -> CmdResult<()> {
    let (inst, td) = generate(a)?;
    write_json(&inst.to_json(), a.output.as_deref())?;
    if let Some(p) = &a.td_out {
        let td = td.ok_or_else(|| Failure::Input("--td-out needs --family clique-random".into()))?;
        write_json(&DecompositionJson::from_td(&td), Some(p))?;
    }
    if let Some(p) = &a.dot {
        write_text(&graph_dot(&inst.graph, inst.coloring.as_ref()), Some(p))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Nonpiercing,
    Axax,
    Abab,
    StrongAxax,
    KEasy,
    Easy,
    Outerplanar,
    ExactTreewidth,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub property: Property,
    #[arg(long)]
    pub input: PathBuf,
    /// Decomposition for easy / k-easy; built from the host when absent.
    #[arg(long)]
    pub td: Option<PathBuf>,
    #[arg(long, default_value_t = TREEWIDTH_LIMIT)]
    pub limit: usize,
    /// For exact-treewidth: the property holds iff the width is at most this.
    #[arg(long)]
    pub max: Option<usize>,
}

/// Verdict of a check: the value printed on stdout and the witness, if
/// the property fails.
pub struct Verdict {
    pub holds: bool,
    pub value: Option<Value>,
    pub witness: Option<Value>,
}

impl Verdict {
    fn from_witness(w: Option<Value>) -> Self {
        Verdict { holds: w.is_none(), value: None, witness: w }
    }
}

fn cycle_system(inst: &Instance) -> CmdResult<(OuterCycle, CycleSystem)> {
    let oc = outer_cycle(&inst.graph)?;
    let project = |f: &[Vec<usize>]| f.iter().map(|m| oc.project(m)).collect::<Vec<_>>();
    let k = inst.k.as_deref().map(project).unwrap_or_default();
    let cs = CycleSystem::new(inst.graph.vertex_count(), project(&inst.h), k)?;
    Ok((oc, cs))
}

fn host_pattern(w: PatternWitness, oc: &OuterCycle) -> Value {
    let mut w = w;
    w.vertices = w.vertices.map(|p| oc.order[p]);
    pattern_json(&w)
}

fn pattern_check(
    inst: &Instance,
    f: fn(&CycleSystem, FamilyName) -> Option<PatternWitness>,
    name: &str,
) -> CmdResult<Verdict> {
    let (oc, cs) = cycle_system(inst)?;
    let w = [FamilyName::H, FamilyName::K]
        .into_iter()
        .find_map(|fam| f(&cs, fam))
        .map(|w| json!({ "error": name, "witness": host_pattern(w, &oc) }));
    Ok(Verdict::from_witness(w))
}

pub fn check(a: &CheckArgs, inst: &Instance) -> CmdResult<Verdict> {
    let td = || decomposition(&inst.graph, a.td.as_deref(), TdMode::Auto, a.limit);
    Ok(match a.property {
        Property::Nonpiercing => {
            let mut fams = vec![(FamilyName::H, inst.h.clone())];
            fams.extend(inst.k.clone().map(|k| (FamilyName::K, k)));
            let mut witness = None;
            for (name, members) in fams {
                let f = SubgraphFamily::new(name, members)?;
                if let NonPiercing::Violated { first, second } = is_non_piercing(&inst.graph, &f)? {
                    witness = Some(json!({
                        "error": "piercing", "family": name.to_string(), "first": first, "second": second,
                    }));
                    break;
                }
            }
            Verdict::from_witness(witness)
        }
        Property::Axax => pattern_check(inst, classify_axax, "axax")?,
        Property::Abab => pattern_check(inst, classify_abab, "abab")?,
        Property::StrongAxax => {
            inst.k_or_err()?;
            let (oc, cs) = cycle_system(inst)?;
            let w = classify_strong_axax(&cs).map(|w| {
                let w = match w {
                    StrongAxaxWitness::Axax(p) => StrongAxaxWitness::Axax(PatternWitness {
                        vertices: p.vertices.map(|v| oc.order[v]),
                        ..p
                    }),
                    StrongAxaxWitness::Intersection { h, k, vertices } => {
                        StrongAxaxWitness::Intersection { h, k, vertices: vertices.map(|v| oc.order[v]) }
                    }
                };
                json!({ "error": "strong-axax", "witness": strong_json(&w) })
            });
            Verdict::from_witness(w)
        }
        Property::Easy => {
            let r = is_easy(&inst.graph_system()?, &td()?)?;
            Verdict::from_witness(r.witness.map(|(node, adhesion, member)| {
                json!({ "error": "not-easy", "node": node, "adhesion": adhesion, "member": member })
            }))
        }
        Property::KEasy => {
            let r = is_k_easy(&inst.intersection_system()?, &td()?)?;
            Verdict::from_witness(r.witness.map(|(k, adhesion, node)| {
                json!({ "error": "not-k-easy", "k": k, "adhesion": adhesion, "node": node })
            }))
        }
        Property::Outerplanar => {
            let holds = is_outerplanar(&inst.graph);
            Verdict { holds, value: None, witness: (!holds).then(|| json!({ "error": "not-outerplanar" })) }
        }
        Property::ExactTreewidth => {
            let w = exact_treewidth(&inst.graph, a.limit)?;
            let holds = a.max.is_none_or(|m| w <= m);
            let witness = (!holds).then(|| json!({ "error": "treewidth", "width": w, "max": a.max }));
            Verdict { holds, value: Some(json!(w)), witness }
        }
    })
}

fn property_name(p: Property) -> String {
    p.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

pub fn cmd_check(a: &CheckArgs) -> CmdResult<()> {
    let inst = read_instance(&a.input)?;
    let v = check(a, &inst)?;
    let mut line = json!({ "property": property_name(a.property), "holds": v.holds });
    if let Some(x) = v.value {
        line["value"] = x;
    }
    println!("{line}");
    match v.witness {
        Some(w) => Err(Failure::Precondition(w)),
        None => Ok(()),
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub support: PathBuf,
    /// Expected kind; taken from the support's provenance when absent.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
}

pub fn cmd_verify(a: &VerifyArgs) -> CmdResult<()> {
    let inst = read_instance(&a.instance)?;
    let s = read_support(&a.support)?;
    let kind = a.kind.map_or(s.provenance.kind, SupportKind::from);
    verify_support(kind, &inst, &s)?;
    println!("{}", json!({ "kind": kind.as_str(), "valid": true }));
    Ok(())
}
