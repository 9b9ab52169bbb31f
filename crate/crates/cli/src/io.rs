//! File formats: instance, decomposition and support JSON, DOT export, and
//! the mapping from library errors to exit codes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use npsupport::cyclesupport::{PatternWitness, StrongAxaxWitness};
use npsupport::verify::SupportViolation;
use npsupport::{
    Color, Coloring, Error, FamilyName, Graph, GraphSystem, IntersectionSystem, Provenance, SubgraphFamily,
    Support, SupportKind, TreeDecomposition,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 1;

/// Why a command stopped. Witnesses travel as JSON and are printed on one
/// line to stderr.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Precondition(Value),
    Oracle(Value),
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Precondition(_) => EXIT_PRECONDITION,
            Failure::Oracle(_) => EXIT_ORACLE,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn report(&self) -> Value {
        match self {
            Failure::Input(m) => json!({ "error": "input", "message": m }),
            Failure::Precondition(w) | Failure::Oracle(w) => w.clone(),
            Failure::Internal(m) => json!({ "error": "internal", "message": m }),
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

pub fn pattern_json(w: &PatternWitness) -> Value {
    json!({ "family": w.family.to_string(), "first": w.first, "second": w.second, "vertices": w.vertices })
}

pub fn strong_json(w: &StrongAxaxWitness) -> Value {
    match w {
        StrongAxaxWitness::Axax(p) => json!({ "clause": "axax", "pair": pattern_json(p) }),
        StrongAxaxWitness::Intersection { h, k, vertices } => {
            json!({ "clause": "intersection", "h": h, "k": k, "vertices": vertices })
        }
    }
}

pub fn violation_json(v: &SupportViolation) -> Value {
    json!({ "error": "oracle", "hyperedge": v.hyperedge, "components": v.components })
}

/// Sorts a library error into input errors and precondition failures.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        let pre = Failure::Precondition;
        match e {
            Error::VertexOutOfRange { .. }
            | Error::SelfLoop(_)
            | Error::EmptyMember { .. }
            | Error::ColoringLength { .. }
            | Error::InvalidDecomposition(_)
            | Error::Unrooted
            | Error::NoSuchNode(_)
            | Error::InvalidParameter(_)
            | Error::LabelMismatch(_)
            | Error::SuccessorMissing(_) => Failure::Input(msg),
            Error::DisconnectedMember { family, index } => {
                pre(json!({ "error": "disconnected-member", "family": family.to_string(), "member": index }))
            }
            Error::TooLarge { n, limit } => pre(json!({ "error": "too-large", "n": n, "limit": limit })),
            Error::NotEasy { node, adhesion, member } => {
                pre(json!({ "error": "not-easy", "node": node, "adhesion": adhesion, "member": member }))
            }
            Error::Piercing { first, second } => {
                pre(json!({ "error": "piercing", "first": first, "second": second }))
            }
            Error::NotAxaxFree(w) => pre(json!({ "error": "axax", "witness": pattern_json(&w) })),
            Error::NotStrongAxaxFree(w) => pre(json!({ "error": "strong-axax", "witness": strong_json(&w) })),
            Error::NotOuterplanar => pre(json!({ "error": "not-outerplanar" })),
            Error::MultiRunMember(m) => pre(json!({ "error": "multi-run-member", "member": m })),
            Error::Internal(m) => Failure::Internal(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

/// Raw instance as read from disk. Members are not checked for
/// connectivity here; the outerplanar builders only look at their traces on
/// the outer cycle and accept any vertex sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub graph: GraphJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<String>>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<usize>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Vec<usize>>>,
}

/// A parsed instance with the host and colors checked.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub coloring: Option<Coloring>,
    pub h: Vec<Vec<usize>>,
    pub k: Option<Vec<Vec<usize>>>,
}

impl Instance {
    pub fn coloring_or_blue(&self) -> Coloring {
        self.coloring.clone().unwrap_or_else(|| Coloring::all_blue(self.graph.vertex_count()))
    }

    pub fn k_or_err(&self) -> CmdResult<&[Vec<usize>]> {
        self.k.as_deref().ok_or_else(|| Failure::Input("instance has no K family".into()))
    }

    pub fn graph_system(&self) -> CmdResult<GraphSystem> {
        let h = SubgraphFamily::new(FamilyName::H, self.h.clone())?;
        Ok(GraphSystem::new(self.graph.clone(), self.coloring.clone(), h)?)
    }

    pub fn intersection_system(&self) -> CmdResult<IntersectionSystem> {
        let h = SubgraphFamily::new(FamilyName::H, self.h.clone())?;
        let k = SubgraphFamily::new(FamilyName::K, self.k_or_err()?.to_vec())?;
        Ok(IntersectionSystem::new(self.graph.clone(), h, k)?)
    }

    pub fn to_json(&self) -> InstanceJson {
        InstanceJson {
            graph: graph_json(&self.graph),
            coloring: self.coloring.as_ref().map(|c| {
                c.colors().iter().map(|&x| if x == Color::Blue { "b" } else { "r" }.to_string()).collect()
            }),
            h: self.h.clone(),
            k: self.k.clone(),
        }
    }
}

pub fn graph_json(g: &Graph) -> GraphJson {
    GraphJson { n: g.vertex_count(), edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect() }
}

pub fn graph_from_json(g: &GraphJson) -> CmdResult<Graph> {
    Ok(Graph::from_edges(g.n, g.edges.iter().map(|e| (e[0], e[1])))?)
}

fn check_members(n: usize, fam: &[Vec<usize>], name: &str) -> CmdResult<Vec<Vec<usize>>> {
    fam.iter()
        .enumerate()
        .map(|(i, m)| {
            if m.is_empty() {
                return Err(Failure::Input(format!("member {i} of {name} is empty")));
            }
            if let Some(&v) = m.iter().find(|&&v| v >= n) {
                return Err(Failure::Input(format!("member {i} of {name} uses vertex {v}, n = {n}")));
            }
            let mut m = m.clone();
            m.sort_unstable();
            m.dedup();
            Ok(m)
        })
        .collect()
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Failure;

    fn try_from(j: InstanceJson) -> CmdResult<Self> {
        let graph = graph_from_json(&j.graph)?;
        let n = graph.vertex_count();
        let coloring = match j.coloring {
            None => None,
            Some(cs) => {
                if cs.len() != n {
                    return Err(Failure::Input(format!("coloring has {} entries, n = {n}", cs.len())));
                }
                let colors = cs
                    .iter()
                    .map(|c| match c.as_str() {
                        "b" => Ok(Color::Blue),
                        "r" => Ok(Color::Red),
                        other => Err(Failure::Input(format!("unknown color {other:?}"))),
                    })
                    .collect::<CmdResult<Vec<_>>>()?;
                Some(Coloring::new(colors))
            }
        };
        let h = check_members(n, &j.h, "H")?;
        let k = j.k.as_deref().map(|k| check_members(n, k, "K")).transpose()?;
        Ok(Instance { graph, coloring, h, k })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub id: usize,
    pub bag: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub root: usize,
    pub nodes: Vec<NodeJson>,
    pub tree_edges: Vec<[usize; 2]>,
}

impl DecompositionJson {
    pub fn from_td(td: &TreeDecomposition) -> Self {
        DecompositionJson {
            root: td.root().unwrap_or(0),
            nodes: td.bags().iter().enumerate().map(|(id, b)| NodeJson { id, bag: b.clone() }).collect(),
            tree_edges: td.tree_edges().iter().map(|&(x, y)| [x, y]).collect(),
        }
    }

    /// Node ids must be a permutation of `0..nodes.len()`.
    pub fn to_td(&self) -> CmdResult<TreeDecomposition> {
        let m = self.nodes.len();
        let mut bags = vec![None; m];
        for node in &self.nodes {
            match bags.get_mut(node.id) {
                Some(slot @ None) => {
                    let mut b = node.bag.clone();
                    b.sort_unstable();
                    b.dedup();
                    *slot = Some(b);
                }
                Some(Some(_)) => return Err(Failure::Input(format!("node id {} repeated", node.id))),
                None => return Err(Failure::Input(format!("node id {} out of range", node.id))),
            }
        }
        if m > 0 && self.root >= m {
            return Err(Failure::Input(format!("root {} is not a node", self.root)));
        }
        if let Some(e) = self.tree_edges.iter().find(|e| e[0] >= m || e[1] >= m) {
            return Err(Failure::Input(format!("tree edge {e:?} uses an unknown node")));
        }
        let bags = bags.into_iter().map(Option::unwrap).collect();
        let edges = self.tree_edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(TreeDecomposition::new(bags, edges, (m > 0).then_some(self.root)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceJson {
    pub kind: String,
    pub width_bound_claimed: Option<u64>,
    pub width_achieved: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportJson {
    pub labels: Vec<usize>,
    /// Pairs of positions into `labels`.
    pub edges: Vec<[usize; 2]>,
    pub provenance: ProvenanceJson,
}

impl SupportJson {
    pub fn from_support(s: &Support) -> Self {
        let p = &s.provenance;
        SupportJson {
            labels: s.labels.clone(),
            edges: s.edges.iter().map(|&(i, j)| [i, j]).collect(),
            provenance: ProvenanceJson {
                kind: p.kind.as_str().to_string(),
                width_bound_claimed: p.width_bound,
                width_achieved: p.width,
                embedding: p.embedding.clone(),
            },
        }
    }

    pub fn to_support(&self) -> CmdResult<Support> {
        let kind: SupportKind = self.provenance.kind.parse()?;
        let m = self.labels.len();
        let mut s = Support::new(kind, self.labels.clone());
        for e in &self.edges {
            if e[0] >= m || e[1] >= m || e[0] == e[1] {
                return Err(Failure::Input(format!("support edge {e:?} is not a pair of positions")));
            }
            s.add_edge(e[0], e[1]);
        }
        s.provenance = Provenance {
            kind,
            width_bound: self.provenance.width_bound_claimed,
            width: self.provenance.width_achieved,
            embedding: self.provenance.embedding.clone(),
        };
        Ok(s)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CmdResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn read_instance(path: &Path) -> CmdResult<Instance> {
    read_json::<InstanceJson>(path)?.try_into()
}

pub fn read_td(path: &Path) -> CmdResult<TreeDecomposition> {
    read_json::<DecompositionJson>(path)?.to_td()
}

pub fn read_support(path: &Path) -> CmdResult<Support> {
    read_json::<SupportJson>(path)?.to_support()
}

/// Writes one-line JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CmdResult<()> {
    let text = serde_json::to_string(value).map_err(|e| Failure::Internal(e.to_string()))?;
    write_text(&(text + "\n"), path)
}

pub fn write_text(text: &str, path: Option<&Path>) -> CmdResult<()> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Undirected DOT with optional per-vertex names and colors.
pub fn dot(
    name: &str,
    n: usize,
    edges: &[(usize, usize)],
    names: Option<&[usize]>,
    colors: Option<&Coloring>,
) -> String {
    let mut out = format!("graph {name} {{\n");
    for v in 0..n {
        let label = names.map_or(v, |l| l[v]);
        let _ = write!(out, "  {v} [label=\"{label}\"");
        if let Some(c) = colors {
            let fill = if c.is_blue(v) { "lightblue" } else { "salmon" };
            let _ = write!(out, ", style=filled, fillcolor={fill}");
        }
        out.push_str("];\n");
    }
    for &(u, v) in edges {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

pub fn support_dot(s: &Support) -> String {
    let edges: Vec<(usize, usize)> = s.edges.iter().copied().collect();
    dot("support", s.labels.len(), &edges, Some(&s.labels), None)
}

pub fn graph_dot(g: &Graph, colors: Option<&Coloring>) -> String {
    dot("host", g.vertex_count(), &g.edges(), None, colors)
}
