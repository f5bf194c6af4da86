//! Quivers, dimension data, flavours and the quiver spec file format.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{KlrwError, Result};
use crate::scalar::{ExactScalar, SymbolTable};

/// The Crawley–Boevey vertex.
pub const INF: &str = "∞";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl Quiver {
    pub fn new(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        let q = Quiver {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(id, t, h)| Edge { id: id.to_string(), tail: t.to_string(), head: h.to_string() })
                .collect(),
        };
        q.check()?;
        Ok(q)
    }

    pub fn check(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.as_str()) {
                return Err(KlrwError::parse(format!("duplicate vertex {v}")));
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for e in &self.edges {
            if !ids.insert(e.id.as_str()) {
                return Err(KlrwError::parse(format!("duplicate edge id {}", e.id)));
            }
            for end in [&e.tail, &e.head] {
                if end != INF && !seen.contains(end.as_str()) {
                    return Err(KlrwError::parse(format!("edge {} references unknown vertex {end}", e.id)));
                }
            }
            if e.tail == INF {
                return Err(KlrwError::parse(format!("edge {} starts at the framing vertex", e.id)));
            }
        }
        Ok(())
    }

    /// Vertices other than the framing vertex.
    pub fn gauge_vertices(&self) -> impl Iterator<Item = &String> {
        self.vertices.iter().filter(|v| *v != INF)
    }

    pub fn vertex_index(&self, v: &str) -> Option<usize> {
        self.gauge_vertices().position(|x| x == v)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn is_new(e: &Edge) -> bool {
        e.head == INF
    }

    pub fn old_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !Self::is_new(e))
    }

    pub fn new_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| Self::is_new(e))
    }

    pub fn has_framing_vertex(&self) -> bool {
        self.vertices.iter().any(|v| v == INF)
    }

    pub fn edge_loop(&self) -> Option<&Edge> {
        self.old_edges().find(|e| e.tail == e.head)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DimensionData {
    pub v: BTreeMap<String, i64>,
    pub w: BTreeMap<String, i64>,
}

impl DimensionData {
    pub fn v_of(&self, i: &str) -> i64 {
        self.v.get(i).copied().unwrap_or(0)
    }

    pub fn w_of(&self, i: &str) -> i64 {
        self.w.get(i).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Flavour {
    pub values: BTreeMap<String, ExactScalar>,
}

impl Flavour {
    pub fn get(&self, e: &str) -> ExactScalar {
        self.values.get(e).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn is_integral(&self) -> bool {
        self.values.values().all(ExactScalar::is_integer)
    }
}

/// Adds the framing vertex and `w_i` new edges `i -> ∞` with fresh ids.
/// Framing edges already present count towards `w_i`.
pub fn crawley_boevey(q: &Quiver, w: &BTreeMap<String, i64>) -> Quiver {
    let mut out = q.clone();
    if !out.has_framing_vertex() {
        out.vertices.push(INF.to_string());
    }
    for v in q.gauge_vertices() {
        let have = q.new_edges().filter(|e| &e.tail == v).count() as i64;
        let want = w.get(v).copied().unwrap_or(0);
        let mut k = 1;
        for _ in have..want {
            let mut id = format!("{v}:{k}");
            while out.edge(&id).is_some() {
                k += 1;
                id = format!("{v}:{k}");
            }
            out.edges.push(Edge { id, tail: v.clone(), head: INF.to_string() });
            k += 1;
        }
    }
    out
}

/// A Crawley–Boevey completed quiver with a flavour and its symbols.
#[derive(Clone, Debug, Default)]
pub struct FlavouredQuiver {
    pub quiver: Quiver,
    pub dims: DimensionData,
    pub phi: Flavour,
    pub symbols: SymbolTable,
}

impl FlavouredQuiver {
    pub fn new(q: &Quiver, dims: DimensionData, phi: Flavour, symbols: SymbolTable) -> Self {
        let quiver = crawley_boevey(q, &dims.w);
        FlavouredQuiver { quiver, dims, phi, symbols }
    }

    pub fn phi(&self, e: &str) -> ExactScalar {
        self.phi.get(e)
    }

    pub fn edge(&self, id: &str) -> Result<&Edge> {
        self.quiver.edge(id).ok_or_else(|| KlrwError::parse(format!("unknown edge {id}")))
    }

    /// The original quiver with the framing vertex and new edges removed.
    pub fn base_quiver(&self) -> Quiver {
        Quiver {
            vertices: self.quiver.gauge_vertices().cloned().collect(),
            edges: self.quiver.old_edges().cloned().collect(),
        }
    }
}

#[derive(Deserialize)]
struct RawEdge {
    id: String,
    tail: String,
    head: String,
}

#[derive(Deserialize)]
struct RawSpec {
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<RawEdge>,
    #[serde(default)]
    v: BTreeMap<String, i64>,
    #[serde(default)]
    w: BTreeMap<String, i64>,
    #[serde(default)]
    flavour: BTreeMap<String, Value>,
}

fn scalar_from_json(v: &Value, t: &mut SymbolTable) -> Result<ExactScalar> {
    match v {
        Value::String(s) => ExactScalar::parse(s, t),
        Value::Number(n) => ExactScalar::parse(&n.to_string(), t),
        other => Err(KlrwError::parse(format!("flavour value {other} is not a scalar literal"))),
    }
}

/// Parses the JSON quiver spec. Edges with head `∞` or `inf` are framing
/// edges; when present, `w` defaults to their count.
pub fn parse_quiver_spec(text: &str) -> Result<FlavouredQuiver> {
    let raw: RawSpec = serde_json::from_str(text)
        .map_err(|e| KlrwError::Parse { line: e.line(), msg: e.to_string() })?;
    let mut symbols = SymbolTable::new();
    let mut q = Quiver { vertices: raw.vertices, edges: Vec::new() };
    for e in raw.edges {
        let head = if e.head == "inf" || e.head == INF { INF.to_string() } else { e.head };
        q.edges.push(Edge { id: e.id, tail: e.tail, head });
    }
    q.check()?;
    for v in raw.v.keys().chain(raw.w.keys()) {
        if q.vertex_index(v).is_none() {
            return Err(KlrwError::parse(format!("dimension given for unknown vertex {v}")));
        }
    }
    let mut w = raw.w;
    for v in q.gauge_vertices() {
        let framing = q.new_edges().filter(|e| &e.tail == v).count() as i64;
        let given = w.get(v).copied();
        match given {
            Some(g) if g < framing => {
                return Err(KlrwError::Mismatch(format!(
                    "w[{v}] = {g} but {framing} framing edges are listed"
                )))
            }
            None if framing > 0 => {
                w.insert(v.clone(), framing);
            }
            _ => {}
        }
    }
    if raw.v.values().chain(w.values()).any(|x| *x < 0) {
        return Err(KlrwError::parse("negative dimension"));
    }
    let dims = DimensionData { v: raw.v, w };
    let mut phi = Flavour::default();
    for (k, val) in &raw.flavour {
        phi.values.insert(k.clone(), scalar_from_json(val, &mut symbols)?);
    }
    let fq = FlavouredQuiver::new(&q, dims, phi, symbols);
    for k in fq.phi.values.keys() {
        if fq.quiver.edge(k).is_none() {
            return Err(KlrwError::parse(format!("flavour given for unknown edge {k}")));
        }
    }
    Ok(fq)
}

/// Serializes back to the JSON quiver format (framing edges listed explicitly).
pub fn to_spec_json(fq: &FlavouredQuiver) -> Value {
    let edges: Vec<Value> = fq
        .quiver
        .edges
        .iter()
        .map(|e| serde_json::json!({"id": e.id, "tail": e.tail, "head": e.head}))
        .collect();
    let flavour: serde_json::Map<String, Value> = fq
        .quiver
        .edges
        .iter()
        .map(|e| (e.id.clone(), Value::String(fq.phi(&e.id).to_literal(&fq.symbols))))
        .collect();
    serde_json::json!({
        "vertices": fq.quiver.gauge_vertices().collect::<Vec<_>>(),
        "edges": edges,
        "v": fq.dims.v,
        "w": fq.dims.w,
        "flavour": flavour,
    })
}
