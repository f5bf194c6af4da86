//! Reduction to integral data through the covering quiver over Γ×(ℂ/ℤ).
//!
//! Adjacency: an edge `e: i → j` lifts to `(i,[z]) → (j,[w])` when
//! `φ_e ≡ z − w (mod ℤ)`. A ghost of a `j`-strand at `a + φ_e` then lands in
//! the coset of the tail, which is what makes `φ′ = φ̃ + dη` integral with
//! `(dη)_e = η(head) − η(tail)` and longitudes shifted by `−η`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{KlrwError, Result};
use crate::quiver::{DimensionData, Edge, Flavour, FlavouredQuiver, Quiver, INF};
use crate::scalar::{coset_eq, ExactScalar, SymbolTable};
use crate::seq::{from_weight, weight_of, FlavouredSequence};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoverVertex {
    pub base: String,
    /// canonical representative, rational part in [0,1)
    pub coset: ExactScalar,
}

impl CoverVertex {
    pub fn new(base: &str, z: &ExactScalar) -> Self {
        CoverVertex { base: base.to_string(), coset: z.canonical_rep() }
    }

    /// Vertex id used when the cover is treated as a quiver.
    pub fn name(&self) -> String {
        format!("{}[{}]", self.base, self.coset)
    }
}

impl fmt::Display for CoverVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},[{}])", self.base, self.coset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverEdge {
    pub id: String,
    pub base: String,
    pub tail: CoverVertex,
    /// None for the framing vertex.
    pub head: Option<CoverVertex>,
}

#[derive(Clone, Debug)]
pub struct Cover {
    pub vertices: Vec<CoverVertex>,
    pub edges: Vec<CoverEdge>,
    pub v_tilde: BTreeMap<CoverVertex, i64>,
    pub w_tilde: BTreeMap<CoverVertex, i64>,
    pub phi_tilde: BTreeMap<String, ExactScalar>,
    pub symbols: SymbolTable,
}

fn find_vertex(vs: &[CoverVertex], base: &str, z: &ExactScalar, t: &SymbolTable) -> Result<Option<usize>> {
    for (i, v) in vs.iter().enumerate() {
        if v.base == base && coset_eq(&v.coset, z, t)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Builds the occupied part of the cover for the orbit of `x`.
pub fn build_cover(fq: &FlavouredQuiver, x: &BTreeMap<String, Vec<ExactScalar>>) -> Result<Cover> {
    let t = &fq.symbols;
    let mut vertices: Vec<CoverVertex> = Vec::new();
    let mut v_tilde = BTreeMap::new();
    for base in fq.quiver.gauge_vertices() {
        let Some(xs) = x.get(base) else { continue };
        for z in xs {
            let idx = match find_vertex(&vertices, base, z, t)? {
                Some(i) => i,
                None => {
                    vertices.push(CoverVertex::new(base, z));
                    vertices.len() - 1
                }
            };
            *v_tilde.entry(vertices[idx].clone()).or_insert(0) += 1;
        }
    }
    for k in x.keys() {
        if fq.quiver.vertex_index(k).is_none() {
            return Err(KlrwError::parse(format!("unknown vertex {k}")));
        }
    }
    vertices.sort();
    let mut edges = Vec::new();
    let mut phi_tilde = BTreeMap::new();
    let mut w_tilde = BTreeMap::new();
    for e in &fq.quiver.edges {
        let phi = fq.phi(&e.id);
        if Quiver::is_new(e) {
            if let Some(i) = find_vertex(&vertices, &e.tail, &phi, t)? {
                let tail = vertices[i].clone();
                *w_tilde.entry(tail.clone()).or_insert(0) += 1;
                edges.push(CoverEdge { id: e.id.clone(), base: e.id.clone(), tail, head: None });
                phi_tilde.insert(e.id.clone(), phi);
            }
            continue;
        }
        for tail in vertices.iter().filter(|v| v.base == e.tail) {
            let w = &tail.coset - &phi;
            if let Some(j) = find_vertex(&vertices, &e.head, &w, t)? {
                let id = format!("{}[{}]", e.id, tail.coset);
                edges.push(CoverEdge {
                    id: id.clone(),
                    base: e.id.clone(),
                    tail: tail.clone(),
                    head: Some(vertices[j].clone()),
                });
                phi_tilde.insert(id, phi.clone());
            }
        }
    }
    Ok(Cover { vertices, edges, v_tilde, w_tilde, phi_tilde, symbols: fq.symbols.clone() })
}

#[derive(Clone, Debug)]
pub struct Integralized {
    pub eta: BTreeMap<CoverVertex, ExactScalar>,
    pub phi_prime: BTreeMap<String, ExactScalar>,
}

pub fn integralize(cover: &Cover) -> Result<Integralized> {
    let eta: BTreeMap<CoverVertex, ExactScalar> =
        cover.vertices.iter().map(|v| (v.clone(), v.coset.clone())).collect();
    let mut phi_prime = BTreeMap::new();
    for e in &cover.edges {
        let eh = e.head.as_ref().map_or_else(ExactScalar::zero, |h| eta[h].clone());
        let d = &eh - &eta[&e.tail];
        let p = &cover.phi_tilde[&e.id] + &d;
        if !p.is_integer() {
            return Err(KlrwError::NonTrivializable(e.id.clone()));
        }
        phi_prime.insert(e.id.clone(), p);
    }
    Ok(Integralized { eta, phi_prime })
}

/// The cover as a flavoured quiver with the integral flavour.
pub fn cover_quiver(cover: &Cover, int: &Integralized) -> FlavouredQuiver {
    let q = Quiver {
        vertices: cover.vertices.iter().map(CoverVertex::name).chain([INF.to_string()]).collect(),
        edges: cover
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id.clone(),
                tail: e.tail.name(),
                head: e.head.as_ref().map_or_else(|| INF.to_string(), CoverVertex::name),
            })
            .collect(),
    };
    let dims = DimensionData {
        v: cover.v_tilde.iter().map(|(k, x)| (k.name(), *x)).collect(),
        w: cover.w_tilde.iter().map(|(k, x)| (k.name(), *x)).collect(),
    };
    FlavouredQuiver {
        quiver: q,
        dims,
        phi: Flavour { values: int.phi_prime.clone() },
        symbols: cover.symbols.clone(),
    }
}

/// Lifts a sequence to the cover: labels `(i,[a])`, longitudes `a − η`.
/// Returns the cover quiver and the lifted sequence in default order.
pub fn transport(s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<(FlavouredQuiver, FlavouredSequence)> {
    let cover = build_cover(fq, &weight_of(s))?;
    let int = integralize(&cover)?;
    let cq = cover_quiver(&cover, &int);
    let mut gamma: BTreeMap<String, Vec<ExactScalar>> = BTreeMap::new();
    for (l, a) in s.labels.iter().zip(&s.longitudes) {
        let i = find_vertex(&cover.vertices, l, a, &fq.symbols)?
            .ok_or_else(|| KlrwError::CoverMismatch(format!("({l},{a})")))?;
        let v = &cover.vertices[i];
        gamma.entry(v.name()).or_default().push(a - &int.eta[v]);
    }
    let lifted = from_weight(&gamma, &cq)?;
    Ok((cq, lifted))
}

/// Inverse of [`transport`] given the cover data: drops the coset from the
/// label and shifts back by `η`.
pub fn transport_back(
    lifted: &FlavouredSequence,
    cover_fq: &FlavouredQuiver,
    fq: &FlavouredQuiver,
) -> Result<FlavouredSequence> {
    let _ = cover_fq;
    let mut gamma: BTreeMap<String, Vec<ExactScalar>> = BTreeMap::new();
    for (l, a) in lifted.labels.iter().zip(&lifted.longitudes) {
        let (base, coset) = split_name(l, fq)?;
        gamma.entry(base).or_default().push(a + &coset);
    }
    from_weight(&gamma, fq)
}

fn split_name(name: &str, fq: &FlavouredQuiver) -> Result<(String, ExactScalar)> {
    let bad = || KlrwError::CoverMismatch(name.to_string());
    let open = name.rfind('[').ok_or_else(bad)?;
    let base = &name[..open];
    let coset = name[open + 1..].strip_suffix(']').ok_or_else(bad)?;
    let mut t = fq.symbols.clone();
    Ok((base.to_string(), ExactScalar::parse(coset, &mut t)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct CategoryOGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    pub truncated: bool,
}

/// Vertices of Γ×(ℂ/ℤ) connected to some `(i,[φ_e])` for a new edge `e` at `i`.
pub fn category_o_graph(fq: &FlavouredQuiver, max_vertices: usize) -> Result<CategoryOGraph> {
    let t = &fq.symbols;
    let mut found: Vec<CoverVertex> = Vec::new();
    let mut queue = VecDeque::new();
    let mut truncated = false;
    let mut push = |v: CoverVertex, found: &mut Vec<CoverVertex>, queue: &mut VecDeque<CoverVertex>| -> Result<()> {
        if find_vertex(found, &v.base, &v.coset, t)?.is_none() {
            if found.len() >= max_vertices {
                truncated = true;
                return Ok(());
            }
            found.push(v.clone());
            queue.push_back(v);
        }
        Ok(())
    };
    for e in fq.quiver.new_edges() {
        push(CoverVertex::new(&e.tail, &fq.phi(&e.id)), &mut found, &mut queue)?;
    }
    let mut edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        for e in fq.quiver.old_edges() {
            let phi = fq.phi(&e.id);
            if e.tail == v.base {
                let w = CoverVertex::new(&e.head, &(&v.coset - &phi));
                if e.head == e.tail && coset_eq(&w.coset, &v.coset, t)? {
                    return Err(KlrwError::EdgeLoopInCover(v.to_string()));
                }
                edges.push((e.id.clone(), v.to_string(), w.to_string()));
                push(w, &mut found, &mut queue)?;
            }
            if e.head == v.base {
                let w = CoverVertex::new(&e.tail, &(&v.coset + &phi));
                push(w, &mut found, &mut queue)?;
            }
        }
    }
    found.sort();
    edges.sort();
    edges.dedup();
    Ok(CategoryOGraph { vertices: found.iter().map(|v| v.to_string()).collect(), edges, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::parse_quiver_spec;

    pub const KRONECKER_COVER: &str = r#"{"vertices":["α","β"],
        "edges":[{"id":"e","tail":"β","head":"α"},{"id":"f","tail":"α","head":"β"},
                 {"id":"r","tail":"α","head":"∞"},{"id":"r'","tail":"α","head":"∞"},
                 {"id":"s","tail":"β","head":"∞"}],
        "v":{"α":5,"β":6},
        "flavour":{"e":"1/3","f":"0","r":"0","r'":"sym:sqrt2~1.41421","s":"1/2"}}"#;

    fn xs(fq: &mut FlavouredQuiver, a: &[&str], b: &[&str]) -> BTreeMap<String, Vec<ExactScalar>> {
        let mut x = BTreeMap::new();
        x.insert("α".into(), a.iter().map(|s| ExactScalar::parse(s, &mut fq.symbols).unwrap()).collect());
        x.insert("β".into(), b.iter().map(|s| ExactScalar::parse(s, &mut fq.symbols).unwrap()).collect());
        x
    }

    #[test]
    fn kronecker_cover_dimensions() {
        let mut fq = parse_quiver_spec(KRONECKER_COVER).unwrap();
        let x = xs(&mut fq, &["0", "1/3", "1/2", "2/3", "2/3"], &["0", "1/6", "1/3", "1/3", "1/2", "2/3"]);
        let c = build_cover(&fq, &x).unwrap();
        assert_eq!(c.vertices.len(), 9);
        let get = |m: &BTreeMap<CoverVertex, i64>, b: &str, n: i64, d: i64| {
            m.get(&CoverVertex::new(b, &ExactScalar::frac(n, d))).copied().unwrap_or(0)
        };
        assert_eq!(get(&c.v_tilde, "α", 2, 3), 2);
        assert_eq!(get(&c.v_tilde, "β", 1, 3), 2);
        assert_eq!(get(&c.v_tilde, "β", 1, 6), 1);
        assert_eq!(get(&c.w_tilde, "α", 0, 1), 1);
        assert_eq!(get(&c.w_tilde, "β", 1, 2), 1);
        assert_eq!(c.w_tilde.values().sum::<i64>(), 2);
        let int = integralize(&c).unwrap();
        assert!(int.phi_prime.values().all(ExactScalar::is_integer));
    }

    #[test]
    fn integral_input_is_trivial() {
        let mut fq = parse_quiver_spec(KRONECKER_COVER).unwrap();
        fq.phi.values.insert("e".into(), ExactScalar::int(1));
        fq.phi.values.insert("s".into(), ExactScalar::int(0));
        let x = xs(&mut fq, &["0", "3"], &["-1"]);
        let c = build_cover(&fq, &x).unwrap();
        assert_eq!(c.vertices.len(), 2);
        assert_eq!(c.v_tilde.values().sum::<i64>(), 3);
        assert_eq!(c.w_tilde.values().sum::<i64>(), 2);
        let int = integralize(&c).unwrap();
        assert!(int.eta.values().all(ExactScalar::is_zero));
        for (k, v) in &int.phi_prime {
            assert_eq!(v, &c.phi_tilde[k]);
        }
        let empty = build_cover(&fq, &BTreeMap::new()).unwrap();
        assert!(empty.vertices.is_empty() && empty.edges.is_empty());
    }

    #[test]
    fn coboundary_arithmetic() {
        // f: α → β with φ = 1/3 lifts (α,[0]) → (β,[2/3]); φ′ = 1/3 + 2/3 − 0
        let mut fq = parse_quiver_spec(KRONECKER_COVER).unwrap();
        fq.phi.values.insert("f".into(), ExactScalar::frac(1, 3));
        let x = xs(&mut fq, &["0"], &["2/3"]);
        let c = build_cover(&fq, &x).unwrap();
        let int = integralize(&c).unwrap();
        assert_eq!(int.phi_prime["f[0]"], ExactScalar::int(1));
    }

    #[test]
    fn transport_single_corporeal() {
        let mut fq = parse_quiver_spec(KRONECKER_COVER).unwrap();
        let x = xs(&mut fq, &["1/2"], &[]);
        let s = from_weight(&x, &fq).unwrap();
        let (cq, lifted) = transport(&s, &fq).unwrap();
        assert_eq!(lifted.labels, vec!["α[1/2]".to_string()]);
        assert_eq!(lifted.longitudes, vec![ExactScalar::zero()]);
        let back = transport_back(&lifted, &cq, &fq).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn category_o_examples() {
        let mut fq = parse_quiver_spec(KRONECKER_COVER).unwrap();
        for e in ["e", "f", "r", "r'", "s"] {
            fq.phi.values.insert(e.into(), ExactScalar::int(0));
        }
        let g = category_o_graph(&fq, 64).unwrap();
        assert_eq!(g.vertices, vec!["(α,[0])".to_string(), "(β,[0])".to_string()]);
        let jordan = r#"{"vertices":["0"],"edges":[{"id":"t","tail":"0","head":"0"},
            {"id":"r","tail":"0","head":"∞"}],"flavour":{"t":"1/2","r":"0"}}"#;
        let g = category_o_graph(&parse_quiver_spec(jordan).unwrap(), 64).unwrap();
        assert_eq!(g.vertices, vec!["(0,[0])".to_string(), "(0,[1/2])".to_string()]);
        let unframed = r#"{"vertices":["0"],"edges":[{"id":"t","tail":"0","head":"0"}],"flavour":{"t":"1/2"}}"#;
        assert!(category_o_graph(&parse_quiver_spec(unframed).unwrap(), 64).unwrap().vertices.is_empty());
        let looped = r#"{"vertices":["0"],"edges":[{"id":"t","tail":"0","head":"0"},
            {"id":"r","tail":"0","head":"∞"}],"flavour":{"t":"1"}}"#;
        assert!(matches!(
            category_o_graph(&parse_quiver_spec(looped).unwrap(), 64),
            Err(KlrwError::EdgeLoopInCover(_))
        ));
    }
}
