//! Random quivers, sequences and diagrams for property tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use klrw_core::enumerate::all_valid_sequences;
use klrw_core::klrw::diagram::{straight_line, Diagram, Move};
use klrw_core::poly::{Monomial, Poly, HBAR};
use klrw_core::quiver::{DimensionData, Flavour, FlavouredQuiver, Quiver, INF};
use klrw_core::scalar::{ExactScalar, SymbolTable, Q};
use klrw_core::seq::{CgrItem, FlavouredSequence};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn half(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> ExactScalar {
    ExactScalar::frac(rng.gen_range(2 * lo..=2 * hi), 2)
}

/// Kronecker quiver `e: β→α, f: α→β`, optionally framed at α.
pub fn kronecker(rng: &mut ChaCha8Rng, framed: bool) -> FlavouredQuiver {
    let mut edges = vec![("e", "β", "α"), ("f", "α", "β")];
    let mut dims = DimensionData::default();
    if framed {
        edges.push(("r", "α", INF));
        dims.w.insert("α".into(), 1);
    }
    let q = Quiver::new(&["α", "β"], &edges).unwrap();
    let mut phi = Flavour::default();
    for (id, _, _) in &edges {
        phi.values.insert(id.to_string(), half(rng, 0, 2));
    }
    FlavouredQuiver::new(&q, dims, phi, SymbolTable::new())
}

/// A2 quiver `e: 1→2` framed at 1.
pub fn a2(rng: &mut ChaCha8Rng) -> FlavouredQuiver {
    let q = Quiver::new(&["1", "2"], &[("e", "1", "2"), ("r", "1", INF)]).unwrap();
    let mut dims = DimensionData::default();
    dims.w.insert("1".into(), 1);
    let mut phi = Flavour::default();
    phi.values.insert("e".into(), half(rng, -1, 1));
    phi.values.insert("r".into(), half(rng, -1, 1));
    FlavouredQuiver::new(&q, dims, phi, SymbolTable::new())
}

pub fn random_quiver(rng: &mut ChaCha8Rng) -> FlavouredQuiver {
    match rng.gen_range(0..3) {
        0 => kronecker(rng, false),
        1 => kronecker(rng, true),
        _ => a2(rng),
    }
}

/// Up to `max` corporeals at longitudes in `{0, 1/2, 1}`.
pub fn random_entries(rng: &mut ChaCha8Rng, fq: &FlavouredQuiver, max: usize) -> Vec<(String, ExactScalar)> {
    let vs: Vec<String> = fq.quiver.gauge_vertices().cloned().collect();
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| (vs.choose(rng).unwrap().clone(), half(rng, 0, 1))).collect()
}

pub fn gamma(entries: &[(String, ExactScalar)]) -> BTreeMap<String, Vec<ExactScalar>> {
    let mut g: BTreeMap<String, Vec<ExactScalar>> = BTreeMap::new();
    for (v, a) in entries {
        g.entry(v.clone()).or_default().push(a.clone());
    }
    g
}

/// Dots, and sometimes a crossing of two adjacent equal corporeals.
fn with_dots(rng: &mut ChaCha8Rng, s: &FlavouredSequence) -> Diagram {
    let k = rng.gen_range(0..=2);
    let mut moves: Vec<Move> = (0..k).map(|_| Move::Dot(rng.gen_range(0..s.n()))).collect();
    let twins: Vec<usize> = (0..s.order.len().saturating_sub(1))
        .filter(|&k| match (&s.order[k], &s.order[k + 1]) {
            (CgrItem::Corporeal(a), CgrItem::Corporeal(b)) => {
                s.labels[*a] == s.labels[*b] && s.longitudes[*a] == s.longitudes[*b]
            }
            _ => false,
        })
        .collect();
    if let Some(&k) = twins.choose(rng) {
        if rng.gen_bool(0.5) {
            moves.push(Move::Swap(k));
        }
    }
    Diagram::from_moves(s, &moves).unwrap()
}

/// Straight-line diagrams through four random valid orders, with dots
/// in between.
pub fn random_diagram(rng: &mut ChaCha8Rng, fq: &FlavouredQuiver, max: usize) -> Diagram {
    let entries = random_entries(rng, fq, max);
    let all = all_valid_sequences(&entries, fq).unwrap();
    let s: Vec<&FlavouredSequence> = (0..4).map(|_| all.choose(rng).unwrap()).collect();
    let mut d = with_dots(rng, s[0]);
    for t in &s[1..] {
        let line = straight_line(&d.top, t, fq).unwrap();
        d = line.compose(&d).unwrap();
        d = with_dots(rng, &d.top).compose(&d).unwrap();
    }
    d
}

/// A random monomial in `y_0..y_{n-1}` and `ħ` of degree at most `bound`,
/// times a small rational.
pub fn random_monomial(rng: &mut ChaCha8Rng, n: usize, bound: u32) -> Poly<Q> {
    let mut m = Monomial::one();
    for _ in 0..rng.gen_range(0..=bound) {
        let v = rng.gen_range(0..=n as u32);
        let v = if v == n as u32 { HBAR } else { v };
        m = m.mul(&Monomial::var(v));
    }
    let c = Q::new(rng.gen_range(1..5).into(), rng.gen_range(1..4).into());
    Poly::monomial(m).scale(&c)
}
