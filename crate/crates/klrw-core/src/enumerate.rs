//! Enumeration of all valid orders on a labelled, longitude-assigned item set,
//! grouped into equivalence classes.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{KlrwError, Result};
use crate::quiver::FlavouredQuiver;
use crate::scalar::{real_compare, ExactScalar};
use crate::seq::{equivalent, is_valid, CgrItem, FlavouredSequence};

/// Orders with more items than this are refused.
pub const MAX_ITEMS: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Entry(usize),
    Ghost(usize, String),
    Red(String),
}

#[derive(Clone, Debug)]
pub struct SequenceClass {
    pub representative: FlavouredSequence,
    pub members: Vec<FlavouredSequence>,
}

/// Vertex label for corporeals, edge id for ghosts and reds.
pub fn pattern(s: &FlavouredSequence) -> Vec<String> {
    s.order
        .iter()
        .map(|it| match it {
            CgrItem::Corporeal(k) => s.labels[*k].clone(),
            CgrItem::Ghost(_, e) | CgrItem::Red(e) => e.clone(),
        })
        .collect()
}

/// The chain of real-part relations along the order, e.g. `α[0] < e[1] = β[1]`.
pub fn regime(s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<String> {
    let names = pattern(s);
    let longs: Vec<ExactScalar> = s.order.iter().map(|it| s.longitude(it, fq).real_part()).collect();
    let mut out = String::new();
    for (i, (n, l)) in names.iter().zip(&longs).enumerate() {
        if i > 0 {
            let rel = match real_compare(&longs[i - 1], l, &fq.symbols)? {
                Ordering::Equal => " = ",
                _ => " < ",
            };
            out.push_str(rel);
        }
        out.push_str(&format!("{n}[{}]", l.to_literal(&fq.symbols)));
    }
    Ok(out)
}

#[derive(Serialize)]
pub struct ClassReport {
    pub pattern: Vec<String>,
    pub sequence: String,
    pub regime: String,
    pub members: Vec<Vec<String>>,
}

pub fn report(c: &SequenceClass, fq: &FlavouredQuiver) -> Result<ClassReport> {
    Ok(ClassReport {
        pattern: pattern(&c.representative),
        sequence: c.representative.fmt_with(Some(fq)),
        regime: regime(&c.representative, fq)?,
        members: c.members.iter().map(pattern).collect(),
    })
}

struct Search<'a> {
    nodes: Vec<Node>,
    corporeal: Vec<bool>,
    cmp: Vec<Vec<Ordering>>,
    entries: &'a [(String, ExactScalar)],
}

impl Search<'_> {
    fn fits(&self, prefix: &[usize], x: usize) -> bool {
        prefix.iter().all(|&p| match self.cmp[p][x] {
            Ordering::Greater => false,
            Ordering::Equal => !(self.corporeal[p] && !self.corporeal[x]),
            Ordering::Less => true,
        })
    }

    fn walk(&self, prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == self.nodes.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..self.nodes.len() {
            if used[x] || !self.fits(prefix, x) {
                continue;
            }
            used[x] = true;
            prefix.push(x);
            self.walk(prefix, used, out);
            prefix.pop();
            used[x] = false;
        }
    }

    /// Corporeals are renumbered by order of appearance.
    fn to_sequence(&self, order: &[usize]) -> FlavouredSequence {
        let mut index = vec![0; self.entries.len()];
        let mut labels = Vec::new();
        let mut longitudes = Vec::new();
        for &i in order {
            if let Node::Entry(j) = self.nodes[i] {
                index[j] = labels.len();
                labels.push(self.entries[j].0.clone());
                longitudes.push(self.entries[j].1.clone());
            }
        }
        let order = order
            .iter()
            .map(|&i| match &self.nodes[i] {
                Node::Entry(j) => CgrItem::Corporeal(index[*j]),
                Node::Ghost(j, e) => CgrItem::Ghost(index[*j], e.clone()),
                Node::Red(e) => CgrItem::Red(e.clone()),
            })
            .collect();
        FlavouredSequence { labels, longitudes, order }
    }
}

/// Every valid flavoured sequence on the given `(vertex, longitude)` entries,
/// over all arrangements of the corporeals, without duplicates.
pub fn all_valid_sequences(entries: &[(String, ExactScalar)], fq: &FlavouredQuiver) -> Result<Vec<FlavouredSequence>> {
    let mut nodes = Vec::new();
    let mut longs = Vec::new();
    for (j, (v, a)) in entries.iter().enumerate() {
        if fq.quiver.vertex_index(v).is_none() {
            return Err(KlrwError::parse(format!("unknown vertex {v}")));
        }
        nodes.push(Node::Entry(j));
        longs.push(a.clone());
    }
    for (j, (v, a)) in entries.iter().enumerate() {
        for e in fq.quiver.old_edges().filter(|e| &e.head == v) {
            nodes.push(Node::Ghost(j, e.id.clone()));
            longs.push(a + &fq.phi(&e.id));
        }
    }
    for e in fq.quiver.new_edges() {
        nodes.push(Node::Red(e.id.clone()));
        longs.push(fq.phi(&e.id));
    }
    if nodes.len() > MAX_ITEMS {
        return Err(KlrwError::Mismatch(format!("{} items exceed the enumeration limit {MAX_ITEMS}", nodes.len())));
    }
    let mut cmp = vec![vec![Ordering::Equal; nodes.len()]; nodes.len()];
    for i in 0..nodes.len() {
        for j in 0..nodes.len() {
            if i != j {
                cmp[i][j] = real_compare(&longs[i], &longs[j], &fq.symbols)?;
            }
        }
    }
    let corporeal = nodes.iter().map(|n| matches!(n, Node::Entry(_))).collect();
    let search = Search { nodes, corporeal, cmp, entries };
    let mut orders = Vec::new();
    search.walk(&mut Vec::new(), &mut vec![false; search.nodes.len()], &mut orders);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for o in orders {
        let s = search.to_sequence(&o);
        if seen.insert((s.labels.clone(), s.longitudes.clone(), s.order.clone())) {
            debug_assert!(is_valid(&s, fq)?);
            out.push(s);
        }
    }
    Ok(out)
}

/// All valid orders, grouped up to equivalence. Classes come in the order
/// their first member was found.
pub fn enumerate_sequences(entries: &[(String, ExactScalar)], fq: &FlavouredQuiver) -> Result<Vec<SequenceClass>> {
    let mut classes: Vec<SequenceClass> = Vec::new();
    'next: for s in all_valid_sequences(entries, fq)? {
        for c in classes.iter_mut() {
            if equivalent(&c.representative, &s, fq)?.is_some() {
                c.members.push(s);
                continue 'next;
            }
        }
        classes.push(SequenceClass { representative: s.clone(), members: vec![s] });
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{DimensionData, Flavour, Quiver};
    use crate::scalar::SymbolTable;

    fn kronecker() -> FlavouredQuiver {
        let q = Quiver::new(&["α", "β"], &[("e", "β", "α"), ("f", "α", "β")]).unwrap();
        let mut phi = Flavour::default();
        phi.values.insert("e".into(), ExactScalar::int(1));
        phi.values.insert("f".into(), ExactScalar::int(1));
        FlavouredQuiver::new(&q, DimensionData::default(), phi, SymbolTable::new())
    }

    fn entries(a: ExactScalar, b: ExactScalar) -> Vec<(String, ExactScalar)> {
        vec![("α".into(), a), ("β".into(), b)]
    }

    fn pats(cs: &[SequenceClass]) -> Vec<Vec<String>> {
        cs.iter().map(|c| pattern(&c.representative)).collect()
    }

    fn p(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn kronecker_separated() {
        let fq = kronecker();
        let cs = enumerate_sequences(&entries(ExactScalar::int(0), ExactScalar::int(2)), &fq).unwrap();
        assert_eq!(pats(&cs), vec![p(&["α", "e", "β", "f"])]);
        let cs = enumerate_sequences(&entries(ExactScalar::int(0), ExactScalar::frac(1, 2)), &fq).unwrap();
        assert_eq!(pats(&cs), vec![p(&["α", "β", "e", "f"])]);
        assert_eq!(regime(&cs[0].representative, &fq).unwrap(), "α[0] < β[1/2] < e[1] < f[3/2]");
    }

    #[test]
    fn kronecker_equal_longitudes_form_one_class() {
        let fq = kronecker();
        let cs = enumerate_sequences(&entries(ExactScalar::int(0), ExactScalar::int(0)), &fq).unwrap();
        assert_eq!(cs.len(), 1);
        let mut members: Vec<Vec<String>> = cs[0].members.iter().map(pattern).collect();
        members.sort();
        assert_eq!(
            members,
            vec![
                p(&["α", "β", "e", "f"]),
                p(&["α", "β", "f", "e"]),
                p(&["β", "α", "e", "f"]),
                p(&["β", "α", "f", "e"]),
            ]
        );
    }

    #[test]
    fn ghosts_precede_corporeals_at_ties() {
        let fq = kronecker();
        // a + 1 = b: the ghost of α ties with β and must come first
        let cs = enumerate_sequences(&entries(ExactScalar::int(0), ExactScalar::int(1)), &fq).unwrap();
        assert_eq!(pats(&cs), vec![p(&["α", "e", "β", "f"])]);
    }

    #[test]
    fn repeated_entries_are_not_double_counted() {
        let fq = kronecker();
        let es = vec![("α".to_string(), ExactScalar::int(0)), ("α".to_string(), ExactScalar::int(0))];
        // swapping the two corporeals gives nothing new; the tied ghosts do
        let all = all_valid_sequences(&es, &fq).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(enumerate_sequences(&es, &fq).unwrap().len(), 1);
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        let fq = kronecker();
        assert!(all_valid_sequences(&[("γ".into(), ExactScalar::int(0))], &fq).is_err());
    }
}
