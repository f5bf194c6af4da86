//! Sequences with longitudes in ℤ×ℂ, ordered lexicographically, and the
//! splitting into levels.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{KlrwError, Result};
use crate::quiver::FlavouredQuiver;
use crate::scalar::{real_compare, ExactScalar, SymbolTable};
use crate::seq::{build_cgr, is_unsteady, CgrItem, FlavouredSequence, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZcSequence {
    pub labels: Vec<String>,
    pub longitudes: Vec<(i64, ExactScalar)>,
    pub order: Vec<CgrItem>,
}

pub fn zc_compare(a: &(i64, ExactScalar), b: &(i64, ExactScalar), t: &SymbolTable) -> Result<Ordering> {
    match a.0.cmp(&b.0) {
        Ordering::Equal => real_compare(&a.1, &b.1, t),
        o => Ok(o),
    }
}

impl ZcSequence {
    pub fn longitude(&self, item: &CgrItem, fq: &FlavouredQuiver) -> (i64, ExactScalar) {
        match item {
            CgrItem::Corporeal(k) => self.longitudes[*k].clone(),
            CgrItem::Ghost(k, e) => (self.longitudes[*k].0, &self.longitudes[*k].1 + &fq.phi(e)),
            CgrItem::Red(e) => (0, fq.phi(e)),
        }
    }

    /// Embeds a ℂ-sequence at level 0.
    pub fn from_level_zero(s: &FlavouredSequence) -> Self {
        ZcSequence {
            labels: s.labels.clone(),
            longitudes: s.longitudes.iter().map(|a| (0, a.clone())).collect(),
            order: s.order.clone(),
        }
    }

    fn as_plain(&self) -> FlavouredSequence {
        FlavouredSequence {
            labels: self.labels.clone(),
            longitudes: self.longitudes.iter().map(|(_, a)| a.clone()).collect(),
            order: self.order.clone(),
        }
    }
}

pub fn zc_validate(z: &ZcSequence, fq: &FlavouredQuiver) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    let mut expected = build_cgr(&z.labels, &fq.quiver);
    let mut got = z.order.clone();
    expected.sort();
    got.sort();
    if expected != got || z.labels.len() != z.longitudes.len() {
        out.push(Violation::ItemSet("order is not a permutation of the item set".into()));
        return Ok(out);
    }
    let longs: Vec<(i64, ExactScalar)> = z.order.iter().map(|x| z.longitude(x, fq)).collect();
    for i in 0..z.order.len() {
        for j in i + 1..z.order.len() {
            match zc_compare(&longs[i], &longs[j], &fq.symbols)? {
                Ordering::Greater => out.push(Violation::Decreasing {
                    earlier: z.order[i].clone(),
                    later: z.order[j].clone(),
                }),
                Ordering::Equal if z.order[i].is_corporeal() && !z.order[j].is_corporeal() => {
                    out.push(Violation::CorporealFirst {
                        corporeal: z.order[i].clone(),
                        item: z.order[j].clone(),
                    })
                }
                _ => {}
            }
        }
    }
    let corp: Vec<usize> = z.order.iter().filter_map(|x| match x {
        CgrItem::Corporeal(k) => Some(*k),
        _ => None,
    }).collect();
    for w in corp.windows(2) {
        if w[0] > w[1] {
            out.push(Violation::CorporealOrder { earlier: w[0], later: w[1] });
        }
    }
    Ok(out)
}

/// Groups items by level. Pieces at nonzero levels carry no reds.
pub fn zc_split(z: &ZcSequence, fq: &FlavouredQuiver) -> Vec<(i64, FlavouredSequence)> {
    let mut levels: BTreeMap<i64, Vec<CgrItem>> = BTreeMap::new();
    levels.entry(0).or_default();
    for it in &z.order {
        let p = z.longitude(it, fq).0;
        levels.entry(p).or_default().push(it.clone());
    }
    let mut out = Vec::new();
    for (p, items) in levels {
        let mut reindex = BTreeMap::new();
        let mut labels = Vec::new();
        let mut longitudes = Vec::new();
        for k in 0..z.labels.len() {
            if z.longitudes[k].0 == p {
                reindex.insert(k, labels.len());
                labels.push(z.labels[k].clone());
                longitudes.push(z.longitudes[k].1.clone());
            }
        }
        if labels.is_empty() && items.is_empty() && p != 0 {
            continue;
        }
        let order = items
            .into_iter()
            .map(|it| match it {
                CgrItem::Corporeal(k) => CgrItem::Corporeal(reindex[&k]),
                CgrItem::Ghost(k, e) => CgrItem::Ghost(reindex[&k], e),
                r => r,
            })
            .collect();
        out.push((p, FlavouredSequence { labels, longitudes, order }));
    }
    out
}

pub fn zc_concat(pieces: &[(i64, FlavouredSequence)]) -> Result<ZcSequence> {
    let mut z = ZcSequence { labels: Vec::new(), longitudes: Vec::new(), order: Vec::new() };
    let mut last: Option<i64> = None;
    for (p, s) in pieces {
        if last.is_some_and(|l| l >= *p) {
            return Err(KlrwError::Mismatch("levels must be strictly increasing".into()));
        }
        last = Some(*p);
        let off = z.labels.len();
        z.labels.extend(s.labels.iter().cloned());
        z.longitudes.extend(s.longitudes.iter().map(|a| (*p, a.clone())));
        for it in &s.order {
            z.order.push(match it {
                CgrItem::Corporeal(k) => CgrItem::Corporeal(k + off),
                CgrItem::Ghost(k, e) => CgrItem::Ghost(k + off, e.clone()),
                CgrItem::Red(e) => {
                    if *p != 0 {
                        return Err(KlrwError::Mismatch(format!("red {e} at level {p}")));
                    }
                    CgrItem::Red(e.clone())
                }
            });
        }
    }
    Ok(z)
}

pub fn zc_is_unsteady(z: &ZcSequence) -> bool {
    is_unsteady(&z.as_plain()).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{DimensionData, Flavour, Quiver, INF};
    use crate::seq::{from_weight, validate};

    fn fq() -> FlavouredQuiver {
        let q = Quiver::new(&["α", "β"], &[("e", "β", "α"), ("f", "α", "β"), ("r", "α", INF)]).unwrap();
        let mut phi = Flavour::default();
        phi.values.insert("e".into(), ExactScalar::frac(1, 2));
        phi.values.insert("f".into(), ExactScalar::frac(1, 2));
        let mut dims = DimensionData::default();
        dims.w.insert("α".into(), 1);
        FlavouredQuiver::new(&q, dims, phi, SymbolTable::new())
    }

    fn gamma(a: &[i64], b: &[i64]) -> BTreeMap<String, Vec<ExactScalar>> {
        let mut g = BTreeMap::new();
        g.insert("α".to_string(), a.iter().map(|x| ExactScalar::int(*x)).collect());
        g.insert("β".to_string(), b.iter().map(|x| ExactScalar::int(*x)).collect());
        g
    }

    #[test]
    fn level_zero_reduces_to_plain_validate() {
        let fq = fq();
        let s = from_weight(&gamma(&[0, 2], &[1]), &fq).unwrap();
        let z = ZcSequence::from_level_zero(&s);
        assert_eq!(zc_validate(&z, &fq).unwrap(), validate(&s, &fq).unwrap());
        assert!(zc_validate(&z, &fq).unwrap().is_empty());
    }

    #[test]
    fn split_concat_round_trip_and_unsteady() {
        let fq = fq();
        let s0 = from_weight(&gamma(&[0], &[1]), &fq).unwrap();
        let mut unframed = fq.clone();
        unframed.quiver.edges.retain(|e| e.head != INF);
        let s1 = from_weight(&gamma(&[3], &[]), &unframed).unwrap();
        let z = zc_concat(&[(0, s0.clone()), (1, s1.clone())]).unwrap();
        assert!(zc_validate(&z, &fq).unwrap().is_empty());
        let parts = zc_split(&z, &fq);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1, s0);
        assert_eq!(parts[1].1, s1);
        assert_eq!(zc_concat(&parts).unwrap(), z);
        // a positive level together with a level-0 red unsteadies
        assert!(zc_is_unsteady(&z));
        // level order violated
        let mut bad = z.clone();
        bad.order.rotate_right(1);
        assert!(!zc_validate(&bad, &fq).unwrap().is_empty());
    }

    #[test]
    fn steady_level_zero() {
        let fq = fq();
        let s = from_weight(&gamma(&[-5], &[]), &fq).unwrap();
        assert!(!zc_is_unsteady(&ZcSequence::from_level_zero(&s)));
    }
}
