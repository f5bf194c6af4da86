//! Flavoured sequences: validation, construction from weights, equivalence,
//! unsteadiness and the loading order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{KlrwError, Result};
use crate::quiver::{FlavouredQuiver, Quiver};
use crate::scalar::{qf, real_compare, ExactScalar, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CgrItem {
    Corporeal(usize),
    Ghost(usize, String),
    Red(String),
}

impl CgrItem {
    pub fn is_corporeal(&self) -> bool {
        matches!(self, CgrItem::Corporeal(_))
    }

    /// The corporeal this item belongs to (None for reds).
    pub fn source(&self) -> Option<usize> {
        match self {
            CgrItem::Corporeal(k) | CgrItem::Ghost(k, _) => Some(*k),
            CgrItem::Red(_) => None,
        }
    }

    pub fn edge(&self) -> Option<&str> {
        match self {
            CgrItem::Corporeal(_) => None,
            CgrItem::Ghost(_, e) | CgrItem::Red(e) => Some(e),
        }
    }
}

impl fmt::Display for CgrItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CgrItem::Corporeal(k) => write!(f, "{}", k + 1),
            CgrItem::Ghost(k, e) => write!(f, "{e}@{}", k + 1),
            CgrItem::Red(e) => write!(f, "!{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlavouredSequence {
    pub labels: Vec<String>,
    pub longitudes: Vec<ExactScalar>,
    pub order: Vec<CgrItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `later` comes after `earlier` but has strictly smaller real longitude.
    Decreasing { earlier: CgrItem, later: CgrItem },
    /// A corporeal precedes a ghost or red of equal real longitude.
    CorporealFirst { corporeal: CgrItem, item: CgrItem },
    /// Corporeals are not in index order.
    CorporealOrder { earlier: usize, later: usize },
    /// The order is not a permutation of the item set.
    ItemSet(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Decreasing { earlier, later } => {
                write!(f, "(i) {later} has smaller real longitude than {earlier} but comes after it")
            }
            Violation::CorporealFirst { corporeal, item } => {
                write!(f, "(ii) corporeal {corporeal} precedes {item} at equal real longitude")
            }
            Violation::CorporealOrder { earlier, later } => {
                write!(f, "corporeal {} precedes corporeal {}", earlier + 1, later + 1)
            }
            Violation::ItemSet(m) => write!(f, "item set: {m}"),
        }
    }
}

/// Corporeals, one ghost per (k, old edge e) with `i_k = h(e)`, one red per new edge.
pub fn build_cgr(labels: &[String], q: &Quiver) -> Vec<CgrItem> {
    let mut out: Vec<CgrItem> = (0..labels.len()).map(CgrItem::Corporeal).collect();
    for (k, l) in labels.iter().enumerate() {
        for e in q.old_edges().filter(|e| &e.head == l) {
            out.push(CgrItem::Ghost(k, e.id.clone()));
        }
    }
    for e in q.new_edges() {
        out.push(CgrItem::Red(e.id.clone()));
    }
    out
}

/// Insertion sort with a fallible comparator (stable).
pub fn try_sort<T>(v: &mut [T], mut cmp: impl FnMut(&T, &T) -> Result<Ordering>) -> Result<()> {
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && cmp(&v[j - 1], &v[j])? == Ordering::Greater {
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    Ok(())
}

impl FlavouredSequence {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn longitude(&self, item: &CgrItem, fq: &FlavouredQuiver) -> ExactScalar {
        match item {
            CgrItem::Corporeal(k) => self.longitudes[*k].clone(),
            CgrItem::Ghost(k, e) => &self.longitudes[*k] + &fq.phi(e),
            CgrItem::Red(e) => fq.phi(e),
        }
    }

    pub fn position(&self, item: &CgrItem) -> Option<usize> {
        self.order.iter().position(|x| x == item)
    }

    pub fn positions(&self) -> BTreeMap<CgrItem, usize> {
        self.order.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect()
    }

    /// Label of the corporeal strand an item interacts with: `t(e)` for
    /// ghosts and reds, the own label for corporeals.
    pub fn tail_label<'a>(&'a self, item: &CgrItem, fq: &'a FlavouredQuiver) -> Result<&'a str> {
        match item {
            CgrItem::Corporeal(k) => Ok(&self.labels[*k]),
            CgrItem::Ghost(_, e) | CgrItem::Red(e) => Ok(&fq.edge(e)?.tail),
        }
    }

    /// The same sequence with the order rebuilt from longitudes (ghosts and
    /// reds first at ties, then by edge id and source index; corporeals by
    /// index). Fails if the corporeals do not come out in index order.
    pub fn with_default_order(
        labels: Vec<String>,
        longitudes: Vec<ExactScalar>,
        fq: &FlavouredQuiver,
    ) -> Result<FlavouredSequence> {
        let mut s = FlavouredSequence { labels, longitudes, order: Vec::new() };
        let mut keyed: Vec<(CgrItem, ExactScalar)> = build_cgr(&s.labels, &fq.quiver)
            .into_iter()
            .map(|it| {
                let l = s.longitude(&it, fq);
                (it, l)
            })
            .collect();
        try_sort(&mut keyed, |(a, la), (b, lb)| {
            let o = real_compare(la, lb, &fq.symbols)?;
            if o != Ordering::Equal {
                return Ok(o);
            }
            Ok(tie_break(a, b))
        })?;
        s.order = keyed.into_iter().map(|(it, _)| it).collect();
        let corp: Vec<usize> = s.order.iter().filter_map(|x| match x {
            CgrItem::Corporeal(k) => Some(*k),
            _ => None,
        }).collect();
        if corp.windows(2).any(|w| w[0] > w[1]) {
            return Err(KlrwError::Mismatch(
                "corporeal longitudes are not weakly increasing in index order".into(),
            ));
        }
        Ok(s)
    }

    pub fn fmt_with(&self, fq: Option<&FlavouredQuiver>) -> String {
        let pts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.longitudes)
            .map(|(l, a)| match fq {
                Some(fq) => format!("({l},{})", a.to_literal(&fq.symbols)),
                None => format!("({l},{a})"),
            })
            .collect();
        let ord: Vec<String> = self.order.iter().map(|x| x.to_string()).collect();
        format!("[{}] order=[{}]", pts.join(","), ord.join(","))
    }
}

impl fmt::Display for FlavouredSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(None))
    }
}

fn tie_break(a: &CgrItem, b: &CgrItem) -> Ordering {
    match (a, b) {
        (CgrItem::Corporeal(x), CgrItem::Corporeal(y)) => x.cmp(y),
        (CgrItem::Corporeal(_), _) => Ordering::Greater,
        (_, CgrItem::Corporeal(_)) => Ordering::Less,
        _ => {
            let ka = (a.edge().unwrap_or(""), a.source().map_or(-1, |k| k as i64));
            let kb = (b.edge().unwrap_or(""), b.source().map_or(-1, |k| k as i64));
            ka.cmp(&kb)
        }
    }
}

pub fn validate(s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    if s.labels.len() != s.longitudes.len() {
        out.push(Violation::ItemSet("labels and longitudes differ in length".into()));
        return Ok(out);
    }
    let mut expected: Vec<CgrItem> = build_cgr(&s.labels, &fq.quiver);
    let mut got = s.order.clone();
    expected.sort();
    got.sort();
    if expected != got {
        out.push(Violation::ItemSet(format!(
            "expected {} items, order lists {}",
            expected.len(),
            got.len()
        )));
        return Ok(out);
    }
    let longs: Vec<ExactScalar> = s.order.iter().map(|x| s.longitude(x, fq)).collect();
    for i in 0..s.order.len() {
        for j in i + 1..s.order.len() {
            match real_compare(&longs[i], &longs[j], &fq.symbols)? {
                Ordering::Greater => out.push(Violation::Decreasing {
                    earlier: s.order[i].clone(),
                    later: s.order[j].clone(),
                }),
                Ordering::Equal if s.order[i].is_corporeal() && !s.order[j].is_corporeal() => {
                    out.push(Violation::CorporealFirst {
                        corporeal: s.order[i].clone(),
                        item: s.order[j].clone(),
                    })
                }
                _ => {}
            }
        }
    }
    let corp: Vec<usize> = s.order.iter().filter_map(|x| match x {
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

pub fn is_valid(s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<bool> {
    Ok(validate(s, fq)?.is_empty())
}

/// Builds the sequence realizing the per-vertex multisets γ.
pub fn from_weight(gamma: &BTreeMap<String, Vec<ExactScalar>>, fq: &FlavouredQuiver) -> Result<FlavouredSequence> {
    let mut entries: Vec<(String, ExactScalar, usize)> = Vec::new();
    for (v, xs) in gamma {
        if fq.quiver.vertex_index(v).is_none() {
            return Err(KlrwError::parse(format!("unknown vertex {v}")));
        }
        for (i, x) in xs.iter().enumerate() {
            entries.push((v.clone(), x.clone(), i));
        }
    }
    try_sort(&mut entries, |(va, a, ia), (vb, b, ib)| {
        Ok(real_compare(a, b, &fq.symbols)?
            .then_with(|| va.cmp(vb))
            .then_with(|| a.im.cmp(&b.im))
            .then_with(|| ia.cmp(ib)))
    })?;
    let labels = entries.iter().map(|e| e.0.clone()).collect();
    let longitudes = entries.into_iter().map(|e| e.1).collect();
    FlavouredSequence::with_default_order(labels, longitudes, fq)
}

/// Per-vertex multisets of longitudes.
pub fn weight_of(s: &FlavouredSequence) -> BTreeMap<String, Vec<ExactScalar>> {
    let mut out: BTreeMap<String, Vec<ExactScalar>> = BTreeMap::new();
    for (l, a) in s.labels.iter().zip(&s.longitudes) {
        out.entry(l.clone()).or_default().push(a.clone());
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

struct EquivData {
    /// (corporeal m, GR item) → m precedes the item; only pairs with t(e) = i_m.
    before: BTreeMap<(usize, CgrItem), bool>,
    /// real-part order between same-label corporeals
    re_less: Vec<Vec<bool>>,
}

fn equiv_data(s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<EquivData> {
    let pos = s.positions();
    let mut before = BTreeMap::new();
    for g in s.order.iter().filter(|x| !x.is_corporeal()) {
        let t = s.tail_label(g, fq)?;
        for m in 0..s.n() {
            if s.labels[m] == t {
                before.insert((m, g.clone()), pos[&CgrItem::Corporeal(m)] < pos[g]);
            }
        }
    }
    let n = s.n();
    let mut re_less = vec![vec![false; n]; n];
    for k in 0..n {
        for m in 0..n {
            if k != m && s.labels[k] == s.labels[m] {
                re_less[k][m] =
                    real_compare(&s.longitudes[k], &s.longitudes[m], &fq.symbols)? == Ordering::Less;
            }
        }
    }
    Ok(EquivData { before, re_less })
}

fn map_item(g: &CgrItem, sigma: &[Option<usize>]) -> Option<CgrItem> {
    match g {
        CgrItem::Corporeal(k) => sigma[*k].map(CgrItem::Corporeal),
        CgrItem::Ghost(k, e) => sigma[*k].map(|x| CgrItem::Ghost(x, e.clone())),
        CgrItem::Red(e) => Some(CgrItem::Red(e.clone())),
    }
}

/// Searches for σ satisfying the three equivalence conditions.
pub fn equivalent(
    s: &FlavouredSequence,
    s2: &FlavouredSequence,
    fq: &FlavouredQuiver,
) -> Result<Option<Vec<usize>>> {
    let n = s.n();
    if n != s2.n() {
        return Ok(None);
    }
    let mut l1 = s.labels.clone();
    let mut l2 = s2.labels.clone();
    l1.sort();
    l2.sort();
    if l1 != l2 {
        return Ok(None);
    }
    let d1 = equiv_data(s, fq)?;
    let d2 = equiv_data(s2, fq)?;
    let mut sigma: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    let ok = search(0, s, s2, &d1, &d2, &mut sigma, &mut used);
    Ok(ok.then(|| sigma.into_iter().map(|x| x.unwrap()).collect()))
}

fn consistent(m: usize, s: &FlavouredSequence, d1: &EquivData, d2: &EquivData, sigma: &[Option<usize>]) -> bool {
    let sm = sigma[m].unwrap();
    for k in 0..s.n() {
        let Some(sk) = sigma[k] else { continue };
        if k != m
            && s.labels[k] == s.labels[m]
            && (d1.re_less[k][m] != d2.re_less[sk][sm] || d1.re_less[m][k] != d2.re_less[sm][sk])
        {
            return false;
        }
    }
    for ((c, g), b) in &d1.before {
        let involves = *c == m || g.source() == Some(m);
        if !involves {
            continue;
        }
        let Some(sc) = sigma[*c] else { continue };
        let Some(sg) = map_item(g, sigma) else { continue };
        match d2.before.get(&(sc, sg)) {
            Some(b2) if b2 == b => {}
            _ => return false,
        }
    }
    true
}

fn search(
    m: usize,
    s: &FlavouredSequence,
    s2: &FlavouredSequence,
    d1: &EquivData,
    d2: &EquivData,
    sigma: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    if m == s.n() {
        return true;
    }
    for c in 0..s2.n() {
        if used[c] || s2.labels[c] != s.labels[m] {
            continue;
        }
        sigma[m] = Some(c);
        used[c] = true;
        if consistent(m, s, d1, d2, sigma) && search(m + 1, s, s2, d1, d2, sigma, used) {
            return true;
        }
        sigma[m] = None;
        used[c] = false;
    }
    false
}

/// Smallest suffix length `k` such that the last `k` items are a group of
/// corporeals with exactly all their ghosts and no reds. The whole sequence
/// counts when it has no reds.
pub fn is_unsteady(s: &FlavouredSequence) -> Option<usize> {
    let mut ghosts_total: BTreeMap<usize, usize> = BTreeMap::new();
    for it in &s.order {
        if let CgrItem::Ghost(k, _) = it {
            *ghosts_total.entry(*k).or_default() += 1;
        }
    }
    let mut corps: BTreeSet<usize> = BTreeSet::new();
    let mut ghosts_seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (len, it) in s.order.iter().rev().enumerate() {
        match it {
            CgrItem::Red(_) => return None,
            CgrItem::Corporeal(k) => {
                corps.insert(*k);
            }
            CgrItem::Ghost(k, _) => *ghosts_seen.entry(*k).or_default() += 1,
        }
        let closed = ghosts_seen.keys().all(|k| corps.contains(k))
            && corps.iter().all(|k| {
                ghosts_seen.get(k).copied().unwrap_or(0) == ghosts_total.get(k).copied().unwrap_or(0)
            });
        if closed && !corps.is_empty() {
            return Some(len + 1);
        }
    }
    None
}

/// Reorders an integral sequence by the loading keys: corporeal `k` at
/// `(a_k, k)`, ghost `(m,e)` at `(a_m + φ_e − 1/2, m)`, red at `(φ_e − 1/2, 0)`.
pub fn to_loading_order(s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<FlavouredSequence> {
    let mut keyed: Vec<((Q, i64), CgrItem)> = Vec::new();
    for it in &s.order {
        let l = s.longitude(it, fq);
        if !l.is_integer() {
            return Err(KlrwError::NonIntegralInput(format!("{it} has longitude {l}")));
        }
        let key = match it {
            CgrItem::Corporeal(k) => (l.re.clone(), *k as i64 + 1),
            CgrItem::Ghost(m, _) => (l.re.clone() - qf(1, 2), *m as i64 + 1),
            CgrItem::Red(_) => (l.re.clone() - qf(1, 2), 0),
        };
        keyed.push((key, it.clone()));
    }
    keyed.sort_by(|(ka, a), (kb, b)| ka.cmp(kb).then_with(|| tie_break(a, b)));
    Ok(FlavouredSequence {
        labels: s.labels.clone(),
        longitudes: s.longitudes.clone(),
        order: keyed.into_iter().map(|(_, it)| it).collect(),
    })
}

/// Parses `[(label,longitude),...] order=[tokens]`; corporeal tokens are
/// 1-based indices, ghosts `e@k`, reds `!e`. Without `order=` the default
/// order is used.
pub fn parse_sequence(text: &str, fq: &mut FlavouredQuiver) -> Result<FlavouredSequence> {
    let text = text.trim();
    let (pts, order) = match text.find("order=") {
        Some(i) => (&text[..i], Some(&text[i + 6..])),
        None => (text, None),
    };
    let pts = pts.trim();
    let inner = pts
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| KlrwError::parse("sequence must be [(label,longitude),...]"))?;
    let mut labels = Vec::new();
    let mut longitudes = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| KlrwError::parse(format!("expected '(' at '{rest}'")))?;
        let close = open.find(')').ok_or_else(|| KlrwError::parse("unclosed '('"))?;
        let body = &open[..close];
        let (l, a) = body.split_once(',').ok_or_else(|| KlrwError::parse(format!("bad pair '{body}'")))?;
        let l = l.trim().to_string();
        if fq.quiver.vertex_index(&l).is_none() {
            return Err(KlrwError::parse(format!("unknown vertex {l}")));
        }
        labels.push(l);
        longitudes.push(ExactScalar::parse(a, &mut fq.symbols)?);
        rest = open[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    let Some(order) = order else {
        return FlavouredSequence::with_default_order(labels, longitudes, fq);
    };
    let inner = order
        .trim()
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| KlrwError::parse("order must be [tokens]"))?;
    let mut items = Vec::new();
    for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let item = if let Some(e) = tok.strip_prefix('!') {
            CgrItem::Red(e.to_string())
        } else if let Some((e, k)) = tok.rsplit_once('@') {
            let k: usize = k.parse().map_err(|_| KlrwError::parse(format!("bad token {tok}")))?;
            if k == 0 {
                return Err(KlrwError::parse(format!("bad token {tok}")));
            }
            CgrItem::Ghost(k - 1, e.to_string())
        } else {
            let k: usize = tok.parse().map_err(|_| KlrwError::parse(format!("bad token {tok}")))?;
            if k == 0 {
                return Err(KlrwError::parse(format!("bad token {tok}")));
            }
            CgrItem::Corporeal(k - 1)
        };
        items.push(item);
    }
    Ok(FlavouredSequence { labels, longitudes, order: items })
}
