//! Flavoured KLRW diagrams as time-ordered event lists.
//!
//! Strands are referred to by their bottom corporeal index, so a ghost is
//! `Ghost(m, e)` for the bottom strand `m` and a red is `Red(e)`. A crossing
//! event names the item that is immediately to the left before the crossing
//! (it moves right) and the one immediately to its right.

use std::collections::BTreeMap;

use crate::error::{KlrwError, Result};
use crate::poly::Poly;
use crate::quiver::FlavouredQuiver;
use crate::scalar::{is_integral_difference, ExactScalar, Q};
use crate::seq::{build_cgr, CgrItem, FlavouredSequence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Cross { left: CgrItem, right: CgrItem },
    Dot(usize),
}

/// Local moves used to write diagrams by hand: swap the items at order
/// positions `k, k+1`, or put a dot on a bottom strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Swap(usize),
    Dot(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub bottom: FlavouredSequence,
    pub top: FlavouredSequence,
    /// bottom corporeal index → top corporeal index
    pub matching: Vec<usize>,
    pub events: Vec<Event>,
}

/// How a crossing acts on the polynomial carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossKind {
    /// same label, integral difference: divided difference
    Demazure,
    /// any other pair of corporeals: relabel the two position variables
    Relabel,
    /// corporeal `corp` and the ghost of `source` on an edge out of its label
    Ghost { corp: usize, source: usize },
    /// corporeal `corp` and a red on a new edge at its label
    Red { corp: usize },
    Trivial,
}

/// Compiled operator on polynomials in position variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Demazure(u32),
    Swap(u32),
    /// multiply by `y_a − y_b`
    MulDiff(u32, u32),
    MulVar(u32),
}

fn map_item(it: &CgrItem, f: impl Fn(usize) -> usize) -> CgrItem {
    match it {
        CgrItem::Corporeal(k) => CgrItem::Corporeal(f(*k)),
        CgrItem::Ghost(k, e) => CgrItem::Ghost(f(*k), e.clone()),
        CgrItem::Red(e) => CgrItem::Red(e.clone()),
    }
}

pub fn classify(a: &CgrItem, b: &CgrItem, s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<CrossKind> {
    use CgrItem::*;
    Ok(match (a, b) {
        (Corporeal(c), Corporeal(d)) => {
            if s.labels[*c] == s.labels[*d] && is_integral_difference(&s.longitudes[*c], &s.longitudes[*d]) {
                CrossKind::Demazure
            } else {
                CrossKind::Relabel
            }
        }
        (Corporeal(c), Ghost(d, e)) | (Ghost(d, e), Corporeal(c)) => {
            let edge = fq.edge(e)?;
            let gl = &s.longitudes[*d] + &fq.phi(e);
            if edge.tail == s.labels[*c] && is_integral_difference(&gl, &s.longitudes[*c]) {
                CrossKind::Ghost { corp: *c, source: *d }
            } else {
                CrossKind::Trivial
            }
        }
        (Corporeal(c), Red(e)) | (Red(e), Corporeal(c)) => {
            let edge = fq.edge(e)?;
            if edge.tail == s.labels[*c] && is_integral_difference(&fq.phi(e), &s.longitudes[*c]) {
                CrossKind::Red { corp: *c }
            } else {
                CrossKind::Trivial
            }
        }
        _ => CrossKind::Trivial,
    })
}

/// Degree contribution of crossing `a` with `b`.
fn kind_degree(k: CrossKind) -> i64 {
    match k {
        CrossKind::Demazure => -2,
        CrossKind::Ghost { .. } | CrossKind::Red { .. } => 1,
        _ => 0,
    }
}

/// `−#{(c, g)}` over interacting corporeal/ghost-or-red pairs with `g`
/// before `c`. Acting by `d` shifts polynomial degree by
/// `degree(d) + shift(bottom) − shift(top)`.
pub fn grading_shift(s: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<i64> {
    let mut n = 0;
    for i in 0..s.order.len() {
        for j in i + 1..s.order.len() {
            let (a, b) = (&s.order[i], &s.order[j]);
            if b.is_corporeal() && !a.is_corporeal() {
                if let CrossKind::Ghost { .. } | CrossKind::Red { .. } = classify(a, b, s, fq)? {
                    n += 1;
                }
            }
        }
    }
    Ok(-n)
}

fn same_items(a: &[CgrItem], b: &[CgrItem]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort();
    y.sort();
    x == y
}

impl Diagram {
    /// Checks the event list against the matching and replays it to the top.
    pub fn new(
        bottom: FlavouredSequence,
        top: FlavouredSequence,
        matching: Vec<usize>,
        events: Vec<Event>,
    ) -> Result<Diagram> {
        let n = bottom.n();
        if matching.len() != n || top.n() != n {
            return Err(KlrwError::Mismatch("strand counts differ".into()));
        }
        let mut seen = vec![false; n];
        for (m, &t) in matching.iter().enumerate() {
            if t >= n || seen[t] {
                return Err(KlrwError::Mismatch("matching is not a permutation".into()));
            }
            seen[t] = true;
            if bottom.labels[m] != top.labels[t]
                || !is_integral_difference(&bottom.longitudes[m], &top.longitudes[t])
            {
                return Err(KlrwError::NoMatching(format!("strand {} → {}", m + 1, t + 1)));
            }
        }
        let d = Diagram { bottom, top, matching, events };
        let end = d.replay()?;
        let expect: Vec<CgrItem> = d.top_in_bottom_ids();
        if end != expect {
            return Err(KlrwError::Mismatch("events do not reach the top order".into()));
        }
        Ok(d)
    }

    /// Identity diagram e(s).
    pub fn identity(s: &FlavouredSequence) -> Diagram {
        Diagram { bottom: s.clone(), top: s.clone(), matching: (0..s.n()).collect(), events: Vec::new() }
    }

    /// Builds a diagram from local moves starting at `bottom`; the top is
    /// whatever the moves produce, with corporeals reindexed left to right.
    pub fn from_moves(bottom: &FlavouredSequence, moves: &[Move]) -> Result<Diagram> {
        let mut order = bottom.order.clone();
        let mut events = Vec::new();
        for mv in moves {
            match *mv {
                Move::Swap(k) => {
                    if k + 1 >= order.len() {
                        return Err(KlrwError::Mismatch(format!("swap {k} out of range")));
                    }
                    events.push(Event::Cross { left: order[k].clone(), right: order[k + 1].clone() });
                    order.swap(k, k + 1);
                }
                Move::Dot(m) => {
                    if m >= bottom.n() {
                        return Err(KlrwError::Mismatch(format!("dot on missing strand {m}")));
                    }
                    events.push(Event::Dot(m));
                }
            }
        }
        let mut matching = vec![0; bottom.n()];
        let mut rank = 0;
        for it in &order {
            if let CgrItem::Corporeal(m) = it {
                matching[*m] = rank;
                rank += 1;
            }
        }
        let mut top = FlavouredSequence {
            labels: vec![String::new(); bottom.n()],
            longitudes: vec![ExactScalar::zero(); bottom.n()],
            order: order.iter().map(|it| map_item(it, |m| matching[m])).collect(),
        };
        for m in 0..bottom.n() {
            top.labels[matching[m]] = bottom.labels[m].clone();
            top.longitudes[matching[m]] = bottom.longitudes[m].clone();
        }
        Ok(Diagram { bottom: bottom.clone(), top, matching, events })
    }

    fn inverse_matching(&self) -> Vec<usize> {
        let mut inv = vec![0; self.matching.len()];
        for (m, &t) in self.matching.iter().enumerate() {
            inv[t] = m;
        }
        inv
    }

    /// The top order written with bottom strand ids.
    pub fn top_in_bottom_ids(&self) -> Vec<CgrItem> {
        let inv = self.inverse_matching();
        self.top.order.iter().map(|it| map_item(it, |t| inv[t])).collect()
    }

    /// Replays the events from the bottom order and returns the final order.
    fn replay(&self) -> Result<Vec<CgrItem>> {
        let mut order = self.bottom.order.clone();
        let pos: BTreeMap<CgrItem, usize> = order.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let mut pos = pos;
        for ev in &self.events {
            if let Event::Cross { left, right } = ev {
                let k = *pos.get(left).ok_or_else(|| KlrwError::Mismatch(format!("no item {left}")))?;
                if order.get(k + 1) != Some(right) {
                    return Err(KlrwError::Mismatch(format!("{left} and {right} are not adjacent")));
                }
                order.swap(k, k + 1);
                pos.insert(left.clone(), k + 1);
                pos.insert(right.clone(), k);
            }
        }
        Ok(order)
    }

    pub fn dots(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Dot(_))).count()
    }

    pub fn crossings(&self) -> usize {
        self.events.len() - self.dots()
    }

    pub fn degree(&self, fq: &FlavouredQuiver) -> Result<i64> {
        let mut d = 0;
        for ev in &self.events {
            d += match ev {
                Event::Dot(_) => 2,
                Event::Cross { left, right } => kind_degree(classify(left, right, &self.bottom, fq)?),
            };
        }
        Ok(d)
    }

    /// Compiles the events into operators on polynomials whose variable `p`
    /// is the corporeal at position `p` (left to right) at that time.
    pub fn compile(&self, fq: &FlavouredQuiver) -> Result<Vec<Op>> {
        let n = self.bottom.n();
        let mut order = self.bottom.order.clone();
        let mut pos = vec![0u32; n];
        for (p, m) in order.iter().filter_map(|x| match x {
            CgrItem::Corporeal(m) => Some(*m),
            _ => None,
        }).enumerate() {
            pos[m] = p as u32;
        }
        let mut ops = Vec::new();
        for ev in &self.events {
            match ev {
                Event::Dot(m) => ops.push(Op::MulVar(pos[*m])),
                Event::Cross { left, right } => {
                    let k = order
                        .iter()
                        .position(|x| x == left)
                        .ok_or_else(|| KlrwError::Mismatch(format!("no item {left}")))?;
                    if order.get(k + 1) != Some(right) {
                        return Err(KlrwError::Mismatch(format!("{left} and {right} are not adjacent")));
                    }
                    match classify(left, right, &self.bottom, fq)? {
                        CrossKind::Demazure => ops.push(Op::Demazure(pos[left.source().unwrap_or(0)])),
                        CrossKind::Relabel => ops.push(Op::Swap(pos[left.source().unwrap_or(0)])),
                        CrossKind::Ghost { corp, source } => {
                            if left == &CgrItem::Corporeal(corp) {
                                ops.push(Op::MulDiff(pos[source], pos[corp]));
                            }
                        }
                        CrossKind::Red { corp } => {
                            if left == &CgrItem::Corporeal(corp) {
                                ops.push(Op::MulVar(pos[corp]));
                            }
                        }
                        CrossKind::Trivial => {}
                    }
                    if let (CgrItem::Corporeal(a), CgrItem::Corporeal(b)) = (left, right) {
                        pos.swap(*a, *b);
                    }
                    order.swap(k, k + 1);
                }
            }
        }
        Ok(ops)
    }

    /// Stacks `self` on top of `d1`.
    pub fn compose(&self, d1: &Diagram) -> Result<Diagram> {
        if d1.top != self.bottom {
            return Err(KlrwError::Mismatch("top and bottom sequences differ".into()));
        }
        let inv1 = d1.inverse_matching();
        let mut events = d1.events.clone();
        for ev in &self.events {
            events.push(match ev {
                Event::Dot(m) => Event::Dot(inv1[*m]),
                Event::Cross { left, right } => Event::Cross {
                    left: map_item(left, |m| inv1[m]),
                    right: map_item(right, |m| inv1[m]),
                },
            });
        }
        Ok(Diagram {
            bottom: d1.bottom.clone(),
            top: self.top.clone(),
            matching: d1.matching.iter().map(|&t| self.matching[t]).collect(),
            events,
        })
    }

    /// Vertical reflection.
    pub fn reflect(&self) -> Diagram {
        let s = &self.matching;
        let events = self
            .events
            .iter()
            .rev()
            .map(|ev| match ev {
                Event::Dot(m) => Event::Dot(s[*m]),
                Event::Cross { left, right } => Event::Cross {
                    left: map_item(right, |m| s[m]),
                    right: map_item(left, |m| s[m]),
                },
            })
            .collect();
        Diagram {
            bottom: self.top.clone(),
            top: self.bottom.clone(),
            matching: self.inverse_matching(),
            events,
        }
    }

    /// Signature of the top used to compare terms of a relation: labels and
    /// longitudes of the items left to right.
    pub fn top_signature(&self) -> Vec<(u8, String, ExactScalar)> {
        self.top
            .order
            .iter()
            .map(|it| match it {
                CgrItem::Corporeal(k) => (0, self.top.labels[*k].clone(), self.top.longitudes[*k].clone()),
                CgrItem::Ghost(k, e) => (1, format!("{}/{e}", self.top.labels[*k]), self.top.longitudes[*k].clone()),
                CgrItem::Red(e) => (2, e.clone(), ExactScalar::zero()),
            })
            .collect()
    }
}

pub fn apply_ops(ops: &[Op], f: &Poly<Q>) -> Poly<Q> {
    apply_ops_with(ops, f, 1)
}

/// As [`apply_ops`], with the divided difference multiplied by `demazure_sign`.
pub fn apply_ops_with(ops: &[Op], f: &Poly<Q>, demazure_sign: i64) -> Poly<Q> {
    let mut f = f.clone();
    for op in ops {
        f = match *op {
            Op::Demazure(p) if demazure_sign < 0 => -&f.demazure(p, p + 1),
            Op::Demazure(p) => f.demazure(p, p + 1),
            Op::Swap(p) => f.swap(p, p + 1),
            Op::MulDiff(a, b) => &f * &(&Poly::var(a) - &Poly::var(b)),
            Op::MulVar(a) => f.mul_monomial(&crate::poly::Monomial::var(a)),
        };
        if f.is_zero() {
            break;
        }
    }
    f
}

/// Straight-line diagram for a given matching: items move linearly from
/// their bottom position to their top position; crossings are taken in time
/// order, ties broken by position.
pub fn with_matching(
    bottom: &FlavouredSequence,
    top: &FlavouredSequence,
    matching: &[usize],
    fq: &FlavouredQuiver,
) -> Result<Diagram> {
    if !same_items(&bottom.order, &build_cgr(&bottom.labels, &fq.quiver))
        || !same_items(&top.order, &build_cgr(&top.labels, &fq.quiver))
    {
        return Err(KlrwError::Mismatch("order is not a permutation of the item set".into()));
    }
    let mut inv = vec![usize::MAX; matching.len()];
    for (m, &t) in matching.iter().enumerate() {
        if t < inv.len() {
            inv[t] = m;
        }
    }
    if inv.contains(&usize::MAX) || matching.len() != top.n() {
        return Err(KlrwError::NoMatching("matching is not a bijection".into()));
    }
    let target_order: Vec<CgrItem> = top.order.iter().map(|it| map_item(it, |t| inv[t])).collect();
    let start: BTreeMap<CgrItem, usize> = bottom.order.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let target: BTreeMap<CgrItem, usize> = target_order.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let mut order = bottom.order.clone();
    let mut events = Vec::new();
    loop {
        let mut best: Option<(Q, usize)> = None;
        for k in 0..order.len().saturating_sub(1) {
            let (a, b) = (&order[k], &order[k + 1]);
            let (qa, qb) = (target[a] as i64, target[b] as i64);
            if qa <= qb {
                continue;
            }
            let (pa, pb) = (start[a] as i64, start[b] as i64);
            let num = pb - pa;
            let den = num - (qb - qa);
            let t = Q::new(num.into(), den.into());
            if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                best = Some((t, k));
            }
        }
        let Some((_, k)) = best else { break };
        events.push(Event::Cross { left: order[k].clone(), right: order[k + 1].clone() });
        order.swap(k, k + 1);
    }
    Diagram::new(bottom.clone(), top.clone(), matching.to_vec(), events)
}

/// Minimal matching: corporeals of the same label and longitude class are
/// paired in index order.
pub fn minimal_matching(bottom: &FlavouredSequence, top: &FlavouredSequence) -> Result<Vec<usize>> {
    if bottom.n() != top.n() {
        return Err(KlrwError::NoMatching("strand counts differ".into()));
    }
    let mut used = vec![false; top.n()];
    let mut out = Vec::with_capacity(bottom.n());
    for m in 0..bottom.n() {
        let t = (0..top.n())
            .find(|&t| {
                !used[t]
                    && top.labels[t] == bottom.labels[m]
                    && is_integral_difference(&top.longitudes[t], &bottom.longitudes[m])
            })
            .ok_or_else(|| KlrwError::NoMatching(format!("no partner for strand {}", m + 1)))?;
        used[t] = true;
        out.push(t);
    }
    Ok(out)
}

pub fn straight_line(bottom: &FlavouredSequence, top: &FlavouredSequence, fq: &FlavouredQuiver) -> Result<Diagram> {
    let m = minimal_matching(bottom, top)?;
    with_matching(bottom, top, &m, fq)
}
