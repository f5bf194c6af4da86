//! Brute-force weight multiplicities for finite type, via the Weyl group
//! orbit of λ+ρ and Kostant's partition function. Kept independent of the
//! library's own weight-table code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

pub type Cartan = Vec<Vec<i64>>;

pub fn cartan_a(n: usize) -> Cartan {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// ⟨β, α_i^∨⟩ for β in root coordinates.
fn pair(a: &Cartan, beta: &[i64], i: usize) -> i64 {
    beta.iter().enumerate().map(|(j, b)| a[i][j] * b).sum()
}

/// Positive roots in root coordinates, by closing the simple roots under
/// simple reflections.
pub fn positive_roots(a: &Cartan) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    while let Some(b) = queue.pop_front() {
        for i in 0..n {
            let mut r = b.clone();
            r[i] -= pair(a, &b, i);
            if r.iter().all(|x| *x >= 0) && r.iter().any(|x| *x > 0) && seen.insert(r.clone()) {
                queue.push_back(r);
            }
        }
    }
    seen.into_iter().collect()
}

/// Orbit of λ+ρ under W, written as `λ+ρ − d·α`, with the sign of the
/// group element. λ+ρ is regular, so orbit points and group elements match.
pub fn shifted_orbit(a: &Cartan, lambda: &[i64]) -> Vec<(Vec<i64>, i64)> {
    let n = a.len();
    let top: Vec<i64> = lambda.iter().map(|l| l + 1).collect();
    let mut depth: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    depth.insert(vec![0; n], 0);
    let mut queue = VecDeque::from([vec![0i64; n]]);
    while let Some(d) = queue.pop_front() {
        let k = depth[&d];
        for i in 0..n {
            let c = top[i] - pair(a, &d, i);
            let mut d2 = d.clone();
            d2[i] += c;
            if !depth.contains_key(&d2) {
                depth.insert(d2.clone(), k + 1);
                queue.push_back(d2);
            }
        }
    }
    depth.into_iter().map(|(d, k)| (d, if k % 2 == 0 { 1 } else { -1 })).collect()
}

/// Number of ways to write `gamma` as a sum of positive roots.
pub struct Kostant {
    roots: Vec<Vec<i64>>,
    memo: HashMap<(Vec<i64>, usize), u64>,
}

impl Kostant {
    pub fn new(a: &Cartan) -> Self {
        Kostant { roots: positive_roots(a), memo: HashMap::new() }
    }

    pub fn count(&mut self, gamma: &[i64]) -> u64 {
        self.count_from(gamma.to_vec(), 0)
    }

    fn count_from(&mut self, gamma: Vec<i64>, k: usize) -> u64 {
        if gamma.iter().any(|x| *x < 0) {
            return 0;
        }
        if gamma.iter().all(|x| *x == 0) {
            return 1;
        }
        if k == self.roots.len() {
            return 0;
        }
        if let Some(c) = self.memo.get(&(gamma.clone(), k)) {
            return *c;
        }
        let root = self.roots[k].clone();
        let mut total = 0;
        let mut g = gamma.clone();
        while g.iter().all(|x| *x >= 0) {
            total += self.count_from(g.clone(), k + 1);
            for (x, r) in g.iter_mut().zip(&root) {
                *x -= r;
            }
        }
        self.memo.insert((gamma, k), total);
        total
    }
}

/// Multiplicity of the weight `λ − v·α` in the irreducible module of highest
/// weight `λ` (fundamental coordinates).
pub fn multiplicity(a: &Cartan, lambda: &[i64], v: &[i64]) -> u64 {
    let mut k = Kostant::new(a);
    let mut total: i64 = 0;
    for (d, sign) in shifted_orbit(a, lambda) {
        let g: Vec<i64> = v.iter().zip(&d).map(|(x, y)| x - y).collect();
        total += sign * k.count(&g) as i64;
    }
    assert!(total >= 0, "negative multiplicity {total}");
    total as u64
}

/// Sum of all weight multiplicities.
pub fn total_dimension(a: &Cartan, lambda: &[i64]) -> u64 {
    // Weyl dimension formula over the positive roots
    let roots = positive_roots(a);
    let top: Vec<i64> = lambda.iter().map(|l| l + 1).collect();
    let (mut num, mut den) = (1i128, 1i128);
    for r in &roots {
        num *= r.iter().zip(&top).map(|(c, t)| (c * t) as i128).sum::<i128>();
        den *= r.iter().sum::<i64>() as i128;
    }
    (num / den) as u64
}
