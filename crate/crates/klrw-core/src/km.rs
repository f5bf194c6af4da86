//! Kac–Moody data: Cartan matrices, root multiplicities (Peterson),
//! weight multiplicities (Freudenthal) and decategorified Chevalley ranks.
//!
//! Weights below a highest weight λ are stored as `β` with `μ = λ - β`,
//! `β` in root coordinates.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{KlrwError, Result};
use crate::par::Exec;
use crate::quiver::{DimensionData, Quiver};

pub type Cartan = Vec<Vec<i64>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Basis {
    Fundamental,
    Root,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KMWeight {
    pub basis: Basis,
    pub coords: BTreeMap<String, i64>,
}

impl KMWeight {
    pub fn vector(&self, q: &Quiver) -> Vec<i64> {
        q.gauge_vertices().map(|v| self.coords.get(v).copied().unwrap_or(0)).collect()
    }

    pub fn from_vector(q: &Quiver, basis: Basis, x: &[i64]) -> Self {
        KMWeight { basis, coords: q.gauge_vertices().cloned().zip(x.iter().copied()).collect() }
    }

    pub fn to_fundamental(&self, q: &Quiver) -> Result<KMWeight> {
        match self.basis {
            Basis::Fundamental => Ok(self.clone()),
            Basis::Root => {
                let a = cartan_matrix(q)?;
                let x = self.vector(q);
                Ok(Self::from_vector(q, Basis::Fundamental, &mat_vec(&a, &x)))
            }
        }
    }
}

pub fn mat_vec(a: &Cartan, x: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, y)| r * y).sum()).collect()
}

fn pair(a: &Cartan, x: &[i64], y: &[i64]) -> i64 {
    mat_vec(a, y).iter().zip(x).map(|(p, q)| p * q).sum()
}

pub fn cartan_matrix(q: &Quiver) -> Result<Cartan> {
    if let Some(e) = q.edge_loop() {
        return Err(KlrwError::EdgeLoop(e.tail.clone()));
    }
    let n = q.gauge_vertices().count();
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    for e in q.old_edges() {
        let (i, j) = (q.vertex_index(&e.tail).unwrap(), q.vertex_index(&e.head).unwrap());
        a[i][j] -= 1;
        a[j][i] -= 1;
    }
    Ok(a)
}

/// μ = Σ w_i ϖ_i − Σ v_i α_i in fundamental coordinates.
pub fn mu_from_dimensions(q: &Quiver, dims: &DimensionData) -> Result<KMWeight> {
    let a = cartan_matrix(q)?;
    let v: Vec<i64> = q.gauge_vertices().map(|i| dims.v_of(i)).collect();
    let av = mat_vec(&a, &v);
    let mu: Vec<i64> = q.gauge_vertices().zip(av).map(|(i, x)| dims.w_of(i) - x).collect();
    Ok(KMWeight::from_vector(q, Basis::Fundamental, &mu))
}

fn box_points(bound: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &b in bound {
        let mut next = Vec::new();
        for p in &out {
            for k in 0..=b.max(-1) {
                let mut p2 = p.clone();
                p2.push(k);
                next.push(p2);
            }
        }
        out = next;
    }
    out
}


fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn height(a: &[i64]) -> i64 {
    a.iter().sum()
}

type Qr = Ratio<i64>;

/// Coefficients of the Weyl denominator `Π_{α>0}(1 − e^{−α})^{mult α}` on the
/// box: `D_β = ε(w)` when `β = ρ − wρ`, else 0.
fn denominator(a: &Cartan, bound: &[i64]) -> HashMap<Vec<i64>, i64> {
    let n = bound.len();
    let mut d = HashMap::new();
    let start = (vec![0i64; n], vec![1i64; n], 1i64);
    d.insert(start.0.clone(), 1);
    let mut frontier = vec![start];
    while let Some((beta, x, eps)) = frontier.pop() {
        for i in 0..n {
            if x[i] <= 0 {
                continue;
            }
            let mut b2 = beta.clone();
            b2[i] += x[i];
            if b2.iter().zip(bound).any(|(u, v)| u > v) || d.contains_key(&b2) {
                continue;
            }
            let x2: Vec<i64> = (0..n).map(|j| x[j] - x[i] * a[i][j]).collect();
            d.insert(b2.clone(), -eps);
            frontier.push((b2, x2, -eps));
        }
    }
    d
}

/// Multiplicities of positive roots `0 < α ≤ bound`, read off from
/// `log` of the Weyl–Kac denominator: `Σ_β c_β e^{−β} = −log D` with
/// `c_β = Σ_{n|β} mult(β/n)/n`.
pub fn root_multiplicities(a: &Cartan, bound: &[i64]) -> Result<HashMap<Vec<i64>, i64>> {
    let mut pts: Vec<Vec<i64>> = box_points(bound).into_iter().filter(|p| height(p) > 0).collect();
    pts.sort_by_key(|p| height(p));
    let dcoef = denominator(a, bound);
    let dval = |b: &Vec<i64>| dcoef.get(b).copied().unwrap_or(0);
    let mut c: HashMap<Vec<i64>, Qr> = HashMap::new();
    // Euler operator on D = exp(−C): ht(β) D_β = −Σ_{0<γ≤β} ht(γ) c_γ D_{β−γ}
    for b in &pts {
        let ht = height(b);
        let mut acc = Qr::zero();
        for g in box_points(b) {
            let hg = height(&g);
            if hg == 0 || hg == ht {
                continue;
            }
            let cg = c[&g];
            if cg.is_zero() {
                continue;
            }
            acc += cg * Qr::from_integer(hg * dval(&sub(b, &g)));
        }
        let val = -Qr::from_integer(dval(b)) - acc / Qr::from_integer(ht);
        c.insert(b.clone(), val);
    }
    let mut mult: HashMap<Vec<i64>, i64> = HashMap::new();
    for b in &pts {
        let g = b.iter().fold(0i64, |g, x| num_integer::gcd(g, *x));
        let mut val = c[b];
        for n in 2..=g {
            if g % n == 0 {
                let d: Vec<i64> = b.iter().map(|x| x / n).collect();
                val -= Qr::new(mult[&d], n);
            }
        }
        if !val.is_integer() || *val.numer() < 0 {
            return Err(KlrwError::Mismatch(format!("non-integral root multiplicity at {b:?}: {val}")));
        }
        mult.insert(b.clone(), val.to_integer());
    }
    Ok(mult)
}

/// Weight multiplicities of `V(λ)` at `λ − β'` for every `0 ≤ β' ≤ bound`.
/// Points of equal height are independent and are evaluated in parallel.
pub fn weight_table(a: &Cartan, lambda: &[i64], bound: &[i64], exec: Exec) -> Result<HashMap<Vec<i64>, u64>> {
    if let Some(i) = lambda.iter().position(|x| *x < 0) {
        return Err(KlrwError::NotDominant(format!("{lambda:?} (coordinate {i})")));
    }
    let roots: Vec<(Vec<i64>, i64)> =
        root_multiplicities(a, bound)?.into_iter().filter(|(_, m)| *m > 0).collect();
    let mut levels: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    for p in box_points(bound) {
        levels.entry(height(&p)).or_default().push(p);
    }
    let mut m: HashMap<Vec<i64>, u64> = HashMap::new();
    for (ht, pts) in levels {
        if ht == 0 {
            m.insert(pts[0].clone(), 1);
            continue;
        }
        let known = &m;
        let vals = exec.try_map(pts, |b| -> Result<(Vec<i64>, u64)> {
            let lb: i64 = b.iter().zip(lambda).map(|(x, l)| x * l).sum();
            let coef = 2 * lb - pair(a, &b, &b) + 2 * height(&b);
            let mut rhs: i64 = 0;
            for (al, mult) in &roots {
                let la: i64 = al.iter().zip(lambda).map(|(x, l)| x * l).sum();
                let aa = pair(a, al, al);
                let mut k = 1;
                loop {
                    let shifted: Vec<i64> = b.iter().zip(al).map(|(x, y)| x - k * y).collect();
                    if shifted.iter().any(|x| *x < 0) {
                        break;
                    }
                    let mk = known.get(&shifted).copied().unwrap_or(0) as i64;
                    if mk != 0 {
                        let ip = la - pair(a, &b, al) + k * aa;
                        rhs += mult * ip * mk;
                    }
                    k += 1;
                }
            }
            rhs *= 2;
            let val = if coef == 0 {
                0
            } else {
                if rhs % coef != 0 || rhs / coef < 0 {
                    return Err(KlrwError::Mismatch(format!(
                        "Freudenthal produced {rhs}/{coef} at {b:?}"
                    )));
                }
                (rhs / coef) as u64
            };
            Ok((b, val))
        })?;
        m.extend(vals);
    }
    Ok(m)
}

/// dim V(λ)_μ by Freudenthal over the interval `[μ, λ]`.
pub fn weight_multiplicity(a: &Cartan, lambda: &[i64], mu: &[i64]) -> Result<u64> {
    if lambda.iter().any(|x| *x < 0) {
        return Err(KlrwError::NotDominant(format!("{lambda:?}")));
    }
    let beta = solve_root_coords(a, &sub(lambda, mu))
        .ok_or_else(|| KlrwError::NotBelow(format!("{mu:?}")))?;
    if beta.iter().any(|x| *x < 0) {
        return Err(KlrwError::NotBelow(format!("{mu:?}")));
    }
    let t = weight_table(a, lambda, &beta, Exec::Sequential)?;
    Ok(t[&beta])
}

/// Solves `A β = d` over ℤ for nonsingular `A`.
pub fn solve_root_coords(a: &Cartan, d: &[i64]) -> Option<Vec<i64>> {
    let n = a.len();
    let mut m: Vec<Vec<Qr>> = (0..n)
        .map(|i| {
            let mut row: Vec<Qr> = a[i].iter().map(|x| Qr::from_integer(*x)).collect();
            row.push(Qr::from_integer(d[i]));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|r| !m[*r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    m.iter().map(|row| row[n].is_integer().then(|| row[n].to_integer())).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ChevalleyRow {
    pub v: Vec<i64>,
    pub mu: Vec<i64>,
    pub dim: u64,
    /// rank of e_i : K(v) → K(v − e_i)
    pub e_rank: Vec<u64>,
    /// rank of f_i : K(v) → K(v + e_i)
    pub f_rank: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChevalleyTable {
    pub vertices: Vec<String>,
    pub lambda: Vec<i64>,
    pub rows: Vec<ChevalleyRow>,
}

impl ChevalleyTable {
    pub fn total_dim(&self) -> u64 {
        self.rows.iter().map(|r| r.dim).sum()
    }
}

/// Dimension of the weight `μ + jα_i` where `μ = λ − β`.
fn string_dim(t: &HashMap<Vec<i64>, u64>, beta: &[i64], i: usize, j: i64) -> u64 {
    let mut b = beta.to_vec();
    b[i] -= j;
    if b.iter().any(|x| *x < 0) {
        return 0;
    }
    t.get(&b).copied().unwrap_or(0)
}

/// Rank of e_i on the weight space with `⟨μ, α_i^∨⟩ = n`, from the sl2-string
/// decomposition: the number of strings reaching both `n` and `n + 2`.
fn e_rank_string(t: &HashMap<Vec<i64>, u64>, beta: &[i64], i: usize, n: i64) -> u64 {
    // strings with highest weight m ≥ max(n+2, −n), m ≡ n; the count
    // telescopes to the dimension at the smallest such m
    let m0 = std::cmp::max(n + 2, -n);
    let m0 = if (m0 - n) % 2 != 0 { m0 + 1 } else { m0 };
    string_dim(t, beta, i, (m0 - n) / 2)
}

fn f_rank_string(t: &HashMap<Vec<i64>, u64>, beta: &[i64], i: usize, n: i64) -> u64 {
    let m0 = std::cmp::max(n, 2 - n);
    let m0 = if (m0 - n) % 2 != 0 { m0 + 1 } else { m0 };
    string_dim(t, beta, i, (m0 - n) / 2)
}

pub fn decat_chevalley(q: &Quiver, dims: &DimensionData, vmax: &[i64], exec: Exec) -> Result<ChevalleyTable> {
    let a = cartan_matrix(q)?;
    let lambda: Vec<i64> = q.gauge_vertices().map(|i| dims.w_of(i)).collect();
    let n = lambda.len();
    // f_i needs v + e_i, and strings walk upward from there
    let bound: Vec<i64> = vmax.iter().map(|x| x + 1).collect();
    let table = weight_table(&a, &lambda, &bound, exec)?;
    let grid = box_points(vmax);
    let rows = exec.map(grid, |v| {
        let mu = sub(&lambda, &mat_vec(&a, &v));
        let dim = table.get(&v).copied().unwrap_or(0);
        let e_rank = (0..n).map(|i| e_rank_string(&table, &v, i, mu[i])).collect();
        let f_rank = (0..n).map(|i| f_rank_string(&table, &v, i, mu[i])).collect();
        ChevalleyRow { v, mu, dim, e_rank, f_rank }
    });
    Ok(ChevalleyTable { vertices: q.gauge_vertices().cloned().collect(), lambda, rows })
}

/// Checks the sl2 bookkeeping of a table: rank e_i matches min-dimension,
/// and `rank e − rank f` has the sign of `−⟨μ, α_i^∨⟩`.
pub fn check_chevalley(table: &ChevalleyTable) -> std::result::Result<(), String> {
    let dims: HashMap<Vec<i64>, u64> = table.rows.iter().map(|r| (r.v.clone(), r.dim)).collect();
    for r in &table.rows {
        for i in 0..r.v.len() {
            let mut up = r.v.clone();
            up[i] -= 1;
            let mut down = r.v.clone();
            down[i] += 1;
            let d_up = if up[i] < 0 { 0 } else { dims.get(&up).copied().unwrap_or(0) };
            if r.e_rank[i] != r.dim.min(d_up) {
                return Err(format!("e-rank at {:?}, i={i}: {} vs min {}", r.v, r.e_rank[i], r.dim.min(d_up)));
            }
            if let Some(d_down) = dims.get(&down) {
                if r.f_rank[i] != r.dim.min(*d_down) {
                    return Err(format!("f-rank at {:?}, i={i}", r.v));
                }
            }
            let diff = r.e_rank[i] as i64 - r.f_rank[i] as i64;
            let n = r.mu[i];
            if diff != 0 && diff.signum() != -n.signum() {
                return Err(format!("sign of e−f at {:?}, i={i}: {diff} vs ⟨μ,α∨⟩={n}", r.v));
            }
            // Weyl symmetry along the string: d(n) = d(−n)
            let mut refl = r.v.clone();
            refl[i] += n;
            if refl.iter().all(|x| *x >= 0) {
                if let Some(d) = dims.get(&refl) {
                    if *d != r.dim {
                        return Err(format!("string asymmetry at {:?}, i={i}", r.v));
                    }
                }
            }
        }
    }
    Ok(())
}
