//! Universal Gelfand–Tsetlin weight modules at ħ = 1, direct limits along
//! `r_ξ`, Hamiltonian reduction and support dimension.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use serde::Serialize;

use crate::coulomb::algebra::{product_factor, xi_negative, Coweight, TorusTheory};
use crate::coulomb::scalars::{cpoly_int, x_var, CPoly, Cq};
use crate::error::{KlrwError, Result};
use crate::poly::HBAR;
use crate::scalar::{floor_q, ExactScalar, Q};

/// Basis vectors `b_η = r_η v₀` for `η` in a finite active set; `v₀` has
/// weight `γ₀`, and `b_η` has weight `γ₀ - η` because `r_ξ` lowers weights
/// by `ξ`.
#[derive(Clone, Debug)]
pub struct UniversalWeightModule {
    pub theory: TorusTheory,
    pub base: Vec<ExactScalar>,
    pub active: BTreeSet<Coweight>,
}

impl UniversalWeightModule {
    pub fn new(theory: &TorusTheory, base: Vec<ExactScalar>, active: BTreeSet<Coweight>) -> Result<Self> {
        if base.len() != theory.rank {
            return Err(KlrwError::Mismatch(format!("base weight has length {}, rank is {}", base.len(), theory.rank)));
        }
        if let Some(a) = active.iter().find(|a| a.len() != theory.rank) {
            return Err(KlrwError::Mismatch(format!("coweight {a:?} has the wrong length")));
        }
        let mut theory = theory.clone();
        for b in &base {
            theory.symbols.absorb(b);
        }
        Ok(UniversalWeightModule { theory, base, active })
    }

    /// Active set the box `lo ≤ η ≤ hi`.
    pub fn boxed(theory: &TorusTheory, base: Vec<ExactScalar>, lo: &[i64], hi: &[i64]) -> Result<Self> {
        let mut pts: Vec<Coweight> = vec![vec![]];
        for (l, h) in lo.iter().zip(hi) {
            pts = pts.into_iter().flat_map(|p| (*l..=*h).map(move |v| [p.clone(), vec![v]].concat())).collect();
        }
        Self::new(theory, base, pts.into_iter().collect())
    }

    pub fn weight(&self, eta: &[i64]) -> Vec<ExactScalar> {
        self.base.iter().zip(eta).map(|(b, e)| b - &ExactScalar::int(*e)).collect()
    }

    /// Evaluation of a Gelfand–Tsetlin polynomial at a weight, ħ = 1. The
    /// result is a polynomial in the flavour symbols only.
    pub fn evaluate(&self, p: &CPoly, w: &[ExactScalar]) -> CPoly {
        let mut map: BTreeMap<_, _> =
            w.iter().enumerate().map(|(i, s)| (x_var(i), self.theory.symbols.embed_known(s))).collect();
        map.insert(HBAR, cpoly_int(1));
        p.substitute(&map)
    }

    fn diameter(&self) -> i64 {
        (0..self.theory.rank)
            .map(|i| {
                let lo = self.active.iter().map(|a| a[i]).min().unwrap_or(0);
                let hi = self.active.iter().map(|a| a[i]).max().unwrap_or(0);
                hi - lo + 1
            })
            .max()
            .unwrap_or(1)
    }
}

/// The scalar `c` with `r_ξ · b_ν = c · b_{ξ+ν}`: the product coefficient
/// evaluated at the weight of `b_{ξ+ν}`.
pub fn module_action(m: &UniversalWeightModule, xi: &[i64], nu: &[i64]) -> CPoly {
    let target: Coweight = xi.iter().zip(nu).map(|(a, b)| a + b).collect();
    m.evaluate(&product_factor(xi, nu, &m.theory), &m.weight(&target))
}

/// Position of `η` on its `ℤξ`-line: `η = key + t ξ`.
pub fn coset_key(eta: &[i64], xi: &[i64]) -> (Coweight, i64) {
    let Some(i) = xi.iter().position(|x| *x != 0) else {
        return (eta.to_vec(), 0);
    };
    let r = eta[i].rem_euclid(xi[i].abs());
    let t = (eta[i] - r) / xi[i];
    (eta.iter().zip(xi).map(|(e, x)| e - t * x).collect(), t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetLimit {
    /// earliest active vector of the coset in the direct system
    pub representative: Coweight,
    pub weight: Vec<String>,
    /// stabilized rank of the composite transitions out of the representative
    pub dim: usize,
    pub xi_negative: bool,
    pub steps: i64,
}

/// Steps after which no product factor with `ξ` survives along the line.
fn stabilization_steps(eta: &[i64], xi: &[i64], th: &TorusTheory) -> i64 {
    th.matter
        .iter()
        .filter_map(|mu| {
            let (a, b) = (mu.pair(xi), mu.pair(eta));
            (a != 0).then(|| (b.abs() + a.abs() - 1) / a.abs() + 1)
        })
        .max()
        .unwrap_or(0)
}

/// Direct limits along `r_ξ` for each `ℤξ`-coset meeting the active set.
pub fn res_support(m: &UniversalWeightModule, xi: &[i64]) -> BTreeMap<Coweight, CosetLimit> {
    let mut cosets: BTreeMap<Coweight, Vec<(i64, Coweight)>> = BTreeMap::new();
    for eta in &m.active {
        let (key, t) = coset_key(eta, xi);
        cosets.entry(key).or_default().push((t, eta.clone()));
    }
    let diam = m.diameter();
    let zero_xi = xi.iter().all(|x| *x == 0);
    cosets
        .into_iter()
        .map(|(key, mut members)| {
            members.sort();
            let (t0, rep) = members[0].clone();
            let span = members.last().map_or(0, |(t, _)| t - t0);
            let steps = if zero_xi { 0 } else { span + (2 * diam).max(stabilization_steps(&rep, xi, &m.theory)) };
            let mut eta = rep.clone();
            let mut dim = 1;
            for _ in 0..steps {
                if module_action(m, xi, &eta).is_zero() {
                    dim = 0;
                    break;
                }
                eta = eta.iter().zip(xi).map(|(a, b)| a + b).collect();
            }
            let w = m.weight(&rep);
            let neg = xi_negative(&w, xi, &m.theory, true);
            let weight = w.iter().map(|s| s.to_string()).collect();
            (key, CosetLimit { representative: rep, weight, dim, xi_negative: neg, steps })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QhrEntry {
    /// sum over `ℤξ`-cosets of the weight-space dimensions
    pub formula: usize,
    /// dimension of the quotient by `(r_ξ - 1)` on the truncation
    pub quotient: usize,
}

impl QhrEntry {
    pub fn agrees(&self) -> bool {
        self.formula == self.quotient
    }
}

fn first_nonzero(xi: &[i64]) -> Result<usize> {
    xi.iter().position(|x| *x != 0).ok_or_else(|| KlrwError::Mismatch("ξ = 0".into()))
}

/// The image of a weight in `t̃ / ℂξ`.
fn project(w: &[ExactScalar], xi: &[i64], i: usize) -> Vec<ExactScalar> {
    let t = w[i].scale(&(Q::one() / Q::from_integer(xi[i].into())));
    w.iter().zip(xi).map(|(a, x)| a - &t.scale(&Q::from_integer((*x).into()))).collect()
}

/// The class of a weight in `t̃ / ℤξ`.
fn z_class(w: &[ExactScalar], xi: &[i64], i: usize) -> Vec<ExactScalar> {
    let u = w[i].scale(&(Q::one() / Q::from_integer(xi[i].into())));
    let t = Q::from_integer(floor_q(&u.re));
    w.iter().zip(xi).map(|(a, x)| a - &ExactScalar::rational(&t * Q::from_integer((*x).into()))).collect()
}

/// Weight spaces of `M/(r_ξ - 1)M` for `M` the direct sum of the given
/// modules, keyed by the image `γ′` of the weight in `t̃/ℂξ`.
pub fn hamiltonian_reduce(
    ms: &[UniversalWeightModule],
    xi: &[i64],
) -> Result<BTreeMap<Vec<ExactScalar>, QhrEntry>> {
    let i = first_nonzero(xi)?;
    for m in ms {
        if let Some(mu) = m.theory.matter.iter().find(|mu| mu.pair(xi) != 0) {
            return Err(KlrwError::MatterNotInvariant(format!("weight {:?} pairs to {} with ξ", mu.gauge, mu.pair(xi))));
        }
    }
    // formula side
    let mut cosets: BTreeMap<Vec<ExactScalar>, BTreeMap<Vec<ExactScalar>, BTreeSet<usize>>> = BTreeMap::new();
    let mut vectors: BTreeMap<Vec<ExactScalar>, Vec<(usize, Coweight)>> = BTreeMap::new();
    for (k, m) in ms.iter().enumerate() {
        for eta in &m.active {
            let w = m.weight(eta);
            let g = project(&w, xi, i);
            cosets.entry(g.clone()).or_default().entry(z_class(&w, xi, i)).or_default().insert(k);
            vectors.entry(g).or_default().push((k, eta.clone()));
        }
    }
    let mut out = BTreeMap::new();
    for (g, by_coset) in cosets {
        let formula = by_coset.values().map(|s| s.len()).sum();
        let vecs = &vectors[&g];
        let index: BTreeMap<(usize, Coweight), usize> = vecs.iter().cloned().enumerate().map(|(n, v)| (v, n)).collect();
        let mut rows = Vec::new();
        for (k, eta) in vecs {
            let up: Coweight = eta.iter().zip(xi).map(|(a, b)| a + b).collect();
            if let Some(&col) = index.get(&(*k, up)) {
                let mut row = vec![CPoly::zero(); vecs.len()];
                row[col] = module_action(&ms[*k], xi, eta);
                row[index[&(*k, eta.clone())]] = &row[index[&(*k, eta.clone())]] - &CPoly::one();
                rows.push(row);
            }
        }
        let quotient = vecs.len() - rank(rows);
        out.insert(g, QhrEntry { formula, quotient });
    }
    Ok(out)
}

/// Rank over the fraction field, by fraction-free elimination.
pub fn rank(mut rows: Vec<Vec<CPoly>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = &(&*x * &pivot[col]) - &(&a * y);
            }
        }
        r += 1;
    }
    r
}

/// Rank over ℚ of integer vectors.
pub fn rank_int(vectors: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<CPoly>> = vectors.iter().map(|v| v.iter().map(|x| CPoly::constant(Cq::int(*x))).collect()).collect();
    rank(rows)
}

/// Dimension of a support presented as translates of lattices: the largest
/// rank among the generator sets.
pub fn gk_dim(pieces: &[(Vec<Vec<i64>>, Vec<ExactScalar>)]) -> usize {
    pieces.iter().map(|(gens, _)| rank_int(gens)).max().unwrap_or(0)
}
