//! The abelian Coulomb branch algebra: monopole operators `r_ν` over the
//! Gelfand–Tsetlin polynomials in `x_1..x_r`, ħ and flavour symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::coulomb::scalars::{cpoly_int, hbar, shift_coef, x_var, CPoly, Coef, Cq, SymbolVars};
use crate::error::{KlrwError, Result};
use crate::poly::Var;
use crate::scalar::{ExactScalar, Q};

pub type Coweight = Vec<i64>;

/// A weight of the matter representation: `gauge·x + flavour + hbar·ħ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatterWeight {
    pub gauge: Vec<i64>,
    pub flavour: ExactScalar,
    pub hbar: Q,
}

impl MatterWeight {
    pub fn new(gauge: Vec<i64>, flavour: ExactScalar, hbar: Q) -> Self {
        MatterWeight { gauge, flavour, hbar }
    }

    pub fn gauge_only(gauge: Vec<i64>) -> Self {
        Self::new(gauge, ExactScalar::zero(), Q::zero())
    }

    pub fn pair(&self, nu: &[i64]) -> i64 {
        self.gauge.iter().zip(nu).map(|(a, b)| a * b).sum()
    }

    /// `⟨μ, λ⟩` at a weight point, with ħ = 1.
    pub fn value_at(&self, lambda: &[ExactScalar]) -> ExactScalar {
        let mut v = &self.flavour + &ExactScalar::rational(self.hbar.clone());
        for (g, l) in self.gauge.iter().zip(lambda) {
            v = &v + &l.scale(&Q::from_integer((*g).into()));
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusTheory {
    pub rank: usize,
    pub matter: Vec<MatterWeight>,
    pub symbols: SymbolVars,
}

impl TorusTheory {
    pub fn new(rank: usize, matter: Vec<MatterWeight>) -> Result<Self> {
        if let Some(m) = matter.iter().find(|m| m.gauge.len() != rank) {
            return Err(KlrwError::Mismatch(format!("weight {:?} has length {}, rank is {rank}", m.gauge, m.gauge.len())));
        }
        let mut symbols = SymbolVars::default();
        for m in &matter {
            symbols.absorb(&m.flavour);
        }
        Ok(TorusTheory { rank, matter, symbols })
    }

    /// Same rank and symbol variables, different matter.
    pub fn with_matter(&self, matter: Vec<MatterWeight>) -> Self {
        let mut symbols = self.symbols.clone();
        for m in &matter {
            symbols.absorb(&m.flavour);
        }
        TorusTheory { rank: self.rank, matter, symbols }
    }

    /// The linear form `μ` with ħ kept as a variable.
    pub fn form(&self, m: &MatterWeight) -> CPoly {
        let mut p = self.symbols.embed_known(&m.flavour);
        p = &p + &hbar().scale(&Cq::rational(m.hbar.clone()));
        for (i, g) in m.gauge.iter().enumerate() {
            p = &p + &CPoly::var(x_var(i)).scale(&Cq::int(*g));
        }
        p
    }

    /// The linear form `μ` at ħ = 1.
    pub fn form1(&self, m: &MatterWeight) -> CPoly {
        let p = self.form(m);
        let map = BTreeMap::from([(crate::poly::HBAR, cpoly_int(1))]);
        p.substitute(&map)
    }

    pub fn var_name(&self, v: Var) -> String {
        self.symbols.name(self.rank, v)
    }

    pub fn zero_coweight(&self) -> Coweight {
        vec![0; self.rank]
    }

    fn check(&self, nu: &[i64]) {
        assert_eq!(nu.len(), self.rank, "coweight length");
    }
}

/// `d(a,b)`: zero for equal signs (zero counts as either), else `min(|a|,|b|)`.
pub fn d(a: i64, b: i64) -> i64 {
    if (a > 0 && b < 0) || (a < 0 && b > 0) {
        a.abs().min(b.abs())
    } else {
        0
    }
}

/// Finite sum `Σ f_ν r_ν` with coefficients written on the left.
#[derive(Clone, Debug, Default)]
pub struct MonopoleElement {
    pub terms: BTreeMap<Coweight, Coef>,
}

impl PartialEq for MonopoleElement {
    fn eq(&self, o: &Self) -> bool {
        self.terms.len() == o.terms.len()
            && self.terms.iter().zip(&o.terms).all(|((a, f), (b, g))| a == b && f == g)
    }
}

impl MonopoleElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn r(nu: Coweight) -> Self {
        Self::term(nu, Coef::one())
    }

    pub fn term(nu: Coweight, f: Coef) -> Self {
        let mut e = Self::zero();
        e.add_term(nu, f);
        e
    }

    pub fn scalar(th: &TorusTheory, f: Coef) -> Self {
        Self::term(th.zero_coweight(), f)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, nu: Coweight, f: Coef) {
        if f.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&nu) {
            Some(g) => g.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(nu, sum);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (nu, f) in &o.terms {
            out.add_term(nu.clone(), f.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MonopoleElement { terms: self.terms.iter().map(|(k, f)| (k.clone(), f.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Left multiplication by a Gelfand–Tsetlin element.
    pub fn left_scale(&self, f: &Coef) -> Self {
        let mut out = Self::zero();
        for (nu, g) in &self.terms {
            out.add_term(nu.clone(), f.mul(g));
        }
        out
    }

    pub fn map_coefs(&self, f: impl Fn(&Coweight, &Coef) -> Coef) -> Self {
        let mut out = Self::zero();
        for (nu, g) in &self.terms {
            out.add_term(nu.clone(), f(nu, g));
        }
        out
    }

    pub fn coef(&self, nu: &[i64]) -> Coef {
        self.terms.get(nu).cloned().unwrap_or_else(Coef::zero)
    }

    pub fn display(&self, th: &TorusTheory) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let name = |v: Var| th.var_name(v);
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(nu, f)| {
                let idx: Vec<String> = nu.iter().map(|n| n.to_string()).collect();
                let r = format!("r[{}]", idx.join(","));
                if *f == Coef::one() {
                    r
                } else {
                    format!("({})*{}", f.fmt_with(&name), r)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for MonopoleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rank = self.terms.keys().next().map_or(1, |k| k.len());
        let th = TorusTheory { rank, matter: vec![], symbols: SymbolVars::default() };
        write!(f, "{}", self.display(&th))
    }
}

/// The polynomial `P` with `r_ξ r_ν = P · r_{ξ+ν}`.
pub fn product_factor(xi: &[i64], nu: &[i64], th: &TorusTheory) -> CPoly {
    let mut p = CPoly::one();
    let h = hbar();
    for m in &th.matter {
        let (a, b) = (m.pair(xi), m.pair(nu));
        let dd = d(a, b);
        let mu = th.form(m);
        if a > 0 && b < 0 {
            for j in 1..=dd {
                p = &p * &(&mu + &h.scale(&Cq::int(a - j)));
            }
        } else if a < 0 && b > 0 {
            for j in 0..dd {
                p = &p * &(&mu + &h.scale(&Cq::int(a + j)));
            }
        }
    }
    p
}

fn add_coweights(a: &[i64], b: &[i64]) -> Coweight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_coweights(a: &[i64], b: &[i64]) -> Coweight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `r_ξ f = f(x + ħξ) r_ξ`.
pub fn commute(xi: &[i64], f: &Coef) -> Coef {
    shift_coef(f, xi, &hbar())
}

pub fn mul(a: &MonopoleElement, b: &MonopoleElement, th: &TorusTheory) -> MonopoleElement {
    let mut out = MonopoleElement::zero();
    for (xi, f) in &a.terms {
        th.check(xi);
        for (nu, g) in &b.terms {
            let c = f.mul(&commute(xi, g)).mul_poly(&product_factor(xi, nu, th));
            out.add_term(add_coweights(xi, nu), c);
        }
    }
    out
}

/// `r_ξ^{-1} r_ν`, a multiple of `r_{ν-ξ}` in the localization.
pub fn inv_monopole(xi: &[i64], nu: &[i64], th: &TorusTheory) -> MonopoleElement {
    let eta = sub_coweights(nu, xi);
    let h = hbar();
    let mut c = Coef::one();
    for m in &th.matter {
        let (a, b) = (m.pair(xi), m.pair(&eta));
        let dd = d(a, b);
        let mu = th.form(m);
        if a > 0 && b < 0 {
            for j in 1..=dd {
                c = c.div_linear(&(&mu - &h.scale(&Cq::int(j)))).expect("linear factor");
            }
        } else if a < 0 && b > 0 {
            for j in 0..dd {
                c = c.div_linear(&(&mu + &h.scale(&Cq::int(j)))).expect("linear factor");
            }
        }
    }
    MonopoleElement::term(eta, c)
}

/// `(r_{-ξ} r_ξ, r_ξ r_{-ξ})` computed with [`mul`].
pub fn rxi_pairing(xi: &[i64], th: &TorusTheory) -> (MonopoleElement, MonopoleElement) {
    let neg: Coweight = xi.iter().map(|x| -x).collect();
    let (p, m) = (MonopoleElement::r(xi.to_vec()), MonopoleElement::r(neg));
    (mul(&m, &p, th), mul(&p, &m, th))
}

/// The two closed-form products for `r_{-ξ} r_ξ` and `r_ξ r_{-ξ}` at ħ = 1.
pub fn rxi_closed_form(xi: &[i64], th: &TorusTheory) -> (CPoly, CPoly) {
    let (mut first, mut second) = (CPoly::one(), CPoly::one());
    for m in &th.matter {
        let a = m.pair(xi);
        let mu = th.form1(m);
        if a > 0 {
            for j in 1..=a {
                first = &first * &(&mu - &cpoly_int(j));
            }
            for j in 0..a {
                second = &second * &(&mu + &cpoly_int(j));
            }
        } else if a < 0 {
            for j in 0..-a {
                first = &first * &(&mu + &cpoly_int(j));
            }
            for j in 1..=-a {
                second = &second * &(&mu - &cpoly_int(j));
            }
        }
    }
    (first, second)
}

/// Image under `𝒜(G, N1 ⊕ N2) ↪ 𝒜(G, N2)`, where `n1` indexes the matter
/// being forgotten. Returns the image and the smaller theory.
pub fn forget_matter(a: &MonopoleElement, n1: &[usize], th: &TorusTheory) -> (MonopoleElement, TorusTheory) {
    let drop: BTreeSet<usize> = n1.iter().copied().collect();
    let kept: Vec<MatterWeight> =
        th.matter.iter().enumerate().filter(|(k, _)| !drop.contains(k)).map(|(_, m)| m.clone()).collect();
    let small = th.with_matter(kept);
    let h = hbar();
    let image = a.map_coefs(|nu, f| {
        let mut p = CPoly::one();
        for k in &drop {
            let m = &th.matter[*k];
            let b = m.pair(nu);
            let mu = th.form(m);
            for j in b..0 {
                p = &p * &(&mu + &h.scale(&Cq::int(j)));
            }
        }
        f.mul_poly(&p)
    });
    (image, small)
}

/// A cocharacter of the extended torus: a gauge part and, for each matter
/// weight, the pairing of its flavour component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierCocharacter {
    pub gauge: Vec<i64>,
    pub flavour: Vec<i64>,
}

impl FourierCocharacter {
    pub fn pair(&self, k: usize, m: &MatterWeight) -> i64 {
        m.pair(&self.gauge) + self.flavour.get(k).copied().unwrap_or(0)
    }
}

/// The Fourier isomorphism dualizing the matter indexed by `n2`. Returns the
/// image and the target theory.
pub fn fourier(
    a: &MonopoleElement,
    n2: &[usize],
    wp: &FourierCocharacter,
    th: &TorusTheory,
) -> Result<(MonopoleElement, TorusTheory)> {
    let dual: BTreeSet<usize> = n2.iter().copied().collect();
    if wp.gauge.len() != th.rank {
        return Err(KlrwError::BadCocharacter(format!("gauge part has length {}", wp.gauge.len())));
    }
    for (k, m) in th.matter.iter().enumerate() {
        let want = i64::from(dual.contains(&k));
        let got = wp.pair(k, m);
        if got != want {
            return Err(KlrwError::BadCocharacter(format!("pairs to {got} with weight {k}, expected {want}")));
        }
    }
    let matter = th
        .matter
        .iter()
        .enumerate()
        .map(|(k, m)| {
            // the constant flavour part does not move under x ↦ x + ħ℘, so its
            // share of the shift is carried by the ħ-part
            let fl = Q::from_integer(wp.flavour.get(k).copied().unwrap_or(0).into());
            if dual.contains(&k) {
                MatterWeight::new(m.gauge.iter().map(|g| -g).collect(), -m.flavour.clone(), -m.hbar.clone() + fl)
            } else {
                MatterWeight::new(m.gauge.clone(), m.flavour.clone(), m.hbar.clone() - fl)
            }
        })
        .collect();
    let target = th.with_matter(matter);
    let h = hbar();
    let image = a.map_coefs(|nu, f| {
        let delta: i64 = dual.iter().map(|k| th.matter[*k].pair(nu)).filter(|p| *p > 0).sum();
        let g = shift_coef(f, &wp.gauge, &h);
        if delta % 2 == 0 {
            g
        } else {
            g.neg()
        }
    });
    Ok((image, target))
}

fn factor_product(fs: &[CPoly]) -> CPoly {
    fs.iter().fold(CPoly::one(), |acc, l| &acc * l)
}

fn divide_by_factors(mut c: Coef, fs: &[CPoly]) -> Coef {
    for l in fs {
        c = c.div_linear(l).expect("nonzero linear factor");
    }
    c
}

fn phi0_factors(lam: &[i64], lam_p: &[i64], th: &TorusTheory, keep: impl Fn(&MatterWeight) -> bool) -> Vec<CPoly> {
    let diff = sub_coweights(lam, lam_p);
    let mut out = Vec::new();
    for m in th.matter.iter().filter(|m| keep(m)) {
        let mu = th.form1(m);
        let skip = m.pair(lam_p);
        for j in 1..=-m.pair(&diff) {
            if j != skip {
                out.push(&mu - &cpoly_int(j));
            }
        }
    }
    out
}

/// `Φ₀(λ, λ′)` at ħ = 1.
pub fn phi0(lam: &[i64], lam_p: &[i64], th: &TorusTheory) -> CPoly {
    factor_product(&phi0_factors(lam, lam_p, th, |_| true))
}

/// Numerator and denominator factors of `κ_λ`.
fn kappa_factors(lam: &[i64], xi: &[i64], th: &TorusTheory) -> (Vec<CPoly>, Vec<CPoly>) {
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for m in th.matter.iter().filter(|m| m.pair(xi) < 0) {
        let mu = th.form1(m);
        let b = m.pair(lam);
        if b > 0 {
            for j in 1..b {
                num.push(&mu - &cpoly_int(j));
            }
        } else {
            for j in 0..-b {
                den.push(&mu + &cpoly_int(j));
            }
        }
    }
    (num, den)
}

/// `κ_λ` at ħ = 1.
pub fn kappa(lam: &[i64], xi: &[i64], th: &TorusTheory) -> Coef {
    let (num, den) = kappa_factors(lam, xi, th);
    divide_by_factors(Coef::from_poly(factor_product(&num)), &den)
}

fn phi0_prime_factors(nu: &[i64], nu_p: &[i64], xi: &[i64], th: &TorusTheory) -> (Vec<CPoly>, Vec<CPoly>) {
    let mut num = phi0_factors(nu, nu_p, th, |m| m.pair(xi) == 0);
    let mut den = Vec::new();
    let diff = sub_coweights(nu, nu_p);
    for m in th.matter.iter().filter(|m| m.pair(xi) < 0) {
        let mu = th.form1(m);
        let (e, bp) = (m.pair(&diff), m.pair(nu_p));
        for j in 1..=-e {
            if j != bp {
                num.push(&mu - &cpoly_int(j));
            }
        }
        for j in 0..e {
            if j != -bp {
                den.push(&mu + &cpoly_int(j));
            }
        }
    }
    (num, den)
}

/// `Φ₀′(ν, ν′)` at ħ = 1.
pub fn phi0_prime(nu: &[i64], nu_p: &[i64], xi: &[i64], th: &TorusTheory) -> Coef {
    let (num, den) = phi0_prime_factors(nu, nu_p, xi, th);
    divide_by_factors(Coef::from_poly(factor_product(&num)), &den)
}

/// The coefficient of `r_{ν-ν′}` in `κ_{ν′}^{-1} Φ₀^{N₀^ξ}(ν,ν′)^{-1} r_{ν-ν′} κ_ν`
/// at ħ = 1, with `κ_ν` moved to the left of the monopole.
pub fn twisted_weight_coefficient(nu: &[i64], nu_p: &[i64], xi: &[i64], th: &TorusTheory) -> Coef {
    let (kp_num, kp_den) = kappa_factors(nu_p, xi, th);
    let kappa_p_inv = divide_by_factors(Coef::from_poly(factor_product(&kp_den)), &kp_num);
    let phi = phi0_factors(nu, nu_p, th, |m| m.pair(xi) == 0);
    let phi_inv = divide_by_factors(Coef::one(), &phi);
    let shifted = shift_coef(&kappa(nu, xi, th), &sub_coweights(nu, nu_p), &cpoly_int(1));
    kappa_p_inv.mul(&phi_inv).mul(&shifted)
}

/// Both sides of the twisted-functor identity: the coefficient above and
/// `1/Φ₀′(ν,ν′)`.
pub fn el_kappa_sides(nu: &[i64], nu_p: &[i64], xi: &[i64], th: &TorusTheory) -> (Coef, Coef) {
    let lhs = twisted_weight_coefficient(nu, nu_p, xi, th);
    let (num, den) = phi0_prime_factors(nu, nu_p, xi, th);
    let rhs = divide_by_factors(Coef::from_poly(factor_product(&den)), &num);
    (lhs, rhs)
}

/// `λ` is ξ-negative: no weight with `⟨μ,ξ⟩ > 0` has `⟨μ,λ⟩` a positive
/// integer, none with `⟨μ,ξ⟩ < 0` has `⟨μ,λ⟩` a non-positive integer, and the
/// stabilizer condition holds.
pub fn xi_negative(lam: &[ExactScalar], xi: &[i64], th: &TorusTheory, stabilizer_ok: bool) -> bool {
    if !stabilizer_ok {
        return false;
    }
    th.matter.iter().all(|m| {
        let a = m.pair(xi);
        let v = m.value_at(lam);
        match v.as_integer() {
            Some(n) if a > 0 => n <= 0.into(),
            Some(n) if a < 0 => n > 0.into(),
            _ => true,
        }
    })
}

/// None of the eigenvalues of `r_{-ξ} r_ξ` on `Wei_ν` vanish.
pub fn transition_invertible(nu: &[ExactScalar], xi: &[i64], th: &TorusTheory) -> bool {
    th.matter.iter().all(|m| {
        let a = m.pair(xi);
        let v = m.value_at(nu);
        let hits = |j: i64| (&v + &ExactScalar::int(j)).is_zero();
        if a > 0 {
            !(1..=a).any(|j| hits(-j))
        } else if a < 0 {
            !(0..-a).any(hits)
        } else {
            true
        }
    })
}

// ---------------------------------------------------------------------------
// Random data for property checks.

pub fn random_theory(rng: &mut ChaCha8Rng, max_rank: usize, max_matter: usize) -> TorusTheory {
    let rank = rng.gen_range(1..=max_rank);
    let n = rng.gen_range(0..=max_matter);
    let matter = (0..n)
        .map(|_| {
            let mut gauge: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=2)).collect();
            if gauge.iter().all(|g| *g == 0) {
                gauge[0] = 1;
            }
            let flavour = match rng.gen_range(0..3) {
                0 => ExactScalar::zero(),
                1 => ExactScalar::frac(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
                _ => ExactScalar::symbol("a"),
            };
            MatterWeight::new(gauge, flavour, Q::from_integer(rng.gen_range(-1..=1).into()))
        })
        .collect();
    TorusTheory::new(rank, matter).expect("consistent ranks")
}

pub fn random_coweight(rng: &mut ChaCha8Rng, rank: usize, bound: i64) -> Coweight {
    (0..rank).map(|_| rng.gen_range(-bound..=bound)).collect()
}

fn random_coef(rng: &mut ChaCha8Rng, th: &TorusTheory) -> Coef {
    let mut p = cpoly_int(rng.gen_range(-2..=2));
    for _ in 0..rng.gen_range(0..=2) {
        let v = x_var(rng.gen_range(0..th.rank));
        let c = rng.gen_range(-2..=2);
        let h = if rng.gen_bool(0.5) { hbar() } else { CPoly::one() };
        p = &p + &(&CPoly::var(v) * &h).scale(&Cq::int(c));
    }
    if p.is_zero() {
        p = CPoly::one();
    }
    let mut f = Coef::from_poly(p);
    if rng.gen_bool(0.25) {
        let v = x_var(rng.gen_range(0..th.rank));
        let l = &CPoly::var(v) + &hbar().scale(&Cq::int(rng.gen_range(-2..=2)));
        f = f.div_linear(&l).expect("linear");
    }
    f
}

/// An element with at most `max_terms` terms and small coweights.
pub fn random_element(rng: &mut ChaCha8Rng, th: &TorusTheory, max_terms: usize) -> MonopoleElement {
    let mut e = MonopoleElement::zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let nu = random_coweight(rng, th.rank, 2);
        e.add_term(nu, random_coef(rng, th));
    }
    e
}
