//! Sparse multivariate polynomials over an exact field.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// Variable index. Indices at or above [`HBAR`] are reserved for ħ and
/// named parameters.
pub type Var = u32;

pub const HBAR: Var = 1 << 20;

pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + fmt::Display
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Send
        + Sync
{
}

/// Sorted list of (variable, positive exponent).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(pub Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_exps(exps: &[(Var, u32)]) -> Self {
        let mut m = Monomial::one();
        for &(v, e) in exps {
            m = m.mul(&Monomial(if e == 0 { vec![] } else { vec![(v, e)] }));
        }
        m
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            match (self.0.get(i), o.0.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    pub fn with_exp(&self, v: Var, e: u32) -> Monomial {
        let mut out: Vec<(Var, u32)> = self.0.iter().copied().filter(|(w, _)| *w != v).collect();
        if e > 0 {
            out.push((v, e));
            out.sort();
        }
        Monomial(out)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C> {
    pub terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(C::one(), Monomial::var(v))
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(C::one(), m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = x.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x.clone() * c.clone())).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Poly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x.clone())).collect() }
    }

    /// Total degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn constant_term(&self) -> C {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(C::zero)
    }

    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 if self.terms.contains_key(&Monomial::one()) => Some(self.constant_term()),
            _ => None,
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, map: &BTreeMap<Var, Poly<C>>) -> Self {
        let mut powers: BTreeMap<Var, Vec<Poly<C>>> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match map.get(&v) {
                    Some(p) => {
                        let ps = powers.entry(v).or_insert_with(|| vec![Self::one()]);
                        while ps.len() <= e as usize {
                            let next = &ps[ps.len() - 1] * p;
                            ps.push(next);
                        }
                        t = &t * &ps[e as usize];
                    }
                    None => rest.push((v, e)),
                }
            }
            let rest = Monomial(rest);
            for (k, x) in t.terms {
                out.add_term(k.mul(&rest), x);
            }
        }
        out
    }

    /// Renames variables (a bijection on the variables present).
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut exps: Vec<(Var, u32)> = m.0.iter().map(|&(v, e)| (f(v), e)).collect();
            exps.sort();
            out.add_term(Monomial::from_exps(&exps), c.clone());
        }
        out
    }

    pub fn swap(&self, a: Var, b: Var) -> Self {
        self.rename(|v| if v == a { b } else if v == b { a } else { v })
    }

    /// Divided difference (f - s_{ab} f) / (x_a - x_b), computed termwise.
    pub fn demazure(&self, a: Var, b: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (p, qq) = (m.exp(a), m.exp(b));
            if p == qq {
                continue;
            }
            let base = m.with_exp(a, 0).with_exp(b, 0);
            let (lo, hi, sign) = if p > qq { (qq, p, C::one()) } else { (p, qq, -C::one()) };
            let span = hi - lo;
            for k in 0..span {
                let mono = base.mul(&Monomial::from_exps(&[(a, lo + k), (b, lo + span - 1 - k)]));
                out.add_term(mono, c.clone() * sign.clone());
            }
        }
        out
    }

    /// Exact division by a polynomial of total degree one; None if inexact.
    pub fn div_linear(&self, l: &Poly<C>) -> Option<Self> {
        let v = l
            .terms
            .keys()
            .filter(|m| m.degree() == 1)
            .map(|m| m.0[0].0)
            .max()?;
        let c = l.terms.get(&Monomial::var(v))?.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        loop {
            let d = rem.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0);
            if d == 0 {
                break;
            }
            let top: Vec<(Monomial, C)> = rem
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == d)
                .map(|(m, x)| (m.with_exp(v, d - 1), x.clone() / c.clone()))
                .collect();
            let mut qt = Self::zero();
            for (m, x) in top {
                qt.add_term(m, x);
            }
            rem = &rem - &(&qt * l);
            quot = &quot + &qt;
        }
        rem.is_zero().then_some(quot)
    }

    pub fn eval(&self, point: &BTreeMap<Var, C>) -> Self {
        let map: BTreeMap<Var, Poly<C>> =
            point.iter().map(|(v, c)| (*v, Poly::constant(c.clone()))).collect();
        self.substitute(&map)
    }

    pub fn fmt_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let cs = format!("{c}");
            let mono: Vec<String> = m
                .0
                .iter()
                .map(|&(v, e)| if e == 1 { name(v) } else { format!("{}^{}", name(v), e) })
                .collect();
            let body = if mono.is_empty() {
                cs.clone()
            } else if c.is_one() {
                mono.join("*")
            } else if (-c.clone()).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("({cs})*{}", mono.join("*"))
            };
            if n > 0 && !body.starts_with('-') {
                s.push('+');
            }
            s.push_str(&body);
        }
        s
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, o: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

pub fn default_var_name(v: Var) -> String {
    if v == HBAR {
        "h".to_string()
    } else if v > HBAR {
        format!("p{}", v - HBAR - 1)
    } else {
        format!("y{}", v + 1)
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&default_var_name))
    }
}
