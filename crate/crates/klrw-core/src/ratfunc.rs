//! Rational functions whose denominators are products of linear forms.

use std::collections::BTreeMap;
use std::fmt;


use crate::poly::{Coeff, Poly, Var};

#[derive(Clone, Debug)]
pub struct RatFunc<C> {
    pub num: Poly<C>,
    /// Normalized linear factors (largest monomial has coefficient 1).
    pub den: Vec<Poly<C>>,
}

/// Splits a degree-one polynomial as `c * l` with `l` normalized.
pub fn normalize_linear<C: Coeff>(l: &Poly<C>) -> Option<(C, Poly<C>)> {
    if l.degree() != Some(1) {
        return None;
    }
    let (_, lead) = l.terms.iter().next_back()?;
    let lead = lead.clone();
    let inv = C::one() / lead.clone();
    Some((lead, l.scale(&inv)))
}

impl<C: Coeff> RatFunc<C> {
    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: C) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(num: Poly<C>) -> Self {
        RatFunc { num, den: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// Divides by a linear form. Returns None for a non-linear or zero divisor.
    pub fn div_linear(&self, l: &Poly<C>) -> Option<Self> {
        if let Some(c) = l.as_constant() {
            if c.is_zero() {
                return None;
            }
            return Some(RatFunc { num: self.num.scale(&(C::one() / c)), den: self.den.clone() });
        }
        let (c, l) = normalize_linear(l)?;
        let mut out = RatFunc { num: self.num.scale(&(C::one() / c)), den: self.den.clone() };
        out.den.push(l);
        out.cancel();
        Some(out)
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let mut kept = Vec::new();
        for l in std::mem::take(&mut self.den) {
            match self.num.div_linear(&l) {
                Some(qq) => self.num = qq,
                None => kept.push(l),
            }
        }
        kept.sort_by(|a, b| a.terms.keys().cmp(b.terms.keys()));
        self.den = kept;
    }

    fn den_product(&self) -> Poly<C> {
        self.den.iter().fold(Poly::one(), |acc, l| &acc * l)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = RatFunc { num: &self.num * &o.num, den: self.den.clone() };
        out.den.extend(o.den.iter().cloned());
        out.cancel();
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = RatFunc { num: self.num.scale(c), den: self.den.clone() };
        out.cancel();
        out
    }

    pub fn mul_poly(&self, p: &Poly<C>) -> Self {
        self.mul(&Self::from_poly(p.clone()))
    }

    pub fn add(&self, o: &Self) -> Self {
        // common denominator: multiset union
        let mut rest_a = o.den.clone();
        let mut extra_for_self = Vec::new();
        for l in &self.den {
            if let Some(pos) = rest_a.iter().position(|x| x == l) {
                rest_a.remove(pos);
            } else {
                extra_for_self.push(l.clone());
            }
        }
        // rest_a: factors of o not in self; extra_for_self: factors of self not in o
        let na = rest_a.iter().fold(self.num.clone(), |acc, l| &acc * l);
        let nb = extra_for_self.iter().fold(o.num.clone(), |acc, l| &acc * l);
        let mut den = self.den.clone();
        den.extend(rest_a);
        let mut out = RatFunc { num: &na + &nb, den };
        out.cancel();
        out
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Inverse when the numerator is a nonzero constant times given linear
    /// factors.
    pub fn inv_with_factors(&self, c: C, factors: &[Poly<C>]) -> Option<Self> {
        if c.is_zero() {
            return None;
        }
        let mut out = RatFunc::from_poly(self.den_product()).scale(&(C::one() / c));
        for l in factors {
            out = out.div_linear(l)?;
        }
        Some(out)
    }

    pub fn substitute(&self, map: &BTreeMap<Var, Poly<C>>) -> Option<Self> {
        let mut out = Self::from_poly(self.num.substitute(map));
        for l in &self.den {
            out = out.div_linear(&l.substitute(map))?;
        }
        Some(out)
    }

    pub fn fmt_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.den.is_empty() {
            return self.num.fmt_with(name);
        }
        let d: Vec<String> = self.den.iter().map(|l| format!("({})", l.fmt_with(name))).collect();
        format!("({})/{}", self.num.fmt_with(name), d.join(""))
    }
}

impl<C: Coeff> PartialEq for RatFunc<C> {
    fn eq(&self, o: &Self) -> bool {
        &self.num * &o.den_product() == &o.num * &self.den_product()
    }
}

impl<C: Coeff> fmt::Display for RatFunc<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&crate::poly::default_var_name))
    }
}

impl<C: Coeff> From<Poly<C>> for RatFunc<C> {
    fn from(p: Poly<C>) -> Self {
        Self::from_poly(p)
    }
}
