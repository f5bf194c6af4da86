//! Coefficient field for the torus algebra: exact Gaussian rationals, with
//! flavour symbols carried as extra polynomial variables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::poly::{Poly, Var, HBAR};
use crate::ratfunc::RatFunc;
use crate::scalar::{ExactScalar, Q};

/// Exact complex rational.
#[derive(Clone, PartialEq, Debug)]
pub struct Cq(pub Complex<Q>);

impl Cq {
    pub fn new(re: Q, im: Q) -> Self {
        Cq(Complex::new(re, im))
    }

    pub fn rational(re: Q) -> Self {
        Cq(Complex::new(re, Q::zero()))
    }

    pub fn int(n: i64) -> Self {
        Self::rational(Q::from_integer(n.into()))
    }
}

impl Zero for Cq {
    fn zero() -> Self {
        Cq(Complex::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Cq {
    fn one() -> Self {
        Cq(Complex::one())
    }
}

impl Neg for Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq(-self.0)
    }
}

impl Add for Cq {
    type Output = Cq;
    fn add(self, o: Cq) -> Cq {
        Cq(self.0 + o.0)
    }
}

impl Sub for Cq {
    type Output = Cq;
    fn sub(self, o: Cq) -> Cq {
        Cq(self.0 - o.0)
    }
}

impl Mul for Cq {
    type Output = Cq;
    fn mul(self, o: Cq) -> Cq {
        Cq(self.0 * o.0)
    }
}

impl Div for Cq {
    type Output = Cq;
    fn div(self, o: Cq) -> Cq {
        Cq(self.0 / o.0)
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (&self.0.re, &self.0.im);
        if im.is_zero() {
            return write!(f, "{re}");
        }
        let imag = if im.is_one() {
            "i".to_string()
        } else if (-im).is_one() {
            "-i".to_string()
        } else {
            format!("{im}i")
        };
        if re.is_zero() {
            write!(f, "{imag}")
        } else if imag.starts_with('-') {
            write!(f, "{re}{imag}")
        } else {
            write!(f, "{re}+{imag}")
        }
    }
}

pub type CPoly = Poly<Cq>;
pub type Coef = RatFunc<Cq>;

/// Variable of the gauge coordinate `x_{i+1}`.
pub fn x_var(i: usize) -> Var {
    i as Var
}

/// Flavour symbols get the variables above ħ, in the order listed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolVars {
    pub names: Vec<String>,
}

impl SymbolVars {
    pub fn var(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n == name).map(|k| HBAR + 1 + k as Var)
    }

    pub fn insert(&mut self, name: &str) -> Var {
        if let Some(v) = self.var(name) {
            return v;
        }
        self.names.push(name.to_string());
        HBAR + self.names.len() as Var
    }

    pub fn absorb(&mut self, s: &ExactScalar) {
        for k in s.sym.keys() {
            self.insert(k);
        }
    }

    /// Embeds an exact scalar: its symbols become variables.
    pub fn embed(&mut self, s: &ExactScalar) -> CPoly {
        let mut p = CPoly::constant(Cq::new(s.re.clone(), s.im.clone()));
        for (k, c) in &s.sym {
            let v = self.insert(k);
            p = &p + &CPoly::var(v).scale(&Cq::rational(c.clone()));
        }
        p
    }

    /// As [`embed`](Self::embed) for a scalar whose symbols are all known.
    pub fn embed_known(&self, s: &ExactScalar) -> CPoly {
        let mut p = CPoly::constant(Cq::new(s.re.clone(), s.im.clone()));
        for (k, c) in &s.sym {
            let v = self.var(k).expect("symbol registered with the theory");
            p = &p + &CPoly::var(v).scale(&Cq::rational(c.clone()));
        }
        p
    }

    pub fn name(&self, rank: usize, v: Var) -> String {
        if v == HBAR {
            "h".to_string()
        } else if v > HBAR {
            self.names.get((v - HBAR - 1) as usize).cloned().unwrap_or_else(|| format!("p{}", v - HBAR - 1))
        } else if rank == 1 && v == 0 {
            "x".to_string()
        } else {
            format!("x{}", v + 1)
        }
    }
}

pub fn cpoly_q(c: Q) -> CPoly {
    CPoly::constant(Cq::rational(c))
}

pub fn cpoly_int(n: i64) -> CPoly {
    CPoly::constant(Cq::int(n))
}

pub fn hbar() -> CPoly {
    CPoly::var(HBAR)
}

/// Substitution `x_i ↦ x_i + shift_i · t` where `t` is ħ or 1.
pub fn shift_map(shift: &[i64], t: &CPoly) -> BTreeMap<Var, CPoly> {
    shift
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != 0)
        .map(|(i, s)| (x_var(i), &CPoly::var(x_var(i)) + &t.scale(&Cq::int(*s))))
        .collect()
}

pub fn shift_coef(f: &Coef, shift: &[i64], t: &CPoly) -> Coef {
    let map = shift_map(shift, t);
    if map.is_empty() {
        return f.clone();
    }
    f.substitute(&map).expect("affine shift keeps linear factors nonzero")
}

/// `ħ ↦ 1`.
pub fn at_hbar_one(f: &Coef) -> Coef {
    let map = BTreeMap::from([(HBAR, cpoly_int(1))]);
    f.substitute(&map).expect("specialization hits a vanishing denominator")
}
