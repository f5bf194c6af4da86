//! Exact complex scalars with formal irrational symbols.
//!
//! A scalar is `re + im*i + sum_s c_s * s` where each symbol `s` is an opaque
//! real number with a rational shadow used only for ordering.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{KlrwError, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub shadow: Q,
    pub declared_nonintegral: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub entries: BTreeMap<String, SymbolInfo>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a symbol. Re-declaring with a different shadow is an error.
    pub fn declare(&mut self, name: &str, shadow: Q, declared_nonintegral: bool) -> Result<()> {
        let shadow = round_shadow(shadow);
        match self.entries.get(name) {
            Some(info) if info.shadow != shadow => Err(KlrwError::parse(format!(
                "symbol {name} declared with shadows {} and {}",
                info.shadow, shadow
            ))),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(
                    name.to_string(),
                    SymbolInfo { shadow, declared_nonintegral },
                );
                Ok(())
            }
        }
    }

    pub fn shadow(&self, name: &str) -> Result<&Q> {
        self.entries
            .get(name)
            .map(|i| &i.shadow)
            .ok_or_else(|| KlrwError::UnknownSymbol(name.to_string()))
    }

    pub fn merge(&mut self, other: &SymbolTable) -> Result<()> {
        for (k, v) in &other.entries {
            self.declare(k, v.shadow.clone(), v.declared_nonintegral)?;
        }
        Ok(())
    }
}

// KLRW_SHADOW_PRECISION=D rounds shadows to the nearest multiple of 1/D.
fn round_shadow(x: Q) -> Q {
    let Some(d) = std::env::var("KLRW_SHADOW_PRECISION")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .filter(|d| *d > 0)
    else {
        return x;
    };
    let scaled = x * q(d) + qf(1, 2);
    Q::new(floor_q(&scaled), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExactScalar {
    pub re: Q,
    pub im: Q,
    pub sym: BTreeMap<String, Q>,
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { re: Q::zero(), im: Q::zero(), sym: BTreeMap::new() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(q(n))
    }

    pub fn rational(re: Q) -> Self {
        ExactScalar { re, im: Q::zero(), sym: BTreeMap::new() }
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(qf(n, d))
    }

    pub fn complex(re: Q, im: Q) -> Self {
        ExactScalar { re, im, sym: BTreeMap::new() }
    }

    pub fn symbol(name: &str) -> Self {
        let mut sym = BTreeMap::new();
        sym.insert(name.to_string(), Q::one());
        ExactScalar { re: Q::zero(), im: Q::zero(), sym }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.sym.is_empty()
    }

    pub fn is_symbol_free(&self) -> bool {
        self.sym.is_empty()
    }

    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.sym.is_empty() && self.re.is_integer()
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.re.to_integer())
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ExactScalar {
            re: &self.re * c,
            im: &self.im * c,
            sym: self.sym.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Product, defined when at most one side carries symbols and that side is
    /// then multiplied by a real rational.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        if self.sym.is_empty() && other.sym.is_empty() {
            return Some(ExactScalar::complex(
                &self.re * &other.re - &self.im * &other.im,
                &self.re * &other.im + &self.im * &other.re,
            ));
        }
        if self.sym.is_empty() && self.im.is_zero() {
            return Some(other.scale(&self.re));
        }
        if other.sym.is_empty() && other.im.is_zero() {
            return Some(self.scale(&other.re));
        }
        None
    }

    /// Rational part reduced to [0,1); imaginary and symbolic parts kept.
    pub fn canonical_rep(&self) -> Self {
        let fl = Q::from_integer(floor_q(&self.re));
        ExactScalar { re: &self.re - fl, im: self.im.clone(), sym: self.sym.clone() }
    }

    pub fn real_part(&self) -> Self {
        ExactScalar { re: self.re.clone(), im: Q::zero(), sym: self.sym.clone() }
    }

    pub fn real_shadow(&self, t: &SymbolTable) -> Result<Q> {
        let mut acc = self.re.clone();
        for (k, c) in &self.sym {
            acc += c * t.shadow(k)?;
        }
        Ok(acc)
    }

    fn normalize(mut self) -> Self {
        self.sym.retain(|_, v| !v.is_zero());
        self
    }

    /// Literal form including symbol shadows, parseable without a table.
    pub fn to_literal(&self, t: &SymbolTable) -> String {
        self.render(Some(t))
    }

    fn render(&self, t: Option<&SymbolTable>) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        if !self.re.is_zero() {
            parts.push((self.re.is_negative(), fmt_q(&self.re.abs())));
        }
        if !self.im.is_zero() {
            let a = self.im.abs();
            let body = if a.is_one() { "i".to_string() } else { format!("{}i", fmt_q(&a)) };
            parts.push((self.im.is_negative(), body));
        }
        for (k, c) in &self.sym {
            let a = c.abs();
            let name = match t.and_then(|t| t.entries.get(k)) {
                Some(info) => {
                    let flag = if info.declared_nonintegral { "" } else { "?" };
                    format!("sym:{k}{flag}~{}", fmt_q(&info.shadow))
                }
                None => format!("sym:{k}"),
            };
            let body = if a.is_one() { name } else { format!("{}*{name}", fmt_q(&a)) };
            parts.push((c.is_negative(), body));
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, (neg, body)) in parts.iter().enumerate() {
            if *neg {
                out.push('-');
            } else if n > 0 {
                out.push('+');
            }
            out.push_str(body);
        }
        out
    }

    pub fn parse(s: &str, t: &mut SymbolTable) -> Result<Self> {
        parse_scalar(s, t)
    }
}

pub fn is_integral_difference(a: &ExactScalar, b: &ExactScalar) -> bool {
    (a - b).is_integer()
}

/// Coset equality modulo ℤ, using declared_nonintegral flags for symbols.
pub fn coset_eq(a: &ExactScalar, b: &ExactScalar, t: &SymbolTable) -> Result<bool> {
    let d = a - b;
    if d.sym.is_empty() {
        return Ok(d.im.is_zero() && d.re.is_integer());
    }
    for k in d.sym.keys() {
        let info = t.entries.get(k).ok_or_else(|| KlrwError::UnknownSymbol(k.clone()))?;
        if !info.declared_nonintegral {
            return Err(KlrwError::AmbiguousOrder(a.to_string(), b.to_string()));
        }
    }
    Ok(false)
}

pub fn real_compare(a: &ExactScalar, b: &ExactScalar, t: &SymbolTable) -> Result<Ordering> {
    let d = a - b;
    if d.sym.is_empty() {
        return Ok(d.re.cmp(&Q::zero()));
    }
    let v = d.real_shadow(t)?;
    match v.cmp(&Q::zero()) {
        Ordering::Equal => Err(KlrwError::AmbiguousOrder(a.to_string(), b.to_string())),
        o => Ok(o),
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        let mut sym = self.sym.clone();
        for (k, v) in &o.sym {
            *sym.entry(k.clone()).or_insert_with(Q::zero) += v;
        }
        ExactScalar { re: &self.re + &o.re, im: &self.im + &o.im, sym }.normalize()
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        self + &(-o)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            re: -&self.re,
            im: -&self.im,
            sym: self.sym.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: ExactScalar) -> ExactScalar {
        &self + &o
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: ExactScalar) -> ExactScalar {
        &self - &o
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl Mul<&Q> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, c: &Q) -> ExactScalar {
        self.scale(c)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::int(n)
    }
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(None))
    }
}

/// Parses `3`, `-3/4`, `1.25`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || KlrwError::parse(format!("bad rational literal '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let v = Q::new(n, d);
    Ok(if neg { -v } else { v })
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn number(&mut self) -> &'a str {
        self.take_while(|c| c.is_ascii_digit() || c == b'/' || c == b'.')
    }
}

fn parse_scalar(s: &str, t: &mut SymbolTable) -> Result<ExactScalar> {
    let err = |m: &str| KlrwError::parse(format!("bad scalar literal '{s}': {m}"));
    let mut lx = Lexer { s: s.as_bytes(), pos: 0 };
    let mut acc = ExactScalar::zero();
    let mut first = true;
    loop {
        lx.skip_ws();
        let Some(c) = lx.peek() else { break };
        let mut sign = Q::one();
        if c == b'+' || c == b'-' {
            if c == b'-' {
                sign = -sign;
            }
            lx.pos += 1;
            lx.skip_ws();
        } else if !first {
            return Err(err("expected + or -"));
        }
        first = false;
        let num = lx.number();
        let coef = if num.is_empty() { Q::one() } else { parse_rational(num)? };
        let coef = coef * sign;
        lx.skip_ws();
        if lx.peek() == Some(b'*') {
            lx.pos += 1;
            lx.skip_ws();
        }
        let rest = &s[lx.pos..];
        if rest.starts_with("sym:") {
            lx.pos += 4;
            let name = lx.take_while(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'');
            if name.is_empty() {
                return Err(err("empty symbol name"));
            }
            let mut nonintegral = true;
            if lx.peek() == Some(b'?') {
                lx.pos += 1;
                nonintegral = false;
            }
            if lx.peek() == Some(b'~') {
                lx.pos += 1;
                let neg = lx.peek() == Some(b'-');
                if neg {
                    lx.pos += 1;
                }
                let sh = parse_rational(lx.number())?;
                t.declare(name, if neg { -sh } else { sh }, nonintegral)?;
            } else if !t.entries.contains_key(name) {
                return Err(KlrwError::UnknownSymbol(name.to_string()));
            }
            acc = &acc + &ExactScalar::symbol(name).scale(&coef);
        } else if lx.peek() == Some(b'i') {
            lx.pos += 1;
            acc = &acc + &ExactScalar::complex(Q::zero(), coef);
        } else if num.is_empty() {
            return Err(err("expected a number, 'i' or 'sym:'"));
        } else {
            acc = &acc + &ExactScalar::rational(coef);
        }
    }
    if first {
        return Err(err("empty"));
    }
    Ok(acc)
}
