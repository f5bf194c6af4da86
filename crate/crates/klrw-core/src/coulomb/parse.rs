//! Text forms of matter weights and monopole elements.
//!
//! Expressions use `x` (rank one) or `x1, x2, …`, `h` for ħ, `i` for the
//! imaginary unit, rational literals, other identifiers as flavour symbols,
//! `+ - * / ^`, parentheses and monopoles `r[ν₁,…,ν_r]`. Products are taken
//! in the algebra, so `r[1]*x` and `x*r[1]` differ.

use serde::Deserialize;

use crate::coulomb::algebra::{mul, MatterWeight, MonopoleElement, TorusTheory};
use crate::coulomb::scalars::{hbar, x_var, CPoly, Coef, Cq};
use crate::error::{KlrwError, Result};
use crate::poly::{Monomial, HBAR};
use crate::scalar::{parse_rational, ExactScalar, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < cs.len() {
        let c = cs[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = k;
            while k < cs.len() && (cs[k].is_ascii_digit() || cs[k] == '.') {
                k += 1;
            }
            out.push(Tok::Num(cs[st..k].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = k;
            while k < cs.len() && (cs[k].is_alphanumeric() || cs[k] == '_') {
                k += 1;
            }
            out.push(Tok::Ident(cs[st..k].iter().collect()));
        } else if "+-*/^()[],".contains(c) {
            out.push(Tok::Op(c));
            k += 1;
        } else {
            return Err(KlrwError::parse(format!("unexpected character '{c}' in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    th: &'a mut TorusTheory,
    /// symbols may be introduced (matter) or must be known (elements)
    open_symbols: bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(KlrwError::parse(format!("expected '{c}' at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<MonopoleElement> {
        let mut acc = if self.eat('-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MonopoleElement> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                let rhs = self.power()?;
                acc = mul(&acc, &rhs, self.th);
            } else if self.eat('/') {
                let rhs = self.power()?;
                acc = mul(&acc, &self.scalar_inverse(&rhs)?, self.th);
            } else {
                return Ok(acc);
            }
        }
    }

    fn scalar_inverse(&self, e: &MonopoleElement) -> Result<MonopoleElement> {
        let zero = self.th.zero_coweight();
        if e.terms.len() != 1 || !e.terms.contains_key(&zero) {
            return Err(KlrwError::parse("can only divide by a Gelfand–Tsetlin element"));
        }
        let f = &e.terms[&zero];
        let den = f.den.iter().fold(CPoly::one(), |acc, l| &acc * l);
        let inv = Coef::from_poly(den)
            .div_linear(&f.num)
            .ok_or_else(|| KlrwError::parse("can only divide by constants and linear forms"))?;
        Ok(MonopoleElement::scalar(self.th, inv))
    }

    fn power(&mut self) -> Result<MonopoleElement> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let n: u32 = match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                s.parse().map_err(|_| KlrwError::parse(format!("bad exponent {s}")))?
            }
            _ => return Err(KlrwError::parse("expected exponent")),
        };
        let mut acc = MonopoleElement::r(self.th.zero_coweight());
        for _ in 0..n {
            acc = mul(&acc, &base, self.th);
        }
        Ok(acc)
    }

    fn scalar(&self, p: CPoly) -> MonopoleElement {
        MonopoleElement::scalar(self.th, Coef::from_poly(p))
    }

    fn atom(&mut self) -> Result<MonopoleElement> {
        match self.peek().cloned() {
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let q = parse_rational(&s)?;
                Ok(self.scalar(CPoly::constant(Cq::rational(q))))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "r" && self.peek() == Some(&Tok::Op('[')) {
                    return self.monopole();
                }
                self.ident(&name)
            }
            other => Err(KlrwError::parse(format!("unexpected token {other:?}"))),
        }
    }

    fn monopole(&mut self) -> Result<MonopoleElement> {
        self.expect('[')?;
        let mut nu = Vec::new();
        loop {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(s)) => {
                    self.pos += 1;
                    let v: i64 = s.parse().map_err(|_| KlrwError::parse(format!("bad coweight entry {s}")))?;
                    nu.push(if neg { -v } else { v });
                }
                _ => return Err(KlrwError::parse("expected integer in r[...]")),
            }
            if self.eat(']') {
                break;
            }
            self.expect(',')?;
        }
        if nu.len() != self.th.rank {
            return Err(KlrwError::Mismatch(format!("r{nu:?} in a rank {} theory", self.th.rank)));
        }
        Ok(MonopoleElement::r(nu))
    }

    fn ident(&mut self, name: &str) -> Result<MonopoleElement> {
        if name == "h" {
            return Ok(self.scalar(hbar()));
        }
        if name == "i" {
            return Ok(self.scalar(CPoly::constant(Cq::new(Q::from_integer(0.into()), Q::from_integer(1.into())))));
        }
        if name == "x" && self.th.rank == 1 {
            return Ok(self.scalar(CPoly::var(x_var(0))));
        }
        if let Some(k) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            if k == 0 || k > self.th.rank {
                return Err(KlrwError::parse(format!("{name} out of range for rank {}", self.th.rank)));
            }
            return Ok(self.scalar(CPoly::var(x_var(k - 1))));
        }
        let v = if self.open_symbols {
            self.th.symbols.insert(name)
        } else {
            self.th.symbols.var(name).ok_or_else(|| KlrwError::UnknownSymbol(name.to_string()))?
        };
        Ok(self.scalar(CPoly::var(v)))
    }
}

fn parse_with(s: &str, th: &mut TorusTheory, open_symbols: bool) -> Result<MonopoleElement> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(KlrwError::parse("empty expression"));
    }
    let mut p = Parser { toks, pos: 0, th, open_symbols };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(KlrwError::parse(format!("trailing input at token {} of {s:?}", p.pos)));
    }
    Ok(e)
}

/// Parses an element of the algebra of `th`.
pub fn parse_element(s: &str, th: &TorusTheory) -> Result<MonopoleElement> {
    let mut th = th.clone();
    parse_with(s, &mut th, false)
}

/// Parses a matter weight such as `x1 - x2 + a + 1/2*h`: integer gauge
/// coefficients, rational ħ-coefficient, everything else flavour.
pub fn parse_matter(s: &str, rank: usize) -> Result<MatterWeight> {
    let mut th = TorusTheory::new(rank, vec![])?;
    let e = parse_with(s, &mut th, true)?;
    let zero = th.zero_coweight();
    if e.terms.keys().any(|k| *k != zero) {
        return Err(KlrwError::parse(format!("matter weight {s:?} contains a monopole")));
    }
    let f = e.coef(&zero);
    if !f.is_polynomial() || f.num.degree().unwrap_or(0) > 1 {
        return Err(KlrwError::parse(format!("matter weight {s:?} is not affine-linear")));
    }
    let mut gauge = vec![0; rank];
    let mut flavour = ExactScalar::zero();
    let mut hb = Q::from_integer(0.into());
    for (m, c) in &f.num.terms {
        let c = &c.0;
        if m == &Monomial::one() {
            flavour = &flavour + &ExactScalar::complex(c.re.clone(), c.im.clone());
            continue;
        }
        if c.im != Q::from_integer(0.into()) {
            return Err(KlrwError::parse(format!("complex coefficient in {s:?}")));
        }
        let v = m.0[0].0;
        if v == HBAR {
            hb = c.re.clone();
        } else if v > HBAR {
            let name = th.symbols.names[(v - HBAR - 1) as usize].clone();
            flavour = &flavour + &ExactScalar::symbol(&name).scale(&c.re);
        } else {
            if !c.re.is_integer() {
                return Err(KlrwError::parse(format!("gauge coefficient {} in {s:?} is not an integer", c.re)));
            }
            gauge[v as usize] = i64::try_from(c.re.to_integer()).map_err(|_| KlrwError::parse("gauge coefficient too large"))?;
        }
    }
    Ok(MatterWeight::new(gauge, flavour, hb))
}

#[derive(Deserialize)]
struct TheoryFile {
    rank: usize,
    #[serde(default)]
    matter: Vec<String>,
}

pub fn parse_theory(rank: usize, matter: &[String]) -> Result<TorusTheory> {
    let ws = matter.iter().map(|m| parse_matter(m, rank)).collect::<Result<Vec<_>>>()?;
    TorusTheory::new(rank, ws)
}

/// `{"rank": 2, "matter": ["x1", "x1 - x2 + a"]}`
pub fn parse_theory_json(s: &str) -> Result<TorusTheory> {
    let f: TheoryFile = serde_json::from_str(s).map_err(|e| KlrwError::Parse { line: e.line(), msg: e.to_string() })?;
    parse_theory(f.rank, &f.matter)
}
