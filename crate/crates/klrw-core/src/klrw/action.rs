//! Polynomial representation: vectors at a sequence are polynomials in the
//! position variables `y_1..y_n` and `ħ`.

use crate::error::{KlrwError, Result};
use crate::klrw::diagram::{apply_ops, apply_ops_with, Diagram};
use crate::poly::{Monomial, Poly, Var, HBAR};
use crate::quiver::FlavouredQuiver;
use crate::scalar::{q, Q};
use crate::seq::FlavouredSequence;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyVector {
    pub tag: FlavouredSequence,
    pub poly: Poly<Q>,
}

impl PolyVector {
    pub fn new(tag: FlavouredSequence, poly: Poly<Q>) -> Self {
        PolyVector { tag, poly }
    }
}

pub fn act(d: &Diagram, fq: &FlavouredQuiver, f: &PolyVector) -> Result<PolyVector> {
    if f.tag != d.bottom {
        return Err(KlrwError::TagMismatch(format!("vector at {} acted on by diagram from {}", f.tag, d.bottom)));
    }
    let ops = d.compile(fq)?;
    Ok(PolyVector { tag: d.top.clone(), poly: apply_ops(&ops, &f.poly) })
}

/// Degree with `deg y = deg ħ = 2`.
pub fn graded_degree(f: &Poly<Q>) -> Option<i64> {
    f.terms.keys().map(|m| 2 * m.degree() as i64).max()
}

pub fn is_graded_homogeneous(f: &Poly<Q>) -> bool {
    f.is_homogeneous()
}

/// All monomials in `y_0..y_{n-1}` and `ħ` of total degree at most `bound`,
/// ordered by degree.
pub fn monomials(n: usize, bound: u32) -> Vec<Poly<Q>> {
    let vars: Vec<Var> = (0..n as Var).chain([HBAR]).collect();
    let mut out = vec![Monomial::one()];
    let mut layer = vec![(Monomial::one(), 0usize)];
    for _ in 0..bound {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (i, v) in vars.iter().enumerate().skip(*start) {
                next.push((m.mul(&Monomial::var(*v)), i));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    out.into_iter().map(Poly::monomial).collect()
}

/// Operator equality of two diagram sums on the given test polynomials.
pub fn sums_agree(
    lhs: &[(Q, &Diagram)],
    rhs: &[(Q, &Diagram)],
    fq: &FlavouredQuiver,
    tests: &[Poly<Q>],
) -> Result<Option<Poly<Q>>> {
    sums_agree_with(lhs, rhs, fq, tests, 1)
}

/// As [`sums_agree`] under the divided difference of sign `demazure_sign`.
pub fn sums_agree_with(
    lhs: &[(Q, &Diagram)],
    rhs: &[(Q, &Diagram)],
    fq: &FlavouredQuiver,
    tests: &[Poly<Q>],
    demazure_sign: i64,
) -> Result<Option<Poly<Q>>> {
    let compile = |side: &[(Q, &Diagram)]| -> Result<Vec<(Q, Vec<_>)>> {
        side.iter().map(|(c, d)| Ok((c.clone(), d.compile(fq)?))).collect()
    };
    let (l, r) = (compile(lhs)?, compile(rhs)?);
    for f in tests {
        let mut diff = Poly::zero();
        for (c, ops) in &l {
            diff = &diff + &apply_ops_with(ops, f, demazure_sign).scale(c);
        }
        for (c, ops) in &r {
            diff = &diff - &apply_ops_with(ops, f, demazure_sign).scale(c);
        }
        if !diff.is_zero() {
            return Ok(Some(f.clone()));
        }
    }
    Ok(None)
}

pub fn one() -> Q {
    q(1)
}
