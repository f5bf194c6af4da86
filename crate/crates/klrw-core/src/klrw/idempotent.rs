//! nilHecke idempotents, cyclotomic idempotents and vanishing certificates.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{KlrwError, Result};
use crate::klrw::action::{monomials, sums_agree};
use crate::klrw::diagram::{straight_line, with_matching, Diagram, Move};
use crate::quiver::FlavouredQuiver;
use crate::scalar::{q, ExactScalar, Q};
use crate::seq::{from_weight, is_unsteady, FlavouredSequence};

/// A formal combination of diagrams with a common bottom and top.
#[derive(Clone, Debug)]
pub struct DiagramSum {
    pub terms: Vec<(Q, Diagram)>,
}

impl DiagramSum {
    pub fn as_refs(&self) -> Vec<(Q, &Diagram)> {
        self.terms.iter().map(|(c, d)| (c.clone(), d)).collect()
    }

    /// Product `self · other` (other acts first).
    pub fn compose(&self, other: &DiagramSum) -> Result<DiagramSum> {
        let mut terms = Vec::new();
        for (a, d2) in &self.terms {
            for (b, d1) in &other.terms {
                terms.push((a * b, d2.compose(d1)?));
            }
        }
        Ok(DiagramSum { terms })
    }
}

/// Maximal runs of corporeal indices with equal label and longitude.
fn blocks(s: &FlavouredSequence) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=s.n() {
        if k == s.n() || s.labels[k] != s.labels[start] || s.longitudes[k] != s.longitudes[start] {
            if k - start > 1 {
                out.push((start, k - start));
            }
            start = k;
        }
    }
    out
}

/// `y^ρ ∂_{w0}` on every block of repeated entries of `γ`; the identity
/// diagram when all entries are distinct.
pub fn nilhecke_idempotent(gamma: &BTreeMap<String, Vec<ExactScalar>>, fq: &FlavouredQuiver) -> Result<DiagramSum> {
    let s = from_weight(gamma, fq)?;
    let mut d = Diagram::identity(&s);
    let mut dots = Vec::new();
    for (p, b) in blocks(&s) {
        // w0 = (s_1)(s_2 s_1)(s_3 s_2 s_1)...
        for i in 1..b {
            for k in (0..i).rev() {
                let mut sigma: Vec<usize> = (0..s.n()).collect();
                sigma.swap(p + k, p + k + 1);
                let x = with_matching(&s, &s, &sigma, fq)?;
                d = x.compose(&d)?;
            }
        }
        for r in 0..b {
            for _ in 0..b - 1 - r {
                dots.push(Move::Dot(p + r));
            }
        }
    }
    let y = Diagram::from_moves(&s, &dots)?;
    Ok(DiagramSum { terms: vec![(q(1), y.compose(&d)?)] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// e(𝐢, ±H): corporeal `k` at `±kH`. For the minus sign the strands are
/// listed right to left so that indices increase with longitude.
pub fn cyclotomic_idempotent(word: &[String], sign: Sign, h: i64, fq: &FlavouredQuiver) -> Result<Diagram> {
    let n = word.len() as i64;
    let mut bound = n;
    for e in &fq.quiver.edges {
        let re = fq.phi(&e.id).real_part();
        let re = re
            .as_integer()
            .map(|x| x.magnitude().clone())
            .map(|m| i64::try_from(m).unwrap_or(i64::MAX))
            .unwrap_or_else(|| {
                let r = re.re.clone();
                let a = if r < Q::from_integer(0.into()) { -r } else { r };
                i64::try_from(a.ceil().to_integer()).unwrap_or(i64::MAX)
            });
        bound = bound.max(re.saturating_add(n));
    }
    if h <= bound {
        return Err(KlrwError::HTooSmall(h, format!("need H > {bound}")));
    }
    let (labels, longs): (Vec<String>, Vec<ExactScalar>) = match sign {
        Sign::Plus => (word.to_vec(), (1..=n).map(|k| ExactScalar::int(k * h)).collect()),
        Sign::Minus => (word.iter().rev().cloned().collect(), (1..=n).rev().map(|k| ExactScalar::int(-k * h)).collect()),
    };
    let s = FlavouredSequence::with_default_order(labels, longs, fq)?;
    Ok(Diagram::identity(&s))
}

#[derive(Clone, Debug)]
pub struct VanishingCertificate {
    pub h: i64,
    pub theta: Diagram,
    pub theta_prime: Diagram,
    /// act(θ′θ) = act(e(γ)) on all monomials up to the bound
    pub check: bool,
    /// suffix length witnessing that e(γ_H) is unsteady
    pub unsteady: Option<usize>,
}

/// Undirected connected component of `v` in the base quiver.
pub fn component(fq: &FlavouredQuiver, v: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([v.to_string()]);
    let mut stack = vec![v.to_string()];
    while let Some(x) = stack.pop() {
        for e in fq.quiver.old_edges() {
            for (a, b) in [(&e.tail, &e.head), (&e.head, &e.tail)] {
                if a == &x && seen.insert(b.clone()) {
                    stack.push(b.clone());
                }
            }
        }
    }
    seen
}

fn abs_re_ceil(x: &ExactScalar) -> i64 {
    let r = x.re.clone();
    let a = if r < Q::from_integer(0.into()) { -r } else { r };
    i64::try_from(a.ceil().to_integer()).unwrap_or(i64::MAX / 8)
}

/// Moves the strands on the unframed component of `vertex` far right and back.
pub fn vanishing_certificate(
    gamma: &BTreeMap<String, Vec<ExactScalar>>,
    vertex: &str,
    fq: &FlavouredQuiver,
    bound: u32,
) -> Result<VanishingCertificate> {
    if fq.quiver.vertex_index(vertex).is_none() {
        return Err(KlrwError::parse(format!("unknown vertex {vertex}")));
    }
    let comp = component(fq, vertex);
    if let Some(v) = comp.iter().find(|v| fq.quiver.new_edges().any(|e| &e.tail == *v)) {
        return Err(KlrwError::FramedComponent(v.clone()));
    }
    let max_a = gamma.values().flatten().map(abs_re_ceil).max().unwrap_or(0);
    let max_phi = fq.quiver.edges.iter().map(|e| abs_re_ceil(&fq.phi(&e.id))).max().unwrap_or(0);
    let h = 2 * (max_a + max_phi) + 1;
    let mut gamma_h = gamma.clone();
    for (v, xs) in gamma_h.iter_mut() {
        if comp.contains(v) {
            for x in xs.iter_mut() {
                *x = &*x + &ExactScalar::int(h);
            }
        }
    }
    let s = from_weight(gamma, fq)?;
    let sh = from_weight(&gamma_h, fq)?;
    let theta = straight_line(&s, &sh, fq)?;
    let theta_prime = theta.reflect();
    let round = theta_prime.compose(&theta)?;
    let id = Diagram::identity(&s);
    let tests = monomials(s.n(), bound);
    let check = sums_agree(&[(q(1), &round)], &[(q(1), &id)], fq, &tests)?.is_none();
    Ok(VanishingCertificate { h, theta, theta_prime, check, unsteady: is_unsteady(&sh) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klrw::action::monomials;
    use crate::klrw::diagram::apply_ops;
    use crate::poly::Poly;
    use crate::quiver::{DimensionData, Flavour, Quiver};
    use crate::scalar::SymbolTable;

    fn a1(w: i64) -> FlavouredQuiver {
        let q = Quiver::new(&["1"], &[]).unwrap();
        let mut dims = DimensionData::default();
        dims.w.insert("1".into(), w);
        FlavouredQuiver::new(&q, dims, Flavour::default(), SymbolTable::new())
    }

    fn kronecker(w: i64) -> FlavouredQuiver {
        let q = Quiver::new(&["α", "β"], &[("e", "β", "α"), ("f", "α", "β")]).unwrap();
        let mut dims = DimensionData::default();
        dims.w.insert("α".into(), w);
        let mut phi = Flavour::default();
        phi.values.insert("e".into(), ExactScalar::int(1));
        phi.values.insert("f".into(), ExactScalar::int(1));
        FlavouredQuiver::new(&q, dims, phi, SymbolTable::new())
    }

    fn g(v: &str, xs: &[i64]) -> BTreeMap<String, Vec<ExactScalar>> {
        BTreeMap::from([(v.to_string(), xs.iter().map(|x| ExactScalar::int(*x)).collect())])
    }

    fn idempotent_on_monomials(e: &DiagramSum, fq: &FlavouredQuiver) -> bool {
        let sq = e.compose(e).unwrap();
        let n = e.terms[0].1.bottom.n();
        sums_agree(&sq.as_refs(), &e.as_refs(), fq, &monomials(n, 5)).unwrap().is_none()
    }

    #[test]
    fn distinct_entries_give_identity() {
        let fq = a1(1);
        let e = nilhecke_idempotent(&g("1", &[0, 1, 3]), &fq).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert!(e.terms[0].1.events.is_empty());
    }

    #[test]
    fn s2_and_s3_blocks_are_idempotent() {
        let fq = a1(1);
        for xs in [&[0, 0][..], &[2, 2, 2], &[0, 0, 1, 1]] {
            let e = nilhecke_idempotent(&g("1", xs), &fq).unwrap();
            assert!(idempotent_on_monomials(&e, &fq), "{xs:?}");
        }
        let e = nilhecke_idempotent(&g("1", &[0, 0]), &fq).unwrap();
        let ops = e.terms[0].1.compile(&fq).unwrap();
        assert!(apply_ops(&ops, &Poly::one()).is_zero());
        assert_eq!(apply_ops(&ops, &Poly::var(0)), Poly::var(0));
        let kr = kronecker(1);
        let e = nilhecke_idempotent(&g("α", &[0, 0]), &kr).unwrap();
        assert!(idempotent_on_monomials(&e, &kr));
    }

    #[test]
    fn cyclotomic_examples() {
        let fq = a1(1);
        let one = vec!["1".to_string()];
        assert!(matches!(cyclotomic_idempotent(&one, Sign::Minus, 1, &fq), Err(KlrwError::HTooSmall(..))));
        let d = cyclotomic_idempotent(&one, Sign::Minus, 5, &fq).unwrap();
        assert_eq!(d.bottom.longitudes, vec![ExactScalar::int(-5)]);
        assert_eq!(is_unsteady(&d.bottom), None);
        let two = vec!["1".to_string(), "1".to_string()];
        let d = cyclotomic_idempotent(&two, Sign::Minus, 5, &fq).unwrap();
        assert_eq!(d.bottom.longitudes, vec![ExactScalar::int(-10), ExactScalar::int(-5)]);
        assert!(crate::seq::is_valid(&d.bottom, &fq).unwrap());
        let d = cyclotomic_idempotent(&two, Sign::Plus, 5, &fq).unwrap();
        assert!(is_unsteady(&d.bottom).is_some());
    }

    #[test]
    fn vanishing_examples() {
        let fq = a1(0);
        let c = vanishing_certificate(&g("1", &[0]), "1", &fq, 4).unwrap();
        assert!(c.check);
        assert!(c.unsteady.is_some());
        let kr = kronecker(0);
        let mut gamma = g("α", &[0, 2]);
        gamma.insert("β".into(), vec![ExactScalar::int(1)]);
        let c = vanishing_certificate(&gamma, "α", &kr, 4).unwrap();
        assert!(c.check && c.unsteady.is_some());
        assert!(matches!(
            vanishing_certificate(&g("α", &[0]), "β", &kronecker(1), 2),
            Err(KlrwError::FramedComponent(_))
        ));
    }
}
