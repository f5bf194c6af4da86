//! Seeded property suites over the modules: relations, monopole algebra,
//! restriction and reduction, and the decategorified Chevalley table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coulomb::algebra::{random_coweight, random_element, random_theory};
use crate::coulomb::scalars::at_hbar_one;
use crate::coulomb::{
    el_kappa_sides, forget_matter, fourier, hamiltonian_reduce, inv_monopole, mul, res_support, rxi_closed_form,
    rxi_pairing, transition_invertible, xi_negative, Coweight, FourierCocharacter, MatterWeight, MonopoleElement,
    TorusTheory, UniversalWeightModule,
};
use crate::error::{KlrwError, Result};
use crate::klrw::relations::{run_relation_suite, verify_relations};
use crate::km::{check_chevalley, decat_chevalley, ChevalleyTable};
use crate::par::Exec;
use crate::quiver::FlavouredQuiver;
use crate::ratfunc::RatFunc;
use crate::scalar::{ExactScalar, Q};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    /// first failing case, when any
    pub witness: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<ChevalleyTable>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn salt(name: &str) -> u64 {
    // FNV-1a, so each check gets its own stream under one seed
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Runs `cases` seeded cases of `f` (None = pass) and keeps the first witness.
pub fn run_cases<F>(name: &str, cases: usize, seed: u64, exec: Exec, f: F) -> Check
where
    F: Fn(&mut ChaCha8Rng) -> Option<String> + Send + Sync,
{
    let base = seed ^ salt(name);
    let outcomes = exec.map((0..cases as u64).collect(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(base.wrapping_add(i));
        f(&mut rng).map(|w| format!("case {i}: {w}"))
    });
    let failed = outcomes.iter().filter(|o| o.is_some()).count();
    Check { name: name.to_string(), cases, failed, witness: outcomes.into_iter().flatten().next() }
}

// ---------------------------------------------------------------------------
// relations

pub fn relations_suite(quiver: Option<(&str, &FlavouredQuiver)>, bound: u32, seed: u64, exec: Exec) -> SuiteReport {
    let results = match quiver {
        Some((name, fq)) => verify_relations(fq, name, bound, seed, exec),
        None => run_relation_suite(bound, seed, exec).results,
    };
    let checks = results
        .into_iter()
        .map(|r| {
            let passed = r.passed();
            let witness = (!passed).then(|| {
                let mut w = r.error.clone().or(r.witness.clone()).unwrap_or_default();
                if r.holds_with_opposite_correction == Some(true) {
                    w.push_str(" (holds with the opposite correction sign)");
                }
                w
            });
            Check { name: format!("{}: {}", r.quiver, r.name), cases: r.checked, failed: usize::from(!passed), witness }
        })
        .collect();
    SuiteReport { suite: "relations".into(), seed, checks, table: None }
}

// ---------------------------------------------------------------------------
// monopole

#[derive(Clone, Debug)]
pub struct MonopoleOptions {
    /// fixed theory; random theories of rank ≤ `max_rank` otherwise
    pub theory: Option<TorusTheory>,
    pub max_rank: usize,
    pub max_matter: usize,
    pub rxi: usize,
    pub associativity: usize,
    pub inverse: usize,
    pub homomorphism: usize,
    /// Φ₀′ identity cases, on theories of rank ≤ 2
    pub el_kappa: usize,
}

impl Default for MonopoleOptions {
    fn default() -> Self {
        MonopoleOptions {
            theory: None,
            max_rank: 3,
            max_matter: 3,
            rxi: 50,
            associativity: 200,
            inverse: 100,
            homomorphism: 100,
            el_kappa: 20,
        }
    }
}

fn theory_for(o: &MonopoleOptions, rng: &mut ChaCha8Rng, max_rank: usize) -> TorusTheory {
    match &o.theory {
        Some(t) => t.clone(),
        None => random_theory(rng, max_rank, o.max_matter),
    }
}

fn nonzero_coweight(rng: &mut ChaCha8Rng, rank: usize, bound: i64) -> Coweight {
    loop {
        let c = random_coweight(rng, rank, bound);
        if c.iter().any(|x| *x != 0) {
            return c;
        }
    }
}

pub fn rxi_check(th: &TorusTheory, xi: &[i64]) -> Option<String> {
    let (p, q) = rxi_pairing(xi, th);
    let (fp, fq) = rxi_closed_form(xi, th);
    let zero = th.zero_coweight();
    for (name, e, want) in [("r_{-ξ}r_ξ", &p, fp), ("r_ξr_{-ξ}", &q, fq)] {
        if e.terms.keys().any(|k| *k != zero) || at_hbar_one(&e.coef(&zero)) != RatFunc::from_poly(want.clone()) {
            return Some(format!("ξ={xi:?} {name} = {} but closed form {}", e.display(th), want.fmt_with(&|v| th.var_name(v))));
        }
    }
    None
}

fn homomorphism_case(th: &TorusTheory, rng: &mut ChaCha8Rng) -> Option<String> {
    let (a, b) = (random_element(rng, th, 2), random_element(rng, th, 2));
    let ab = mul(&a, &b, th);
    let n1: Vec<usize> = (0..th.matter.len()).filter(|_| rng.gen_bool(0.5)).collect();
    let (fa, small) = forget_matter(&a, &n1, th);
    let (fb, _) = forget_matter(&b, &n1, th);
    let (fab, _) = forget_matter(&ab, &n1, th);
    if fab != mul(&fa, &fb, &small) {
        return Some(format!("forget {n1:?} fails on a={} b={}", a.display(th), b.display(th)));
    }
    let n2: Vec<usize> = (0..th.matter.len()).filter(|_| rng.gen_bool(0.5)).collect();
    let gauge = random_coweight(rng, th.rank, 1);
    let flavour = th.matter.iter().enumerate().map(|(k, m)| i64::from(n2.contains(&k)) - m.pair(&gauge)).collect();
    let wp = FourierCocharacter { gauge, flavour };
    let image = |x: &MonopoleElement| fourier(x, &n2, &wp, th);
    match (image(&a), image(&b), image(&ab)) {
        (Ok((ga, target)), Ok((gb, _)), Ok((gab, _))) => {
            (gab != mul(&ga, &gb, &target)).then(|| format!("fourier {n2:?} {wp:?} fails on a={} b={}", a.display(th), b.display(th)))
        }
        _ => Some(format!("fourier rejected a valid cocharacter {wp:?}")),
    }
}

pub fn monopole_suite(o: &MonopoleOptions, seed: u64, exec: Exec) -> SuiteReport {
    let mut checks = Vec::new();
    checks.push(run_cases("rxi closed form", o.rxi, seed, exec, |rng| {
        let th = theory_for(o, rng, o.max_rank);
        let xi = nonzero_coweight(rng, th.rank, 2);
        rxi_check(&th, &xi)
    }));
    checks.push(run_cases("associativity", o.associativity, seed, exec, |rng| {
        let th = theory_for(o, rng, o.max_rank);
        let (a, b, c) = (random_element(rng, &th, 2), random_element(rng, &th, 2), random_element(rng, &th, 2));
        (mul(&mul(&a, &b, &th), &c, &th) != mul(&a, &mul(&b, &c, &th), &th))
            .then(|| format!("a={} b={} c={}", a.display(&th), b.display(&th), c.display(&th)))
    }));
    checks.push(run_cases("inverse", o.inverse, seed, exec, |rng| {
        let th = theory_for(o, rng, o.max_rank);
        let xi = random_coweight(rng, th.rank, 2);
        let nu = random_coweight(rng, th.rank, 2);
        let got = mul(&MonopoleElement::r(xi.clone()), &inv_monopole(&xi, &nu, &th), &th);
        (got != MonopoleElement::r(nu.clone())).then(|| format!("ξ={xi:?} ν={nu:?}: r_ξ·inv = {}", got.display(&th)))
    }));
    checks.push(run_cases("forget and fourier homomorphisms", o.homomorphism, seed, exec, |rng| {
        let th = theory_for(o, rng, o.max_rank);
        homomorphism_case(&th, rng)
    }));
    checks.push(run_cases("twisted Φ₀′ identity", o.el_kappa, seed, exec, |rng| {
        let th = theory_for(o, rng, 2);
        let xi = nonzero_coweight(rng, th.rank, 2);
        let nu = random_coweight(rng, th.rank, 3);
        let nu_p = random_coweight(rng, th.rank, 3);
        let (l, r) = el_kappa_sides(&nu, &nu_p, &xi, &th);
        (l != r).then(|| format!("ν={nu:?} ν′={nu_p:?} ξ={xi:?}"))
    }));
    SuiteReport { suite: "monopole".into(), seed, checks, table: None }
}

// ---------------------------------------------------------------------------
// restriction and reduction

#[derive(Clone, Debug)]
pub struct RestrictionOptions {
    pub modules: usize,
    pub k_max: i64,
    pub transition_cases: usize,
    pub qhr: usize,
}

impl Default for RestrictionOptions {
    fn default() -> Self {
        RestrictionOptions { modules: 50, k_max: 10, transition_cases: 50, qhr: 50 }
    }
}

fn random_base(rng: &mut ChaCha8Rng, rank: usize) -> Vec<ExactScalar> {
    (0..rank)
        .map(|_| match rng.gen_range(0..3) {
            0 | 1 => ExactScalar::int(rng.gen_range(-3..=3)),
            _ => ExactScalar::frac(rng.gen_range(-5..=5), rng.gen_range(2..=3)),
        })
        .collect()
}

fn random_box(rng: &mut ChaCha8Rng, rank: usize) -> (Vec<i64>, Vec<i64>) {
    let lo: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=0)).collect();
    let hi = lo.iter().map(|l| l + rng.gen_range(0..=2)).collect();
    (lo, hi)
}

/// One truncated module: every coset limit with a ξ-negative representative
/// must have the dimension of that (one-dimensional) weight space.
pub fn restriction_case(rng: &mut ChaCha8Rng) -> Option<String> {
    let th = random_theory(rng, 3, 3);
    let xi = nonzero_coweight(rng, th.rank, 2);
    let (lo, hi) = random_box(rng, th.rank);
    let m = match UniversalWeightModule::boxed(&th, random_base(rng, th.rank), &lo, &hi) {
        Ok(m) => m,
        Err(e) => return Some(e.to_string()),
    };
    for (key, lim) in res_support(&m, &xi) {
        if lim.xi_negative && lim.dim != 1 {
            return Some(format!(
                "matter {:?} ξ={xi:?} coset {key:?}: limit rank {} at ξ-negative weight {:?}",
                th.matter.iter().map(|w| &w.gauge).collect::<Vec<_>>(),
                lim.dim,
                lim.weight
            ));
        }
    }
    None
}

/// ξ-negativity of `ν` implies invertible transitions at `ν − kξ`, `k = 0..=k_max`.
pub fn transition_case(rng: &mut ChaCha8Rng, k_max: i64) -> Option<String> {
    let th = random_theory(rng, 3, 3);
    let xi = nonzero_coweight(rng, th.rank, 2);
    let nu = random_base(rng, th.rank);
    if !xi_negative(&nu, &xi, &th, true) {
        return None;
    }
    (0..=k_max).find_map(|k| {
        let w: Vec<ExactScalar> = nu.iter().zip(&xi).map(|(a, x)| a - &ExactScalar::int(k * x)).collect();
        (!transition_invertible(&w, &xi, &th)).then(|| format!("ν={nu:?} ξ={xi:?} fails at k={k}"))
    })
}

/// A theory whose matter pairs to zero with `ξ`.
fn invariant_theory(rng: &mut ChaCha8Rng, xi: &[i64]) -> TorusTheory {
    let rank = xi.len();
    let xx: i64 = xi.iter().map(|x| x * x).sum();
    let matter = (0..rng.gen_range(0..=3))
        .filter_map(|_| {
            let v = random_coweight(rng, rank, 2);
            let vx: i64 = v.iter().zip(xi).map(|(a, b)| a * b).sum();
            let w: Vec<i64> = v.iter().zip(xi).map(|(a, b)| a * xx - vx * b).collect();
            let g = w.iter().fold(0i64, |g, x| num_integer::gcd(g, *x));
            (g != 0).then(|| MatterWeight::new(w.iter().map(|x| x / g).collect(), ExactScalar::zero(), Q::from_integer(0.into())))
        })
        .collect();
    TorusTheory::new(rank, matter).expect("consistent ranks")
}

/// Formula and quotient dimensions of `M/(r_ξ − 1)M` on one or two truncations.
pub fn qhr_case(rng: &mut ChaCha8Rng) -> Option<String> {
    let rank = rng.gen_range(1..=3);
    let xi = nonzero_coweight(rng, rank, 2);
    let th = invariant_theory(rng, &xi);
    let mut ms = Vec::new();
    let base = random_base(rng, rank);
    for k in 0..rng.gen_range(1..=2) {
        let b: Vec<ExactScalar> = base.iter().zip(&xi).map(|(a, x)| a + &ExactScalar::frac(k * x, 2)).collect();
        let (lo, hi) = random_box(rng, rank);
        ms.push(UniversalWeightModule::boxed(&th, b, &lo, &hi).ok()?);
    }
    match hamiltonian_reduce(&ms, &xi) {
        Ok(red) => red
            .iter()
            .find(|(_, e)| !e.agrees())
            .map(|(g, e)| format!("ξ={xi:?} γ′={g:?}: formula {} vs quotient {}", e.formula, e.quotient)),
        Err(e) => Some(e.to_string()),
    }
}

pub fn restriction_suite(o: &RestrictionOptions, seed: u64, exec: Exec) -> SuiteReport {
    let k_max = o.k_max;
    let checks = vec![
        run_cases("direct limits at ξ-negative weights", o.modules, seed, exec, restriction_case),
        run_cases("invertible transitions below ξ-negative weights", o.transition_cases, seed, exec, move |rng| {
            transition_case(rng, k_max)
        }),
        run_cases("hamiltonian reduction dimensions", o.qhr, seed, exec, qhr_case),
    ];
    SuiteReport { suite: "restriction".into(), seed, checks, table: None }
}

// ---------------------------------------------------------------------------
// satake

pub fn satake_suite(fq: &FlavouredQuiver, vmax: &[i64], seed: u64, exec: Exec) -> Result<SuiteReport> {
    let q = fq.base_quiver();
    if vmax.len() != q.vertices.len() {
        return Err(KlrwError::Mismatch(format!("v-grid bound has {} entries for {} vertices", vmax.len(), q.vertices.len())));
    }
    let table = decat_chevalley(&q, &fq.dims, vmax, exec)?;
    let check = match check_chevalley(&table) {
        Ok(()) => Check { name: "sl2-string bookkeeping".into(), cases: table.rows.len(), failed: 0, witness: None },
        Err(w) => Check { name: "sl2-string bookkeeping".into(), cases: table.rows.len(), failed: 1, witness: Some(w) },
    };
    Ok(SuiteReport { suite: "satake".into(), seed, checks: vec![check], table: Some(table) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_cases_is_deterministic_and_counts_failures() {
        let f = |rng: &mut ChaCha8Rng| (rng.gen_range(0..4) == 0).then(|| "hit".to_string());
        let a = run_cases("x", 40, 3, Exec::Sequential, f);
        let b = run_cases("x", 40, 3, Exec::Parallel, f);
        assert_eq!((a.failed, a.witness.clone()), (b.failed, b.witness));
        assert!(a.failed > 0 && a.failed < 40);
    }

    #[test]
    fn small_monopole_suite_passes() {
        let o = MonopoleOptions { rxi: 5, associativity: 5, inverse: 5, homomorphism: 5, el_kappa: 5, max_rank: 2, ..Default::default() };
        let r = monopole_suite(&o, 1, Exec::Parallel);
        assert!(r.all_passed(), "{:?}", r.checks);
    }

    #[test]
    fn small_restriction_suite_passes() {
        let o = RestrictionOptions { modules: 8, k_max: 10, transition_cases: 20, qhr: 8 };
        let r = restriction_suite(&o, 2, Exec::Parallel);
        assert!(r.all_passed(), "{:?}", r.checks);
    }

    #[test]
    fn invariant_theories_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let xi = nonzero_coweight(&mut rng, 3, 2);
            let th = invariant_theory(&mut rng, &xi);
            assert!(th.matter.iter().all(|m| m.pair(&xi) == 0));
        }
    }
}
