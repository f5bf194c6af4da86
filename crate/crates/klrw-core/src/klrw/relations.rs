//! Local relation catalogue, instantiated over a flavoured quiver and checked
//! as operator identities on the polynomial representation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::klrw::action::{monomials, sums_agree_with};
use crate::klrw::diagram::{Diagram, Move};
use crate::par::Exec;
use crate::poly::{default_var_name, Monomial, Poly, Var, HBAR};
use crate::quiver::{DimensionData, Flavour, FlavouredQuiver, Quiver};
use crate::scalar::{q, ExactScalar, SymbolTable, Q};
use crate::seq::{build_cgr, CgrItem, FlavouredSequence};

#[derive(Clone, Debug)]
enum Local {
    C(usize),
    G(usize, String),
    R(String),
}

#[derive(Clone, Debug)]
struct Term {
    coef: i64,
    moves: Vec<Move>,
    correction: bool,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub bottom: FlavouredSequence,
    lhs: Vec<Term>,
    rhs: Vec<Term>,
}

fn t(coef: i64, moves: &[Move]) -> Term {
    Term { coef, moves: moves.to_vec(), correction: false }
}

fn corr(coef: i64, moves: &[Move]) -> Term {
    Term { coef, moves: moves.to_vec(), correction: true }
}

use Move::{Dot as D, Swap as S};

struct Catalogue<'a> {
    fq: &'a FlavouredQuiver,
    out: Vec<Instance>,
}

impl Catalogue<'_> {
    /// Adds the instance, and a copy with a spectator strand on the far left
    /// when there is room for one.
    fn add(&mut self, name: String, strands: &[(&str, ExactScalar)], local: &[Local], lhs: Vec<Term>, rhs: Vec<Term>) {
        for spectator in [false, true] {
            if spectator && strands.len() >= 4 {
                continue;
            }
            let sp = usize::from(spectator);
            let mut labels: Vec<String> = Vec::new();
            let mut longs = Vec::new();
            if spectator {
                labels.push(self.fq.quiver.gauge_vertices().next().cloned().unwrap_or_default());
                longs.push(ExactScalar::int(-10));
            }
            for (l, a) in strands {
                labels.push(l.to_string());
                longs.push(a.clone());
            }
            let local_items: Vec<CgrItem> = local
                .iter()
                .map(|x| match x {
                    Local::C(k) => CgrItem::Corporeal(k + sp),
                    Local::G(k, e) => CgrItem::Ghost(k + sp, e.clone()),
                    Local::R(e) => CgrItem::Red(e.clone()),
                })
                .collect();
            let mut rest: Vec<CgrItem> =
                build_cgr(&labels, &self.fq.quiver).into_iter().filter(|x| !local_items.contains(x)).collect();
            rest.sort();
            let offset = rest.len();
            let mut order = rest;
            order.extend(local_items);
            let shift = |terms: &[Term]| -> Vec<Term> {
                terms
                    .iter()
                    .map(|tm| Term {
                        coef: tm.coef,
                        correction: tm.correction,
                        moves: tm
                            .moves
                            .iter()
                            .map(|m| match *m {
                                S(k) => S(k + offset),
                                D(k) => D(k + sp),
                            })
                            .collect(),
                    })
                    .collect()
            };
            let suffix = if spectator { " +spectator" } else { "" };
            self.out.push(Instance {
                name: format!("{name}{suffix}"),
                bottom: FlavouredSequence { labels: labels.clone(), longitudes: longs, order },
                lhs: shift(&lhs),
                rhs: shift(&rhs),
            });
        }
    }
}

fn z(n: i64) -> ExactScalar {
    ExactScalar::int(n)
}

fn half() -> ExactScalar {
    ExactScalar::frac(1, 2)
}

/// All relation instances with at most four strands over `fq`.
pub fn instances(fq: &FlavouredQuiver) -> Vec<Instance> {
    use Local::{C, G, R};
    let verts: Vec<String> = fq.quiver.gauge_vertices().cloned().collect();
    let old: Vec<(String, String, String)> = fq
        .quiver
        .old_edges()
        .filter(|e| e.tail != e.head)
        .map(|e| (e.id.clone(), e.tail.clone(), e.head.clone()))
        .collect();
    let reds: Vec<(String, String)> = fq.quiver.new_edges().map(|e| (e.id.clone(), e.tail.clone())).collect();
    let mut c = Catalogue { fq, out: Vec::new() };

    for i in &verts {
        for j in &verts {
            if i == j {
                continue;
            }
            let st = [(i.as_str(), z(0)), (j.as_str(), z(0))];
            c.add(format!("dots-1 {i},{j} top"), &st, &[C(0), C(1)], vec![t(1, &[S(0), D(1)])], vec![t(1, &[D(1), S(0)])]);
            c.add(format!("dots-1 {i},{j} bottom"), &st, &[C(0), C(1)], vec![t(1, &[D(0), S(0)])], vec![t(1, &[S(0), D(0)])]);
            c.add(format!("strand-bigon {i},{j}"), &st, &[C(0), C(1)], vec![t(1, &[S(0), S(0)])], vec![t(1, &[])]);
        }
        let st = [(i.as_str(), z(0)), (i.as_str(), half())];
        c.add(format!("dots-1 {i},{i} non-integral"), &st, &[C(0), C(1)], vec![t(1, &[S(0), D(1)])], vec![t(1, &[D(1), S(0)])]);
        c.add(format!("strand-bigon {i},{i} non-integral"), &st, &[C(0), C(1)], vec![t(1, &[S(0), S(0)])], vec![t(1, &[])]);
        let st = [(i.as_str(), z(0)), (i.as_str(), z(0))];
        c.add(
            format!("dots-2 {i} top-left"),
            &st,
            &[C(0), C(1)],
            vec![t(1, &[S(0), D(1)])],
            vec![t(1, &[D(1), S(0)]), corr(1, &[])],
        );
        c.add(
            format!("dots-2 {i} bottom-left"),
            &st,
            &[C(0), C(1)],
            vec![t(1, &[D(0), S(0)])],
            vec![t(1, &[S(0), D(0)]), corr(1, &[])],
        );
        c.add(format!("strand-bigon {i},{i}"), &st, &[C(0), C(1)], vec![t(1, &[S(0), S(0)])], vec![]);
    }

    for (e, i, j) in &old {
        let ei = format!("{e}:{i}→{j}");
        for k in &verts {
            if k == i {
                continue;
            }
            let st = [(k.as_str(), z(0)), (j.as_str(), z(0))];
            c.add(
                format!("ghost-bigon1 {ei} k={k}"),
                &st,
                &[C(0), G(1, e.clone()), C(1)],
                vec![t(1, &[S(0), S(0)])],
                vec![t(1, &[])],
            );
            c.add(
                format!("ghost-bigon1a {ei} k={k}"),
                &st,
                &[G(1, e.clone()), C(0), C(1)],
                vec![t(1, &[S(0), S(0)])],
                vec![t(1, &[])],
            );
        }
        let st = [(i.as_str(), half()), (j.as_str(), z(0))];
        c.add(
            format!("ghost-bigon1 {ei} non-integral"),
            &st,
            &[C(0), G(1, e.clone()), C(1)],
            vec![t(1, &[S(0), S(0)])],
            vec![t(1, &[])],
        );
        let st = [(i.as_str(), z(0)), (j.as_str(), z(0))];
        c.add(
            format!("ghost-bigon2 {ei}"),
            &st,
            &[C(0), G(1, e.clone()), C(1)],
            vec![t(1, &[S(0), S(0)])],
            vec![t(1, &[D(1)]), t(-1, &[D(0)])],
        );
        c.add(
            format!("ghost-bigon2a {ei}"),
            &st,
            &[G(1, e.clone()), C(0), C(1)],
            vec![t(1, &[S(0), S(0)])],
            vec![t(1, &[D(1)]), t(-1, &[D(0)])],
        );

        // two j-strands crossing, their ghosts crossing, an i-strand passing
        let tp1 = |c: &mut Catalogue, name: String, mid: (&str, ExactScalar), coef: i64| {
            let st = [mid, (j.as_str(), z(0)), (j.as_str(), z(0))];
            let rhs = if coef == 0 {
                vec![t(1, &[S(1), S(0), S(3), S(1)])]
            } else {
                vec![t(1, &[S(1), S(0), S(3), S(1)]), corr(coef, &[])]
            };
            c.add(
                name,
                &st,
                &[G(1, e.clone()), C(0), G(2, e.clone()), C(1), C(2)],
                vec![t(1, &[S(0), S(1), S(3), S(0)])],
                rhs,
            );
        };
        tp1(&mut c, format!("triple-point1 {ei}"), (i.as_str(), z(0)), -1);
        tp1(&mut c, format!("triple-point1 {ei} non-integral"), (i.as_str(), half()), 0);
        for k in verts.iter().filter(|k| *k != i) {
            tp1(&mut c, format!("triple-point1 {ei} k={k}"), (k.as_str(), z(0)), 0);
        }

        // two i-strands crossing with the ghost of a j-strand passing
        let tp2 = |c: &mut Catalogue, name: String, jl: ExactScalar, coef: i64| {
            let st = [(i.as_str(), z(0)), (i.as_str(), z(0)), (j.as_str(), jl)];
            let rhs = if coef == 0 {
                vec![t(1, &[S(1), S(0), S(1)])]
            } else {
                vec![t(1, &[S(1), S(0), S(1)]), corr(coef, &[])]
            };
            c.add(name, &st, &[C(0), G(2, e.clone()), C(1), C(2)], vec![t(1, &[S(0), S(1), S(0)])], rhs);
        };
        tp2(&mut c, format!("triple-point2 {ei}"), z(0), 1);
        tp2(&mut c, format!("triple-point2 {ei} non-integral"), half(), 0);
    }

    for (r, m) in &reds {
        for i in &verts {
            let st = [(i.as_str(), z(0))];
            let (rhs, tag) = if i == m { (vec![t(1, &[D(0)])], "") } else { (vec![t(1, &[])], " off-label") };
            c.add(format!("cost {r} {i}{tag}"), &st, &[C(0), R(r.clone())], vec![t(1, &[S(0), S(0)])], rhs.clone());
            c.add(format!("cost mirror {r} {i}{tag}"), &st, &[R(r.clone()), C(0)], vec![t(1, &[S(0), S(0)])], rhs);
            c.add(format!("dumb dot {r} {i}"), &st, &[C(0), R(r.clone())], vec![t(1, &[D(0), S(0)])], vec![t(1, &[S(0), D(0)])]);
            c.add(
                format!("dumb dot mirror {r} {i}"),
                &st,
                &[R(r.clone()), C(0)],
                vec![t(1, &[D(0), S(0)])],
                vec![t(1, &[S(0), D(0)])],
            );
            for j in &verts {
                let st = [(j.as_str(), z(0)), (i.as_str(), z(0))];
                let mut rhs = vec![t(1, &[S(1), S(0), S(1)])];
                if i == j && j == m {
                    rhs.push(corr(1, &[]));
                }
                c.add(
                    format!("red-crossing {r} {j},{i}"),
                    &st,
                    &[C(0), R(r.clone()), C(1)],
                    vec![t(1, &[S(0), S(1), S(0)])],
                    rhs,
                );
                c.add(
                    format!("dumb {r} {j},{i}"),
                    &st,
                    &[C(0), C(1), R(r.clone())],
                    vec![t(1, &[S(0), S(1), S(0)])],
                    vec![t(1, &[S(1), S(0), S(1)])],
                );
                c.add(
                    format!("dumb mirror {r} {j},{i}"),
                    &st,
                    &[R(r.clone()), C(0), C(1)],
                    vec![t(1, &[S(0), S(1), S(0)])],
                    vec![t(1, &[S(1), S(0), S(1)])],
                );
            }
        }
        let st = [(m.as_str(), half())];
        c.add(format!("cost {r} non-integral"), &st, &[C(0), R(r.clone())], vec![t(1, &[S(0), S(0)])], vec![t(1, &[])]);
    }

    for i in &verts {
        for j in &verts {
            for k in &verts {
                let st = [(i.as_str(), z(0)), (j.as_str(), z(0)), (k.as_str(), z(0))];
                c.add(
                    format!("braid {i},{j},{k}"),
                    &st,
                    &[C(0), C(1), C(2)],
                    vec![t(1, &[S(0), S(1), S(0)])],
                    vec![t(1, &[S(1), S(0), S(1)])],
                );
            }
        }
    }
    c.out
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationResult {
    pub quiver: String,
    pub name: String,
    pub strands: usize,
    pub checked: usize,
    /// smallest test polynomial on which the two sides differ
    pub witness: Option<String>,
    /// for failing relations with a correction term: whether flipping the
    /// sign of the correction makes them hold
    pub holds_with_opposite_correction: Option<bool>,
    pub error: Option<String>,
}

impl RelationResult {
    pub fn passed(&self) -> bool {
        self.witness.is_none() && self.error.is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub results: Vec<RelationResult>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(RelationResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationResult> {
        self.results.iter().filter(|r| !r.passed())
    }
}

fn var_name(v: Var) -> String {
    if v == HBAR {
        "ħ".into()
    } else {
        default_var_name(v)
    }
}

pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, bound: u32) -> Poly<Q> {
    let mut f = Poly::zero();
    let vars: Vec<Var> = (0..n as Var).chain([HBAR]).collect();
    for _ in 0..rng.gen_range(1..=5) {
        let deg = rng.gen_range(0..=bound);
        let mut m = Monomial::one();
        for _ in 0..deg {
            m = m.mul(&Monomial::var(vars[rng.gen_range(0..vars.len())]));
        }
        let mut c = rng.gen_range(-9i64..=9);
        if c == 0 {
            c = 1;
        }
        f.add_term(m, q(c));
    }
    f
}

fn check_instance(fq: &FlavouredQuiver, inst: &Instance, bound: u32, seed: u64, sign: i64) -> Result<RelationResult> {
    let build = |terms: &[Term], flip: bool| -> Result<Vec<(Q, Diagram)>> {
        terms
            .iter()
            .map(|tm| {
                let c = if flip && tm.correction { -tm.coef } else { tm.coef };
                Ok((q(c), Diagram::from_moves(&inst.bottom, &tm.moves)?))
            })
            .collect()
    };
    let lhs = build(&inst.lhs, false)?;
    let rhs = build(&inst.rhs, false)?;
    let n = inst.bottom.n();
    let mut res = RelationResult {
        quiver: String::new(),
        name: inst.name.clone(),
        strands: n,
        checked: 0,
        witness: None,
        holds_with_opposite_correction: None,
        error: None,
    };
    let sig = lhs[0].1.top_signature();
    if lhs.iter().chain(&rhs).any(|(_, d)| d.top_signature() != sig) {
        res.error = Some("terms end at different sequences".into());
        return Ok(res);
    }
    let mut tests = monomials(n, bound);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        tests.push(random_poly(&mut rng, n, bound));
    }
    res.checked = tests.len();
    let refs = |v: &[(Q, Diagram)]| -> Vec<(Q, Diagram)> { v.to_vec() };
    let l = refs(&lhs);
    let r = refs(&rhs);
    let lr: Vec<(Q, &Diagram)> = l.iter().map(|(c, d)| (c.clone(), d)).collect();
    let rr: Vec<(Q, &Diagram)> = r.iter().map(|(c, d)| (c.clone(), d)).collect();
    if let Some(w) = sums_agree_with(&lr, &rr, fq, &tests, sign)? {
        res.witness = Some(w.fmt_with(&var_name));
        if inst.rhs.iter().any(|tm| tm.correction) {
            let flipped = build(&inst.rhs, true)?;
            let fr: Vec<(Q, &Diagram)> = flipped.iter().map(|(c, d)| (c.clone(), d)).collect();
            res.holds_with_opposite_correction = Some(sums_agree_with(&lr, &fr, fq, &tests, sign)?.is_none());
        }
    }
    Ok(res)
}

/// Checks every catalogue instance over `fq` on all monomials of degree at
/// most `bound` and 100 seeded random polynomials each.
pub fn verify_relations(fq: &FlavouredQuiver, quiver_name: &str, bound: u32, seed: u64, exec: Exec) -> Vec<RelationResult> {
    verify_relations_with(fq, quiver_name, bound, seed, exec, 1)
}

/// As [`verify_relations`] with the divided difference scaled by
/// `demazure_sign` (the one sign the representation leaves free).
pub fn verify_relations_with(
    fq: &FlavouredQuiver,
    quiver_name: &str,
    bound: u32,
    seed: u64,
    exec: Exec,
    demazure_sign: i64,
) -> Vec<RelationResult> {
    let insts: Vec<(usize, Instance)> = instances(fq).into_iter().enumerate().collect();
    exec.map(insts, |(idx, inst)| {
        let mut r = check_instance(fq, &inst, bound, seed.wrapping_add(idx as u64), demazure_sign).unwrap_or_else(|e| RelationResult {
            quiver: String::new(),
            name: inst.name.clone(),
            strands: inst.bottom.n(),
            checked: 0,
            witness: None,
            holds_with_opposite_correction: None,
            error: Some(e.to_string()),
        });
        r.quiver = quiver_name.to_string();
        r
    })
}

fn framed(vertices: &[&str], edges: &[(&str, &str, &str)], phi_old: i64) -> FlavouredQuiver {
    let q = Quiver::new(vertices, edges).expect("static quiver");
    let mut dims = DimensionData::default();
    for v in vertices {
        dims.w.insert(v.to_string(), 1);
    }
    let mut phi = Flavour::default();
    for (e, _, _) in edges {
        phi.values.insert(e.to_string(), ExactScalar::int(phi_old));
    }
    FlavouredQuiver::new(&q, dims, phi, SymbolTable::new())
}

/// A1, A2 and the Kronecker quiver, each framed once at every vertex, with
/// integral flavour.
pub fn standard_quivers() -> Vec<(String, FlavouredQuiver)> {
    vec![
        ("A1".into(), framed(&["1"], &[], 0)),
        ("A2".into(), framed(&["1", "2"], &[("e", "1", "2")], -1)),
        ("Kronecker".into(), framed(&["α", "β"], &[("e", "β", "α"), ("f", "α", "β")], -1)),
    ]
}

pub fn run_relation_suite(bound: u32, seed: u64, exec: Exec) -> RelationReport {
    run_relation_suite_with(bound, seed, exec, 1)
}

pub fn run_relation_suite_with(bound: u32, seed: u64, exec: Exec, demazure_sign: i64) -> RelationReport {
    let mut results = Vec::new();
    for (name, fq) in standard_quivers() {
        results.extend(verify_relations_with(&fq, &name, bound, seed, exec, demazure_sign));
    }
    RelationReport { results }
}
