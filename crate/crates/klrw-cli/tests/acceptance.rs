//! Acceptance suite: one PASS/FAIL line per criterion, each with a
//! wall-clock budget. Exits nonzero when any criterion fails.

#[path = "../../klrw-core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::diagrams::{gamma, kronecker, random_diagram, random_entries, random_monomial, random_quiver};
use common::weyl;
use klrw_core::cover::{build_cover, integralize, CoverVertex};
use klrw_core::enumerate::{enumerate_sequences, pattern};
use klrw_core::klrw::action::{act, graded_degree, is_graded_homogeneous, PolyVector};
use klrw_core::klrw::diagram::grading_shift;
use klrw_core::klrw::idempotent::vanishing_certificate;
use klrw_core::km::cartan_matrix;
use klrw_core::quiver::{parse_quiver_spec, FlavouredQuiver};
use klrw_core::scalar::{ExactScalar, Q};
use klrw_core::seq::{equivalent, is_unsteady, parse_sequence, CgrItem, FlavouredSequence};
use klrw_core::suite::{
    monopole_suite, relations_suite, restriction_suite, satake_suite, Check, MonopoleOptions, RestrictionOptions,
    SuiteReport,
};
use klrw_core::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> FlavouredQuiver {
    parse_quiver_spec(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn klrw(args: &[&str]) -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_klrw"))
        .args(["--format", "json"])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("klrw {args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| format!("klrw {args:?}: bad JSON: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite_outcome(r: &SuiteReport, names: &[&str]) -> Outcome {
    let picked: Vec<&Check> = r.checks.iter().filter(|c| names.contains(&c.name.as_str())).collect();
    ensure(picked.len() == names.len(), || format!("missing checks among {names:?}"))?;
    let mut parts = Vec::new();
    for c in &picked {
        if !c.passed() {
            return Err(format!("{}: {}/{} failed, {}", c.name, c.failed, c.cases, c.witness.clone().unwrap_or_default()));
        }
        parts.push(format!("{} {}", c.name, c.cases));
    }
    Ok(parts.join(", "))
}

// ---------------------------------------------------------------------------
// 1

const ROWS: [[&str; 4]; 6] = [
    ["α", "e", "β", "f"],
    ["α", "β", "e", "f"],
    ["α", "β", "f", "e"],
    ["β", "α", "e", "f"],
    ["β", "α", "f", "e"],
    ["β", "f", "α", "e"],
];

/// The order `pat` on corporeals α at `a` and β at `b`.
fn row_sequence(pat: &[&str; 4], a: &ExactScalar, b: &ExactScalar) -> FlavouredSequence {
    let corp: Vec<&str> = pat.iter().copied().filter(|x| *x == "α" || *x == "β").collect();
    let idx = |v: &str| corp.iter().position(|c| *c == v).unwrap();
    let order = pat
        .iter()
        .map(|x| match *x {
            "e" => CgrItem::Ghost(idx("α"), "e".into()),
            "f" => CgrItem::Ghost(idx("β"), "f".into()),
            v => CgrItem::Corporeal(idx(v)),
        })
        .collect();
    FlavouredSequence {
        labels: corp.iter().map(|s| s.to_string()).collect(),
        longitudes: corp.iter().map(|c| if *c == "α" { a.clone() } else { b.clone() }).collect(),
        order,
    }
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// `(a, b)` with `Re(b) − Re(a)` strictly inside the row's regime, and
/// arbitrary imaginary parts (equal within a row where only the real
/// parts are constrained to agree, different otherwise).
fn sample(rng: &mut ChaCha8Rng, row: usize) -> (ExactScalar, ExactScalar) {
    let a_re = q(rng.gen_range(-12..=12), rng.gen_range(1..=4));
    let t = q(rng.gen_range(1..=99), 100);
    let diff = match row {
        0 => q(1, 1) + q(rng.gen_range(0..=20), rng.gen_range(1..=3)) + t,
        1 => t,
        2 | 3 => q(0, 1),
        4 => -t,
        _ => -(q(1, 1) + q(rng.gen_range(0..=20), rng.gen_range(1..=3)) + t),
    };
    let im_a = q(rng.gen_range(-3..=3), 2);
    let im_b = if rng.gen_bool(0.5) { im_a.clone() } else { q(rng.gen_range(-3..=3), 3) };
    (ExactScalar::complex(a_re.clone(), im_a), ExactScalar::complex(a_re + diff, im_b))
}

fn kronecker_classes(fq: &FlavouredQuiver, a: &ExactScalar, b: &ExactScalar) -> Result<Vec<Vec<Vec<String>>>, String> {
    let es = vec![("α".to_string(), a.clone()), ("β".to_string(), b.clone())];
    let cs = enumerate_sequences(&es, fq).map_err(|e| e.to_string())?;
    Ok(cs.iter().map(|c| c.members.iter().map(pattern).collect()).collect())
}

fn criterion_1() -> Outcome {
    let fq = load("kronecker.json");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let table: Vec<Vec<String>> = ROWS.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    let mut samples = 0;
    for (i, row) in ROWS.iter().enumerate() {
        for _ in 0..5 {
            let (a, b) = sample(&mut rng, i);
            let es = vec![("α".to_string(), a.clone()), ("β".to_string(), b.clone())];
            let cs = enumerate_sequences(&es, &fq).map_err(|e| e.to_string())?;
            let lit = |x: &ExactScalar| x.to_literal(&fq.symbols);
            ensure(cs.len() == 1, || format!("row {} at a={}, b={}: {} classes", i + 1, lit(&a), lit(&b), cs.len()))?;
            let expected = row_sequence(row, &a, &b);
            let eq = equivalent(&cs[0].representative, &expected, &fq).map_err(|e| e.to_string())?;
            ensure(eq.is_some(), || {
                format!("row {} at a={}, b={}: got {:?}", i + 1, lit(&a), lit(&b), pattern(&cs[0].representative))
            })?;
            samples += 1;
        }
    }
    // the binary, once per row, on real samples
    let reals: [(&str, &str); 6] = [("0", "5/2"), ("0", "1/2"), ("1/3", "1/3"), ("-2", "-2"), ("1/2", "0"), ("7/3", "0")];
    for (i, (a, b)) in reals.iter().enumerate() {
        let w = format!("α={a};β={b}");
        let v = klrw(&["enumerate-sequences", "--quiver", fixture("kronecker.json").to_str().unwrap(), "--weight", &w])?;
        let classes = v.as_array().ok_or("enumerate-sequences did not return a list")?;
        ensure(classes.len() == 1, || format!("CLI row {}: {} classes", i + 1, classes.len()))?;
        let members: Vec<Vec<String>> = serde_json::from_value(classes[0]["members"].clone()).map_err(|e| e.to_string())?;
        let row: Vec<String> = ROWS[i].iter().map(|s| s.to_string()).collect();
        ensure(members.contains(&row), || format!("CLI row {}: members {members:?}", i + 1))?;
    }
    // anywhere at all, including regime boundaries: only table orders
    let mut pairs = 0;
    for _ in 0..200 {
        let a = ExactScalar::complex(q(rng.gen_range(-8..=8), 2), q(rng.gen_range(-2..=2), 1));
        let b = ExactScalar::complex(q(rng.gen_range(-8..=8), 2), q(rng.gen_range(-2..=2), 1));
        for class in kronecker_classes(&fq, &a, &b)? {
            for m in class {
                ensure(table.contains(&m), || format!("order {m:?} outside the table"))?;
            }
        }
        pairs += 1;
    }
    Ok(format!("{samples} regime samples, 6 CLI runs, {pairs} unrestricted pairs"))
}

// ---------------------------------------------------------------------------
// 2

const COVER_X_ALPHA: &str = "0,1/3,1/2,2/3,2/3";
const COVER_X_BETA: &str = "0,1/6,1/3,1/3,1/2,2/3";

const COVER_V: [(&str, &str, i64); 9] = [
    ("α", "0", 1),
    ("α", "1/3", 1),
    ("α", "1/2", 1),
    ("α", "2/3", 2),
    ("β", "0", 1),
    ("β", "1/6", 1),
    ("β", "1/3", 2),
    ("β", "1/2", 1),
    ("β", "2/3", 1),
];
const COVER_W: [(&str, &str, i64); 2] = [("α", "0", 1), ("β", "1/2", 1)];

fn criterion_2() -> Outcome {
    let mut fq = load("kronecker_cover.json");
    let mut x: BTreeMap<String, Vec<ExactScalar>> = BTreeMap::new();
    for (v, xs) in [("α", COVER_X_ALPHA), ("β", COVER_X_BETA)] {
        let parsed = xs.split(',').map(|s| ExactScalar::parse(s, &mut fq.symbols).unwrap()).collect();
        x.insert(v.to_string(), parsed);
    }
    let c = build_cover(&fq, &x).map_err(|e| e.to_string())?;
    let to_map = |rows: &[(&str, &str, i64)]| -> BTreeMap<CoverVertex, i64> {
        rows.iter()
            .map(|(b, z, n)| (CoverVertex::new(b, &ExactScalar::parse(z, &mut Default::default()).unwrap()), *n))
            .collect()
    };
    let nonzero = |m: &BTreeMap<CoverVertex, i64>| -> BTreeMap<CoverVertex, i64> {
        m.iter().filter(|(_, n)| **n != 0).map(|(k, n)| (k.clone(), *n)).collect()
    };
    ensure(nonzero(&c.v_tilde) == to_map(&COVER_V), || format!("ṽ = {:?}", c.v_tilde))?;
    ensure(nonzero(&c.w_tilde) == to_map(&COVER_W), || format!("w̃ = {:?}", c.w_tilde))?;
    ensure(c.edges.iter().all(|e| e.base != "r'"), || "r′ lifted to the cover".into())?;
    let int = integralize(&c).map_err(|e| e.to_string())?;
    ensure(int.phi_prime.values().all(ExactScalar::is_integer), || format!("φ′ = {:?}", int.phi_prime))?;

    // the same eleven values, verbatim, from the binary
    let w = format!("α={COVER_X_ALPHA};β={COVER_X_BETA}");
    let v = klrw(&["reduce-integral", "--quiver", fixture("kronecker_cover.json").to_str().unwrap(), "--weight", &w])?;
    let listed = |key: &str| -> Result<Vec<(String, i64)>, String> {
        serde_json::from_value(v[key].clone()).map_err(|e| format!("{key}: {e}"))
    };
    let fmt = |rows: &[(&str, &str, i64)]| -> Vec<(String, i64)> {
        rows.iter().map(|(b, z, n)| (format!("({b},[{z}])"), *n)).collect()
    };
    let (vt, wt) = (listed("v_tilde")?, listed("w_tilde")?);
    ensure(vt == fmt(&COVER_V), || format!("CLI ṽ = {vt:?}"))?;
    ensure(wt == fmt(&COVER_W), || format!("CLI w̃ = {wt:?}"))?;
    let edges: Vec<String> = serde_json::from_value(v["edges"].clone()).map_err(|e| e.to_string())?;
    ensure(!edges.iter().any(|e| e.starts_with("r'")), || "CLI lists an r′ edge".into())?;
    let phi: Vec<(String, String)> = serde_json::from_value(v["phi_prime"].clone()).map_err(|e| e.to_string())?;
    ensure(phi.iter().all(|(_, x)| x.parse::<i64>().is_ok()), || format!("CLI φ′ = {phi:?}"))?;
    Ok(format!("{} nonzero values, {} integral φ′ entries, r′ dropped", vt.len() + wt.len(), phi.len()))
}

// ---------------------------------------------------------------------------
// 3

fn criterion_3() -> Outcome {
    let mut fq = load("kronecker_framed.json");
    let cases = [
        ("(β,f,r,α,e)", "1,f@1,!r,2,e@2", Some(2)),
        ("(r,β,α,f,e)", "!r,1,2,f@1,e@2", Some(4)),
        ("(β,r,α,f,e)", "1,!r,2,f@1,e@2", None),
    ];
    for (name, order, want) in cases {
        let text = format!("[(β,0),(α,0)] order=[{order}]");
        let s = parse_sequence(&text, &mut fq).map_err(|e| e.to_string())?;
        let got = is_unsteady(&s);
        ensure(got == want, || format!("{name}: library gives {got:?}"))?;
        let v = klrw(&["is-unsteady", "--quiver", fixture("kronecker_framed.json").to_str().unwrap(), &text])?;
        let k = v["k"].as_u64().map(|k| k as usize);
        ensure(v["unsteady"].as_bool() == Some(want.is_some()) && k == want, || format!("{name}: CLI gives {v}"))?;
    }
    Ok("k=2, k=4, steady (library and CLI)".into())
}

// ---------------------------------------------------------------------------
// 4

fn criterion_4() -> Outcome {
    let r = relations_suite(None, 6, SEED, Exec::Parallel);
    let failed: Vec<&Check> = r.checks.iter().filter(|c| !c.passed()).collect();
    let cases: usize = r.checks.iter().map(|c| c.cases).sum();
    if failed.is_empty() {
        Ok(format!("{} relation instances over A1, A2, Kronecker, {cases} test polynomials", r.checks.len()))
    } else {
        let names: Vec<String> = failed.iter().map(|c| c.name.clone()).collect();
        Err(format!(
            "{} of {} relation instances fail: {}; first witness: {}",
            failed.len(),
            r.checks.len(),
            names.join("; "),
            failed[0].witness.clone().unwrap_or_default()
        ))
    }
}

// ---------------------------------------------------------------------------
// 5, 8

fn criterion_5() -> Outcome {
    let o = MonopoleOptions { rxi: 50, associativity: 200, inverse: 100, homomorphism: 100, el_kappa: 0, max_rank: 3, ..Default::default() };
    let r = monopole_suite(&o, SEED, Exec::Parallel);
    suite_outcome(&r, &["rxi closed form", "associativity", "inverse", "forget and fourier homomorphisms"])
}

fn criterion_8() -> Outcome {
    let o = MonopoleOptions { rxi: 0, associativity: 0, inverse: 0, homomorphism: 0, el_kappa: 20, ..Default::default() };
    let r = monopole_suite(&o, SEED, Exec::Parallel);
    suite_outcome(&r, &["twisted Φ₀′ identity"])
}

// ---------------------------------------------------------------------------
// 6, 7

fn criterion_6() -> Outcome {
    let o = RestrictionOptions { modules: 50, k_max: 10, transition_cases: 50, qhr: 0 };
    let r = restriction_suite(&o, SEED, Exec::Parallel);
    suite_outcome(&r, &["direct limits at ξ-negative weights", "invertible transitions below ξ-negative weights"])
}

fn criterion_7() -> Outcome {
    let o = RestrictionOptions { modules: 0, k_max: 10, transition_cases: 0, qhr: 50 };
    let r = restriction_suite(&o, SEED, Exec::Parallel);
    suite_outcome(&r, &["hamiltonian reduction dimensions"])
}

// ---------------------------------------------------------------------------
// 9

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    for (file, lambda, vmax, total) in [("a1.json", vec![2], vec![4], 3u64), ("a2.json", vec![1, 1], vec![3, 3], 8)] {
        let fq = load(file);
        let r = satake_suite(&fq, &vmax, SEED, Exec::Parallel).map_err(|e| e.to_string())?;
        suite_outcome(&r, &["sl2-string bookkeeping"]).map_err(|e| format!("{file}: {e}"))?;
        let t = r.table.as_ref().ok_or("no table")?;
        ensure(t.lambda == lambda, || format!("{file}: λ = {:?}", t.lambda))?;
        ensure(t.total_dim() == total, || format!("{file}: total {} ≠ {total}", t.total_dim()))?;
        let a = cartan_matrix(&fq.base_quiver()).map_err(|e| e.to_string())?;
        ensure(weyl::total_dimension(&a, &lambda) == total, || format!("{file}: oracle dimension"))?;
        for row in &t.rows {
            let want = weyl::multiplicity(&a, &lambda, &row.v);
            ensure(row.dim == want, || format!("{file}: dim at v={:?} is {}, oracle {want}", row.v, row.dim))?;
        }
        parts.push(format!("{file} total {total} over {} rows", t.rows.len()));
    }
    Ok(parts.join(", "))
}

// ---------------------------------------------------------------------------
// 10

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut hs = Vec::new();
    for i in 0..10 {
        let fq = kronecker(&mut rng, false);
        let entries = random_entries(&mut rng, &fq, 3);
        let vertex = if rng.gen_bool(0.5) { "α" } else { "β" };
        let c = vanishing_certificate(&gamma(&entries), vertex, &fq, 4).map_err(|e| e.to_string())?;
        ensure(c.check, || format!("γ #{i}: act(θ′θ) ≠ act(e(γ))"))?;
        ensure(c.unsteady.is_some(), || format!("γ #{i}: e(γ_H) is steady for H = {}", c.h))?;
        hs.push(c.h);
    }
    Ok(format!("10 weights, H in {:?}..={:?}", hs.iter().min().unwrap(), hs.iter().max().unwrap()))
}

// ---------------------------------------------------------------------------
// 11

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let (mut nonzero, mut crossings) = (0, 0);
    for i in 0..100 {
        let fq = random_quiver(&mut rng);
        let d = random_diagram(&mut rng, &fq, 4);
        crossings += d.crossings();
        let deg = d.degree(&fq).map_err(|e| e.to_string())?;
        let (sb, st) = (grading_shift(&d.bottom, &fq).unwrap(), grading_shift(&d.top, &fq).unwrap());
        for _ in 0..3 {
            let f = random_monomial(&mut rng, d.bottom.n(), 3);
            let g = act(&d, &fq, &PolyVector::new(d.bottom.clone(), f.clone())).map_err(|e| e.to_string())?;
            if g.poly.is_zero() {
                continue;
            }
            nonzero += 1;
            ensure(is_graded_homogeneous(&g.poly), || format!("diagram #{i}: inhomogeneous image"))?;
            // vector degree = polynomial degree + grading shift of its idempotent
            let before = graded_degree(&f).unwrap() + sb;
            let after = graded_degree(&g.poly).unwrap() + st;
            ensure(after - before == deg, || format!("diagram #{i}: degree rose by {}, deg d = {deg}", after - before))?;
        }
    }
    Ok(format!("100 diagrams, {crossings} crossings, {nonzero} nonzero images"))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("kronecker sequence table", criterion_1, 1),
        ("covering quiver example", criterion_2, 1),
        ("unsteadiness triple", criterion_3, 1),
        ("local relations", criterion_4, 300),
        ("monopole identities", criterion_5, 120),
        ("restriction to weight spaces", criterion_6, 120),
        ("hamiltonian reduction", criterion_7, 60),
        ("twisted Φ₀′ identity", criterion_8, 60),
        ("decategorified satake", criterion_9, 10),
        ("vanishing certificate", criterion_10, 30),
        ("degree homogeneity", criterion_11, 30),
    ];
    let mut failures = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let dt = t.elapsed();
        let outcome = match outcome {
            Ok(detail) if dt > Duration::from_secs(*budget) => Err(format!("{detail}; over the {budget} s budget")),
            o => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        if outcome.is_err() {
            failures += 1;
        }
        println!("{tag} {:>2} {name} ({:.2} s, budget {budget} s): {detail}", i + 1, dt.as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
