mod input;

use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use klrw_core::coulomb::parse::{parse_element, parse_theory, parse_theory_json};
use klrw_core::coulomb::{hamiltonian_reduce, mul, res_support, Coweight, TorusTheory, UniversalWeightModule};
use klrw_core::cover::{build_cover, category_o_graph, integralize};
use klrw_core::enumerate::{enumerate_sequences, report};
use klrw_core::quiver::FlavouredQuiver;
use klrw_core::render::{parse_diagram_spec, render_svg};
use klrw_core::seq::{equivalent, is_unsteady, parse_sequence, validate};
use klrw_core::suite::{
    monopole_suite, relations_suite, restriction_suite, satake_suite, MonopoleOptions, RestrictionOptions, SuiteReport,
};
use klrw_core::Exec;

use input::{file_or_inline, load_quiver, parse_ints, parse_scalars, parse_weight};

#[derive(Parser)]
#[command(name = "klrw", version, about = "Exact flavoured KLRW and abelian Coulomb branch computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Degree bound for test monomials, or the v-grid bound for `satake`.
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// Run without the rayon worker pool.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Svg,
}

#[derive(Args, Clone)]
struct QuiverArgs {
    /// Quiver spec (JSON).
    #[arg(long)]
    quiver: String,
    /// Flavour override: JSON object (file or inline) or `e=1,f=1/2`.
    #[arg(long)]
    flavour: Option<String>,
}

impl QuiverArgs {
    fn load(&self) -> Result<FlavouredQuiver> {
        load_quiver(&self.quiver, self.flavour.as_deref())
    }
}

#[derive(Args, Clone)]
struct TheoryArgs {
    /// Theory file `{"rank": r, "matter": [...]}`.
    #[arg(long, conflicts_with_all = ["rank", "matter"])]
    theory: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// Matter weight, e.g. `x1 - x2 + a`; repeat for each weight.
    #[arg(long)]
    matter: Vec<String>,
}

impl TheoryArgs {
    fn load(&self) -> Result<Option<TorusTheory>> {
        if let Some(t) = &self.theory {
            return Ok(Some(parse_theory_json(&file_or_inline(t)?)?));
        }
        match self.rank {
            Some(r) => Ok(Some(parse_theory(r, &self.matter)?)),
            None if self.matter.is_empty() => Ok(None),
            None => bail!("--matter needs --rank"),
        }
    }

    fn require(&self) -> Result<TorusTheory> {
        self.load()?.ok_or_else(|| anyhow!("give --theory or --rank"))
    }
}

#[derive(Args, Clone)]
struct ModuleArgs {
    /// Base weight γ₀, comma separated; repeat for a direct sum of modules.
    #[arg(long, required = true)]
    base: Vec<String>,
    /// Lower corner of the active box.
    #[arg(long, allow_hyphen_values = true)]
    lo: String,
    /// Upper corner of the active box.
    #[arg(long, allow_hyphen_values = true)]
    hi: String,
    #[arg(long, allow_hyphen_values = true)]
    xi: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteName {
    Relations,
    Monopole,
    Restriction,
    Satake,
}

#[derive(Subcommand)]
enum Command {
    /// All valid orders on a weight, up to equivalence.
    EnumerateSequences {
        #[command(flatten)]
        q: QuiverArgs,
        /// `VERTEX=a,b;VERTEX=c`
        #[arg(long)]
        weight: String,
    },
    /// Searches for a permutation making two sequences equivalent.
    CheckEquivalence {
        #[command(flatten)]
        q: QuiverArgs,
        first: String,
        second: String,
    },
    /// Length of the trailing unsteady block, if any.
    IsUnsteady {
        #[command(flatten)]
        q: QuiverArgs,
        sequence: String,
    },
    /// Covering quiver data for a weight and its integral flavour.
    ReduceIntegral {
        #[command(flatten)]
        q: QuiverArgs,
        #[arg(long)]
        weight: String,
    },
    /// Part of the covering graph connected to the framing.
    CategoryOGraph {
        #[command(flatten)]
        q: QuiverArgs,
        #[arg(long, default_value_t = 200)]
        max_vertices: usize,
    },
    /// Product of monopole elements, left to right.
    MonopoleMul {
        #[command(flatten)]
        t: TheoryArgs,
        #[arg(required = true, num_args = 2..)]
        elements: Vec<String>,
    },
    /// Weight-space dimensions of a truncated universal weight module.
    ResSupport {
        #[command(flatten)]
        t: TheoryArgs,
        #[command(flatten)]
        m: ModuleArgs,
    },
    /// Reduction by r_ξ − 1: formula and quotient dimensions per coset.
    Qhr {
        #[command(flatten)]
        t: TheoryArgs,
        #[command(flatten)]
        m: ModuleArgs,
    },
    /// Local relations as operator identities (A1, A2, Kronecker without --quiver).
    Relcheck {
        #[arg(long)]
        quiver: Option<String>,
        #[arg(long)]
        flavour: Option<String>,
    },
    /// Dimension table with e_i/f_i ranks over the v-grid.
    Satake {
        #[command(flatten)]
        q: QuiverArgs,
        /// Framing override, one entry per vertex.
        #[arg(long)]
        w: Option<String>,
    },
    /// SVG picture of a diagram.
    RenderDiagram {
        #[command(flatten)]
        q: QuiverArgs,
        /// Diagram spec (JSON file or inline).
        diagram: String,
    },
    /// Runs a property suite.
    Suite {
        name: SuiteName,
        #[arg(long)]
        quiver: Option<String>,
        #[arg(long)]
        flavour: Option<String>,
        #[command(flatten)]
        t: TheoryArgs,
        #[arg(long)]
        w: Option<String>,
        /// Cases per randomized check.
        #[arg(long)]
        cases: Option<usize>,
    },
}

fn to_json<T: serde::Serialize>(x: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(x)? + "\n")
}

fn fmt_coweight(c: &Coweight) -> String {
    let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn suite_table(r: &SuiteReport) -> String {
    let mut out = String::new();
    if let Some(t) = &r.table {
        let _ = writeln!(out, "λ = {:?} on vertices {:?}", t.lambda, t.vertices);
        let _ = writeln!(out, "{:<14} {:<14} {:>5} {:<12} {:<12}", "v", "μ", "dim", "rank e", "rank f");
        for row in t.rows.iter().filter(|r| r.dim > 0) {
            let _ = writeln!(
                out,
                "{:<14} {:<14} {:>5} {:<12} {:<12}",
                format!("{:?}", row.v),
                format!("{:?}", row.mu),
                row.dim,
                format!("{:?}", row.e_rank),
                format!("{:?}", row.f_rank)
            );
        }
        let _ = writeln!(out, "total dimension {}", t.total_dim());
    }
    for c in &r.checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let _ = write!(out, "{status} {} ({} cases", c.name, c.cases);
        if c.failed > 0 {
            let _ = write!(out, ", {} failed", c.failed);
        }
        out.push(')');
        if let Some(w) = &c.witness {
            let _ = write!(out, ": {w}");
        }
        out.push('\n');
    }
    let passed = r.checks.iter().filter(|c| c.passed()).count();
    let _ = writeln!(out, "{}: {passed}/{} checks passed (seed {})", r.suite, r.checks.len(), r.seed);
    out
}

fn emit_suite(r: &SuiteReport, format: Format) -> Result<(String, bool)> {
    let text = match format {
        Format::Json => to_json(r)?,
        _ => suite_table(r),
    };
    Ok((text, r.all_passed()))
}

fn build_modules(th: &TorusTheory, m: &ModuleArgs) -> Result<(Vec<UniversalWeightModule>, Vec<i64>)> {
    let lo = parse_ints(&m.lo)?;
    let hi = parse_ints(&m.hi)?;
    let xi = parse_ints(&m.xi)?;
    if lo.len() != th.rank || hi.len() != th.rank || xi.len() != th.rank {
        bail!("--lo, --hi and --xi need {} entries", th.rank);
    }
    let ms = m
        .base
        .iter()
        .map(|b| Ok(UniversalWeightModule::boxed(th, parse_scalars(b)?, &lo, &hi)?))
        .collect::<Result<Vec<_>>>()?;
    Ok((ms, xi))
}

fn apply_w(fq: &mut FlavouredQuiver, w: &str) -> Result<()> {
    let ws = parse_ints(w)?;
    let verts: Vec<String> = fq.quiver.gauge_vertices().cloned().collect();
    if ws.len() != verts.len() {
        bail!("--w needs {} entries", verts.len());
    }
    let q = fq.base_quiver();
    let mut dims = fq.dims.clone();
    for (v, x) in verts.iter().zip(ws) {
        dims.w.insert(v.clone(), x);
    }
    *fq = FlavouredQuiver::new(&q, dims, fq.phi.clone(), fq.symbols.clone());
    Ok(())
}

fn satake_report(fq: &FlavouredQuiver, bound: Option<u32>, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let n = fq.quiver.gauge_vertices().count();
    let b = i64::from(bound.unwrap_or(4));
    Ok(satake_suite(fq, &vec![b; n], seed, exec)?)
}

/// Returns the text to print and whether the command succeeded.
fn run(cli: &Cli) -> Result<(String, bool)> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let fmt = cli.format;
    if fmt == Format::Svg && !matches!(cli.command, Command::RenderDiagram { .. }) {
        bail!("--format svg is only available for render-diagram");
    }
    match &cli.command {
        Command::EnumerateSequences { q, weight } => {
            let mut fq = q.load()?;
            let w = parse_weight(weight, &mut fq)?;
            let entries: Vec<_> = w.into_iter().flat_map(|(v, xs)| xs.into_iter().map(move |x| (v.clone(), x))).collect();
            let classes = enumerate_sequences(&entries, &fq)?;
            let reports = classes.iter().map(|c| report(c, &fq)).collect::<klrw_core::Result<Vec<_>>>()?;
            if fmt == Format::Json {
                return Ok((to_json(&reports)?, true));
            }
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(out, "({})  {}", r.pattern.join(","), r.regime);
                for m in r.members.iter().skip(1) {
                    let _ = writeln!(out, "  ~ ({})", m.join(","));
                }
            }
            let _ = writeln!(out, "{} class(es)", reports.len());
            Ok((out, true))
        }
        Command::CheckEquivalence { q, first, second } => {
            let mut fq = q.load()?;
            let a = parse_sequence(&file_or_inline(first)?, &mut fq)?;
            let b = parse_sequence(&file_or_inline(second)?, &mut fq)?;
            for (name, s) in [("first", &a), ("second", &b)] {
                let v = validate(s, &fq)?;
                if !v.is_empty() {
                    let msgs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    bail!("{name} sequence is not valid: {}", msgs.join("; "));
                }
            }
            let sigma = equivalent(&a, &b, &fq)?;
            let one_based = sigma.as_ref().map(|s| s.iter().map(|x| x + 1).collect::<Vec<_>>());
            if fmt == Format::Json {
                return Ok((to_json(&json!({"equivalent": sigma.is_some(), "sigma": one_based}))?, true));
            }
            Ok((
                match one_based {
                    Some(s) => format!("equivalent, σ = {s:?}\n"),
                    None => "not equivalent\n".to_string(),
                },
                true,
            ))
        }
        Command::IsUnsteady { q, sequence } => {
            let mut fq = q.load()?;
            let s = parse_sequence(&file_or_inline(sequence)?, &mut fq)?;
            let k = is_unsteady(&s);
            if fmt == Format::Json {
                return Ok((to_json(&json!({"unsteady": k.is_some(), "k": k}))?, true));
            }
            Ok((
                match k {
                    Some(k) => format!("unsteady k={k}\n"),
                    None => "steady\n".to_string(),
                },
                true,
            ))
        }
        Command::ReduceIntegral { q, weight } => {
            let mut fq = q.load()?;
            let w = parse_weight(weight, &mut fq)?;
            let cover = build_cover(&fq, &w)?;
            let int = integralize(&cover)?;
            let t = &cover.symbols;
            let lit = |s: &klrw_core::scalar::ExactScalar| s.to_literal(t);
            let v: Vec<(String, i64)> = cover.v_tilde.iter().filter(|(_, x)| **x != 0).map(|(k, x)| (k.to_string(), *x)).collect();
            let wt: Vec<(String, i64)> = cover.w_tilde.iter().filter(|(_, x)| **x != 0).map(|(k, x)| (k.to_string(), *x)).collect();
            let eta: Vec<(String, String)> = int.eta.iter().map(|(k, x)| (k.to_string(), lit(x))).collect();
            let phi: Vec<(String, String)> = int.phi_prime.iter().map(|(k, x)| (k.clone(), lit(x))).collect();
            let edges: Vec<String> = cover
                .edges
                .iter()
                .map(|e| format!("{}: {} → {}", e.id, e.tail, e.head.as_ref().map_or("∞".to_string(), |h| h.to_string())))
                .collect();
            if fmt == Format::Json {
                return Ok((
                    to_json(&json!({
                        "vertices": cover.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "edges": edges, "v_tilde": v, "w_tilde": wt, "eta": eta, "phi_prime": phi,
                    }))?,
                    true,
                ));
            }
            let mut out = String::new();
            let _ = writeln!(out, "cover vertices: {}", cover.vertices.len());
            for (k, x) in &v {
                let _ = writeln!(out, "ṽ {k} = {x}");
            }
            for (k, x) in &wt {
                let _ = writeln!(out, "w̃ {k} = {x}");
            }
            for e in &edges {
                let _ = writeln!(out, "edge {e}");
            }
            for (k, x) in &eta {
                let _ = writeln!(out, "η {k} = {x}");
            }
            for (k, x) in &phi {
                let _ = writeln!(out, "φ′ {k} = {x}");
            }
            Ok((out, true))
        }
        Command::CategoryOGraph { q, max_vertices } => {
            let fq = q.load()?;
            let g = category_o_graph(&fq, *max_vertices)?;
            if fmt == Format::Json {
                return Ok((to_json(&g)?, true));
            }
            let mut out = String::new();
            let _ = writeln!(out, "{} vertices{}", g.vertices.len(), if g.truncated { " (truncated)" } else { "" });
            for v in &g.vertices {
                let _ = writeln!(out, "  {v}");
            }
            for (e, a, b) in &g.edges {
                let _ = writeln!(out, "  {e}: {a} → {b}");
            }
            Ok((out, true))
        }
        Command::MonopoleMul { t, elements } => {
            let th = t.require()?;
            let mut acc = parse_element(&elements[0], &th).with_context(|| format!("element {}", elements[0]))?;
            for e in &elements[1..] {
                let b = parse_element(e, &th).with_context(|| format!("element {e}"))?;
                acc = mul(&acc, &b, &th);
            }
            let text = acc.display(&th);
            if fmt == Format::Json {
                let terms: Vec<(String, String)> = acc
                    .terms
                    .iter()
                    .map(|(nu, c)| (fmt_coweight(nu), c.fmt_with(&|v| th.var_name(v))))
                    .collect();
                return Ok((to_json(&json!({"product": text, "terms": terms}))?, true));
            }
            Ok((text + "\n", true))
        }
        Command::ResSupport { t, m } => {
            let th = t.require()?;
            let (ms, xi) = build_modules(&th, m)?;
            if ms.len() != 1 {
                bail!("res-support takes a single --base");
            }
            let lim = res_support(&ms[0], &xi);
            if fmt == Format::Json {
                let v: Vec<_> = lim.iter().map(|(k, l)| json!({"coset": k, "limit": l})).collect();
                return Ok((to_json(&v)?, true));
            }
            let mut out = String::new();
            for (k, l) in &lim {
                let _ = writeln!(
                    out,
                    "coset {} rep {} weight ({}) dim {}{}",
                    fmt_coweight(k),
                    fmt_coweight(&l.representative),
                    l.weight.join(","),
                    l.dim,
                    if l.xi_negative { " ξ-negative" } else { "" }
                );
            }
            Ok((out, true))
        }
        Command::Qhr { t, m } => {
            let th = t.require()?;
            let (ms, xi) = build_modules(&th, m)?;
            let red = hamiltonian_reduce(&ms, &xi)?;
            let ok = red.values().all(|e| e.agrees());
            let rows: Vec<(String, usize, usize)> = red
                .iter()
                .map(|(g, e)| {
                    let w: Vec<String> = g.iter().map(|s| s.to_string()).collect();
                    (format!("({})", w.join(",")), e.formula, e.quotient)
                })
                .collect();
            if fmt == Format::Json {
                let v: Vec<_> = rows.iter().map(|(g, f, q)| json!({"weight": g, "formula": f, "quotient": q})).collect();
                return Ok((to_json(&v)?, ok));
            }
            let mut out = String::new();
            for (g, f, q) in &rows {
                let _ = writeln!(out, "γ′ {g}: formula {f} quotient {q}{}", if f == q { "" } else { "  MISMATCH" });
            }
            Ok((out, ok))
        }
        Command::Relcheck { quiver, flavour } => {
            let bound = cli.bound.unwrap_or(6);
            let fq = quiver.as_deref().map(|p| load_quiver(p, flavour.as_deref())).transpose()?;
            let r = relations_suite(quiver.as_deref().zip(fq.as_ref()), bound, cli.seed, exec);
            emit_suite(&r, fmt)
        }
        Command::Satake { q, w } => {
            let mut fq = q.load()?;
            if let Some(w) = w {
                apply_w(&mut fq, w)?;
            }
            emit_suite(&satake_report(&fq, cli.bound, cli.seed, exec)?, fmt)
        }
        Command::RenderDiagram { q, diagram } => {
            let mut fq = q.load()?;
            let d = parse_diagram_spec(&file_or_inline(diagram)?, &mut fq)?;
            match fmt {
                Format::Json => Ok((
                    to_json(&json!({
                        "bottom": d.bottom.fmt_with(Some(&fq)),
                        "top": d.top.fmt_with(Some(&fq)),
                        "matching": d.matching.iter().map(|x| x + 1).collect::<Vec<_>>(),
                        "crossings": d.crossings(),
                        "dots": d.dots(),
                        "degree": d.degree(&fq)?,
                    }))?,
                    true,
                )),
                _ => Ok((render_svg(&d, &fq)?, true)),
            }
        }
        Command::Suite { name, quiver, flavour, t, w, cases } => {
            let fq = quiver.as_deref().map(|p| load_quiver(p, flavour.as_deref())).transpose()?;
            let r = match name {
                SuiteName::Relations => {
                    relations_suite(quiver.as_deref().zip(fq.as_ref()), cli.bound.unwrap_or(6), cli.seed, exec)
                }
                SuiteName::Monopole => {
                    let mut o = MonopoleOptions { theory: t.load()?, ..Default::default() };
                    if let Some(n) = cases {
                        (o.rxi, o.associativity, o.inverse, o.homomorphism, o.el_kappa) = (*n, *n, *n, *n, *n);
                    }
                    monopole_suite(&o, cli.seed, exec)
                }
                SuiteName::Restriction => {
                    let mut o = RestrictionOptions::default();
                    if let Some(n) = cases {
                        (o.modules, o.transition_cases, o.qhr) = (*n, *n, *n);
                    }
                    restriction_suite(&o, cli.seed, exec)
                }
                SuiteName::Satake => {
                    let mut fq = fq.ok_or_else(|| anyhow!("satake needs --quiver"))?;
                    if let Some(w) = w {
                        apply_w(&mut fq, w)?;
                    }
                    satake_report(&fq, cli.bound, cli.seed, exec)?
                }
            };
            emit_suite(&r, fmt)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn coweights_print_as_tuples() {
        assert_eq!(fmt_coweight(&vec![1, -2]), "(1,-2)");
    }
}
