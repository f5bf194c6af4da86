//! SVG rendering of flavoured KLRW diagrams.
//!
//! Time runs bottom to top, one slice per event. Corporeal strands are solid
//! black, ghosts dashed black, reds solid red. Below the diagram the first
//! row carries the label and the second the longitude; above it the order
//! of the two rows is mirrored.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{KlrwError, Result};
use crate::klrw::diagram::{minimal_matching, with_matching, Diagram, Event, Move};
use crate::quiver::FlavouredQuiver;
use crate::seq::{parse_sequence, CgrItem, FlavouredSequence};

const DX: f64 = 48.0;
const DY: f64 = 40.0;
const MARGIN: f64 = 40.0;
const ROWS: f64 = 44.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// First annotation row: vertex for corporeals, edge for ghosts, tail vertex for reds.
fn row_label(s: &FlavouredSequence, it: &CgrItem, fq: &FlavouredQuiver) -> String {
    match it {
        CgrItem::Corporeal(k) => s.labels[*k].clone(),
        CgrItem::Ghost(_, e) => e.clone(),
        CgrItem::Red(e) => fq.quiver.edge(e).map(|x| x.tail.clone()).unwrap_or_else(|| e.clone()),
    }
}

fn class(it: &CgrItem) -> &'static str {
    match it {
        CgrItem::Corporeal(_) => "corporeal",
        CgrItem::Ghost(..) => "ghost",
        CgrItem::Red(_) => "red",
    }
}

fn style(it: &CgrItem) -> &'static str {
    match it {
        CgrItem::Corporeal(_) => r#"stroke="black" stroke-width="2.5""#,
        CgrItem::Ghost(..) => r#"stroke="black" stroke-width="2.5" stroke-dasharray="7,5""#,
        CgrItem::Red(_) => r#"stroke="red" stroke-width="2.5""#,
    }
}

/// Order snapshots before and after each event, in bottom strand ids.
fn snapshots(d: &Diagram) -> Result<Vec<Vec<CgrItem>>> {
    let mut cur = d.bottom.order.clone();
    let mut out = vec![cur.clone()];
    for ev in &d.events {
        if let Event::Cross { left, right } = ev {
            let k = cur
                .iter()
                .position(|x| x == left)
                .ok_or_else(|| KlrwError::Mismatch(format!("no item {left}")))?;
            if cur.get(k + 1) != Some(right) {
                return Err(KlrwError::Mismatch(format!("{left} and {right} are not adjacent")));
            }
            cur.swap(k, k + 1);
        }
        out.push(cur.clone());
    }
    Ok(out)
}

pub fn render_svg(d: &Diagram, fq: &FlavouredQuiver) -> Result<String> {
    let snaps = snapshots(d)?;
    let width_items = d.bottom.order.len().max(1);
    let steps = d.events.len().max(1);
    let width = 2.0 * MARGIN + DX * (width_items as f64 - 1.0).max(0.0);
    let height = 2.0 * (MARGIN + ROWS) + DY * steps as f64;
    let y0 = height - MARGIN - ROWS;
    let y_at = |t: usize| y0 - DY * t as f64;
    let x_at = |p: usize| MARGIN + DX * p as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for it in &d.bottom.order {
        let mut pts = Vec::with_capacity(snaps.len() + 1);
        for (t, snap) in snaps.iter().enumerate() {
            let p = snap.iter().position(|x| x == it).expect("strand present in every slice");
            pts.push(format!("{},{}", x_at(p), y_at(t)));
        }
        if d.events.is_empty() {
            let p = snaps[0].iter().position(|x| x == it).unwrap();
            pts.push(format!("{},{}", x_at(p), y_at(1)));
        }
        let _ = writeln!(
            svg,
            r#"<polyline class="{}" data-strand="{}" points="{}" fill="none" {}/>"#,
            class(it),
            escape(&it.to_string()),
            pts.join(" "),
            style(it)
        );
    }
    // a dot event leaves every strand vertical, so its midpoint is off any crossing
    for (t, ev) in d.events.iter().enumerate() {
        if let Event::Dot(m) = ev {
            let p = snaps[t].iter().position(|x| x == &CgrItem::Corporeal(*m)).unwrap();
            let y = (y_at(t) + y_at(t + 1)) / 2.0;
            let _ = writeln!(svg, r#"<circle class="dot" cx="{}" cy="{y}" r="5" fill="black"/>"#, x_at(p));
        }
    }
    let text = |svg: &mut String, x: f64, y: f64, row: &str, s: &str| {
        let _ = writeln!(
            svg,
            r#"<text class="{row}" x="{x}" y="{y}" text-anchor="middle" font-family="serif" font-size="14">{}</text>"#,
            escape(s)
        );
    };
    for (p, it) in d.bottom.order.iter().enumerate() {
        let lon = d.bottom.longitude(it, fq).to_literal(&fq.symbols);
        text(&mut svg, x_at(p), y0 + 20.0, "bottom-label", &row_label(&d.bottom, it, fq));
        text(&mut svg, x_at(p), y0 + 38.0, "bottom-longitude", &lon);
    }
    let yt = y_at(steps);
    for (p, it) in d.top.order.iter().enumerate() {
        let lon = d.top.longitude(it, fq).to_literal(&fq.symbols);
        text(&mut svg, x_at(p), yt - 12.0, "top-longitude", &lon);
        text(&mut svg, x_at(p), yt - 30.0, "top-label", &row_label(&d.top, it, fq));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Diagram input: a bottom sequence plus either local moves (`"s3"` swaps
/// order positions 3 and 4, `"d2"` dots strand 2; both 1-based) or a top
/// sequence with an optional 1-based matching and dotted bottom strands.
#[derive(Deserialize, Debug)]
pub struct DiagramSpec {
    pub bottom: String,
    #[serde(default)]
    pub top: Option<String>,
    #[serde(default)]
    pub matching: Option<Vec<usize>>,
    #[serde(default)]
    pub moves: Vec<String>,
    #[serde(default)]
    pub dots: Vec<usize>,
}

fn one_based(k: usize, what: &str) -> Result<usize> {
    k.checked_sub(1).ok_or_else(|| KlrwError::parse(format!("{what} indices are 1-based")))
}

fn parse_move(m: &str) -> Result<Move> {
    let m = m.trim();
    let (kind, rest) = m.split_at(m.chars().next().map_or(0, |c| c.len_utf8()));
    let k: usize = rest.trim().parse().map_err(|_| KlrwError::parse(format!("bad move {m}")))?;
    match kind {
        "s" => Ok(Move::Swap(one_based(k, "move")?)),
        "d" => Ok(Move::Dot(one_based(k, "move")?)),
        _ => Err(KlrwError::parse(format!("bad move {m}: expected sK or dK"))),
    }
}

pub fn build_diagram(spec: &DiagramSpec, fq: &mut FlavouredQuiver) -> Result<Diagram> {
    let bottom = parse_sequence(&spec.bottom, fq)?;
    let Some(top_text) = &spec.top else {
        let moves: Vec<Move> = spec.moves.iter().map(|m| parse_move(m)).collect::<Result<_>>()?;
        return Diagram::from_moves(&bottom, &moves);
    };
    let top = parse_sequence(top_text, fq)?;
    let matching = match &spec.matching {
        Some(m) => m.iter().map(|k| one_based(*k, "matching")).collect::<Result<Vec<_>>>()?,
        None => minimal_matching(&bottom, &top)?,
    };
    let d = with_matching(&bottom, &top, &matching, fq)?;
    let mut events: Vec<Event> = Vec::new();
    for k in &spec.dots {
        let m = one_based(*k, "dot")?;
        if m >= bottom.n() {
            return Err(KlrwError::Mismatch(format!("dot on missing strand {k}")));
        }
        events.push(Event::Dot(m));
    }
    events.extend(d.events);
    Diagram::new(bottom, top, matching, events)
}

pub fn parse_diagram_spec(text: &str, fq: &mut FlavouredQuiver) -> Result<Diagram> {
    let spec: DiagramSpec =
        serde_json::from_str(text).map_err(|e| KlrwError::Parse { line: e.line(), msg: e.to_string() })?;
    build_diagram(&spec, fq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{DimensionData, Flavour, Quiver, INF};
    use crate::scalar::{ExactScalar, SymbolTable};
    use crate::seq::is_valid;

    fn kronecker_framed() -> FlavouredQuiver {
        let q = Quiver::new(
            &["α", "β"],
            &[("e", "β", "α"), ("f", "α", "β"), ("r", "α", INF), ("r'", "α", INF), ("s", "β", INF)],
        )
        .unwrap();
        let mut phi = Flavour::default();
        for (k, v) in [("e", 1), ("f", 1), ("r", -4), ("r'", 0), ("s", 2)] {
            phi.values.insert(k.into(), ExactScalar::int(v));
        }
        FlavouredQuiver::new(&q, DimensionData::default(), phi, SymbolTable::new())
    }

    fn count(svg: &str, pat: &str) -> usize {
        svg.matches(pat).count()
    }

    #[test]
    fn identity_draws_vertical_strands() {
        let mut fq = kronecker_framed();
        let s = parse_sequence("[(α,0),(β,1/2)]", &mut fq).unwrap();
        let svg = render_svg(&Diagram::identity(&s), &fq).unwrap();
        assert_eq!(count(&svg, "<polyline"), 2 + 2 + 3);
        assert_eq!(count(&svg, r#"class="corporeal""#), 2);
        assert_eq!(count(&svg, r#"class="ghost""#), 2);
        assert_eq!(count(&svg, r#"class="red""#), 3);
        assert_eq!(count(&svg, "stroke-dasharray"), 2);
        assert_eq!(count(&svg, "<circle"), 0);
        assert_eq!(count(&svg, r#"class="top-label""#), 7);
        assert_eq!(count(&svg, r#"class="bottom-longitude""#), 7);
    }

    #[test]
    fn kronecker_two_diagram() {
        let mut fq = kronecker_framed();
        // the default orders of the two weights, with the strand matching of the picture
        let spec = r#"{
            "bottom": "[(α,-3),(β,-2),(α,3)]",
            "top": "[(α,-6),(α,-1),(β,0)]",
            "matching": [1, 3, 2],
            "dots": [2]
        }"#;
        let d = parse_diagram_spec(spec, &mut fq).unwrap();
        assert!(is_valid(&d.bottom, &fq).unwrap() && is_valid(&d.top, &fq).unwrap());
        let svg = render_svg(&d, &fq).unwrap();
        assert_eq!(count(&svg, "<polyline"), 9);
        assert_eq!(count(&svg, r#"class="dot""#), 1);
        // reds are annotated by their tail vertex and carry φ as longitude
        assert!(svg.contains(r#"class="bottom-label" x="40" y="#));
        assert!(svg.contains(">-4</text>"));
        assert_eq!(render_svg(&d, &fq).unwrap(), svg);
    }

    #[test]
    fn dots_sit_on_vertical_segments() {
        let mut fq = kronecker_framed();
        let spec = r#"{"bottom": "[(α,0),(α,0)]", "moves": ["d1", "s3", "d2"]}"#;
        let d = parse_diagram_spec(spec, &mut fq).unwrap();
        let svg = render_svg(&d, &fq).unwrap();
        assert_eq!(count(&svg, r#"class="dot""#), 2);
        let snaps = snapshots(&d).unwrap();
        for (t, ev) in d.events.iter().enumerate() {
            if let Event::Dot(_) = ev {
                assert_eq!(snaps[t], snaps[t + 1]);
            }
        }
    }

    #[test]
    fn bad_moves_are_rejected() {
        let mut fq = kronecker_framed();
        assert!(parse_diagram_spec(r#"{"bottom": "[(α,0)]", "moves": ["x1"]}"#, &mut fq).is_err());
        assert!(parse_diagram_spec(r#"{"bottom": "[(α,0)]", "moves": ["s0"]}"#, &mut fq).is_err());
        assert!(parse_diagram_spec("{", &mut fq).is_err());
    }
}
