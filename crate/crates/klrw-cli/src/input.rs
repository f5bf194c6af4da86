//! File and flag parsing shared by the commands.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use klrw_core::quiver::{parse_quiver_spec, FlavouredQuiver};
use klrw_core::scalar::ExactScalar;

/// Reads a file, or returns the argument itself when no such file exists.
pub fn file_or_inline(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p).with_context(|| format!("reading {arg}"))
    } else {
        Ok(arg.to_string())
    }
}

pub fn load_quiver(path: &str, flavour: Option<&str>) -> Result<FlavouredQuiver> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading quiver file {path}"))?;
    let mut fq = parse_quiver_spec(&text).with_context(|| format!("in quiver file {path}"))?;
    if let Some(f) = flavour {
        apply_flavour(&mut fq, f)?;
    }
    Ok(fq)
}

/// `--flavour` is either a JSON object `{"e": "1/2"}` (file or inline) or
/// `e=1/2,f=1`.
pub fn apply_flavour(fq: &mut FlavouredQuiver, arg: &str) -> Result<()> {
    let text = file_or_inline(arg)?;
    let pairs: Vec<(String, String)> = if text.trim_start().starts_with('{') {
        let v: BTreeMap<String, serde_json::Value> = serde_json::from_str(&text)
            .map_err(|e| anyhow!("flavour, line {}: {e}", e.line()))?;
        v.into_iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => Ok((k, s)),
                serde_json::Value::Number(n) => Ok((k, n.to_string())),
                other => Err(anyhow!("flavour of {k} is not a scalar literal: {other}")),
            })
            .collect::<Result<_>>()?
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|kv| {
                let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("flavour entry {kv} is not EDGE=VALUE"))?;
                Ok((k.trim().to_string(), v.trim().to_string()))
            })
            .collect::<Result<_>>()?
    };
    for (k, v) in pairs {
        if fq.quiver.edge(&k).is_none() {
            bail!("flavour given for unknown edge {k}");
        }
        let s = ExactScalar::parse(&v, &mut fq.symbols)?;
        fq.phi.values.insert(k, s);
    }
    Ok(())
}

/// `α=0,1/2;β=1` → per-vertex longitudes.
pub fn parse_weight(arg: &str, fq: &mut FlavouredQuiver) -> Result<BTreeMap<String, Vec<ExactScalar>>> {
    let mut out: BTreeMap<String, Vec<ExactScalar>> = BTreeMap::new();
    for part in arg.split(';').filter(|s| !s.trim().is_empty()) {
        let (v, xs) = part.split_once('=').ok_or_else(|| anyhow!("weight part {part} is not VERTEX=a,b,..."))?;
        let v = v.trim();
        if fq.quiver.vertex_index(v).is_none() {
            bail!("unknown vertex {v}");
        }
        let entry = out.entry(v.to_string()).or_default();
        for x in xs.split(',').filter(|s| !s.trim().is_empty()) {
            entry.push(ExactScalar::parse(x.trim(), &mut fq.symbols)?);
        }
    }
    Ok(out)
}

pub fn parse_ints(arg: &str) -> Result<Vec<i64>> {
    arg.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<i64>().with_context(|| format!("{s} is not an integer")))
        .collect()
}

pub fn parse_scalars(arg: &str) -> Result<Vec<ExactScalar>> {
    let mut t = klrw_core::scalar::SymbolTable::new();
    arg.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| ExactScalar::parse(s.trim(), &mut t).map_err(Into::into))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron() -> FlavouredQuiver {
        parse_quiver_spec(
            r#"{"vertices":["α","β"],"edges":[{"id":"e","tail":"β","head":"α"},{"id":"f","tail":"α","head":"β"}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn flavour_forms() {
        let mut fq = kron();
        apply_flavour(&mut fq, "e=1/2, f=1").unwrap();
        assert_eq!(fq.phi("e"), ExactScalar::frac(1, 2));
        apply_flavour(&mut fq, r#"{"f": "2", "e": 0}"#).unwrap();
        assert_eq!(fq.phi("f"), ExactScalar::int(2));
        assert_eq!(fq.phi("e"), ExactScalar::int(0));
        assert!(apply_flavour(&mut fq, "g=1").is_err());
        assert!(apply_flavour(&mut fq, "e").is_err());
    }

    #[test]
    fn weights_and_lists() {
        let mut fq = kron();
        let w = parse_weight("α=0,1/2; β=1", &mut fq).unwrap();
        assert_eq!(w["α"], vec![ExactScalar::int(0), ExactScalar::frac(1, 2)]);
        assert_eq!(w["β"], vec![ExactScalar::int(1)]);
        assert!(parse_weight("γ=0", &mut fq).is_err());
        assert_eq!(parse_ints("1, -2").unwrap(), vec![1, -2]);
        assert!(parse_ints("x").is_err());
        assert_eq!(parse_scalars("1/2,3").unwrap(), vec![ExactScalar::frac(1, 2), ExactScalar::int(3)]);
    }
}
