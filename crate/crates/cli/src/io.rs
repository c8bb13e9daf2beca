//! Measure sources, number formatting and file output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use indicatorlab::fixtures::{self, Fixture};
use indicatorlab::{AngularMeasure, MultiplierFn, Order, PiecewiseTrig};
use serde_json::Value;

/// A user-facing input problem; maps to exit code 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

/// A resolved measure with its order and any known multipliers.
pub struct Loaded {
    pub measure: AngularMeasure,
    pub order: Order,
    pub multipliers: Vec<MultiplierFn>,
    pub label: String,
}

pub fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (k, v) = item.split_once('=').ok_or_else(|| invalid(format!("parameter '{item}' is not key=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| invalid(format!("parameter '{item}' has a non-numeric value")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// `fixture:<name>` with optional inline `(k=v,...)`, or a JSON file path.
pub fn load_measure(source: &str, params: &[String], rho: Option<f64>) -> Result<Loaded> {
    let mut params = parse_params(params)?;
    if let Some(spec) = source.strip_prefix("fixture:") {
        let (name, inline) = match spec.split_once('(') {
            Some((n, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| invalid(format!("unbalanced parentheses in '{spec}'")))?;
                let list: Vec<String> =
                    inner.split(',').filter(|s| !s.trim().is_empty()).map(str::to_string).collect();
                (n, parse_params(&list)?)
            }
            None => (spec, BTreeMap::new()),
        };
        params.extend(inline);
        let f: Fixture = fixtures::resolve(name.trim(), &params, rho)?;
        return Ok(Loaded { measure: f.measure, order: f.order, multipliers: f.multipliers, label: f.name });
    }
    if !params.is_empty() {
        bail!(invalid("--param only applies to fixture measures"));
    }
    let rho = rho.ok_or_else(|| invalid("--rho is required for measure files"))?;
    let text = std::fs::read_to_string(source).map_err(|e| invalid(format!("cannot read {source}: {e}")))?;
    let measure: AngularMeasure =
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad measure file {source}: {e}")))?;
    Ok(Loaded { measure, order: Order::new(rho)?, multipliers: Vec::new(), label: source.to_string() })
}

pub fn load_multiplier(path: &str, order: Order) -> Result<MultiplierFn> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {path}: {e}")))?;
    Ok(PiecewiseTrig::from_json(order, &text)?)
}

/// Round to `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Round every number in a JSON tree.
pub fn round_json(v: Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig(n.as_f64().unwrap_or(0.0), digits);
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_json(x, digits))).collect()),
        other => other,
    }
}

pub const JSON_DIGITS: usize = 12;
pub const CSV_DIGITS: usize = 9;

/// Write to stdout, treating a closed pipe as success.
pub fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

pub fn print_json(v: Value) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(&round_json(v, JSON_DIGITS))?))
}

pub fn csv_num(x: f64) -> String {
    let r = sig(x, CSV_DIGITS);
    if r != 0.0 && r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// CSV with optional `# ` comment lines before the header.
pub fn csv(comments: &[String], header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(csv_num).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
