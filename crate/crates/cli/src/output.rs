//! JSON and CSV rendering. Floats are printed with 12 significant digits so that
//! repeated runs are byte-identical.

use std::io::Write;

use conductor_core::bounds::{BoundResult, FieldScanEntry, ScanReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::tables::TableRow;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every float inside a JSON value.
pub fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

pub fn to_rounded_value<T: Serialize>(t: &T) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(t)?;
    round_value(&mut v);
    Ok(v)
}

/// The public JSON shape of a bound.
pub fn bound_json(label: Option<&str>, r: &BoundResult) -> Value {
    let mut v = json!({});
    let o = v.as_object_mut().expect("object");
    if let Some(l) = label {
        o.insert("label".into(), json!(l));
    }
    o.insert("lambda_star".into(), json!(r.lambda_star));
    o.insert("B_R".into(), json!(r.b_r));
    if let Some(z) = r.b_z {
        o.insert("B_Z".into(), json!(z));
    }
    o.insert("log_bound".into(), json!(r.log_bound));
    o.insert("egr_excluded".into(), json!(r.egr_excluded));
    o.insert(
        "breakdown".into(),
        json!({
            "rank_term": r.rank_term,
            "prime_sum": r.prime_sum,
            "arch_term": r.arch_term,
            "disc_term": r.disc_term,
        }),
    );
    o.insert("flags".into(), json!(r.flags));
    round_value(&mut v);
    v
}

/// Inverse of [`bound_json`] (the label is dropped).
pub fn parse_bound_json(v: &Value) -> Result<BoundResult, CliError> {
    let bad = |what: &str| CliError::Usage(format!("bound JSON: missing or invalid '{what}'"));
    let f = |o: &Value, k: &str| o.get(k).and_then(Value::as_f64).ok_or_else(|| bad(k));
    let b = v.get("breakdown").ok_or_else(|| bad("breakdown"))?;
    Ok(BoundResult {
        lambda_star: f(v, "lambda_star")?,
        rank_term: f(b, "rank_term")?,
        prime_sum: f(b, "prime_sum")?,
        arch_term: f(b, "arch_term")?,
        disc_term: f(b, "disc_term")?,
        log_bound: f(v, "log_bound")?,
        b_r: f(v, "B_R")?,
        b_z: match v.get("B_Z") {
            None => None,
            Some(z) => Some(z.as_u64().ok_or_else(|| bad("B_Z"))?),
        },
        egr_excluded: v
            .get("egr_excluded")
            .and_then(Value::as_bool)
            .ok_or_else(|| bad("egr_excluded"))?,
        flags: serde_json::from_value(v.get("flags").cloned().ok_or_else(|| bad("flags"))?)
            .map_err(|_| bad("flags"))?,
    })
}

pub fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

/// One line per value.
pub fn write_json_lines(out: &mut dyn Write, vs: &[Value]) -> Result<(), CliError> {
    for v in vs {
        writeln!(out, "{}", serde_json::to_string(v)?)?;
    }
    Ok(())
}

fn fmt(x: f64) -> String {
    round12(x).to_string()
}

/// λ profile rows; `label` is repeated on every row when present.
pub fn write_profile_csv(
    out: &mut dyn Write,
    rows: &[(Option<&str>, &BoundResult)],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "lambda",
        "rank_term",
        "prime_sum",
        "arch_term",
        "disc_term",
        "log_bound",
        "B_R",
        "B_Z",
        "egr_excluded",
        "flags",
    ])?;
    for (label, r) in rows {
        w.write_record([
            label.unwrap_or("").to_string(),
            fmt(r.lambda_star),
            fmt(r.rank_term),
            fmt(r.prime_sum),
            fmt(r.arch_term),
            fmt(r.disc_term),
            fmt(r.log_bound),
            fmt(r.b_r),
            r.b_z.map(|z| z.to_string()).unwrap_or_default(),
            r.egr_excluded.to_string(),
            r.flags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

pub fn write_scan_csv(out: &mut dyn Write, entries: &[FieldScanEntry]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "degree",
        "root_discriminant",
        "prefilter_passed",
        "lambda_star",
        "bound",
        "direct",
        "excluded",
        "excluded_via",
        "flags",
    ])?;
    for e in entries {
        w.write_record([
            e.label.clone(),
            e.degree.to_string(),
            fmt(e.root_discriminant),
            e.prefilter_passed.to_string(),
            opt(e.lambda_star),
            opt(e.bound),
            e.direct.to_string(),
            e.excluded.to_string(),
            e.excluded_via.clone().unwrap_or_default(),
            e.flags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn scan_json(report: &ScanReport) -> Result<Value, CliError> {
    to_rounded_value(report)
}

pub fn write_table_csv(out: &mut dyn Write, rows: &[TableRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "table",
        "row",
        "rank",
        "dim",
        "constraints",
        "lambda",
        "B_R",
        "published_B_R",
        "B_Z",
        "published_B_Z",
        "tolerance",
        "within_tolerance",
    ])?;
    for r in rows {
        w.write_record([
            r.table.to_string(),
            r.row.to_string(),
            r.rank.to_string(),
            r.dim.to_string(),
            r.constraints.clone(),
            fmt(r.lambda),
            format!("{:.3}", r.b_r),
            r.published_b_r.to_string(),
            r.b_z.map(|z| z.to_string()).unwrap_or_default(),
            r.published_b_z.map(|z| z.to_string()).unwrap_or_default(),
            fmt(r.tolerance),
            r.within_tolerance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
