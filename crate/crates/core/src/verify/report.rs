//! CSV and JSON encodings of report rows.
//!
//! Floats are written with 17 significant digits so parsing them back gives
//! the same bits.

use serde_json::Value;

use super::{Verdict, VerificationReport};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "check,param,estimate,se,bound,valid,verdict,seed,replicates";

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Report(format!("not a number: {s:?}")))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Report(format!("CSV: {e}"))
}

pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in reports {
        w.write_record([
            r.check.clone(),
            r.param.clone(),
            fmt_num(r.estimate),
            fmt_num(r.se),
            fmt_num(r.bound),
            r.valid.to_string(),
            r.verdict.to_string(),
            r.seed.to_string(),
            r.replicates.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_num(x)
    } else {
        format!("\"{}\"", fmt_num(x))
    }
}

pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let rows: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "  {{\"check\": {}, \"params\": {}, \"estimate\": {}, \"se\": {}, \"bound\": {}, \"valid\": {}, \"verdict\": \"{}\", \"seed\": {}, \"replicates\": {}}}",
                Value::String(r.check.clone()),
                Value::String(r.param.clone()),
                json_num(r.estimate),
                json_num(r.se),
                json_num(r.bound),
                r.valid,
                r.verdict,
                r.seed,
                r.replicates
            )
        })
        .collect();
    if rows.is_empty() {
        "[]\n".into()
    } else {
        format!("[\n{}\n]\n", rows.join(",\n"))
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    s.parse().map_err(|_| Error::Report(format!("not a boolean: {s:?}")))
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Report(format!("not an integer: {s:?}")))
}

pub fn parse_csv(text: &str) -> Result<Vec<VerificationReport>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_error)?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Report(format!("unexpected CSV header {header:?}")));
    }
    rdr.records()
        .map(|rec| {
            let f = rec.map_err(csv_error)?;
            if f.len() != 9 {
                return Err(Error::Report(format!("expected 9 fields, got {}", f.len())));
            }
            Ok(VerificationReport {
                check: f[0].to_string(),
                param: f[1].to_string(),
                estimate: parse_num(&f[2])?,
                se: parse_num(&f[3])?,
                bound: parse_num(&f[4])?,
                valid: parse_bool(&f[5])?,
                verdict: Verdict::parse(&f[6])?,
                seed: parse_int(&f[7])?,
                replicates: parse_int(&f[8])?,
            })
        })
        .collect()
}

fn json_field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Report(format!("missing field {key:?}")))
}

fn json_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Report(format!("bad number {n}"))),
        Value::String(s) => parse_num(s),
        other => Err(Error::Report(format!("expected a number, got {other}"))),
    }
}

fn json_str(v: &Value) -> Result<String> {
    v.as_str()
        .map(String::from)
        .ok_or_else(|| Error::Report(format!("expected a string, got {v}")))
}

fn json_u64(v: &Value) -> Result<u64> {
    v.as_u64().ok_or_else(|| Error::Report(format!("expected an unsigned integer, got {v}")))
}

pub fn parse_json(text: &str) -> Result<Vec<VerificationReport>> {
    let value: Value = serde_json::from_str(text)?;
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Report("report JSON must be an array".into()))?;
    rows.iter()
        .map(|r| {
            Ok(VerificationReport {
                check: json_str(json_field(r, "check")?)?,
                param: json_str(json_field(r, "params")?)?,
                estimate: json_f64(json_field(r, "estimate")?)?,
                se: json_f64(json_field(r, "se")?)?,
                bound: json_f64(json_field(r, "bound")?)?,
                valid: json_field(r, "valid")?
                    .as_bool()
                    .ok_or_else(|| Error::Report("valid must be a boolean".into()))?,
                verdict: Verdict::parse(&json_str(json_field(r, "verdict")?)?)?,
                seed: json_u64(json_field(r, "seed")?)?,
                replicates: json_u64(json_field(r, "replicates")?)? as usize,
            })
        })
        .collect()
}
