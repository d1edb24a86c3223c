//! Matrix files and report serialization.
//!
//! Two matrix formats are supported:
//!
//! * CSV: comma separated, optional single header row (detected when any
//!   cell of the first row is not a number), finite decimals only.
//! * GDM1: the 4-byte magic `GDM1`, `rows` and `cols` as little-endian
//!   `u64`, then `rows * cols` little-endian IEEE-754 binary64 values in
//!   row-major order. Nothing may follow the payload.
//!
//! Floats in reports are printed with 17 significant digits in `%.17g`
//! style, which round-trips every `f64`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::exact::IdEstimate;
use crate::matrix::DatasetMatrix;
use crate::scores::{FeatureScore, Nid, NidCurve};
use crate::sweep::SweepResult;

pub const MAGIC: [u8; 4] = *b"GDM1";
const HEADER_LEN: usize = 20;

/// On-disk matrix encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

/// Report encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent notation outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed).to_string()
    } else {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format_g17(x).parse::<Number>().expect("valid JSON number"))
    } else {
        Value::Null
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn nid_value(n: Nid) -> Value {
    opt_num(n.finite())
}

fn nid_cell(n: Nid) -> String {
    match n {
        Nid::Finite(v) => format_g17(v),
        Nid::Infinite => "inf".into(),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Parses CSV text. `origin` only labels error messages.
pub fn parse_csv(text: &str, origin: &Path) -> Result<DatasetMatrix> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut names: Option<Vec<String>> = None;
    let mut cols: Option<usize> = None;
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match cols {
            Some(c) if c != record.len() => {
                return Err(Error::RaggedRow {
                    row: line,
                    expected: c,
                    found: record.len(),
                })
            }
            _ => cols = Some(record.len()),
        }
        if i == 0 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            names = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                parse_err(line, format!("column {}: {cell:?} is not a number", j + 1))
            })?;
            if !v.is_finite() {
                return Err(parse_err(
                    line,
                    format!("column {}: non-finite value {cell:?}", j + 1),
                ));
            }
            values.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or(Error::EmptyData)?;
    if rows == 0 {
        return Err(Error::EmptyData);
    }
    let m = DatasetMatrix::new(rows, cols, values)?;
    match names {
        Some(n) => m.with_names(n),
        None => Ok(m),
    }
}

pub fn read_csv(path: &Path) -> Result<DatasetMatrix> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text, path)
}

/// CSV text, with a header row when the matrix carries names.
pub fn to_csv(data: &DatasetMatrix) -> String {
    let mut out = String::new();
    if let Some(names) = data.names() {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for i in 0..data.rows() {
        let row: Vec<String> = data.row(i).iter().map(|&v| format_g17(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(data: &DatasetMatrix, path: &Path) -> Result<()> {
    write_atomic(path, to_csv(data).as_bytes())
}

/// GDM1 encoding.
pub fn encode_binary(data: &DatasetMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + data.values().len() * 8);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(data.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(data.cols() as u64).to_le_bytes());
    for v in data.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<DatasetMatrix> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(Error::BadMagic(bytes[..4].try_into().expect("4 bytes")));
        }
        return Err(Error::Truncated {
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let rows = u64::from_le_bytes(bytes[4..12].try_into().expect("8 bytes"));
    let cols = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
    if rows == 0 {
        return Err(Error::EmptyData);
    }
    if cols == 0 {
        return Err(Error::NoColumns);
    }
    let payload = &bytes[HEADER_LEN..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| Error::InvalidArgument(format!("{rows}x{cols} overflows")))?;
    if payload.len() as u64 != expected {
        return Err(Error::Truncated {
            expected,
            actual: payload.len() as u64,
        });
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DatasetMatrix::new(rows as usize, cols as usize, values)
}

pub fn read_binary(path: &Path) -> Result<DatasetMatrix> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_binary(&bytes)
}

pub fn write_binary(data: &DatasetMatrix, path: &Path) -> Result<()> {
    write_atomic(path, &encode_binary(data))
}

pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<DatasetMatrix> {
    match format {
        MatrixFormat::Csv => read_csv(path),
        MatrixFormat::Binary => read_binary(path),
    }
}

pub fn write_matrix(data: &DatasetMatrix, path: &Path, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Csv => write_csv(data, path),
        MatrixFormat::Binary => write_binary(data, path),
    }
}

/// Something that can be written as a report.
#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Estimate(&'a IdEstimate),
    Scores(&'a [FeatureScore]),
    Curve(&'a NidCurve),
    Sweep(&'a SweepResult),
}

fn estimate_json(e: &IdEstimate) -> Value {
    json!({
        "method": e.method.as_str(),
        "delta_lower": num(e.delta_lower),
        "delta_upper": num(e.delta_upper),
        "id_lower": opt_num(e.id_lower()),
        "id_upper": opt_num(e.id_upper()),
        "id_mid": opt_num(e.id_mid()),
        "infinite": e.is_infinite(),
    })
}

fn score_json(s: &FeatureScore) -> Value {
    let mut m = Map::new();
    m.insert("feature_index".into(), json!(s.feature));
    m.insert("delta_star".into(), num(s.delta_star));
    m.insert("delta_norm".into(), num(s.delta_norm));
    m.insert("nid".into(), nid_value(s.nid));
    m.insert("infinite".into(), json!(s.nid.is_infinite()));
    m.insert("approximated".into(), json!(s.approximated()));
    if let Some(b) = &s.bounds {
        m.insert("nid_lower".into(), nid_value(b.nid_lower));
        m.insert("nid_upper".into(), nid_value(b.nid_upper));
    }
    Value::Object(m)
}

fn curve_json(c: &NidCurve) -> Value {
    let points: Vec<Value> = c
        .points
        .iter()
        .map(|p| {
            json!({
                "rank": p.rank,
                "rel_rank": num(p.rel_rank),
                "feature_index": p.feature,
                "nid": nid_value(p.nid),
                "rel_nid": num(p.rel_nid),
            })
        })
        .collect();
    json!({ "infinite_clamped": c.infinite_clamped, "points": points })
}

fn sweep_json(r: &SweepResult) -> Value {
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "policy": row.policy.as_str(),
                "alpha": num(row.alpha),
                "seed": row.seed,
                "kept": row.kept,
                "remaining_share": num(row.remaining_share),
                "accuracy": opt_num(row.accuracy),
            })
        })
        .collect();
    Value::Array(rows)
}

fn estimate_csv(e: &IdEstimate) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "inf".to_string(), format_g17);
    format!(
        "method,delta_lower,delta_upper,id_lower,id_upper,id_mid,infinite\n{},{},{},{},{},{},{}\n",
        e.method.as_str(),
        format_g17(e.delta_lower),
        format_g17(e.delta_upper),
        opt(e.id_lower()),
        opt(e.id_upper()),
        opt(e.id_mid()),
        e.is_infinite()
    )
}

fn scores_csv(scores: &[FeatureScore]) -> String {
    let mut out =
        String::from("feature_index,delta_star,delta_norm,nid,nid_lower,nid_upper,approximated\n");
    for s in scores {
        let (lo, hi) = match &s.bounds {
            Some(b) => (nid_cell(b.nid_lower), nid_cell(b.nid_upper)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.feature,
            format_g17(s.delta_star),
            format_g17(s.delta_norm),
            nid_cell(s.nid),
            lo,
            hi,
            s.approximated()
        ));
    }
    out
}

/// The ranked curve as `rank,rel_rank,feature_index,nid,rel_nid`.
pub fn curve_csv(c: &NidCurve) -> String {
    let mut out = String::from("rank,rel_rank,feature_index,nid,rel_nid\n");
    for p in &c.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.rank,
            format_g17(p.rel_rank),
            p.feature,
            nid_cell(p.nid),
            format_g17(p.rel_nid)
        ));
    }
    out
}

/// The sweep table as `policy,alpha,seed,kept,remaining_share,accuracy`.
pub fn sweep_csv(r: &SweepResult) -> String {
    let mut out = String::from("policy,alpha,seed,kept,remaining_share,accuracy\n");
    for row in &r.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.policy,
            format_g17(row.alpha),
            row.seed,
            row.kept,
            format_g17(row.remaining_share),
            row.accuracy.map(format_g17).unwrap_or_default()
        ));
    }
    out
}

/// Renders a report to text.
pub fn render_report(report: Report<'_>, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => {
            let v = match report {
                Report::Estimate(e) => estimate_json(e),
                Report::Scores(s) => Value::Array(s.iter().map(score_json).collect()),
                Report::Curve(c) => curve_json(c),
                Report::Sweep(r) => sweep_json(r),
            };
            let mut s = serde_json::to_string_pretty(&v)?;
            s.push('\n');
            s
        }
        ReportFormat::Csv => match report {
            Report::Estimate(e) => estimate_csv(e),
            Report::Scores(s) => scores_csv(s),
            Report::Curve(c) => curve_csv(c),
            Report::Sweep(r) => sweep_csv(r),
        },
    })
}

pub fn write_report(report: Report<'_>, path: &Path, format: ReportFormat) -> Result<()> {
    write_atomic(path, render_report(report, format)?.as_bytes())
}
