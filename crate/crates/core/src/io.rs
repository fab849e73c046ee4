//! Device files and result tables.
//!
//! A device file is INI with one `key = value unit` line per constant, either
//! at top level or under `[device]`:
//!
//! ```text
//! [device]
//! x_J = 0.395 cm
//! 2l = 1.05 cm
//! C_g1 = 9 fF
//! E_J_max = 34.186 GHz
//! flux_convention = half_period
//! ```

use std::path::Path;

use ini::Ini;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::params::{DeviceParams, FluxConvention};
use crate::sweeps::SweepResult;
use crate::units::{
    parse_quantity, CAPACITANCE_PER_LENGTH_UNITS, CAPACITANCE_UNITS, ENERGY_UNITS, INDUCTANCE_PER_LENGTH_UNITS, LENGTH_UNITS,
};

/// Parsed device plus the digest of the file it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceFile {
    pub params: DeviceParams,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_device(path: &Path) -> Result<DeviceFile> {
    let bytes = std::fs::read(path).map_err(|e| Error::Config(format!("cannot read device file {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
    let params = parse_device(&text)?;
    Ok(DeviceFile { params, sha256: sha256_hex(&bytes) })
}

enum Kind {
    Length,
    Capacitance,
    CapacitancePerLength,
    InductancePerLength,
    Energy,
    Convention,
}

const KEYS: &[(&str, Kind)] = &[
    ("x_J", Kind::Length),
    ("2l", Kind::Length),
    ("C_g1", Kind::Capacitance),
    ("C_g2", Kind::Capacitance),
    ("C_Q1", Kind::Capacitance),
    ("C_Q2", Kind::Capacitance),
    ("C_J", Kind::Capacitance),
    ("C_0", Kind::CapacitancePerLength),
    ("L_0", Kind::InductancePerLength),
    ("E_J_max", Kind::Energy),
    ("E_C_Q1", Kind::Energy),
    ("E_C_Q2", Kind::Energy),
    ("E_J1", Kind::Energy),
    ("E_J2", Kind::Energy),
    ("flux_convention", Kind::Convention),
];

const OPTIONAL: &[&str] = &["E_J1", "E_J2", "flux_convention"];

/// Parse and validate device INI text.
pub fn parse_device(text: &str) -> Result<DeviceParams> {
    let ini = Ini::load_from_str(text).map_err(|e| Error::Config(format!("device file: {e}")))?;
    let mut values: Vec<(&str, f64)> = Vec::new();
    let mut convention = FluxConvention::default();
    let mut seen: Vec<&str> = Vec::new();
    for (section, props) in ini.iter() {
        match section {
            None | Some("device") => {}
            Some(other) => return Err(Error::Config(format!("unknown section [{other}]"))),
        }
        for (key, raw) in props.iter() {
            let (name, kind) = KEYS
                .iter()
                .find(|(k, _)| *k == key)
                .ok_or_else(|| Error::Config(format!("unknown key `{key}`")))?;
            if seen.contains(name) {
                return Err(Error::Config(format!("duplicate key `{key}`")));
            }
            seen.push(name);
            let units = match kind {
                Kind::Length => LENGTH_UNITS,
                Kind::Capacitance => CAPACITANCE_UNITS,
                Kind::CapacitancePerLength => CAPACITANCE_PER_LENGTH_UNITS,
                Kind::InductancePerLength => INDUCTANCE_PER_LENGTH_UNITS,
                Kind::Energy => ENERGY_UNITS,
                Kind::Convention => {
                    convention = raw.trim().parse()?;
                    continue;
                }
            };
            let v = parse_quantity(raw, units).map_err(|e| Error::Config(format!("`{key}`: {e}")))?;
            values.push((name, v));
        }
    }
    let get = |name: &str| values.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
    let missing: Vec<&str> = KEYS
        .iter()
        .map(|(k, _)| *k)
        .filter(|k| !OPTIONAL.contains(k) && get(k).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!("missing keys: {}", missing.join(", "))));
    }
    let req = |name: &str| get(name).unwrap();
    let params = DeviceParams {
        x_j: req("x_J"),
        l: req("2l") / 2.0,
        c_g1: req("C_g1"),
        c_g2: req("C_g2"),
        c_q1: req("C_Q1"),
        c_q2: req("C_Q2"),
        c_j: req("C_J"),
        c_0: req("C_0"),
        l_0: req("L_0"),
        e_j_max: req("E_J_max"),
        e_c_q1: req("E_C_Q1"),
        e_c_q2: req("E_C_Q2"),
        e_j1: get("E_J1"),
        e_j2: get("E_J2"),
        flux_convention: convention,
    };
    params.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(params)
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

/// 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

pub fn to_csv(result: &SweepResult) -> Result<String> {
    let mut out = Vec::new();
    for (k, v) in &result.metadata {
        out.extend_from_slice(format!("# {k}: {v}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = result.columns.clone();
        header.push("error".into());
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for (row, err) in result.rows.iter().zip(&result.errors) {
            let mut rec: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
            rec.push(err.clone());
            w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
    }
    String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
}

fn json_number(x: f64) -> Value {
    // Round through the CSV text so both encodings carry the same values.
    let rounded: f64 = format_number(x).parse().unwrap_or(f64::NAN);
    Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

pub fn to_json(result: &SweepResult) -> Result<String> {
    let mut meta = Map::new();
    for (k, v) in &result.metadata {
        meta.insert(k.clone(), Value::String(v.clone()));
    }
    let mut columns: Vec<Value> = result.columns.iter().map(|c| Value::String(c.clone())).collect();
    columns.push(Value::String("error".into()));
    let rows: Vec<Value> = result
        .rows
        .iter()
        .zip(&result.errors)
        .map(|(row, err)| {
            let mut r: Vec<Value> = row.iter().map(|&x| json_number(x)).collect();
            r.push(Value::String(err.clone()));
            Value::Array(r)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("metadata".into(), Value::Object(meta));
    doc.insert("columns".into(), Value::Array(columns));
    doc.insert("rows".into(), Value::Array(rows));
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render(result: &SweepResult, format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(result),
        Format::Json => to_json(result),
    }
}

/// Render fully in memory, then write.
pub fn write_result(result: &SweepResult, format: Format, path: &Path) -> Result<()> {
    let text = render(result, format)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Columns, numeric rows and per-row error codes.
pub type Table = (Vec<String>, Vec<Vec<f64>>, Vec<String>);

/// Read either encoding back into a [`Table`].
pub fn read_table(text: &str, format: Format) -> Result<Table> {
    match format {
        Format::Csv => {
            let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
            let mut r = csv::Reader::from_reader(body.as_bytes());
            let mut columns: Vec<String> = r.headers().map_err(|e| Error::Io(e.to_string()))?.iter().map(String::from).collect();
            columns.pop();
            let mut rows = Vec::new();
            let mut errors = Vec::new();
            for rec in r.records() {
                let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
                let n = rec.len();
                let vals = rec.iter().take(n - 1).map(|s| s.parse::<f64>().map_err(|e| Error::Io(format!("`{s}`: {e}")))).collect::<Result<Vec<_>>>()?;
                rows.push(vals);
                errors.push(rec[n - 1].to_string());
            }
            Ok((columns, rows, errors))
        }
        Format::Json => {
            let v: Value = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
            let mut columns: Vec<String> = v["columns"].as_array().into_iter().flatten().filter_map(|c| c.as_str().map(String::from)).collect();
            columns.pop();
            let mut rows = Vec::new();
            let mut errors = Vec::new();
            for row in v["rows"].as_array().into_iter().flatten() {
                let cells = row.as_array().ok_or_else(|| Error::Io("row is not an array".into()))?;
                let (last, nums) = cells.split_last().ok_or_else(|| Error::Io("empty row".into()))?;
                rows.push(nums.iter().map(|c| c.as_f64().unwrap_or(f64::NAN)).collect());
                errors.push(last.as_str().unwrap_or_default().to_string());
            }
            Ok((columns, rows, errors))
        }
    }
}

/// Text of the sample device file.
pub fn table1_ini() -> &'static str {
    include_str!("../../../devices/table1.ini")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepResult {
        SweepResult {
            columns: vec!["flux".into(), "nu_1_ghz".into()],
            rows: vec![vec![0.0, 4.942286584959417], vec![0.25, f64::NAN], vec![0.5, -1.0e-21]],
            errors: vec![String::new(), "pole_proximity".into(), String::new()],
            metadata: vec![("sweep".into(), "spectrum".into())],
        }
    }

    #[test]
    fn table1_file_round_trips() {
        let p = parse_device(table1_ini()).unwrap();
        let t = DeviceParams::table1();
        for (a, b) in [(p.x_j, t.x_j), (p.l, t.l), (p.c_g1, t.c_g1), (p.c_0, t.c_0), (p.l_0, t.l_0), (p.e_j_max, t.e_j_max), (p.c_j, t.c_j)] {
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
        }
        assert_eq!(p.flux_convention, FluxConvention::HalfPeriod);
    }

    #[test]
    fn unknown_keys_and_units_are_rejected() {
        let base = table1_ini();
        assert!(matches!(parse_device(&format!("{base}\nbogus = 1 m\n")), Err(Error::Config(_))));
        assert!(matches!(parse_device(&base.replace("9 fF", "9 cm")), Err(Error::Config(_))));
        assert!(matches!(parse_device(&base.replace("9 fF", "9")), Err(Error::Config(_))));
        assert!(matches!(parse_device(&base.replace("half_period", "quarter")), Err(Error::Config(_))));
        let no_cj: String = base.lines().filter(|l| !l.starts_with("C_J")).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_device(&no_cj), Err(Error::Config(m)) if m.contains("C_J")));
        assert!(matches!(parse_device(&base.replace("x_J = 0.395 cm", "x_J = 0.8 cm")), Err(Error::Config(_))));
        assert!(matches!(parse_device(&format!("{base}\n[other]\nx = 1\n")), Err(Error::Config(_))));
        assert!(matches!(parse_device(&format!("{base}C_J = 20 fF\n")), Err(Error::Config(m)) if m.contains("duplicate")));
    }

    #[test]
    fn comments_are_ignored() {
        let text = format!("# leading comment\n; another\n{}", table1_ini());
        assert!(parse_device(&text).is_ok());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn csv_and_json_carry_the_same_numbers() {
        let r = sample();
        let (c1, r1, e1) = read_table(&to_csv(&r).unwrap(), Format::Csv).unwrap();
        let (c2, r2, e2) = read_table(&to_json(&r).unwrap(), Format::Json).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(e1, e2);
        for (a, b) in r1.iter().flatten().zip(r2.iter().flatten()) {
            assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
        }
        assert!((r1[0][1] - 4.94228658496).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let text = to_csv(&sample()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# sweep: spectrum");
        assert_eq!(lines[1], "flux,nu_1_ghz,error");
        assert_eq!(lines[2], "0.00000000000e0,4.94228658496e0,");
        assert_eq!(lines[3], "2.50000000000e-1,NaN,pole_proximity");
    }
}
