//! CSV/JSON report writers, the run manifest, and number formatting.
//!
//! Floating-point values are rendered with six significant digits in both
//! CSV and JSON; absent values are empty CSV cells and JSON `null`.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::SkippedEdge;
use crate::metrics::{DynamicsRecord, FieldIndicators};
use crate::stats::{Correlation, DistributionSummary, PlotData};
use crate::taxonomy::{band_counts, Classification};

pub const INDICATOR_COLUMNS: [&str; 12] = [
    "field",
    "year",
    "exports",
    "imports",
    "self_citations",
    "ratio",
    "self_dependence",
    "net_balance",
    "positive_surplus",
    "hub_size",
    "export_partner_count",
    "publications",
];

pub const DYNAMICS_COLUMNS: [&str; 9] = [
    "field",
    "year_from",
    "year_to",
    "exports_from",
    "exports_to",
    "export_growth",
    "publication_growth",
    "overall_increment",
    "above_overall",
];

pub const CLASSIFICATION_COLUMNS: [&str; 6] =
    ["field", "dependence", "role", "impact", "dynamics", "types"];

pub const SUMMARY_COLUMNS: [&str; 10] = [
    "column",
    "n",
    "mean",
    "sd",
    "skewness",
    "kurtosis",
    "se_skewness",
    "se_kurtosis",
    "ks_statistic",
    "ks_p_value",
];

/// `%g`-style rendering with six significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

fn json_num(x: Option<f64>) -> Value {
    match x {
        Some(v) if v.is_finite() => {
            let rounded: f64 = fmt_sig(v).parse().expect("formatted float");
            json!(rounded)
        }
        _ => Value::Null,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Provenance embedded in every JSON report and archive sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub years: Vec<i32>,
    pub counting_mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<Value>,
}

impl RunManifest {
    pub fn new(years: Vec<i32>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            years,
            counting_mode: "multiple".into(),
            policy: None,
            config: None,
        }
    }

    pub fn add_input(&mut self, role: &str, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            role: role.into(),
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(f);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_indicators_csv<W: Write>(w: W, rows: &[FieldIndicators]) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(INDICATOR_COLUMNS)?;
    for r in rows {
        wr.write_record([
            r.field.clone(),
            r.year.to_string(),
            r.exports.to_string(),
            r.imports.to_string(),
            r.self_citations.to_string(),
            fmt_opt(r.export_import_ratio),
            fmt_opt(r.self_dependence),
            r.net_balance.to_string(),
            r.positive_surplus.to_string(),
            r.hub_size.to_string(),
            r.export_partner_count.to_string(),
            r.publications.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<indicators>", e))?;
    Ok(())
}

pub fn indicators_json(rows: &[FieldIndicators]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "field": r.field,
                    "year": r.year,
                    "exports": r.exports,
                    "imports": r.imports,
                    "self_citations": r.self_citations,
                    "ratio": json_num(r.export_import_ratio),
                    "self_dependence": json_num(r.self_dependence),
                    "net_balance": r.net_balance,
                    "positive_surplus": r.positive_surplus,
                    "hub_size": r.hub_size,
                    "export_partner_count": r.export_partner_count,
                    "publications": r.publications,
                })
            })
            .collect(),
    )
}

pub fn write_dynamics_csv<W: Write>(w: W, rows: &[DynamicsRecord]) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(DYNAMICS_COLUMNS)?;
    for r in rows {
        wr.write_record([
            r.field.clone(),
            r.year_from.to_string(),
            r.year_to.to_string(),
            r.exports_from.to_string(),
            r.exports_to.to_string(),
            fmt_opt(r.export_growth),
            fmt_opt(r.publication_growth),
            fmt_sig(r.overall_increment),
            r.above_overall.to_string(),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<dynamics>", e))?;
    Ok(())
}

/// Reads a dynamics CSV written by [`write_dynamics_csv`].
pub fn read_dynamics_csv<R: Read>(r: R, source_name: &str) -> Result<Vec<DynamicsRecord>> {
    let table = Table::read(r, source_name)?;
    let col = |name: &str| -> Result<usize> {
        table
            .column(name)
            .ok_or_else(|| Error::parse(source_name, 1, format!("missing column `{name}`")))
    };
    let idx: Vec<usize> = DYNAMICS_COLUMNS
        .iter()
        .map(|c| col(c))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (k, row) in table.rows.iter().enumerate() {
        let line = k as u64 + 2;
        let get = |i: usize| row[idx[i]].as_str();
        let int = |i: usize| -> Result<i64> {
            get(i).parse().map_err(|_| {
                Error::parse(
                    source_name,
                    line,
                    format!("invalid {} `{}`", DYNAMICS_COLUMNS[i], get(i)),
                )
            })
        };
        let float = |i: usize| -> Result<Option<f64>> {
            let s = get(i);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| {
                Error::parse(
                    source_name,
                    line,
                    format!("invalid {} `{s}`", DYNAMICS_COLUMNS[i]),
                )
            })
        };
        let export_growth = float(5)?;
        out.push(DynamicsRecord {
            field: get(0).to_string(),
            year_from: int(1)? as i32,
            year_to: int(2)? as i32,
            exports_from: int(3)? as u64,
            exports_to: int(4)? as u64,
            export_growth,
            publication_growth: float(6)?,
            overall_increment: float(7)?
                .ok_or_else(|| Error::parse(source_name, line, "missing overall_increment"))?,
            above_overall: get(8) == "true",
            note: export_growth
                .is_none()
                .then(|| "zero exports in base year".to_string()),
        });
    }
    Ok(out)
}

pub fn write_classification_csv<W: Write>(w: W, c: &Classification) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(CLASSIFICATION_COLUMNS)?;
    for f in &c.fields {
        let types: Vec<String> = f.types.iter().map(|t| t.to_string()).collect();
        wr.write_record([
            f.field.clone(),
            f.dependence.to_string(),
            f.role.to_string(),
            f.impact.to_string(),
            f.dynamics.to_string(),
            types.join(";"),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<classification>", e))?;
    Ok(())
}

pub fn classification_json(c: &Classification, manifest: &RunManifest) -> Value {
    json!({
        "manifest": manifest,
        "config": c.config,
        "resolved_splits": {
            "dependence": json_num(Some(c.resolved.dependence)),
            "impact": json_num(Some(c.resolved.impact)),
        },
        "band_counts": band_counts(&c.fields),
        "fields": c.fields,
    })
}

pub fn write_skipped_csv<W: Write>(w: W, skipped: &[SkippedEdge]) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(crate::ingest::SKIPPED_HEADER)?;
    for s in skipped {
        wr.write_record([
            s.edge.citing_journal.clone(),
            s.edge.cited_journal.clone(),
            s.edge.year.to_string(),
            s.edge.count.to_string(),
            s.reason.to_string(),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<skipped>", e))?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(w: W, rows: &[(String, DistributionSummary)]) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(SUMMARY_COLUMNS)?;
    for (column, s) in rows {
        wr.write_record([
            column.clone(),
            s.n.to_string(),
            fmt_sig(s.mean),
            fmt_sig(s.sd),
            fmt_opt(s.skewness),
            fmt_opt(s.kurtosis),
            fmt_sig(s.se_skewness),
            fmt_sig(s.se_kurtosis),
            fmt_opt(s.ks_statistic),
            fmt_opt(s.ks_p_value),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<summary>", e))?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(w: W, p: &PlotData) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(["bin_low", "bin_high", "count"])?;
    for b in &p.histogram {
        wr.write_record([fmt_sig(b.bin_low), fmt_sig(b.bin_high), b.count.to_string()])?;
    }
    wr.flush().map_err(|e| Error::io("<histogram>", e))?;
    Ok(())
}

pub fn write_qq_csv<W: Write>(w: W, p: &PlotData) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(["theoretical_quantile", "sample_quantile"])?;
    for q in &p.qq {
        wr.write_record([fmt_sig(q.theoretical_quantile), fmt_sig(q.sample_quantile)])?;
    }
    wr.flush().map_err(|e| Error::io("<qq>", e))?;
    Ok(())
}

pub fn write_spearman_csv<W: Write>(
    w: W,
    rows: &[(String, String, usize, Option<Correlation>)],
) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(["x", "y", "n", "rho", "rho_squared"])?;
    for (x, y, n, c) in rows {
        wr.write_record([
            x.clone(),
            y.clone(),
            n.to_string(),
            fmt_opt(c.map(|c| c.rho)),
            fmt_opt(c.map(|c| c.rho_squared)),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<spearman>", e))?;
    Ok(())
}

/// A CSV held as strings, for column-generic commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read<R: Read>(r: R, source_name: &str) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(r);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::parse(source_name, 1, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(Error::parse(source_name, 1, "missing header"));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(source_name, line, e.to_string())
            })?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Table { headers, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv_writer(w);
        wr.write_record(&self.headers)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush().map_err(|e| Error::io("<table>", e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(20.0 / 13.0), "1.53846");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(1_100_441.0), "1.10044e6");
        assert_eq!(fmt_sig(123_456.0), "123456");
        assert_eq!(fmt_sig(-0.000123456789), "-0.000123457");
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(999_999.9), "1e6");
        assert_eq!(fmt_sig(0.0), "0");
    }

    #[test]
    fn dynamics_csv_round_trip() {
        let recs = vec![DynamicsRecord {
            field: "MEDICINE, GENERAL & INTERNAL".into(),
            year_from: 2007,
            year_to: 2009,
            exports_from: 4,
            exports_to: 5,
            export_growth: Some(0.25),
            publication_growth: None,
            overall_increment: 0.207,
            above_overall: true,
            note: None,
        }];
        let mut buf = Vec::new();
        write_dynamics_csv(&mut buf, &recs).unwrap();
        let back = read_dynamics_csv(buf.as_slice(), "d").unwrap();
        assert_eq!(back, recs);
    }
}
