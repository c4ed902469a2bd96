//! Matrix archive: a `citing_field,cited_field,count` CSV of non-zero cells
//! plus a JSON sidecar carrying the field universe, year, totals and the run
//! manifest.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Category, FieldFlowMatrix};
use crate::report::RunManifest;

pub const CELLS_HEADER: [&str; 3] = ["citing_field", "cited_field", "count"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Sidecar {
    year: i32,
    cells_file: String,
    fields: Vec<Category>,
    cell_sum: u64,
    grand_total_citations: u64,
    skipped_edges: usize,
    manifest: RunManifest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixArchive {
    pub matrix: FieldFlowMatrix,
    pub categories: Vec<Category>,
    /// Journal-level total for the year (no multiple counting).
    pub grand_total_citations: u64,
    pub skipped_edges: usize,
    pub manifest: RunManifest,
}

impl MatrixArchive {
    /// Writes `<stem>.csv` and `<stem>.json` into `dir`, returning the
    /// sidecar path.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let cells_name = format!("{stem}.csv");
        let cells_path = dir.join(&cells_name);
        let f = File::create(&cells_path).map_err(|e| Error::io(&cells_path, e))?;
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(f));
        wr.write_record(CELLS_HEADER)?;
        let fields = self.matrix.fields();
        for (i, j, c) in self.matrix.nonzero() {
            wr.write_record([fields[i].as_str(), fields[j].as_str(), &c.to_string()])?;
        }
        wr.flush().map_err(|e| Error::io(&cells_path, e))?;

        let sidecar = Sidecar {
            year: self.matrix.year(),
            cells_file: cells_name,
            fields: self.categories.clone(),
            cell_sum: self.matrix.total(),
            grand_total_citations: self.grand_total_citations,
            skipped_edges: self.skipped_edges,
            manifest: self.manifest.clone(),
        };
        let json_path = dir.join(format!("{stem}.json"));
        let mut f = File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
        serde_json::to_writer_pretty(&mut f, &sidecar)?;
        f.write_all(b"\n").map_err(|e| Error::io(&json_path, e))?;
        Ok(json_path)
    }

    /// Loads an archive from its JSON sidecar.
    pub fn read(sidecar_path: &Path) -> Result<Self> {
        let f = File::open(sidecar_path).map_err(|e| Error::io(sidecar_path, e))?;
        let sidecar: Sidecar = serde_json::from_reader(BufReader::new(f))?;
        let cells_path = sidecar_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(&sidecar.cells_file);
        let src = cells_path.display().to_string();
        let ids: Vec<String> = sidecar.fields.iter().map(|c| c.id.clone()).collect();
        let n = ids.len();
        let mut rows = vec![vec![0u64; n]; n];
        let index = |name: &str, line: u64| -> Result<usize> {
            ids.iter().position(|f| f == name).ok_or_else(|| {
                Error::parse(
                    &src,
                    line,
                    format!("field `{name}` not in the archive universe"),
                )
            })
        };
        let f = File::open(&cells_path).map_err(|e| Error::io(&cells_path, e))?;
        let mut rdr = csv::ReaderBuilder::new().from_reader(BufReader::new(f));
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != CELLS_HEADER {
            return Err(Error::parse(
                &src,
                1,
                format!("expected header `{}`", CELLS_HEADER.join(",")),
            ));
        }
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 3 {
                return Err(Error::parse(&src, line, "expected 3 columns"));
            }
            let i = index(&rec[0], line)?;
            let j = index(&rec[1], line)?;
            let c: u64 = rec[2]
                .parse()
                .map_err(|_| Error::parse(&src, line, format!("invalid count `{}`", &rec[2])))?;
            rows[i][j] += c;
        }
        let matrix = FieldFlowMatrix::from_rows(sidecar.year, ids, rows)?;
        if matrix.total() != sidecar.cell_sum {
            return Err(Error::Validation(format!(
                "{src}: cell sum {} does not match sidecar total {}",
                matrix.total(),
                sidecar.cell_sum
            )));
        }
        Ok(MatrixArchive {
            matrix,
            categories: sidecar.fields,
            grand_total_citations: sidecar.grand_total_citations,
            skipped_edges: sidecar.skipped_edges,
            manifest: sidecar.manifest,
        })
    }
}
