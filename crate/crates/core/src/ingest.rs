//! Parsing of journal-level inputs and aggregation into field flow matrices.
//!
//! A citation from journal `a` (citing) to journal `b` (cited) with count `c`
//! adds `c` to `cells[s][t]` for every category `s` of `a` and every category
//! `t` of `b`. The journal-level grand total counts each citation once.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub const EDGES_HEADER: [&str; 4] = ["citing_journal", "cited_journal", "year", "count"];
pub const MAP_HEADER: [&str; 2] = ["journal", "category"];
pub const UNIVERSE_HEADER: [&str; 2] = ["category", "display_name"];
pub const PUBLICATIONS_HEADER: [&str; 3] = ["category", "year", "publications"];
pub const SKIPPED_HEADER: [&str; 5] =
    ["citing_journal", "cited_journal", "year", "count", "reason"];

/// One journal-to-journal citation count for a year.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CitationEdge {
    pub citing_journal: String,
    pub cited_journal: String,
    pub year: i32,
    pub count: u64,
}

impl CitationEdge {
    pub fn new(citing: &str, cited: &str, year: i32, count: u64) -> Self {
        CitationEdge {
            citing_journal: citing.to_string(),
            cited_journal: cited.to_string(),
            year,
            count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: String,
    pub display_name: String,
}

impl Category {
    pub fn new(id: &str) -> Self {
        Category {
            id: id.to_string(),
            display_name: id.to_string(),
        }
    }
}

/// Journal to category multi-assignment over an ordered category universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMap {
    categories: Vec<Category>,
    index: HashMap<String, usize>,
    assignments: BTreeMap<String, Vec<usize>>,
}

impl CategoryMap {
    /// Builds a map from an explicit universe and `(journal, category ids)`
    /// pairs. Unknown categories are appended to the universe.
    pub fn new<I, J, S>(universe: Vec<Category>, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (J, Vec<S>)>,
        J: Into<String>,
        S: AsRef<str>,
    {
        let mut map = CategoryMap::with_universe(universe)?;
        for (journal, cats) in assignments {
            let journal = journal.into();
            map.assignments.entry(journal.clone()).or_default();
            for c in cats {
                map.assign(&journal, c.as_ref());
            }
        }
        map.validate()?;
        Ok(map)
    }

    fn with_universe(universe: Vec<Category>) -> Result<Self> {
        let mut index = HashMap::with_capacity(universe.len());
        for (i, c) in universe.iter().enumerate() {
            if index.insert(c.id.clone(), i).is_some() {
                return Err(Error::Validation(format!(
                    "category `{}` declared twice",
                    c.id
                )));
            }
        }
        Ok(CategoryMap {
            categories: universe,
            index,
            assignments: BTreeMap::new(),
        })
    }

    fn assign(&mut self, journal: &str, category: &str) {
        let idx = match self.index.get(category) {
            Some(&i) => i,
            None => {
                self.categories.push(Category::new(category));
                let i = self.categories.len() - 1;
                self.index.insert(category.to_string(), i);
                i
            }
        };
        let set = self.assignments.entry(journal.to_string()).or_default();
        if !set.contains(&idx) {
            set.push(idx);
        }
    }

    fn validate(&self) -> Result<()> {
        if self.assignments.is_empty() {
            return Err(Error::Validation("no assignments".into()));
        }
        if let Some((j, _)) = self.assignments.iter().find(|(_, v)| v.is_empty()) {
            return Err(Error::Validation(format!(
                "journal `{j}` has no categories"
            )));
        }
        Ok(())
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category_ids(&self) -> Vec<String> {
        self.categories.iter().map(|c| c.id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn category_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Category indices of `journal`, in assignment order.
    pub fn journal_categories(&self, journal: &str) -> Option<&[usize]> {
        self.assignments.get(journal).map(Vec::as_slice)
    }

    pub fn journals(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.assignments
            .iter()
            .map(|(j, v)| (j.as_str(), v.as_slice()))
    }

    pub fn journal_count(&self) -> usize {
        self.assignments.len()
    }
}

/// Publication counts keyed by (category, year).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PublicationCounts {
    counts: BTreeMap<(String, i32), u64>,
}

impl PublicationCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, category: &str, year: i32, publications: u64) {
        self.counts
            .insert((category.to_string(), year), publications);
    }

    pub fn get(&self, category: &str, year: i32) -> Option<u64> {
        self.counts.get(&(category.to_string(), year)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i32, u64)> {
        self.counts.iter().map(|((c, y), p)| (c.as_str(), *y, *p))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Square citation flow matrix for one year. `cells[i][j]` holds citations
/// from field `i` (citing) to field `j` (cited): row sums are imports and
/// column sums are exports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFlowMatrix {
    year: i32,
    fields: Vec<String>,
    cells: Vec<u64>,
}

impl FieldFlowMatrix {
    pub fn zeros(year: i32, fields: Vec<String>) -> Self {
        let n = fields.len();
        FieldFlowMatrix {
            year,
            fields,
            cells: vec![0; n * n],
        }
    }

    /// Builds a matrix from nested rows; errors unless `rows` is square and
    /// matches `fields`.
    pub fn from_rows(year: i32, fields: Vec<String>, rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = fields.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!(
                "flow matrix must be {n}x{n} to match its field list"
            )));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = fields.iter().find(|f| !seen.insert(f.as_str())) {
            return Err(Error::Validation(format!("duplicate field `{dup}`")));
        }
        Ok(FieldFlowMatrix {
            year,
            fields,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn fields(&self) -> &[String] {
        &self.fields
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn index_of(&self, field: &str) -> Result<usize> {
        self.fields
            .iter()
            .position(|f| f == field)
            .ok_or_else(|| Error::unknown_field(field))
    }

    #[inline]
    pub fn get(&self, citing: usize, cited: usize) -> u64 {
        self.cells[citing * self.fields.len() + cited]
    }

    pub(crate) fn add(&mut self, citing: usize, cited: usize, count: u64) {
        let n = self.fields.len();
        self.cells[citing * n + cited] += count;
    }

    pub fn row(&self, citing: usize) -> &[u64] {
        let n = self.fields.len();
        &self.cells[citing * n..(citing + 1) * n]
    }

    /// Total of all cells.
    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    /// Row sum: citations given by `field`.
    pub fn imports(&self, field: usize) -> u64 {
        self.row(field).iter().sum()
    }

    /// Column sum: citations received by `field`.
    pub fn exports(&self, field: usize) -> u64 {
        (0..self.dim()).map(|i| self.get(i, field)).sum()
    }

    pub fn self_citations(&self, field: usize) -> u64 {
        self.get(field, field)
    }

    /// Every cell multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        FieldFlowMatrix {
            year: self.year,
            fields: self.fields.clone(),
            cells: self.cells.iter().map(|c| c * k).collect(),
        }
    }

    /// Non-zero cells in row-major order as `(citing, cited, count)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let n = self.dim();
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(k, &c)| (k / n, k % n, c))
    }
}

/// What to do with edges whose journal has no category assignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnmappedPolicy {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedEdge {
    pub edge: CitationEdge,
    pub reason: &'static str,
}

#[derive(Debug, Clone)]
pub struct FlowBuild {
    pub matrix: FieldFlowMatrix,
    /// Empty unless the policy is lenient.
    pub skipped: Vec<SkippedEdge>,
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader)
}

fn check_header<R: Read>(
    rdr: &mut csv::Reader<R>,
    expected: &[&str],
    source_name: &str,
) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(source_name, 1, e.to_string()))?;
    if header.is_empty() {
        return Err(Error::parse(source_name, 1, "missing header"));
    }
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        let line = header.position().map_or(1, |p| p.line());
        return Err(Error::parse(
            source_name,
            line,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

fn records<R: Read>(
    rdr: &mut csv::Reader<R>,
    width: usize,
    source_name: &str,
) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(source_name, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(Error::parse(
                source_name,
                line,
                format!("expected {width} columns, found {}", rec.len()),
            ));
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn token<'a>(
    rec: &'a csv::StringRecord,
    i: usize,
    what: &str,
    src: &str,
    line: u64,
) -> Result<&'a str> {
    let t = &rec[i];
    if t.is_empty() {
        return Err(Error::parse(src, line, format!("empty {what}")));
    }
    Ok(t)
}

fn parse_year(t: &str, src: &str, line: u64) -> Result<i32> {
    t.parse()
        .map_err(|_| Error::parse(src, line, format!("invalid year `{t}`")))
}

fn parse_count(t: &str, what: &str, src: &str, line: u64) -> Result<u64> {
    let v: i64 = t
        .parse()
        .map_err(|_| Error::parse(src, line, format!("invalid {what} `{t}`")))?;
    if v < 0 {
        return Err(Error::Validation(format!(
            "{src}: line {line}: negative {what} {v}"
        )));
    }
    Ok(v as u64)
}

/// Parses an edges CSV. Rows repeating a (citing, cited, year) triple are
/// summed; output keeps first-appearance order.
pub fn parse_edges<R: Read>(reader: R) -> Result<Vec<CitationEdge>> {
    const SRC: &str = "edges";
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &EDGES_HEADER, SRC)?;
    let mut out: Vec<CitationEdge> = Vec::new();
    let mut seen: HashMap<(String, String, i32), usize> = HashMap::new();
    for (line, rec) in records(&mut rdr, 4, SRC)? {
        let citing = token(&rec, 0, "citing_journal", SRC, line)?;
        let cited = token(&rec, 1, "cited_journal", SRC, line)?;
        let year = parse_year(&rec[2], SRC, line)?;
        let count = parse_count(&rec[3], "count", SRC, line)?;
        let key = (citing.to_string(), cited.to_string(), year);
        match seen.get(&key) {
            Some(&i) => out[i].count += count,
            None => {
                seen.insert(key, out.len());
                out.push(CitationEdge::new(citing, cited, year, count));
            }
        }
    }
    Ok(out)
}

/// Parses a `category,display_name` universe declaration.
pub fn parse_category_universe<R: Read>(reader: R) -> Result<Vec<Category>> {
    const SRC: &str = "categories";
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &UNIVERSE_HEADER, SRC)?;
    let mut out: Vec<Category> = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, rec) in records(&mut rdr, 2, SRC)? {
        let id = token(&rec, 0, "category", SRC, line)?;
        let name = if rec[1].is_empty() { id } else { &rec[1] };
        if !seen.insert(id.to_string()) {
            return Err(Error::parse(
                SRC,
                line,
                format!("category `{id}` declared twice"),
            ));
        }
        out.push(Category {
            id: id.to_string(),
            display_name: name.to_string(),
        });
    }
    Ok(out)
}

/// Parses a `journal,category` assignment CSV. The universe starts with the
/// `declared` categories (in order) followed by any further categories in
/// order of first appearance. Repeated rows are ignored.
pub fn parse_category_map<R: Read>(reader: R, declared: Vec<Category>) -> Result<CategoryMap> {
    const SRC: &str = "category map";
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &MAP_HEADER, SRC)?;
    let mut map = CategoryMap::with_universe(declared)?;
    for (line, rec) in records(&mut rdr, 2, SRC)? {
        let journal = token(&rec, 0, "journal", SRC, line)?;
        let category = &rec[1];
        if category.is_empty() {
            map.assignments.entry(journal.to_string()).or_default();
        } else {
            map.assign(journal, category);
        }
    }
    map.validate()?;
    Ok(map)
}

pub fn parse_publications<R: Read>(reader: R) -> Result<PublicationCounts> {
    const SRC: &str = "publications";
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &PUBLICATIONS_HEADER, SRC)?;
    let mut out = PublicationCounts::new();
    for (line, rec) in records(&mut rdr, 3, SRC)? {
        let category = token(&rec, 0, "category", SRC, line)?;
        let year = parse_year(&rec[1], SRC, line)?;
        let p = parse_count(&rec[2], "publications", SRC, line)?;
        out.insert(category, year, p);
    }
    Ok(out)
}

/// Distinct years present in `edges`, ascending.
pub fn edge_years(edges: &[CitationEdge]) -> Vec<i32> {
    edges
        .iter()
        .map(|e| e.year)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Journal-level citation total for `year`; each citation counted once
/// regardless of category assignment.
pub fn grand_total_citations(edges: &[CitationEdge], year: i32) -> u64 {
    edges
        .iter()
        .filter(|e| e.year == year)
        .map(|e| e.count)
        .sum()
}

fn unmapped_reason(citing: bool, cited: bool) -> &'static str {
    match (citing, cited) {
        (true, true) => "unmapped citing and cited journals",
        (true, false) => "unmapped citing journal",
        _ => "unmapped cited journal",
    }
}

fn screen_edges(
    edges: &[CitationEdge],
    map: &CategoryMap,
    year: i32,
    policy: UnmappedPolicy,
) -> Result<Vec<SkippedEdge>> {
    let mut skipped = Vec::new();
    for e in edges.iter().filter(|e| e.year == year) {
        let citing_missing = map.journal_categories(&e.citing_journal).is_none();
        let cited_missing = map.journal_categories(&e.cited_journal).is_none();
        if !(citing_missing || cited_missing) {
            continue;
        }
        match policy {
            UnmappedPolicy::Strict => {
                let j = if citing_missing {
                    &e.citing_journal
                } else {
                    &e.cited_journal
                };
                return Err(Error::Validation(format!(
                    "journal `{j}` has no category assignment (year {year})"
                )));
            }
            UnmappedPolicy::Lenient => skipped.push(SkippedEdge {
                edge: e.clone(),
                reason: unmapped_reason(citing_missing, cited_missing),
            }),
        }
    }
    Ok(skipped)
}

fn accumulate(
    mut m: FieldFlowMatrix,
    e: &CitationEdge,
    map: &CategoryMap,
    year: i32,
) -> FieldFlowMatrix {
    if e.year != year || e.count == 0 {
        return m;
    }
    if let (Some(src), Some(dst)) = (
        map.journal_categories(&e.citing_journal),
        map.journal_categories(&e.cited_journal),
    ) {
        for &s in src {
            for &t in dst {
                m.add(s, t, e.count);
            }
        }
    }
    m
}

fn merge(mut a: FieldFlowMatrix, b: FieldFlowMatrix) -> FieldFlowMatrix {
    for (x, y) in a.cells.iter_mut().zip(b.cells) {
        *x += y;
    }
    a
}

/// Aggregates `edges` of `year` into a field flow matrix over the map's
/// category universe. Edges of other years are ignored.
pub fn build_flow_matrix(
    edges: &[CitationEdge],
    map: &CategoryMap,
    year: i32,
    policy: UnmappedPolicy,
) -> Result<FlowBuild> {
    let skipped = screen_edges(edges, map, year, policy)?;
    let fields = map.category_ids();
    let matrix = par::fold_chunks(
        edges,
        || FieldFlowMatrix::zeros(year, fields.clone()),
        |m, e| accumulate(m, e, map, year),
        merge,
    );
    Ok(FlowBuild { matrix, skipped })
}

/// Single-threaded [`build_flow_matrix`].
pub fn build_flow_matrix_sequential(
    edges: &[CitationEdge],
    map: &CategoryMap,
    year: i32,
    policy: UnmappedPolicy,
) -> Result<FlowBuild> {
    let skipped = screen_edges(edges, map, year, policy)?;
    let zero = FieldFlowMatrix::zeros(year, map.category_ids());
    let matrix = edges.iter().fold(zero, |m, e| accumulate(m, e, map, year));
    Ok(FlowBuild { matrix, skipped })
}
