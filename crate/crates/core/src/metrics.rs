//! Per-field and pairwise trade indicators over [`FieldFlowMatrix`] values.
//!
//! Orientation: `cells[i][j]` is citation flow from `i` to `j`, so knowledge
//! flows from `j` to `i`. A field's exports are the citations it receives
//! (column sum) and its imports are the citations it gives (row sum). The
//! diagonal counts toward both.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{FieldFlowMatrix, PublicationCounts};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldIndicators {
    pub field: String,
    pub year: i32,
    pub exports: u64,
    pub imports: u64,
    pub self_citations: u64,
    /// Exports / imports; absent when imports are zero.
    pub export_import_ratio: Option<f64>,
    /// Self-citations / exports; absent when exports are zero.
    pub self_dependence: Option<f64>,
    pub net_balance: i64,
    pub positive_surplus: u64,
    pub hub_size: u64,
    pub export_partner_count: usize,
    pub publications: Option<u64>,
    pub per_publication_exports: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn signed_flow(m: &FieldFlowMatrix, a: usize, b: usize) -> i64 {
    m.get(b, a) as i64 - m.get(a, b) as i64
}

fn indicators_at(m: &FieldFlowMatrix, f: usize, col_sums: &[u64]) -> FieldIndicators {
    let exports = col_sums[f];
    let imports = m.imports(f);
    let self_citations = m.self_citations(f);
    let mut positive_surplus = 0u64;
    let mut partners = 0usize;
    for b in (0..m.dim()).filter(|&b| b != f) {
        let flow = signed_flow(m, f, b);
        if flow > 0 {
            positive_surplus += flow as u64;
            partners += 1;
        }
    }
    FieldIndicators {
        field: m.fields()[f].clone(),
        year: m.year(),
        exports,
        imports,
        self_citations,
        export_import_ratio: ratio(exports, imports),
        self_dependence: ratio(self_citations, exports),
        net_balance: exports as i64 - imports as i64,
        positive_surplus,
        hub_size: exports + imports,
        export_partner_count: partners,
        publications: None,
        per_publication_exports: None,
    }
}

fn column_sums(m: &FieldFlowMatrix) -> Vec<u64> {
    let n = m.dim();
    let mut sums = vec![0u64; n];
    for i in 0..n {
        for (s, c) in sums.iter_mut().zip(m.row(i)) {
            *s += c;
        }
    }
    sums
}

impl FieldIndicators {
    /// Attaches the field's publication count for the indicator year.
    pub fn attach_publications(&mut self, pubs: &PublicationCounts) {
        self.publications = pubs.get(&self.field, self.year);
        self.per_publication_exports = self.publications.and_then(|p| ratio(self.exports, p));
    }
}

pub fn field_indicators(m: &FieldFlowMatrix, field: &str) -> Result<FieldIndicators> {
    let f = m.index_of(field)?;
    Ok(indicators_at(m, f, &column_sums(m)))
}

/// Indicators for every field of `m`, in matrix order.
pub fn all_indicators(
    m: &FieldFlowMatrix,
    pubs: Option<&PublicationCounts>,
) -> Vec<FieldIndicators> {
    let sums = column_sums(m);
    let mut out = par::map_indices(m.dim(), |f| indicators_at(m, f, &sums));
    if let Some(p) = pubs {
        out.iter_mut().for_each(|i| i.attach_publications(p));
    }
    out
}

/// Single-threaded [`all_indicators`].
pub fn all_indicators_sequential(
    m: &FieldFlowMatrix,
    pubs: Option<&PublicationCounts>,
) -> Vec<FieldIndicators> {
    let sums = column_sums(m);
    let mut out: Vec<_> = (0..m.dim()).map(|f| indicators_at(m, f, &sums)).collect();
    if let Some(p) = pubs {
        out.iter_mut().for_each(|i| i.attach_publications(p));
    }
    out
}

/// Self-citations over exports; `None` when the field has no exports.
pub fn self_dependence_ratio(m: &FieldFlowMatrix, field: &str) -> Result<Option<f64>> {
    let f = m.index_of(field)?;
    Ok(ratio(m.self_citations(f), m.exports(f)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimaryDependence {
    Itself,
    Other(String),
}

/// How [`primary_dependence`] decides that a field depends mainly on itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependenceRule {
    /// The diagonal is the row maximum (ties count as self).
    #[default]
    Argmax,
    /// Self-citations exceed half of the field's imports.
    MajorityShare,
}

/// The field that `field` cites most. `None` when it cites nothing.
pub fn primary_dependence(
    m: &FieldFlowMatrix,
    field: &str,
    rule: DependenceRule,
) -> Result<Option<PrimaryDependence>> {
    let f = m.index_of(field)?;
    Ok(primary_dependence_at(m, f, rule))
}

fn primary_dependence_at(
    m: &FieldFlowMatrix,
    f: usize,
    rule: DependenceRule,
) -> Option<PrimaryDependence> {
    let row = m.row(f);
    let imports: u64 = row.iter().sum();
    if imports == 0 {
        return None;
    }
    // first index wins ties, i.e. category order
    let mut best: Option<usize> = None;
    for (j, &c) in row.iter().enumerate() {
        if j != f && best.is_none_or(|b| c > row[b]) {
            best = Some(j);
        }
    }
    let own = row[f];
    let itself = match rule {
        DependenceRule::Argmax => best.is_none_or(|b| own >= row[b]),
        DependenceRule::MajorityShare => 2 * own > imports,
    };
    Some(match (itself, best) {
        (true, _) | (false, None) => PrimaryDependence::Itself,
        (false, Some(b)) => PrimaryDependence::Other(m.fields()[b].clone()),
    })
}

/// Counts of fields that depend mainly on themselves and on others. Fields
/// that cite nothing are in neither count.
pub fn dependence_tally(m: &FieldFlowMatrix, rule: DependenceRule) -> (usize, usize) {
    (0..m.dim())
        .filter_map(|f| primary_dependence_at(m, f, rule))
        .fold((0, 0), |(s, o), d| match d {
            PrimaryDependence::Itself => (s + 1, o),
            PrimaryDependence::Other(_) => (s, o + 1),
        })
}

/// `cells[b][a] - cells[a][b]`: positive when knowledge flows from `a` to `b`.
pub fn net_flow(m: &FieldFlowMatrix, a: &str, b: &str) -> Result<i64> {
    if a == b {
        return Err(Error::Domain(format!("net flow of `{a}` with itself")));
    }
    Ok(signed_flow(m, m.index_of(a)?, m.index_of(b)?))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurplusMode {
    /// Exports minus imports.
    NetBalance,
    /// Sum of the field's positive net flows to every other field.
    #[default]
    PositiveOnly,
}

pub fn knowledge_surplus(m: &FieldFlowMatrix, field: &str, mode: SurplusMode) -> Result<i64> {
    let ind = field_indicators(m, field)?;
    Ok(match mode {
        SurplusMode::NetBalance => ind.net_balance,
        SurplusMode::PositiveOnly => ind.positive_surplus as i64,
    })
}

/// Number of other fields receiving a strictly positive net flow from `field`.
pub fn export_partner_count(m: &FieldFlowMatrix, field: &str) -> Result<usize> {
    let f = m.index_of(field)?;
    Ok((0..m.dim())
        .filter(|&b| b != f && signed_flow(m, f, b) > 0)
        .count())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RolePartition {
    pub exporters: Vec<String>,
    pub importers: Vec<String>,
    pub balanced: Vec<String>,
}

pub fn role_partition(m: &FieldFlowMatrix) -> RolePartition {
    let sums = column_sums(m);
    let mut out = RolePartition::default();
    for (f, name) in m.fields().iter().enumerate() {
        let (e, i) = (sums[f], m.imports(f));
        let bucket = match e.cmp(&i) {
            std::cmp::Ordering::Greater => &mut out.exporters,
            std::cmp::Ordering::Less => &mut out.importers,
            std::cmp::Ordering::Equal => &mut out.balanced,
        };
        bucket.push(name.clone());
    }
    out
}

/// Fractional change `(to - from) / from`; `None` for a zero base.
pub fn growth(from: u64, to: u64) -> Option<f64> {
    (from > 0).then(|| (to as f64 - from as f64) / from as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsRecord {
    pub field: String,
    pub year_from: i32,
    pub year_to: i32,
    pub exports_from: u64,
    pub exports_to: u64,
    pub export_growth: Option<f64>,
    pub publication_growth: Option<f64>,
    pub overall_increment: f64,
    /// Export growth strictly above the overall increment.
    pub above_overall: bool,
    pub note: Option<String>,
}

fn dynamics_at(
    from: &FieldFlowMatrix,
    to: &FieldFlowMatrix,
    field: &str,
    pubs: Option<&PublicationCounts>,
    overall: f64,
) -> Result<DynamicsRecord> {
    let exports_from = from.exports(from.index_of(field)?);
    let exports_to = to.exports(to.index_of(field)?);
    let export_growth = growth(exports_from, exports_to);
    let publication_growth = pubs.and_then(|p| {
        let a = p.get(field, from.year())?;
        let b = p.get(field, to.year())?;
        growth(a, b)
    });
    Ok(DynamicsRecord {
        field: field.to_string(),
        year_from: from.year(),
        year_to: to.year(),
        exports_from,
        exports_to,
        export_growth,
        publication_growth,
        overall_increment: overall,
        above_overall: export_growth.is_some_and(|g| g > overall),
        note: export_growth
            .is_none()
            .then(|| "zero exports in base year".to_string()),
    })
}

/// Export growth of `field` between two matrices, benchmarked against the
/// system-wide `overall_increment`.
pub fn trading_dynamics(
    from: &FieldFlowMatrix,
    to: &FieldFlowMatrix,
    field: &str,
    pubs: Option<&PublicationCounts>,
    overall_increment: f64,
) -> Result<DynamicsRecord> {
    dynamics_at(from, to, field, pubs, overall_increment)
}

/// [`trading_dynamics`] for every field of `from`.
pub fn all_dynamics(
    from: &FieldFlowMatrix,
    to: &FieldFlowMatrix,
    pubs: Option<&PublicationCounts>,
    overall_increment: f64,
) -> Result<Vec<DynamicsRecord>> {
    from.fields()
        .iter()
        .map(|f| dynamics_at(from, to, f, pubs, overall_increment))
        .collect()
}

/// Growth of the journal-level grand total between two years.
pub fn overall_increment(total_from: u64, total_to: u64) -> Result<f64> {
    growth(total_from, total_to)
        .ok_or_else(|| Error::Domain("overall increment with a zero base total".into()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccelerationPartition {
    /// Growth strictly above the increment in every period.
    pub above_all_periods: Vec<String>,
    /// Growth strictly below the increment in every period.
    pub below_all_periods: Vec<String>,
    pub mixed: Vec<String>,
}

impl AccelerationPartition {
    pub fn contains(&self, field: &str) -> bool {
        [
            &self.above_all_periods,
            &self.below_all_periods,
            &self.mixed,
        ]
        .iter()
        .any(|v| v.iter().any(|f| f == field))
    }
}

/// Partitions fields by comparing their export growth to the overall
/// increment of each period. `periods[k]` holds one record per field for
/// period `k`; fields named in `exclude` are dropped first.
pub fn acceleration_partition(
    periods: &[Vec<DynamicsRecord>],
    increments: &[f64],
    exclude: &[String],
) -> Result<AccelerationPartition> {
    if periods.len() != increments.len() {
        return Err(Error::Domain(format!(
            "{} periods but {} increments",
            periods.len(),
            increments.len()
        )));
    }
    let excluded: BTreeSet<&str> = exclude.iter().map(String::as_str).collect();
    let lookups: Vec<BTreeMap<&str, &DynamicsRecord>> = periods
        .iter()
        .map(|recs| recs.iter().map(|r| (r.field.as_str(), r)).collect())
        .collect();
    let mut fields: Vec<&str> = Vec::new();
    let mut seen = BTreeSet::new();
    for recs in periods {
        for r in recs {
            if !excluded.contains(r.field.as_str()) && seen.insert(r.field.as_str()) {
                fields.push(&r.field);
            }
        }
    }

    let mut out = AccelerationPartition::default();
    for field in fields {
        let (mut above, mut below) = (true, true);
        for (k, lookup) in lookups.iter().enumerate() {
            let rec = lookup.get(field).ok_or_else(|| {
                Error::Validation(format!(
                    "field `{field}` has no record for period {}",
                    period_label(periods, k)
                ))
            })?;
            match rec.export_growth {
                Some(g) => {
                    above &= g > increments[k];
                    below &= g < increments[k];
                }
                None => {
                    above = false;
                    below = false;
                }
            }
        }
        let bucket = if above && !lookups.is_empty() {
            &mut out.above_all_periods
        } else if below && !lookups.is_empty() {
            &mut out.below_all_periods
        } else {
            &mut out.mixed
        };
        bucket.push(field.to_string());
    }
    Ok(out)
}

fn period_label(periods: &[Vec<DynamicsRecord>], k: usize) -> String {
    periods[k]
        .first()
        .map(|r| format!("{}-{}", r.year_from, r.year_to))
        .unwrap_or_else(|| format!("#{k}"))
}

fn subgroup_exports(m: &FieldFlowMatrix, subgroup: &[String]) -> Result<u64> {
    if subgroup.is_empty() {
        return Err(Error::Domain("empty subgroup".into()));
    }
    let sums = column_sums(m);
    let idx: BTreeSet<usize> = subgroup
        .iter()
        .map(|f| m.index_of(f))
        .collect::<Result<_>>()?;
    Ok(idx.into_iter().map(|i| sums[i]).sum())
}

/// Subgroup exports as a fraction of all field exports.
pub fn subgroup_share(m: &FieldFlowMatrix, subgroup: &[String]) -> Result<f64> {
    let part = subgroup_exports(m, subgroup)?;
    let total = m.total();
    ratio(part, total).ok_or_else(|| Error::Domain("matrix has no citations".into()))
}

/// Growth of the subgroup's summed exports between two matrices.
pub fn subgroup_increment(
    from: &FieldFlowMatrix,
    to: &FieldFlowMatrix,
    subgroup: &[String],
) -> Result<f64> {
    let a = subgroup_exports(from, subgroup)?;
    let b = subgroup_exports(to, subgroup)?;
    growth(a, b).ok_or_else(|| Error::Domain("subgroup has zero exports in the base year".into()))
}
