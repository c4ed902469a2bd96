//! Ten-type field taxonomy.
//!
//! Each field is placed on three axes (self-dependence, trade role, impact)
//! and receives at most one of the types A-H from that cell. Types I and J
//! are added for fields whose export growth beat (or trailed) the overall
//! increment in every period.
//!
//! | type | dependence  | role                | impact |
//! |------|-------------|---------------------|--------|
//! | A    | dependent   | exporter            | higher |
//! | B    | independent | importer            | lower  |
//! | C    | dependent   | importer / balanced | higher |
//! | D    | independent | exporter            | lower  |
//! | E    | independent | importer / balanced | higher |
//! | F    | dependent   | importer            | lower  |
//! | G    | independent | exporter            | higher |
//! | H    | dependent   | exporter            | lower  |
//!
//! Balanced fields with lower impact have no A-H type.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{AccelerationPartition, FieldIndicators};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    /// Median of the year's values.
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassificationConfig {
    pub importer_ratio_max: f64,
    pub exporter_ratio_min: f64,
    pub dependence_split: Split,
    pub impact_split: Split,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        ClassificationConfig {
            importer_ratio_max: 0.77,
            exporter_ratio_min: 1.13,
            dependence_split: Split::Median,
            impact_split: Split::Median,
        }
    }
}

impl ClassificationConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.importer_ratio_max, self.exporter_ratio_min);
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::Config(format!(
                "ratio band must satisfy 0 <= importer_ratio_max < exporter_ratio_min, got {lo} / {hi}"
            )));
        }
        if let Split::Fixed(v) = self.dependence_split {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!(
                    "dependence_split must lie in (0, 1), got {v}"
                )));
            }
        }
        if let Split::Fixed(v) = self.impact_split {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "impact_split must be a non-negative count, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependence {
    Independent,
    Dependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Exporter,
    Importer,
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Impact {
    Higher,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    Increasing,
    Decreasing,
    Mixed,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TradeType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
}

macro_rules! display_as_debug {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let s = format!("{self:?}");
                f.write_str(&s.to_lowercase())
            }
        }
    )*};
}
display_as_debug!(Dependence, Role, Impact, Dynamics);

impl fmt::Display for TradeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The A-H type of an axis cell, if any.
pub fn cell_type(dependence: Dependence, role: Role, impact: Impact) -> Option<TradeType> {
    use Dependence::*;
    use Impact::*;
    use Role::*;
    match (dependence, role, impact) {
        (Dependent, Exporter, Higher) => Some(TradeType::A),
        (Independent, Importer, Lower) => Some(TradeType::B),
        (Dependent, Importer | Balanced, Higher) => Some(TradeType::C),
        (Independent, Exporter, Lower) => Some(TradeType::D),
        (Independent, Importer | Balanced, Higher) => Some(TradeType::E),
        (Dependent, Importer, Lower) => Some(TradeType::F),
        (Independent, Exporter, Higher) => Some(TradeType::G),
        (Dependent, Exporter, Lower) => Some(TradeType::H),
        (_, Balanced, Lower) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeClassification {
    pub field: String,
    pub dependence: Dependence,
    pub role: Role,
    pub impact: Impact,
    pub dynamics: Dynamics,
    pub types: Vec<TradeType>,
}

/// Split values actually used, after resolving medians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSplits {
    pub dependence: f64,
    pub impact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub config: ClassificationConfig,
    pub resolved: ResolvedSplits,
    pub fields: Vec<TradeClassification>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

fn resolve(split: Split, values: &[f64]) -> f64 {
    match split {
        Split::Fixed(v) => v,
        Split::Median => median(values).unwrap_or(0.0),
    }
}

fn role_of(ind: &FieldIndicators, cfg: &ClassificationConfig) -> Role {
    match ind.export_import_ratio {
        Some(r) if r < cfg.importer_ratio_max => Role::Importer,
        Some(r) if r > cfg.exporter_ratio_min => Role::Exporter,
        Some(_) => Role::Balanced,
        None if ind.exports > 0 => Role::Exporter,
        None => Role::Balanced,
    }
}

fn dynamics_of(field: &str, partition: Option<&AccelerationPartition>) -> Dynamics {
    let Some(p) = partition else {
        return Dynamics::Unknown;
    };
    let has = |v: &[String]| v.iter().any(|f| f == field);
    if has(&p.above_all_periods) {
        Dynamics::Increasing
    } else if has(&p.below_all_periods) {
        Dynamics::Decreasing
    } else if has(&p.mixed) {
        Dynamics::Mixed
    } else {
        Dynamics::Unknown
    }
}

/// Classifies one year's indicator bundles. Splits use `>=` on the upper
/// side: a field exactly at the dependence split is independent and one
/// exactly at the impact split has higher impact. Fields without exports
/// count as having zero self-dependence.
pub fn classify(
    indicators: &[FieldIndicators],
    partition: Option<&AccelerationPartition>,
    cfg: &ClassificationConfig,
) -> Result<Classification> {
    cfg.validate()?;
    if indicators.is_empty() {
        return Err(Error::Domain("nothing to classify".into()));
    }
    let deps: Vec<f64> = indicators
        .iter()
        .filter_map(|i| i.self_dependence)
        .collect();
    let exports: Vec<f64> = indicators.iter().map(|i| i.exports as f64).collect();
    let resolved = ResolvedSplits {
        dependence: resolve(cfg.dependence_split, &deps),
        impact: resolve(cfg.impact_split, &exports),
    };

    let fields = indicators
        .iter()
        .map(|ind| {
            let dependence = if ind.self_dependence.unwrap_or(0.0) >= resolved.dependence {
                Dependence::Independent
            } else {
                Dependence::Dependent
            };
            let role = role_of(ind, cfg);
            let impact = if ind.exports as f64 >= resolved.impact {
                Impact::Higher
            } else {
                Impact::Lower
            };
            let dynamics = dynamics_of(&ind.field, partition);
            let mut types: Vec<TradeType> =
                cell_type(dependence, role, impact).into_iter().collect();
            match dynamics {
                Dynamics::Increasing => types.push(TradeType::I),
                Dynamics::Decreasing => types.push(TradeType::J),
                _ => {}
            }
            TradeClassification {
                field: ind.field.clone(),
                dependence,
                role,
                impact,
                dynamics,
                types,
            }
        })
        .collect();

    Ok(Classification {
        config: cfg.clone(),
        resolved,
        fields,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCount {
    pub dependence: Dependence,
    pub role: Role,
    pub impact: Impact,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandCounts {
    /// All twelve axis cells, zero counts included.
    pub cells: Vec<CellCount>,
    pub types: BTreeMap<TradeType, usize>,
    pub total: usize,
}

pub fn band_counts(classifications: &[TradeClassification]) -> BandCounts {
    let mut cells = Vec::with_capacity(12);
    for dependence in [Dependence::Independent, Dependence::Dependent] {
        for role in [Role::Exporter, Role::Importer, Role::Balanced] {
            for impact in [Impact::Higher, Impact::Lower] {
                let count = classifications
                    .iter()
                    .filter(|c| c.dependence == dependence && c.role == role && c.impact == impact)
                    .count();
                cells.push(CellCount {
                    dependence,
                    role,
                    impact,
                    count,
                });
            }
        }
    }
    let mut types: BTreeMap<TradeType, usize> = BTreeMap::new();
    for t in classifications.iter().flat_map(|c| &c.types) {
        *types.entry(*t).or_default() += 1;
    }
    BandCounts {
        cells,
        types,
        total: classifications.len(),
    }
}
