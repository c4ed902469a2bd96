//! Seeded synthetic journal-level datasets.
//!
//! All randomness comes from ChaCha8 seeded with [`SynthSpec::seed`]. The
//! category map uses stream 0 and every year draws its edges and publication
//! counts from its own streams, so years are generated independently (and
//! in parallel) while the output stays reproducible across platforms.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Category, CategoryMap, CitationEdge, PublicationCounts};
use crate::par;

pub const RNG_NAME: &str = "ChaCha8";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeModel {
    /// Citing and cited journals drawn uniformly.
    Uniform,
    /// Cited journal drawn with probability proportional to
    /// `(citations received so far + 1) ^ exponent`.
    SkewedPreferential { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_categories: usize,
    pub journals_per_category: usize,
    pub multi_assign_fraction: f64,
    pub edge_model: EdgeModel,
    pub years: Vec<i32>,
    pub seed: u64,
    /// Citation draws per year.
    pub total_edges: usize,
    /// Count carried by each draw.
    #[serde(default = "one")]
    pub edge_weight: u64,
}

fn one() -> u64 {
    1
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_categories < 2 {
            return Err(Error::Config("n_categories must be at least 2".into()));
        }
        if self.journals_per_category == 0 {
            return Err(Error::Config(
                "journals_per_category must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.multi_assign_fraction) {
            return Err(Error::Config(format!(
                "multi_assign_fraction must lie in [0, 1], got {}",
                self.multi_assign_fraction
            )));
        }
        if let EdgeModel::SkewedPreferential { exponent } = self.edge_model {
            if !(exponent.is_finite() && exponent > 0.0) {
                return Err(Error::Config(format!(
                    "exponent must be positive, got {exponent}"
                )));
            }
        }
        if self.years.is_empty() {
            return Err(Error::Config("at least one year is required".into()));
        }
        let mut ys = self.years.clone();
        ys.sort_unstable();
        ys.dedup();
        if ys.len() != self.years.len() {
            return Err(Error::Config("years must be distinct".into()));
        }
        Ok(())
    }

    fn journal_count(&self) -> usize {
        self.n_categories * self.journals_per_category
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub edges: Vec<CitationEdge>,
    pub map: CategoryMap,
    pub publications: PublicationCounts,
}

pub fn journal_name(k: usize) -> String {
    format!("J{k:05}")
}

pub fn category_name(i: usize) -> String {
    format!("C{i:03}")
}

fn stream(year: i32, purpose: u64) -> u64 {
    ((year as u32 as u64) << 8) | purpose
}

fn rng_for(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Prefix sums over non-negative weights with O(log n) update and sampling.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(weights: &[f64]) -> Self {
        let mut f = Fenwick {
            tree: vec![0.0; weights.len() + 1],
        };
        for (i, &w) in weights.iter().enumerate() {
            f.add(i, w);
        }
        f
    }

    fn add(&mut self, i: usize, delta: f64) {
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut k = self.tree.len() - 1;
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Smallest index whose prefix sum exceeds `target`.
    fn find(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}

fn build_map(spec: &SynthSpec) -> Result<CategoryMap> {
    let mut rng = rng_for(spec.seed, 0);
    let j = spec.journal_count();
    let universe: Vec<Category> = (0..spec.n_categories)
        .map(|i| Category {
            id: category_name(i),
            display_name: format!("Synthetic category {i}"),
        })
        .collect();
    let mut order: Vec<usize> = (0..j).collect();
    order.shuffle(&mut rng);
    let n_multi = (spec.multi_assign_fraction * j as f64).round() as usize;
    let mut second: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in &order[..n_multi] {
        let primary = k / spec.journals_per_category;
        let mut other = rng.gen_range(0..spec.n_categories - 1);
        if other >= primary {
            other += 1;
        }
        second.insert(k, other);
    }
    let assignments = (0..j).map(|k| {
        let mut cats = vec![category_name(k / spec.journals_per_category)];
        if let Some(&o) = second.get(&k) {
            cats.push(category_name(o));
        }
        (journal_name(k), cats)
    });
    CategoryMap::new(universe, assignments)
}

fn year_edges(spec: &SynthSpec, year: i32) -> Vec<CitationEdge> {
    let mut rng = rng_for(spec.seed, stream(year, 1));
    let j = spec.journal_count();
    let mut pairs: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    match spec.edge_model {
        EdgeModel::Uniform => {
            for _ in 0..spec.total_edges {
                let a = rng.gen_range(0..j);
                let b = rng.gen_range(0..j);
                *pairs.entry((a, b)).or_default() += spec.edge_weight;
            }
        }
        EdgeModel::SkewedPreferential { exponent } => {
            let mut received = vec![0u64; j];
            let mut weights = Fenwick::new(&vec![1.0; j]);
            for _ in 0..spec.total_edges {
                let a = rng.gen_range(0..j);
                let u: f64 = rng.gen::<f64>() * weights.total();
                let b = weights.find(u);
                let old = ((received[b] + 1) as f64).powf(exponent);
                received[b] += 1;
                let new = ((received[b] + 1) as f64).powf(exponent);
                weights.add(b, new - old);
                *pairs.entry((a, b)).or_default() += spec.edge_weight;
            }
        }
    }
    pairs
        .into_iter()
        .map(|((a, b), c)| CitationEdge {
            citing_journal: journal_name(a),
            cited_journal: journal_name(b),
            year,
            count: c,
        })
        .collect()
}

fn year_publications(spec: &SynthSpec, map: &CategoryMap, year: i32) -> Vec<u64> {
    let mut rng = rng_for(spec.seed, stream(year, 2));
    let mut per_cat = vec![0u64; spec.n_categories];
    for (_, cats) in map.journals() {
        let articles: u64 = rng.gen_range(20..=200);
        for &c in cats {
            per_cat[c] += articles;
        }
    }
    per_cat
}

/// Generates edges, the category map and publication counts for `spec`.
pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let map = build_map(spec)?;
    let per_year = par::map_indices(spec.years.len(), |k| {
        let y = spec.years[k];
        (year_edges(spec, y), year_publications(spec, &map, y))
    });
    let mut edges = Vec::new();
    let mut publications = PublicationCounts::new();
    for (&year, (e, pubs)) in spec.years.iter().zip(per_year) {
        edges.extend(e);
        for (i, p) in pubs.into_iter().enumerate() {
            publications.insert(&category_name(i), year, p);
        }
    }
    Ok(SynthData {
        edges,
        map,
        publications,
    })
}
