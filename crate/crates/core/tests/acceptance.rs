//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances are pinned below.

// the reference implementations index on purpose
#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use num::{BigRational, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scitrade::metrics::{self, DependenceRule, PrimaryDependence, SurplusMode};
use scitrade::report::Table;
use scitrade::stats;
use scitrade::synth::{self, EdgeModel, SynthSpec};
use scitrade::taxonomy::{self, ClassificationConfig, TradeType};
use scitrade::{
    build_flow_matrix, grand_total_citations, parse_category_map, parse_edges, FieldFlowMatrix,
    PublicationCounts, UnmappedPolicy,
};

/// Printed ratios carry two decimals.
const RATIO_TOL: f64 = 0.005;
/// Percentage-point tolerance for printed growth values.
const PP_TOL: f64 = 0.01;
const RATIO_ORACLE_TOL: f64 = 1e-12;
const STATS_REL_TOL: f64 = 1e-10;
/// Float slack when comparing against a printed, rounded value.
const ROUNDING_SLACK: f64 = 1e-9;

const RANDOM_MATRICES: usize = 1_000;
const MAX_DIM: usize = 8;
const MAX_CELL: u64 = 50;

type Outcome = Result<String, Vec<String>>;
type Check<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn read_table(name: &str) -> Table {
    let path = fixture(name);
    Table::read(fs::File::open(&path).unwrap(), &path.display().to_string()).unwrap()
}

fn col<'a>(t: &Table, row: &'a [String], name: &str) -> &'a str {
    &row[t
        .column(name)
        .unwrap_or_else(|| panic!("fixture lacks column {name}"))]
}

fn int(s: &str) -> u64 {
    s.parse().unwrap()
}

fn float(s: &str) -> f64 {
    s.parse().unwrap()
}

/// Two-field matrix in which `field` has the given exports, imports and
/// self-citations, the remainder going to or from `REST`.
fn isolate(
    year: i32,
    field: &str,
    exports: u64,
    imports: u64,
    self_citations: u64,
) -> FieldFlowMatrix {
    assert!(self_citations <= exports.min(imports));
    FieldFlowMatrix::from_rows(
        year,
        vec![field.to_string(), "REST".to_string()],
        vec![
            vec![self_citations, imports - self_citations],
            vec![exports - self_citations, 0],
        ],
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    let mut rows = 0;
    for name in ["top_exporters_2009.csv", "top_importers_2009.csv"] {
        let t = read_table(name);
        for r in &t.rows {
            let field = col(&t, r, "field");
            let (imports, exports) = (int(col(&t, r, "imports")), int(col(&t, r, "exports")));
            let m = isolate(2009, field, exports, imports, 0);
            let got = metrics::field_indicators(&m, field)
                .unwrap()
                .export_import_ratio
                .unwrap();
            let printed = float(col(&t, r, "printed_ratio"));
            rows += 1;
            if (got - printed).abs() > RATIO_TOL + ROUNDING_SLACK {
                bad.push(format!(
                    "{name}: {field} ratio {got:.4} vs printed {printed}"
                ));
            }
        }
    }
    for name in ["independent_2009.csv", "dependent_2009.csv"] {
        let t = read_table(name);
        for r in &t.rows {
            let field = col(&t, r, "field");
            let (exports, selfc) = (
                int(col(&t, r, "exports")),
                int(col(&t, r, "self_citations")),
            );
            let m = isolate(2009, field, exports, exports, selfc);
            let got = metrics::self_dependence_ratio(&m, field).unwrap().unwrap();
            let printed = float(col(&t, r, "printed_ratio"));
            rows += 1;
            if (got - printed).abs() > RATIO_TOL + ROUNDING_SLACK {
                bad.push(format!(
                    "{name}: {field} self-dependence {got:.4} vs printed {printed}"
                ));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{rows} rows within {RATIO_TOL}"))
    } else {
        Err(bad)
    }
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut rows = 0;
    for name in [
        "export_gainers_2007_2009.csv",
        "export_losers_2007_2009.csv",
    ] {
        let t = read_table(name);
        let mut by_field: BTreeMap<&str, BTreeMap<&str, (u64, u64, f64)>> = BTreeMap::new();
        for r in &t.rows {
            by_field.entry(col(&t, r, "field")).or_default().insert(
                col(&t, r, "measure"),
                (
                    int(col(&t, r, "value_2007")),
                    int(col(&t, r, "value_2009")),
                    float(col(&t, r, "printed_change_pct")),
                ),
            );
        }
        for (field, m) in by_field {
            let (c07, c09, c_printed) = m["C"];
            let (p07, p09, p_printed) = m["P"];
            let from = isolate(2007, field, c07, c07, 0);
            let to = isolate(2009, field, c09, c09, 0);
            let mut pubs = PublicationCounts::new();
            pubs.insert(field, 2007, p07);
            pubs.insert(field, 2009, p09);
            let rec = metrics::trading_dynamics(&from, &to, field, Some(&pubs), 0.0).unwrap();
            for (label, got, printed, a, b) in [
                ("C", rec.export_growth.unwrap(), c_printed, c07, c09),
                ("P", rec.publication_growth.unwrap(), p_printed, p07, p09),
            ] {
                rows += 1;
                let pct = 100.0 * got;
                if (pct - printed).abs() > PP_TOL + ROUNDING_SLACK {
                    bad.push(format!(
                        "{name}: {field} {label} {a} -> {b} gives {pct:.4}% but {printed}% is printed"
                    ));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{rows} rows within {PP_TOL} pp"))
    } else {
        Err(bad)
    }
}

fn criterion_3() -> Outcome {
    let totals = read_table("grand_totals.csv");
    let by_year: BTreeMap<i32, u64> = totals
        .rows
        .iter()
        .map(|r| {
            (
                col(&totals, r, "year").parse().unwrap(),
                int(col(&totals, r, "total_citations")),
            )
        })
        .collect();
    let t = read_table("printed_increments.csv");
    let mut bad = Vec::new();
    for r in &t.rows {
        let (a, b): (i32, i32) = (
            col(&t, r, "year_from").parse().unwrap(),
            col(&t, r, "year_to").parse().unwrap(),
        );
        let printed = float(col(&t, r, "printed_increment_pct"));
        let got = 100.0 * metrics::overall_increment(by_year[&a], by_year[&b]).unwrap();
        if (got - printed).abs() > PP_TOL + ROUNDING_SLACK {
            bad.push(format!("{a}-{b}: {got:.4}% vs printed {printed}%"));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} increments within {PP_TOL} pp", t.rows.len()))
    } else {
        Err(bad)
    }
}

fn criterion_4() -> Outcome {
    let (s, k) = (stats::se_skewness(221), stats::se_kurtosis(221));
    let (s2, k2) = (format!("{s:.2}"), format!("{k:.2}"));
    if s2 == "0.16" && k2 == "0.33" {
        Ok(format!("se_skewness {s2}, se_kurtosis {k2}"))
    } else {
        Err(vec![format!(
            "se_skewness {s2} (want 0.16), se_kurtosis {k2} (want 0.33)"
        )])
    }
}

fn random_matrices(seed: u64) -> Vec<(FieldFlowMatrix, FieldFlowMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..RANDOM_MATRICES)
        .map(|_| {
            let n = rng.gen_range(1..=MAX_DIM);
            let fields: Vec<String> = (0..n).map(|i| format!("F{i}")).collect();
            let mut gen = |year| {
                // sparse-ish cells, including many zeros and ties
                let rows = (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                if rng.gen_bool(0.3) {
                                    0
                                } else {
                                    rng.gen_range(0..=MAX_CELL)
                                }
                            })
                            .collect()
                    })
                    .collect();
                FieldFlowMatrix::from_rows(year, fields.clone(), rows).unwrap()
            };
            (gen(2008), gen(2009))
        })
        .collect()
}

/// Plain nested-vector view used by the brute-force references.
fn dense(m: &FieldFlowMatrix) -> Vec<Vec<u64>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
        .collect()
}

struct Brute {
    exports: u64,
    imports: u64,
    self_citations: u64,
}

fn brute(c: &[Vec<u64>], f: usize) -> Brute {
    let mut b = Brute {
        exports: 0,
        imports: 0,
        self_citations: 0,
    };
    for i in 0..c.len() {
        for j in 0..c.len() {
            if j == f {
                b.exports += c[i][j];
            }
            if i == f {
                b.imports += c[i][j];
            }
            if i == f && j == f {
                b.self_citations += c[i][j];
            }
        }
    }
    b
}

fn brute_primary(c: &[Vec<u64>], f: usize, fields: &[String]) -> Option<PrimaryDependence> {
    if c[f].iter().sum::<u64>() == 0 {
        return None;
    }
    let max_other = (0..c.len()).filter(|&j| j != f).map(|j| c[f][j]).max();
    match max_other {
        Some(mo) if mo > c[f][f] => {
            let j = (0..c.len()).find(|&j| j != f && c[f][j] == mo).unwrap();
            Some(PrimaryDependence::Other(fields[j].clone()))
        }
        _ => Some(PrimaryDependence::Itself),
    }
}

fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= tol * y.abs().max(1.0),
        (None, None) => true,
        _ => false,
    }
}

fn criterion_5(mats: &[(FieldFlowMatrix, FieldFlowMatrix)]) -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0usize;
    for (k, (m, later)) in mats.iter().enumerate() {
        let c = dense(m);
        let n = c.len();
        let fields = m.fields();
        let ind = metrics::all_indicators(m, None);
        if ind != metrics::all_indicators_sequential(m, None) {
            bad.push(format!(
                "matrix {k}: parallel and sequential indicators differ"
            ));
        }
        let mut tally = (0, 0);
        for f in 0..n {
            let b = brute(&c, f);
            let r = &ind[f];
            let mut pos = 0i64;
            let mut partners = 0usize;
            for g in 0..n {
                if g == f {
                    continue;
                }
                let mut flow = 0i64;
                for i in 0..n {
                    for j in 0..n {
                        if i == g && j == f {
                            flow += c[i][j] as i64;
                        }
                        if i == f && j == g {
                            flow -= c[i][j] as i64;
                        }
                    }
                }
                checks += 1;
                if metrics::net_flow(m, &fields[f], &fields[g]).unwrap() != flow {
                    bad.push(format!("matrix {k}: net_flow({f},{g})"));
                }
                if flow > 0 {
                    pos += flow;
                    partners += 1;
                }
            }
            let ratio = (b.imports > 0).then(|| b.exports as f64 / b.imports as f64);
            let dep = (b.exports > 0).then(|| b.self_citations as f64 / b.exports as f64);
            let net = b.exports as i64 - b.imports as i64;
            checks += 1;
            let ok = r.exports == b.exports
                && r.imports == b.imports
                && r.self_citations == b.self_citations
                && close(r.export_import_ratio, ratio, RATIO_ORACLE_TOL)
                && close(r.self_dependence, dep, RATIO_ORACLE_TOL)
                && close(
                    metrics::self_dependence_ratio(m, &fields[f]).unwrap(),
                    dep,
                    RATIO_ORACLE_TOL,
                )
                && r.net_balance == net
                && r.positive_surplus as i64 == pos
                && r.hub_size == b.exports + b.imports
                && r.export_partner_count == partners
                && metrics::export_partner_count(m, &fields[f]).unwrap() == partners
                && metrics::knowledge_surplus(m, &fields[f], SurplusMode::PositiveOnly).unwrap()
                    == pos
                && metrics::knowledge_surplus(m, &fields[f], SurplusMode::NetBalance).unwrap()
                    == net;
            if !ok {
                bad.push(format!("matrix {k}: indicators of field {f}: {r:?}"));
            }
            let expected_primary = brute_primary(&c, f, fields);
            match &expected_primary {
                Some(PrimaryDependence::Itself) => tally.0 += 1,
                Some(PrimaryDependence::Other(_)) => tally.1 += 1,
                None => {}
            }
            if metrics::primary_dependence(m, &fields[f], DependenceRule::Argmax).unwrap()
                != expected_primary
            {
                bad.push(format!("matrix {k}: primary dependence of field {f}"));
            }
            let bl = brute(&dense(later), f);
            let growth =
                (b.exports > 0).then(|| (bl.exports as f64 - b.exports as f64) / b.exports as f64);
            let rec = metrics::trading_dynamics(m, later, &fields[f], None, 0.1).unwrap();
            if !close(rec.export_growth, growth, RATIO_ORACLE_TOL)
                || rec.above_overall != growth.is_some_and(|g| g > 0.1)
            {
                bad.push(format!("matrix {k}: dynamics of field {f}"));
            }
        }
        if metrics::dependence_tally(m, DependenceRule::Argmax) != tally {
            bad.push(format!("matrix {k}: dependence tally"));
        }
        let roles = metrics::role_partition(m);
        for f in 0..n {
            let b = brute(&c, f);
            let bucket = if b.exports > b.imports {
                &roles.exporters
            } else if b.exports < b.imports {
                &roles.importers
            } else {
                &roles.balanced
            };
            if !bucket.contains(&fields[f]) {
                bad.push(format!("matrix {k}: role of field {f}"));
            }
        }
        if roles.exporters.len() + roles.importers.len() + roles.balanced.len() != n {
            bad.push(format!("matrix {k}: role partition size"));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} matrices, {checks} field/pair checks",
            mats.len()
        ))
    } else {
        bad.truncate(20);
        Err(bad)
    }
}

fn criterion_6(mats: &[(FieldFlowMatrix, FieldFlowMatrix)]) -> Outcome {
    let mut bad = Vec::new();
    for (k, (m, _)) in mats.iter().enumerate() {
        let ind = metrics::all_indicators(m, None);
        let net: i64 = ind.iter().map(|r| r.net_balance).sum();
        let ex: u64 = ind.iter().map(|r| r.exports).sum();
        let im: u64 = ind.iter().map(|r| r.imports).sum();
        if net != 0 || ex != im || ex != m.total() {
            bad.push(format!(
                "matrix {k}: net {net}, exports {ex}, imports {im}, cells {}",
                m.total()
            ));
        }
        let f = m.fields();
        for a in 0..f.len() {
            for b in (a + 1)..f.len() {
                let ab = metrics::net_flow(m, &f[a], &f[b]).unwrap();
                let ba = metrics::net_flow(m, &f[b], &f[a]).unwrap();
                if ab != -ba {
                    bad.push(format!(
                        "matrix {k}: net_flow({a},{b}) = {ab}, reverse {ba}"
                    ));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{} matrices", mats.len()))
    } else {
        bad.truncate(20);
        Err(bad)
    }
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..5 {
        let spec = SynthSpec {
            n_categories: 6,
            journals_per_category: 15,
            multi_assign_fraction: 0.0,
            edge_model: EdgeModel::SkewedPreferential { exponent: 0.8 },
            years: vec![2009],
            seed,
            total_edges: 20_000,
            edge_weight: 2,
        };
        let d = synth::generate(&spec).unwrap();
        let m = build_flow_matrix(&d.edges, &d.map, 2009, UnmappedPolicy::Strict)
            .unwrap()
            .matrix;
        let g = grand_total_citations(&d.edges, 2009);
        if m.total() != g {
            bad.push(format!(
                "single assignment, seed {seed}: cells {} vs grand total {g}",
                m.total()
            ));
        }
    }

    let edges = parse_edges(fs::File::open(fixture("multi_edges.csv")).unwrap()).unwrap();
    let map = parse_category_map(
        fs::File::open(fixture("multi_map.csv")).unwrap(),
        Vec::new(),
    )
    .unwrap();
    let built = build_flow_matrix(&edges, &map, 2009, UnmappedPolicy::Lenient).unwrap();
    let m = &built.matrix;
    // reference: expand every mapped edge over its S x T category pairs
    let ids = map.category_ids();
    let mut expected = vec![vec![0u64; ids.len()]; ids.len()];
    for e in edges.iter().filter(|e| e.year == 2009) {
        let (Some(s), Some(t)) = (
            map.journal_categories(&e.citing_journal),
            map.journal_categories(&e.cited_journal),
        ) else {
            continue;
        };
        for &i in s {
            for &j in t {
                expected[i][j] += e.count;
            }
        }
    }
    if dense(m) != expected {
        bad.push(format!(
            "fixture matrix {:?} vs expansion {expected:?}",
            dense(m)
        ));
    }
    let at = |a: &str, b: &str| m.get(m.index_of(a).unwrap(), m.index_of(b).unwrap());
    // J1 -> J2 (3) and J1 -> J1 (1) with J1 in {C1, C2}, J2 in {C1}
    if at("C1", "C1") != 3 + 1
        || at("C2", "C1") != 3 + 1
        || at("C1", "C2") != 1
        || at("C2", "C2") != 1
    {
        bad.push("multi-assigned journal cells".into());
    }
    if built.skipped.len() != 1 {
        bad.push(format!(
            "expected one skipped edge, got {}",
            built.skipped.len()
        ));
    }
    if bad.is_empty() {
        Ok("single-assignment totals and S x T expansion agree".into())
    } else {
        Err(bad)
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

struct ExactMoments {
    mean: f64,
    sd: f64,
    g1: f64,
    g2: f64,
}

fn exact_moments(xs: &[f64]) -> ExactMoments {
    let n = BigRational::from_integer(xs.len().into());
    let vals: Vec<BigRational> = xs.iter().map(|&x| rat(x)).collect();
    let mean = vals.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let (mut m2, mut m3, mut m4) = (
        BigRational::zero(),
        BigRational::zero(),
        BigRational::zero(),
    );
    for v in &vals {
        let d = v - &mean;
        let d2 = &d * &d;
        m3 += &d2 * &d;
        m4 += &d2 * &d2;
        m2 += d2;
    }
    let (m2, m3, m4) = (m2 / &n, m3 / &n, m4 / &n);
    let one = BigRational::from_integer(1.into());
    let var = &m2 * &n / (&n - &one);
    let g1_sq = (&m3 * &m3) / (&m2 * &m2 * &m2);
    let g2 = m4 / (&m2 * &m2) - BigRational::from_integer(3.into());
    let sign = if m3 < BigRational::zero() { -1.0 } else { 1.0 };
    ExactMoments {
        mean: mean.to_f64().unwrap(),
        sd: var.to_f64().unwrap().sqrt(),
        g1: sign * g1_sq.to_f64().unwrap().sqrt(),
        g2: g2.to_f64().unwrap(),
    }
}

fn exact_ranks(xs: &[f64]) -> Vec<BigRational> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count();
            let equal = xs.iter().filter(|&&y| y == x).count();
            BigRational::new((2 * below + equal + 1).into(), 2.into())
        })
        .collect()
}

fn exact_spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (rx, ry) = (exact_ranks(xs), exact_ranks(ys));
    let n = BigRational::from_integer(xs.len().into());
    let mx = rx.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let my = ry.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let (mut sxy, mut sxx, mut syy) = (
        BigRational::zero(),
        BigRational::zero(),
        BigRational::zero(),
    );
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - &mx, b - &my);
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    if sxx.is_zero() || syy.is_zero() {
        return None;
    }
    let r2 = (&sxy * &sxy) / (sxx * syy);
    let sign = if sxy < BigRational::zero() { -1.0 } else { 1.0 };
    Some(sign * r2.to_f64().unwrap().sqrt())
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Supremum distance between the empirical cdf and the fitted normal,
/// evaluated on both sides of every distinct sample value.
fn brute_ks(xs: &[f64], mean: f64, sd: f64) -> f64 {
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for &v in xs {
        let le = xs.iter().filter(|&&y| y <= v).count() as f64 / n;
        let lt = xs.iter().filter(|&&y| y < v).count() as f64 / n;
        let f = normal_cdf((v - mean) / sd);
        d = d.max((le - f).abs()).max((f - lt).abs());
    }
    d
}

/// Alternating-series form of the Kolmogorov survival function.
fn series_survival(lambda: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..=100_000u64 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term == 0.0 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn stat_samples() -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut out = Vec::new();
    for (k, &n) in [5usize, 8, 13, 30, 57, 100, 221, 400, 777, 1000]
        .iter()
        .enumerate()
    {
        // continuous, skewed, and heavily tied samples
        out.push((0..n).map(|_| rng.gen::<f64>() * 10.0 - 3.0).collect());
        out.push((0..n).map(|_| (rng.gen::<f64>() * 3.0).exp()).collect());
        out.push(
            (0..n)
                .map(|_| rng.gen_range(0..(3 + k as i32)) as f64 * 0.5)
                .collect(),
        );
    }
    out
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    let samples = stat_samples();
    for (k, xs) in samples.iter().enumerate() {
        let s = stats::summarize(xs).unwrap();
        let e = exact_moments(xs);
        let mut cmp = |what: &str, got: f64, want: f64| {
            checked += 1;
            if rel_err(got, want) > STATS_REL_TOL {
                bad.push(format!(
                    "sample {k} (n={}): {what} {got:e} vs {want:e}",
                    xs.len()
                ));
            }
        };
        cmp("mean", s.mean, e.mean);
        cmp("sd", s.sd, e.sd);
        cmp("skewness", s.skewness.unwrap(), e.g1);
        cmp("kurtosis", s.kurtosis.unwrap(), e.g2);
        let d = brute_ks(xs, e.mean, e.sd);
        let ks = stats::ks_normal_test(xs).unwrap();
        cmp("ks statistic", ks.statistic, d);
        let lambda = (xs.len() as f64).sqrt() * ks.statistic;
        cmp("ks p-value", ks.p_value, series_survival(lambda));
        if let Some(j) = samples.get(k + 1).filter(|ys| ys.len() == xs.len()) {
            let got = stats::spearman(xs, j).unwrap().map(|c| c.rho);
            let want = exact_spearman(xs, j);
            checked += 1;
            match (got, want) {
                (Some(a), Some(b)) if rel_err(a, b) <= STATS_REL_TOL => {}
                (None, None) => {}
                _ => bad.push(format!("sample {k}: spearman {got:?} vs {want:?}")),
            }
        }
    }
    for lambda in [0.2, 0.5, 0.8, 1.0, 1.17, 1.18, 1.19, 1.5, 2.0, 3.0] {
        checked += 1;
        let (got, want) = (stats::kolmogorov_survival(lambda), series_survival(lambda));
        if rel_err(got, want) > STATS_REL_TOL {
            bad.push(format!("survival at {lambda}: {got:e} vs {want:e}"));
        }
    }
    let rho = stats::spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 5.0, 4.0])
        .unwrap()
        .unwrap()
        .rho;
    checked += 1;
    if rho != 0.8 {
        bad.push(format!(
            "spearman of the five-point example is {rho:?}, want exactly 0.8"
        ));
    }
    if bad.is_empty() {
        Ok(format!(
            "{checked} comparisons within {STATS_REL_TOL:e} relative"
        ))
    } else {
        Err(bad)
    }
}

/// Seven fields: a large self-reliant exporter, a mid-size balanced field
/// with little self-citation, a small importer and four fillers. `giant_scale`
/// shrinks the large field's exports to model earlier years.
fn planted(year: i32, giant_scale: f64) -> FieldFlowMatrix {
    let fields = ["GIANT", "MIDDLE", "SMALLIMP", "X1", "X2", "X3", "X4"];
    let mut rows: Vec<Vec<u64>> = vec![
        vec![900, 40, 5, 10, 10, 10, 10],
        vec![150, 60, 5, 10, 10, 10, 10],
        vec![80, 40, 4, 15, 10, 10, 10],
        vec![60, 20, 2, 30, 3, 3, 3],
        vec![60, 20, 2, 3, 30, 3, 3],
        vec![60, 20, 2, 3, 3, 30, 3],
        vec![60, 20, 2, 3, 3, 3, 30],
    ];
    for row in rows.iter_mut() {
        row[0] = (row[0] as f64 * giant_scale).round() as u64;
    }
    FieldFlowMatrix::from_rows(year, fields.iter().map(|s| s.to_string()).collect(), rows).unwrap()
}

fn criterion_9() -> Outcome {
    let years = [(2007, 0.64), (2008, 0.8), (2009, 1.0)];
    let ms: Vec<FieldFlowMatrix> = years.iter().map(|&(y, s)| planted(y, s)).collect();
    let mut periods = Vec::new();
    let mut increments = Vec::new();
    for w in ms.windows(2) {
        let inc = metrics::overall_increment(w[0].total(), w[1].total()).unwrap();
        periods.push(metrics::all_dynamics(&w[0], &w[1], None, inc).unwrap());
        increments.push(inc);
    }
    let part = metrics::acceleration_partition(&periods, &increments, &[]).unwrap();
    let ind = metrics::all_indicators(&ms[2], None);
    let c = taxonomy::classify(&ind, Some(&part), &ClassificationConfig::default()).unwrap();
    let types: BTreeMap<&str, &[TradeType]> = c
        .fields
        .iter()
        .map(|f| (f.field.as_str(), f.types.as_slice()))
        .collect();
    let mut bad = Vec::new();
    for (field, want) in [
        ("GIANT", TradeType::G),
        ("MIDDLE", TradeType::C),
        ("SMALLIMP", TradeType::F),
        ("GIANT", TradeType::I),
    ] {
        if !types[field].contains(&want) {
            bad.push(format!(
                "{field} has types {:?}, expected {want:?}",
                types[field]
            ));
        }
    }
    let middle = c.fields.iter().find(|f| f.field == "MIDDLE").unwrap();
    if middle.role != taxonomy::Role::Balanced {
        bad.push(format!(
            "MIDDLE role is {:?}, expected balanced",
            middle.role
        ));
    }
    if bad.is_empty() {
        Ok(format!(
            "GIANT {:?}, MIDDLE {:?}, SMALLIMP {:?}",
            types["GIANT"], types["MIDDLE"], types["SMALLIMP"]
        ))
    } else {
        Err(bad)
    }
}

fn scitrade(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_scitrade"))
        .current_dir(dir)
        .env_remove("SCITRADE_OUT")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "scitrade {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn pipeline(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let steps: &[&[&str]] = &[
        &[
            "synth",
            "--out",
            "data",
            "--n-categories",
            "12",
            "--journals-per-category",
            "10",
            "--multi-assign-fraction",
            "0.25",
            "--model",
            "preferential",
            "--exponent",
            "0.9",
            "--years",
            "2007,2008,2009",
            "--seed",
            "2024",
            "--total-edges",
            "30000",
        ],
        &[
            "build",
            "--out",
            "out",
            "--edges",
            "data/edges.csv",
            "--map",
            "data/map.csv",
            "--categories",
            "data/categories.csv",
        ],
        &[
            "metrics",
            "--out",
            "out",
            "--archive",
            "out/matrix_2007.json",
            "--archive",
            "out/matrix_2008.json",
            "--archive",
            "out/matrix_2009.json",
            "--publications",
            "data/publications.csv",
        ],
        &[
            "metrics",
            "--out",
            "out",
            "--format",
            "json",
            "--archive",
            "out/matrix_2009.json",
        ],
        &[
            "dynamics",
            "--out",
            "out",
            "--from",
            "out/matrix_2007.json",
            "--to",
            "out/matrix_2008.json",
            "--publications",
            "data/publications.csv",
        ],
        &[
            "dynamics",
            "--out",
            "out",
            "--from",
            "out/matrix_2008.json",
            "--to",
            "out/matrix_2009.json",
        ],
        &[
            "dynamics",
            "--out",
            "out",
            "--from",
            "out/matrix_2007.json",
            "--to",
            "out/matrix_2009.json",
        ],
        &[
            "classify",
            "--out",
            "out",
            "--archive",
            "out/matrix_2009.json",
            "--dynamics",
            "out/dynamics_2007_2008.csv",
            "--dynamics",
            "out/dynamics_2008_2009.csv",
        ],
        &[
            "stats",
            "--out",
            "out",
            "--input",
            "out/dynamics_2007_2009.csv",
            "--column",
            "export_growth",
            "--bins",
            "8",
            "--correlate",
            "exports_from",
        ],
        &[
            "rank",
            "--out",
            "out",
            "--input",
            "out/indicators.csv",
            "--column",
            "ratio",
            "--top-k",
            "5",
        ],
    ];
    for args in steps {
        scitrade(dir, args)?;
    }
    let mut files = BTreeMap::new();
    for sub in ["data", "out"] {
        for entry in fs::read_dir(dir.join(sub)).map_err(|e| e.to_string())? {
            let p = entry.map_err(|e| e.to_string())?.path();
            files.insert(
                format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()),
                fs::read(&p).unwrap(),
            );
        }
    }
    Ok(files)
}

fn criterion_10() -> Outcome {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let files = pipeline(dir.path());
            files.map_err(|e| vec![e])
        })
        .collect::<Result<_, _>>()?;
    let (a, b): (&BTreeMap<_, _>, &BTreeMap<_, _>) = (&runs[0], &runs[1]);
    let mut bad = Vec::new();
    if a.keys().ne(b.keys()) {
        bad.push(format!(
            "file sets differ: {:?} vs {:?}",
            a.keys(),
            b.keys()
        ));
    }
    for (name, body) in a {
        if b.get(name) != Some(body) {
            bad.push(format!("{name} differs between runs"));
        }
    }
    if a.len() < 15 {
        bad.push(format!("only {} files produced", a.len()));
    }
    if bad.is_empty() {
        Ok(format!("{} files byte-identical across two runs", a.len()))
    } else {
        Err(bad)
    }
}

fn main() {
    let mats = random_matrices(5);
    let criteria: Vec<Check> = vec![
        (
            1,
            "printed export/import and self-dependence ratios",
            Box::new(criterion_1),
        ),
        (
            2,
            "printed export and publication growth",
            Box::new(criterion_2),
        ),
        (3, "printed overall increments", Box::new(criterion_3)),
        (
            4,
            "standard errors of skewness and kurtosis at n = 221",
            Box::new(criterion_4),
        ),
        (
            5,
            "indicators equal brute-force references",
            Box::new(|| criterion_5(&mats)),
        ),
        (
            6,
            "conservation and antisymmetry",
            Box::new(|| criterion_6(&mats)),
        ),
        (7, "multiple counting", Box::new(criterion_7)),
        (
            8,
            "statistics against exact references",
            Box::new(criterion_8),
        ),
        (9, "planted taxonomy profiles", Box::new(criterion_9)),
        (
            10,
            "deterministic synth and pipeline",
            Box::new(criterion_10),
        ),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let start = std::time::Instant::now();
        match check() {
            Ok(detail) => println!(
                "criterion {n}: {name}: PASS ({detail}; {:.2?})",
                start.elapsed()
            ),
            Err(problems) => {
                failed += 1;
                println!("criterion {n}: {name}: FAIL");
                for p in problems {
                    println!("    {p}");
                }
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
