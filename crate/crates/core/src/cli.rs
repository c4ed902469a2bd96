//! `scitrade` command-line surface.
//!
//! Exit codes: 0 on success, 2 on input or validation errors, 3 when an
//! internal invariant check fails.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::archive::MatrixArchive;
use crate::error::{Error, Result};
use crate::ingest::{self, CitationEdge, PublicationCounts, UnmappedPolicy};
use crate::metrics::{self, DependenceRule, FieldIndicators};
use crate::report::{self, fmt_sig, RunManifest, Table};
use crate::stats;
use crate::synth::{self, EdgeModel, SynthSpec};
use crate::taxonomy::{self, ClassificationConfig};

pub const OUT_ENV: &str = "SCITRADE_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "scitrade",
    version,
    about = "Citation trade indicators between subject categories"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Restrict to one year.
    #[arg(long, global = true)]
    pub year: Option<i32>,
    /// Fail on journals without a category assignment (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    pub strict: bool,
    /// Drop edges with unassigned journals and report them.
    #[arg(long, global = true)]
    pub lenient: bool,
    /// Run configuration, as a JSON file path or an inline JSON object.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<String>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_ENV, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl GlobalOpts {
    fn policy(&self) -> UnmappedPolicy {
        if self.lenient {
            UnmappedPolicy::Lenient
        } else {
            UnmappedPolicy::Strict
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Uniform,
    Preferential,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate journal edges into field flow matrix archives.
    Build {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// `category,display_name` universe declaration.
        #[arg(long)]
        categories: Option<PathBuf>,
    },
    /// Per-field indicator table for one or more archives.
    Metrics {
        #[arg(long = "archive", required = true)]
        archives: Vec<PathBuf>,
        #[arg(long)]
        publications: Option<PathBuf>,
    },
    /// Export growth between two archives.
    Dynamics {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        publications: Option<PathBuf>,
        /// Journal-level total of the base year (default: from the archive).
        #[arg(long)]
        total_from: Option<u64>,
        #[arg(long)]
        total_to: Option<u64>,
    },
    /// Ten-type classification of one year's fields.
    Classify {
        #[arg(long)]
        archive: PathBuf,
        /// Dynamics CSV, one per period.
        #[arg(long = "dynamics")]
        dynamics: Vec<PathBuf>,
    },
    /// Distribution summary, plot data and rank correlations of CSV columns.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Further columns to correlate with `--column` (comma separated).
        #[arg(long, value_delimiter = ',')]
        correlate: Vec<String>,
    },
    /// Sort a CSV by a column.
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long, value_enum, default_value_t = Direction::Desc)]
        direction: Direction,
    },
    /// Generate a seeded synthetic dataset.
    Synth {
        /// JSON generator spec; overrides the flags below.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        n_categories: usize,
        #[arg(long, default_value_t = 20)]
        journals_per_category: usize,
        #[arg(long, default_value_t = 0.2)]
        multi_assign_fraction: f64,
        #[arg(long, value_enum, default_value_t = ModelArg::Uniform)]
        model: ModelArg,
        #[arg(long, default_value_t = 1.0)]
        exponent: f64,
        #[arg(long, value_delimiter = ',', default_value = "2007,2008,2009")]
        years: Vec<i32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        total_edges: usize,
        #[arg(long, default_value_t = 1)]
        edge_weight: u64,
    },
}

/// Settings read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub classification: ClassificationConfig,
    pub dependence_rule: DependenceRule,
    /// Fields dropped before the acceleration partition.
    pub exclude: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            classification: ClassificationConfig::default(),
            dependence_rule: DependenceRule::default(),
            exclude: vec!["MULTIDISCIPLINARY SCIENCES".into()],
        }
    }
}

impl RunConfig {
    pub fn load(arg: Option<&str>) -> Result<Self> {
        let Some(arg) = arg else {
            return Ok(RunConfig::default());
        };
        let text = if arg.trim_start().starts_with('{') {
            arg.to_string()
        } else {
            fs::read_to_string(arg).map_err(|e| Error::io(arg, e))?
        };
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("--config: {e}")))?;
        cfg.classification.validate()?;
        Ok(cfg)
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => 3,
        _ => 2,
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn with_source<T>(r: Result<T>, path: &Path) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            source_name: path.display().to_string(),
            line,
            message,
        },
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok((path, BufWriter::new(f)))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_with<F>(dir: &Path, name: &str, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let (path, mut w) = create(dir, name)?;
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn load_publications(path: Option<&PathBuf>) -> Result<Option<PublicationCounts>> {
    path.map(|p| with_source(ingest::parse_publications(open(p)?), p))
        .transpose()
}

/// Parses arguments and runs the selected command. Paths of written files
/// are printed to stdout.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
        ) {
            let _ = e.print();
            std::process::exit(0);
        }
        Error::Config(e.to_string())
    })?;
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let config = RunConfig::load(g.config.as_deref())?;
    let written = match &cli.command {
        Command::Build {
            edges,
            map,
            categories,
        } => cmd_build(g, edges, map, categories.as_deref())?,
        Command::Metrics {
            archives,
            publications,
        } => cmd_metrics(g, archives, publications.as_ref())?,
        Command::Dynamics {
            from,
            to,
            publications,
            total_from,
            total_to,
        } => cmd_dynamics(g, from, to, publications.as_ref(), *total_from, *total_to)?,
        Command::Classify { archive, dynamics } => cmd_classify(g, &config, archive, dynamics)?,
        Command::Stats {
            input,
            column,
            bins,
            correlate,
        } => cmd_stats(g, input, column, *bins, correlate)?,
        Command::Rank {
            input,
            column,
            top_k,
            direction,
        } => cmd_rank(g, input, column, *top_k, *direction)?,
        Command::Synth {
            spec,
            n_categories,
            journals_per_category,
            multi_assign_fraction,
            model,
            exponent,
            years,
            seed,
            total_edges,
            edge_weight,
        } => {
            let spec = match spec {
                Some(p) => serde_json::from_reader(open(p)?)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
                None => SynthSpec {
                    n_categories: *n_categories,
                    journals_per_category: *journals_per_category,
                    multi_assign_fraction: *multi_assign_fraction,
                    edge_model: match model {
                        ModelArg::Uniform => EdgeModel::Uniform,
                        ModelArg::Preferential => EdgeModel::SkewedPreferential {
                            exponent: *exponent,
                        },
                    },
                    years: years.clone(),
                    seed: *seed,
                    total_edges: *total_edges,
                    edge_weight: *edge_weight,
                },
            };
            cmd_synth(g, &spec)?
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for p in written {
        let _ = writeln!(lock, "{}", p.display());
    }
    Ok(())
}

fn expected_cell_sum(edges: &[CitationEdge], map: &ingest::CategoryMap, year: i32) -> u64 {
    edges
        .iter()
        .filter(|e| e.year == year)
        .filter_map(|e| {
            let s = map.journal_categories(&e.citing_journal)?.len() as u64;
            let t = map.journal_categories(&e.cited_journal)?.len() as u64;
            Some(e.count * s * t)
        })
        .sum()
}

pub fn cmd_build(
    g: &GlobalOpts,
    edges_path: &Path,
    map_path: &Path,
    categories: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    let edges = with_source(ingest::parse_edges(open(edges_path)?), edges_path)?;
    let declared = match categories {
        Some(p) => with_source(ingest::parse_category_universe(open(p)?), p)?,
        None => Vec::new(),
    };
    let map = with_source(
        ingest::parse_category_map(open(map_path)?, declared),
        map_path,
    )?;
    let years = match g.year {
        Some(y) => vec![y],
        None => ingest::edge_years(&edges),
    };
    if years.is_empty() {
        return Err(Error::Validation(format!(
            "{}: no edges",
            edges_path.display()
        )));
    }
    let policy = g.policy();
    let mut manifest = RunManifest::new(years.clone());
    manifest.add_input("edges", edges_path)?;
    manifest.add_input("map", map_path)?;
    if let Some(p) = categories {
        manifest.add_input("categories", p)?;
    }
    manifest.policy = Some(format!("{policy:?}").to_lowercase());

    let mut written = Vec::new();
    for year in years {
        let built = ingest::build_flow_matrix(&edges, &map, year, policy)?;
        let m = &built.matrix;
        let expected = expected_cell_sum(&edges, &map, year);
        let exports: u64 = (0..m.dim()).map(|f| m.exports(f)).sum();
        if m.total() != expected || exports != m.total() {
            return Err(Error::Invariant(format!(
                "year {year}: cell sum {} but expansion of edges gives {expected}",
                m.total()
            )));
        }
        let archive = MatrixArchive {
            matrix: built.matrix.clone(),
            categories: map.categories().to_vec(),
            grand_total_citations: ingest::grand_total_citations(&edges, year),
            skipped_edges: built.skipped.len(),
            manifest: manifest.clone(),
        };
        written.push(archive.write(&g.out, &format!("matrix_{year}"))?);
        if policy == UnmappedPolicy::Lenient {
            written.push(write_with(&g.out, &format!("skipped_{year}.csv"), |w| {
                report::write_skipped_csv(w, &built.skipped)
            })?);
        }
    }
    Ok(written)
}

fn load_archives(paths: &[PathBuf], year: Option<i32>) -> Result<Vec<MatrixArchive>> {
    let mut out = Vec::new();
    for p in paths {
        let a = MatrixArchive::read(p)?;
        if year.is_none_or(|y| y == a.matrix.year()) {
            out.push(a);
        }
    }
    Ok(out)
}

fn check_conservation(rows: &[FieldIndicators]) -> Result<()> {
    let net: i64 = rows.iter().map(|r| r.net_balance).sum();
    let exports: u64 = rows.iter().map(|r| r.exports).sum();
    let imports: u64 = rows.iter().map(|r| r.imports).sum();
    if net != 0 || exports != imports {
        return Err(Error::Invariant(format!(
            "net balances sum to {net}; exports {exports} vs imports {imports}"
        )));
    }
    Ok(())
}

pub fn cmd_metrics(
    g: &GlobalOpts,
    archives: &[PathBuf],
    publications: Option<&PathBuf>,
) -> Result<Vec<PathBuf>> {
    let pubs = load_publications(publications)?;
    let mut rows = Vec::new();
    for a in load_archives(archives, g.year)? {
        let ind = metrics::all_indicators(&a.matrix, pubs.as_ref());
        check_conservation(&ind)?;
        rows.extend(ind);
    }
    let path = match g.format {
        Format::Csv => write_with(&g.out, "indicators.csv", |w| {
            report::write_indicators_csv(w, &rows)
        })?,
        Format::Json => write_json(&g.out, "indicators.json", &report::indicators_json(&rows))?,
    };
    Ok(vec![path])
}

pub fn cmd_dynamics(
    g: &GlobalOpts,
    from: &Path,
    to: &Path,
    publications: Option<&PathBuf>,
    total_from: Option<u64>,
    total_to: Option<u64>,
) -> Result<Vec<PathBuf>> {
    let a = MatrixArchive::read(from)?;
    let b = MatrixArchive::read(to)?;
    let pubs = load_publications(publications)?;
    let overall = metrics::overall_increment(
        total_from.unwrap_or(a.grand_total_citations),
        total_to.unwrap_or(b.grand_total_citations),
    )?;
    let recs = metrics::all_dynamics(&a.matrix, &b.matrix, pubs.as_ref(), overall)?;
    let stem = format!("dynamics_{}_{}", a.matrix.year(), b.matrix.year());
    let path = match g.format {
        Format::Csv => write_with(&g.out, &format!("{stem}.csv"), |w| {
            report::write_dynamics_csv(w, &recs)
        })?,
        Format::Json => write_json(
            &g.out,
            &format!("{stem}.json"),
            &serde_json::to_value(&recs)?,
        )?,
    };
    Ok(vec![path])
}

pub fn cmd_classify(
    g: &GlobalOpts,
    config: &RunConfig,
    archive: &Path,
    dynamics: &[PathBuf],
) -> Result<Vec<PathBuf>> {
    let a = MatrixArchive::read(archive)?;
    let indicators = metrics::all_indicators(&a.matrix, None);
    let mut periods = Vec::new();
    let mut increments = Vec::new();
    for p in dynamics {
        let recs = with_source(
            report::read_dynamics_csv(open(p)?, &p.display().to_string()),
            p,
        )?;
        let inc = recs
            .first()
            .map(|r| r.overall_increment)
            .ok_or_else(|| Error::Validation(format!("{}: no dynamics rows", p.display())))?;
        increments.push(inc);
        periods.push(recs);
    }
    let partition = if periods.is_empty() {
        None
    } else {
        Some(metrics::acceleration_partition(
            &periods,
            &increments,
            &config.exclude,
        )?)
    };
    let c = taxonomy::classify(&indicators, partition.as_ref(), &config.classification)?;

    let mut manifest = RunManifest::new(vec![a.matrix.year()]);
    manifest.add_input("archive", archive)?;
    for p in dynamics {
        manifest.add_input("dynamics", p)?;
    }
    manifest.policy = a.manifest.policy.clone();
    manifest.config = Some(serde_json::to_value(config)?);
    let stem = format!("classification_{}", a.matrix.year());
    Ok(vec![
        write_with(&g.out, &format!("{stem}.csv"), |w| {
            report::write_classification_csv(w, &c)
        })?,
        write_json(
            &g.out,
            &format!("{stem}.json"),
            &report::classification_json(&c, &manifest),
        )?,
    ])
}

fn unknown_column(name: &str, table: &Table) -> Error {
    Error::Validation(format!(
        "unknown column `{name}`; valid columns: {}",
        table.headers.join(", ")
    ))
}

fn numeric_column(
    table: &Table,
    name: &str,
    rows: &[usize],
    source: &str,
) -> Result<Vec<Option<f64>>> {
    let c = table
        .column(name)
        .ok_or_else(|| unknown_column(name, table))?;
    rows.iter()
        .map(|&r| {
            let s = table.rows[r].get(c).map(String::as_str).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<f64>().map(Some).map_err(|_| {
                Error::parse(source, r as u64 + 2, format!("non-numeric {name} `{s}`"))
            })
        })
        .collect()
}

pub fn cmd_stats(
    g: &GlobalOpts,
    input: &Path,
    column: &str,
    bins: usize,
    correlate: &[String],
) -> Result<Vec<PathBuf>> {
    let src = input.display().to_string();
    let table = Table::read(open(input)?, &src)?;
    let year_col = table.column("year");
    let rows: Vec<usize> = (0..table.rows.len())
        .filter(|&r| match (g.year, year_col) {
            (Some(y), Some(c)) => table.rows[r].get(c).is_some_and(|v| v == &y.to_string()),
            _ => true,
        })
        .collect();
    let values: Vec<f64> = numeric_column(&table, column, &rows, &src)?
        .into_iter()
        .flatten()
        .collect();
    let summary = stats::summarize(&values)?;
    let plot = stats::plot_data(&values, bins)?;
    let mut written = vec![
        write_with(&g.out, &format!("summary_{column}.csv"), |w| {
            report::write_summary_csv(w, &[(column.to_string(), summary)])
        })?,
        write_with(&g.out, &format!("histogram_{column}.csv"), |w| {
            report::write_histogram_csv(w, &plot)
        })?,
        write_with(&g.out, &format!("qq_{column}.csv"), |w| {
            report::write_qq_csv(w, &plot)
        })?,
    ];
    if !correlate.is_empty() {
        let base = numeric_column(&table, column, &rows, &src)?;
        let mut out = Vec::new();
        for other in correlate {
            let ys = numeric_column(&table, other, &rows, &src)?;
            let (a, b): (Vec<f64>, Vec<f64>) = base
                .iter()
                .zip(&ys)
                .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
                .unzip();
            out.push((
                column.to_string(),
                other.clone(),
                a.len(),
                stats::spearman(&a, &b)?,
            ));
        }
        written.push(write_with(
            &g.out,
            &format!("spearman_{column}.csv"),
            |w| report::write_spearman_csv(w, &out),
        )?);
    }
    Ok(written)
}

type Derivation = (usize, usize, fn(f64, f64) -> Option<f64>);

/// Columns `rank` can derive when the input lacks them.
fn derive_column(table: &Table, name: &str) -> Option<Vec<String>> {
    let get = |c: &str| table.column(c);
    let num = |row: &[String], c: usize| row.get(c).and_then(|s| s.parse::<f64>().ok());
    let (a, b, op): Derivation = match name {
        "ratio" => (get("exports")?, get("imports")?, |e, i| {
            (i > 0.0).then(|| e / i)
        }),
        "self_dependence" => (get("self_citations")?, get("exports")?, |s, e| {
            (e > 0.0).then(|| s / e)
        }),
        "hub_size" => (get("exports")?, get("imports")?, |e, i| Some(e + i)),
        "net_balance" => (get("exports")?, get("imports")?, |e, i| Some(e - i)),
        _ => return None,
    };
    Some(
        table
            .rows
            .iter()
            .map(|r| match (num(r, a), num(r, b)) {
                (Some(x), Some(y)) => op(x, y).map(fmt_sig).unwrap_or_default(),
                _ => String::new(),
            })
            .collect(),
    )
}

/// Sorts `table` by `column`; ties and equal values fall back to the field
/// (first) column ascending, and empty or non-numeric values go last.
pub fn rank_table(
    mut table: Table,
    column: &str,
    top_k: usize,
    direction: Direction,
) -> Result<Table> {
    let c = match table.column(column) {
        Some(c) => c,
        None => {
            let derived =
                derive_column(&table, column).ok_or_else(|| unknown_column(column, &table))?;
            table.headers.push(column.to_string());
            for (row, v) in table.rows.iter_mut().zip(derived) {
                row.push(v);
            }
            table.headers.len() - 1
        }
    };
    let key_col = table.column("field").unwrap_or(0);
    let mut rows: Vec<(Option<f64>, Vec<String>)> = table
        .rows
        .into_iter()
        .map(|r| (r.get(c).and_then(|s| s.parse::<f64>().ok()), r))
        .collect();
    rows.sort_by(|(x, rx), (y, ry)| {
        let primary = match (x, y) {
            (Some(a), Some(b)) => match direction {
                Direction::Desc => b.total_cmp(a),
                Direction::Asc => a.total_cmp(b),
            },
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        };
        primary.then_with(|| rx.get(key_col).cmp(&ry.get(key_col)))
    });
    let mut headers = vec!["rank".to_string()];
    headers.extend(table.headers);
    Ok(Table {
        headers,
        rows: rows
            .into_iter()
            .take(top_k)
            .enumerate()
            .map(|(i, (_, r))| {
                let mut out = vec![(i + 1).to_string()];
                out.extend(r);
                out
            })
            .collect(),
    })
}

pub fn cmd_rank(
    g: &GlobalOpts,
    input: &Path,
    column: &str,
    top_k: usize,
    direction: Direction,
) -> Result<Vec<PathBuf>> {
    let table = Table::read(open(input)?, &input.display().to_string())?;
    let ranked = rank_table(table, column, top_k, direction)?;
    Ok(vec![write_with(
        &g.out,
        &format!("rank_{column}.csv"),
        |w| ranked.write(w),
    )?])
}

pub fn cmd_synth(g: &GlobalOpts, spec: &SynthSpec) -> Result<Vec<PathBuf>> {
    let data = synth::generate(spec)?;
    let header = format!("# seed={} rng={}\n", spec.seed, synth::RNG_NAME);
    let emit = |name: &str, body: &dyn Fn(&mut csv::Writer<&mut BufWriter<File>>) -> Result<()>| {
        write_with(&g.out, name, |w| {
            w.write_all(header.as_bytes())
                .map_err(|e| Error::io(name, e))?;
            let mut wr = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(w);
            body(&mut wr)?;
            wr.flush().map_err(|e| Error::io(name, e))?;
            Ok(())
        })
    };
    let mut written = Vec::new();
    written.push(emit("edges.csv", &|wr| {
        wr.write_record(ingest::EDGES_HEADER)?;
        for e in &data.edges {
            wr.write_record([
                e.citing_journal.as_str(),
                &e.cited_journal,
                &e.year.to_string(),
                &e.count.to_string(),
            ])?;
        }
        Ok(())
    })?);
    written.push(emit("categories.csv", &|wr| {
        wr.write_record(ingest::UNIVERSE_HEADER)?;
        for c in data.map.categories() {
            wr.write_record([&c.id, &c.display_name])?;
        }
        Ok(())
    })?);
    written.push(emit("map.csv", &|wr| {
        wr.write_record(ingest::MAP_HEADER)?;
        for (j, cats) in data.map.journals() {
            for &c in cats {
                wr.write_record([j, &data.map.categories()[c].id])?;
            }
        }
        Ok(())
    })?);
    written.push(emit("publications.csv", &|wr| {
        wr.write_record(ingest::PUBLICATIONS_HEADER)?;
        for (c, y, p) in data.publications.iter() {
            wr.write_record([c, &y.to_string(), &p.to_string()])?;
        }
        Ok(())
    })?);
    written.push(write_json(
        &g.out,
        "synth_spec.json",
        &serde_json::to_value(spec)?,
    )?);
    Ok(written)
}
