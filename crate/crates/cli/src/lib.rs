//! Command-line front end for `markerdrift`.
//!
//! [`run`] is the whole program minus process exit, so tests can drive it
//! in-process. Exit codes: 0 success, 1 data or validation error, 2 I/O or
//! usage error.

use std::fs::File;
use std::io::{BufReader, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use markerdrift::corpus::{write_corpus, DEFAULT_YEAR_RANGE};
use markerdrift::counts::CountsError;
use markerdrift::index::IndexError;
use markerdrift::lexicon::LexiconError;
use markerdrift::plot::{render_svg, Metric, PlotSpec};
use markerdrift::report::{excess_report, render_drift, render_excess, ExcessRow};
use markerdrift::stats::{StatsError, DEFAULT_GROWTH_SINGLE};
use markerdrift::synth::{generate, SynthConfig, YearPlan};
use markerdrift::{
    build_index, builtin_lexicon, eval_count_scan, export_counts, import_counts, load_corpus,
    load_index, load_lexicon, parse_query, save_index, CountSeries, CountTable, Document,
    DriftOptions, ErrorPolicy, Format, Lexicon, LoadOptions, QueryError, YearTermIndex,
};
use thiserror::Error;

/// Series drawn from an index when none are named.
const DEFAULT_INDEX_SERIES: [&str; 3] = ["any(strong)", "any(medium)", "any(weak)"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 1,
            CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }

    fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn corpus_err(path: &Path, e: markerdrift::corpus::CorpusError) -> CliError {
    match e {
        markerdrift::corpus::CorpusError::Io(io) => CliError::io(path, io),
        other => CliError::Data(format!("{}: {other}", path.display())),
    }
}

fn index_err(path: &Path, e: IndexError) -> CliError {
    match e {
        IndexError::Io(io) => CliError::io(path, io),
        other => CliError::Data(format!("{}: {other}", path.display())),
    }
}

fn counts_err(path: &Path, e: CountsError) -> CliError {
    match e {
        CountsError::Io(io) => CliError::io(path, io),
        other => CliError::Data(format!("{}: {other}", path.display())),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "markerdrift",
    version,
    about = "Track marker-word drift in dated document corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a year/term index from a JSONL corpus.
    Index(IndexArgs),
    /// Per-year shares, year-on-year changes and increases for each series.
    Drift(DriftArgs),
    /// Actual count against a grown baseline for each series.
    Excess(ExcessArgs),
    /// Per-year counts for one query.
    Query(QueryArgs),
    /// Draw series as a standalone SVG line chart.
    Plot(PlotArgs),
    /// Import or export count tables.
    #[command(subcommand)]
    Counts(CountsCommand),
    /// Print a lexicon (the builtin one unless --lexicon is given) as JSON.
    Lexicon(LexiconArgs),
    /// Generate a synthetic corpus with planted marker terms.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Text,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum OnError {
    #[default]
    Abort,
    Skip,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum MetricArg {
    #[default]
    YoyChange,
    Share,
    Count,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::YoyChange => Metric::YoyChange,
            MetricArg::Share => Metric::Share,
            MetricArg::Count => Metric::Count,
        }
    }
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Lexicon JSON file; the builtin lexicon by default.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Where to write the index file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub on_error: OnError,
    /// First accepted publication year.
    #[arg(long)]
    pub from: Option<i32>,
    /// Last accepted publication year.
    #[arg(long)]
    pub to: Option<i32>,
}

/// Where yearly counts come from: a count table, an index, or a corpus
/// indexed on the fly.
#[derive(Debug, Args)]
pub struct SourceArgs {
    #[arg(long, conflicts_with_all = ["index", "corpus"])]
    pub counts: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Series to report: ids from a count table, or queries against an index.
    /// Repeatable.
    #[arg(long = "series")]
    pub series: Vec<String>,
    #[arg(long)]
    pub from: Option<i32>,
    #[arg(long)]
    pub to: Option<i32>,
    #[arg(long, value_enum, default_value_t)]
    pub on_error: OnError,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub base_year: Option<i32>,
    #[arg(long)]
    pub target_year: Option<i32>,
    #[arg(long, default_value_t = DEFAULT_GROWTH_SINGLE)]
    pub growth: f64,
    /// Denominator for the excess share (defaults to the target-year total).
    #[arg(long)]
    pub total: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExcessArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub base_year: Option<i32>,
    #[arg(long)]
    pub target_year: Option<i32>,
    /// Organic yearly growth allowed before counting excess.
    #[arg(long, default_value_t = DEFAULT_GROWTH_SINGLE)]
    pub growth: f64,
    #[arg(long)]
    pub total: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Query text, e.g. `atleast(2, strong) AND any(disclosure)`.
    pub query: String,
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Corpus to scan for terms the index does not cover.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub from: Option<i32>,
    #[arg(long)]
    pub to: Option<i32>,
    #[arg(long, value_enum, default_value_t)]
    pub on_error: OnError,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t)]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 480)]
    pub height: u32,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CountsCommand {
    /// Validate a count table and summarise (or normalise) it.
    Import {
        #[arg(long)]
        counts: PathBuf,
        /// Write the table back out in canonical form.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write per-year query counts from an index or corpus as a count table.
    Export {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub from: i32,
    /// Documents per year.
    #[arg(long)]
    pub docs: usize,
    /// Marked documents per year, comma separated, one value per year
    /// starting at --from.
    #[arg(long, value_delimiter = ',', required = true)]
    pub marked: Vec<usize>,
    /// Lexicon group whose terms are planted.
    #[arg(long, default_value = "strong")]
    pub markers: String,
    #[arg(long, default_value_t = 200)]
    pub words: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Index(a) => cmd_index(a, stdout, stderr),
        Command::Drift(a) => cmd_drift(a, stdout, stderr),
        Command::Excess(a) => cmd_excess(a, stdout, stderr),
        Command::Query(a) => cmd_query(a, stdout, stderr),
        Command::Plot(a) => cmd_plot(a, stdout, stderr),
        Command::Counts(CountsCommand::Import { counts, out }) => {
            cmd_counts_import(&counts, out, stdout)
        }
        Command::Counts(CountsCommand::Export { source, out }) => {
            cmd_counts_export(source, out, stdout, stderr)
        }
        Command::Lexicon(a) => cmd_lexicon(a, stdout),
        Command::Synth(a) => cmd_synth(a, stdout),
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn lexicon_from(path: Option<&Path>) -> Result<Lexicon, CliError> {
    match path {
        None => Ok(builtin_lexicon()),
        Some(p) => load_lexicon(p).map_err(|e| match e {
            LexiconError::Io { .. } => CliError::Io {
                path: p.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            other => CliError::data(other),
        }),
    }
}

fn year_range(from: Option<i32>, to: Option<i32>) -> Result<Option<RangeInclusive<i32>>, CliError> {
    match (from, to) {
        (None, None) => Ok(None),
        (f, t) => {
            let r = f.unwrap_or(i32::MIN)..=t.unwrap_or(i32::MAX);
            if r.is_empty() {
                return Err(CliError::Usage(format!(
                    "--from {} is after --to {}",
                    r.start(),
                    r.end()
                )));
            }
            Ok(Some(r))
        }
    }
}

fn read_corpus(
    path: &Path,
    policy: OnError,
    years: RangeInclusive<i32>,
    stderr: &mut dyn Write,
) -> Result<Vec<Document>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let opts = LoadOptions {
        policy: match policy {
            OnError::Abort => ErrorPolicy::Abort,
            OnError::Skip => ErrorPolicy::Skip,
        },
        years,
    };
    let loaded = load_corpus(BufReader::new(file), &opts).map_err(|e| corpus_err(path, e))?;
    for e in &loaded.skipped {
        let _ = writeln!(stderr, "warning: {}: skipped {e}", path.display());
    }
    Ok(loaded.documents)
}

fn cmd_index(a: IndexArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let lex = lexicon_from(a.lexicon.as_deref())?;
    let years =
        a.from.unwrap_or(*DEFAULT_YEAR_RANGE.start())..=a.to.unwrap_or(*DEFAULT_YEAR_RANGE.end());
    let docs = read_corpus(&a.corpus, a.on_error, years, stderr)?;
    let idx = build_index(&docs, &lex).map_err(|e| index_err(&a.corpus, e))?;
    save_index(&idx, &a.out).map_err(|e| index_err(&a.out, e))?;
    let mut text = format!(
        "indexed {} documents into {}\n",
        idx.doc_count(),
        a.out.display()
    );
    for (year, total) in idx.totals() {
        text.push_str(&format!("{year}\t{total}\n"));
    }
    emit(None, &text, stdout)
}

/// Opens the index named by the arguments, or builds one from the corpus.
fn open_index(
    index: Option<&Path>,
    corpus: Option<&[Document]>,
    corpus_path: Option<&Path>,
    lexicon: Option<&Path>,
) -> Result<YearTermIndex, CliError> {
    match (index, corpus) {
        (Some(p), _) => load_index(p).map_err(|e| index_err(p, e)),
        (None, Some(docs)) => {
            let lex = lexicon_from(lexicon)?;
            build_index(docs, &lex)
                .map_err(|e| index_err(corpus_path.unwrap_or(Path::new("corpus")), e))
        }
        (None, None) => Err(CliError::Usage(
            "one of --counts, --index or --corpus is required".into(),
        )),
    }
}

fn load_series(src: &SourceArgs, stderr: &mut dyn Write) -> Result<Vec<CountSeries>, CliError> {
    let mut series = if let Some(path) = &src.counts {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let table = import_counts(BufReader::new(file)).map_err(|e| counts_err(path, e))?;
        if src.series.is_empty() {
            table.iter().cloned().collect()
        } else {
            src.series
                .iter()
                .map(|id| {
                    table.get(id).cloned().ok_or_else(|| {
                        CliError::Data(format!("unknown series {id:?} in {}", path.display()))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    } else {
        let docs = match (&src.index, &src.corpus) {
            (None, Some(p)) => Some(read_corpus(p, src.on_error, DEFAULT_YEAR_RANGE, stderr)?),
            _ => None,
        };
        let idx = open_index(
            src.index.as_deref(),
            docs.as_deref(),
            src.corpus.as_deref(),
            src.lexicon.as_deref(),
        )?;
        let queries: Vec<String> = if src.series.is_empty() {
            DEFAULT_INDEX_SERIES.iter().map(|s| s.to_string()).collect()
        } else {
            src.series.clone()
        };
        queries
            .iter()
            .map(|text| {
                let q = parse_query(text, &idx).map_err(CliError::data)?;
                CountSeries::from_index(text.as_str(), &idx, &q).map_err(CliError::data)
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if let Some(window) = year_range(src.from, src.to)? {
        for s in &series {
            if s.window(&window).points().is_empty() {
                return Err(CliError::Data(format!(
                    "series {:?} has no data between {} and {}",
                    s.id(),
                    window.start(),
                    window.end()
                )));
            }
        }
        // Keep the year before the window so its first change is defined.
        let padded = window.start().saturating_sub(1)..=*window.end();
        series = series.iter().map(|s| s.window(&padded)).collect();
    }
    Ok(series)
}

/// Last year of `series` within the requested window.
fn default_target(series: &CountSeries, src: &SourceArgs) -> Option<i32> {
    let window = src.from.unwrap_or(i32::MIN)..=src.to.unwrap_or(i32::MAX);
    series.years().filter(|y| window.contains(y)).last()
}

fn cmd_drift(a: DriftArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let series = load_series(&a.source, stderr)?;
    let mut reports = Vec::with_capacity(series.len());
    for s in &series {
        let opts = DriftOptions {
            years: year_range(a.source.from, a.source.to)?,
            base_year: a.base_year,
            target_year: a.target_year.or_else(|| default_target(s, &a.source)),
            growth: a.growth,
            total: a.total,
        };
        let target_defaulted = a.target_year.is_none() && a.base_year.is_none();
        match markerdrift::report::series_report(s, &opts) {
            Ok(r) => reports.push(r),
            // A defaulted pair that is not available just leaves the
            // increase columns empty.
            Err(StatsError::MissingYear { .. }) if target_defaulted => {
                let opts = DriftOptions {
                    target_year: None,
                    ..opts
                };
                reports.push(markerdrift::report::series_report(s, &opts).map_err(CliError::data)?);
            }
            Err(e) => return Err(CliError::data(e)),
        }
    }
    let report = markerdrift::DriftReport { series: reports };
    emit(
        a.out.as_deref(),
        &render_drift(&report, a.format.into()),
        stdout,
    )
}

fn cmd_excess(
    a: ExcessArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let series = load_series(&a.source, stderr)?;
    let rows = series
        .iter()
        .map(|s| {
            let target = a
                .target_year
                .or_else(|| default_target(s, &a.source))
                .ok_or_else(|| CliError::Data(format!("series {:?} has no target year", s.id())))?;
            let base = a.base_year.unwrap_or(target - 1);
            let excess =
                excess_report(s, base, target, a.growth, a.total).map_err(CliError::data)?;
            Ok(ExcessRow {
                series: s.id().to_string(),
                excess,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(
        a.out.as_deref(),
        &render_excess(&rows, a.format.into()),
        stdout,
    )
}

#[derive(serde::Serialize)]
struct QueryRow {
    year: i32,
    matches: u64,
    total: u64,
    share: f64,
}

fn cmd_query(a: QueryArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let docs = match &a.corpus {
        Some(p) => Some(read_corpus(p, a.on_error, DEFAULT_YEAR_RANGE, stderr)?),
        None => None,
    };
    let idx = open_index(
        a.index.as_deref(),
        docs.as_deref(),
        a.corpus.as_deref(),
        a.lexicon.as_deref(),
    )?;
    let lex = lexicon_from(a.lexicon.as_deref())?;
    let q = parse_query(&a.query, &idx).map_err(CliError::data)?;
    let window = year_range(a.from, a.to)?.unwrap_or(i32::MIN..=i32::MAX);
    let mut rows = Vec::new();
    for &year in idx.years().iter().filter(|y| window.contains(y)) {
        let matches = match idx.eval_count(&q, year) {
            Ok(n) => n,
            Err(QueryError::Unindexed(term)) => match &docs {
                Some(docs) => eval_count_scan(docs, &lex, &q, year),
                None => {
                    return Err(CliError::Data(format!(
                        "{term} is not in the index vocabulary; pass --corpus to scan for it"
                    )))
                }
            },
            Err(e) => return Err(CliError::data(e)),
        };
        let total = idx.total(year).unwrap_or(0);
        rows.push(QueryRow {
            year,
            matches,
            total,
            share: if total == 0 {
                0.0
            } else {
                matches as f64 / total as f64
            },
        });
    }
    let text = match Format::from(a.format) {
        Format::Text => {
            let mut t = format!(
                "query: {q}\n{:>6}  {:>10}  {:>10}  {:>8}\n",
                "year", "matches", "total", "share"
            );
            for r in &rows {
                t.push_str(&format!(
                    "{:>6}  {:>10}  {:>10}  {:>8}\n",
                    r.year,
                    r.matches,
                    r.total,
                    markerdrift::report::share_pct(r.share)
                ));
            }
            t
        }
        Format::Csv => {
            let mut t = String::from("year,matches,total,share\n");
            for r in &rows {
                t.push_str(&format!(
                    "{},{},{},{}\n",
                    r.year, r.matches, r.total, r.share
                ));
            }
            t
        }
        Format::Json => {
            let v = serde_json::json!({ "query": q.to_string(), "counts": rows });
            serde_json::to_string_pretty(&v).expect("rows serialize") + "\n"
        }
    };
    emit(a.out.as_deref(), &text, stdout)
}

fn cmd_plot(a: PlotArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let series = load_series(&a.source, stderr)?;
    let first = series.iter().filter_map(|s| s.years().next()).min();
    let last = series.iter().filter_map(|s| s.years().last()).max();
    let years = match (first, last) {
        (Some(f), Some(l)) => a.source.from.unwrap_or(f)..=a.source.to.unwrap_or(l),
        _ => return Err(CliError::Data("no series data to plot".into())),
    };
    let mut spec = PlotSpec::new(series, a.metric.into(), years);
    spec.width = a.width;
    spec.height = a.height;
    spec.title = a.title;
    let svg = render_svg(&spec).map_err(CliError::data)?;
    emit(a.out.as_deref(), &svg, stdout)
}

fn cmd_counts_import(
    path: &Path,
    out: Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let table = import_counts(BufReader::new(file)).map_err(|e| counts_err(path, e))?;
    match out {
        Some(out) => write_table(&table, Some(&out), stdout),
        None => {
            let mut text = format!("{} series\n", table.len());
            for s in table.iter() {
                let years: Vec<i32> = s.years().collect();
                text.push_str(&format!(
                    "{}\t{} years\t{}-{}\n",
                    s.id(),
                    years.len(),
                    years.first().copied().unwrap_or_default(),
                    years.last().copied().unwrap_or_default()
                ));
            }
            emit(None, &text, stdout)
        }
    }
}

fn write_table(
    table: &CountTable,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    export_counts(table, &mut buf).map_err(CliError::data)?;
    emit(
        out,
        &String::from_utf8(buf).expect("csv output is UTF-8"),
        stdout,
    )
}

fn cmd_counts_export(
    source: SourceArgs,
    out: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    if source.counts.is_some() {
        return Err(CliError::Usage(
            "counts export reads --index or --corpus".into(),
        ));
    }
    let series = load_series(&source, stderr)?;
    write_table(&series.into_iter().collect(), out.as_deref(), stdout)
}

fn cmd_lexicon(a: LexiconArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let lex = lexicon_from(a.lexicon.as_deref())?;
    emit(a.out.as_deref(), &(lex.to_json() + "\n"), stdout)
}

fn cmd_synth(a: SynthArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let lex = builtin_lexicon();
    let markers = lex
        .group(&a.markers)
        .ok_or_else(|| CliError::Usage(format!("unknown lexicon group {:?}", a.markers)))?
        .to_vec();
    let mut plan = Vec::with_capacity(a.marked.len());
    for (i, &marked) in a.marked.iter().enumerate() {
        if marked > a.docs {
            return Err(CliError::Usage(format!(
                "{marked} marked documents exceed --docs {}",
                a.docs
            )));
        }
        plan.push(YearPlan {
            year: a.from + i as i32,
            docs: a.docs,
            marked,
        });
    }
    let mut cfg = SynthConfig::new(a.seed, plan, markers).excluding_lexicon(&lex);
    cfg.words_per_doc = a.words;
    let docs = generate(&cfg);
    let mut buf = Vec::new();
    write_corpus(&docs, &mut buf).expect("writing to memory");
    emit(
        a.out.as_deref(),
        &String::from_utf8(buf).expect("JSON is UTF-8"),
        stdout,
    )
}
