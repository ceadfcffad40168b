//! `tdlens` command-line surface.
//!
//! Every subcommand maps onto library calls. Failures print exactly one line
//! on stderr, `error: kind=<kind> message=<text>`, and exit with 1; a crawl
//! that skipped pages exits with 2.
//!
//! A `--config <file>` of flat `key = value` lines fills in flags that were
//! not given on the command line. Keys before any `[section]` apply to every
//! subcommand; keys under `[train]` etc. only to that one.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{
    correlation_matrix, distribution, growth, impact, impact_to_csv, package_first_years,
    packages_by_year, per_package_counts, trend, type_totals, PackageCountMode, TrendSeries,
    REFERENCE_GROWTH,
};
use crate::corpus::crawl::{CrawlConfig, Crawler, RepoCoordinate, DEFAULT_API_BASE};
use crate::corpus::{
    augment, default_targets, derive_benchmark, load_corpus, load_dataset, load_lexicon,
    load_phrases, persist_corpus, read_jsonl, read_jsonl_from, write_dataset, write_jsonl,
    RawComment, TdType,
};
use crate::eval::evaluate_pipeline;
use crate::hierarchy::TypeHierarchy;
use crate::learn::ClassifierSpec;
use crate::pipeline::{
    classify_comments, induce_for_dataset, load_model, save_model, train_pipeline_with_report,
    HierarchySource, PipelineConfig, TdInstance,
};
use crate::report::{build_report, render_report, ReportFormat};
use crate::textfeat::VocabConfig;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "tdlens", version, about = "Technical-debt mining over peer-review threads")]
struct Cli {
    /// INI-style defaults; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fetch every comment of approved review issues into a corpus JSONL.
    Crawl(CrawlArgs),
    /// Derive the labeled benchmark from a corpus and labeled phrases.
    Prepare(PrepareArgs),
    /// Add synonym-substituted copies of TD sentences.
    Augment(AugmentArgs),
    /// Train the two-stage detector.
    Train(TrainArgs),
    /// Induce the type hierarchy and dump the intermediate matrices.
    Induce(InduceArgs),
    /// Evaluate a model on a labeled test set.
    Eval(EvalArgs),
    /// Detect TD sentences in a corpus.
    Classify(ClassifyArgs),
    /// Corpus-level analytics over detected instances.
    Analyze(AnalyzeArgs),
    /// Per-package TD report.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct CrawlArgs {
    #[arg(long)]
    platform: String,
    /// owner/name
    #[arg(long)]
    repo: String,
    /// Label marking approved submissions.
    #[arg(long)]
    label: String,
    #[arg(long)]
    out: PathBuf,
    /// Regex with one capture group yielding the package name from an issue title.
    #[arg(long)]
    package_title_regex: Option<String>,
    #[arg(long, default_value = DEFAULT_API_BASE)]
    api_base: String,
    /// Environment variable holding the API token.
    #[arg(long, default_value = "GITHUB_TOKEN")]
    token_env: String,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    #[arg(long, default_value_t = 100)]
    per_page: u32,
    #[arg(long, default_value_t = 5)]
    max_retries: u32,
    /// Cap on a single rate-limit sleep, in seconds.
    #[arg(long, default_value_t = 900)]
    max_backoff_secs: u64,
}

#[derive(Args, Debug)]
struct PrepareArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// JSONL of labeled phrases.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    /// `type=count,...`; omitted types keep their count. Default: twice the
    /// median type count, capped at the largest.
    #[arg(long)]
    targets: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct LearnerArgs {
    /// `linear`, `probabilistic`, or a JSON classifier spec file.
    #[arg(long, default_value = "linear")]
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 9)]
    k_max: usize,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// `induce`, `preset` (built-in three clusters) or `preset:<file>`.
    #[arg(long, default_value = "induce")]
    hierarchy: String,
    #[arg(long)]
    model_out: PathBuf,
    /// Gate probability cut-off; plain argmax when absent.
    #[arg(long)]
    gate_threshold: Option<f64>,
    #[command(flatten)]
    learner: LearnerArgs,
}

#[derive(Args, Debug)]
struct InduceArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Hierarchy JSON, loadable with `train --hierarchy preset:<file>`.
    #[arg(long)]
    out: PathBuf,
    /// Confusion, normalized confusion, distances and eigenvalues.
    /// Defaults to `<out stem>.matrices.json` next to `--out`.
    #[arg(long)]
    matrices_out: Option<PathBuf>,
    #[command(flatten)]
    learner: LearnerArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Corpus JSONL, or `-` for stdin.
    #[arg(long = "in")]
    input: String,
    /// Instance JSONL, or `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, default_value_t = 4)]
    workers: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Analysis {
    Distribution,
    Correlation,
    Trend,
    Growth,
    Impact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CountMode {
    Cumulative,
    PerYear,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(value_enum)]
    analysis: Analysis,
    /// TdInstance JSONL as written by `classify`.
    #[arg(long)]
    instances: PathBuf,
    /// Packages per year: JSON object `{"2016": 12, ...}` or CSV `year,packages`.
    #[arg(long)]
    packages_by_year: Option<PathBuf>,
    /// Corpus used to derive packages per year when no table is given.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cumulative")]
    package_mode: CountMode,
    #[arg(long)]
    first_year: Option<i32>,
    #[arg(long)]
    last_year: Option<i32>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    package: String,
    #[arg(long, default_value = "html")]
    format: String,
    #[arg(long)]
    out: PathBuf,
    /// ISO-8601 timestamp; defaults to the newest comment of the package.
    #[arg(long)]
    generated_at: Option<String>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            return fail(&Error::Usage(first.trim_start_matches("error: ").to_string()));
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("{}", error_line(e));
    EXIT_FATAL
}

/// The one-line stderr form of an error.
pub fn error_line(e: &Error) -> String {
    let msg: String = e.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
    format!("error: kind={} message={}", e.kind(), msg)
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Crawl(a) => cmd_crawl(a),
        Command::Prepare(a) => cmd_prepare(a),
        Command::Augment(a) => cmd_augment(a),
        Command::Train(a) => cmd_train(a),
        Command::Induce(a) => cmd_induce(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Report(a) => cmd_report(a),
    }
}

// ---------------------------------------------------------------- config file

/// Parses flat INI text into `section -> key -> value`; the unnamed leading
/// section is `""`. Keys are normalized to flag spelling (`_` becomes `-`).
pub fn parse_ini(text: &str) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let mut out: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut section = String::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let v = v.trim();
        let v = v
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .unwrap_or(v);
        out.entry(section.clone())
            .or_default()
            .insert(k.trim().replace('_', "-"), v.to_string());
    }
    Ok(out)
}

/// Appends `--key value` for every config entry whose flag is absent.
fn apply_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    let mut i = 1;
    let mut sub_at = None;
    while i < args.len() {
        let a = &args[i];
        if a == "--config" {
            path = args.get(i + 1).cloned();
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if sub_at.is_none() && !a.starts_with('-') {
            sub_at = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(sub_at)) = (path, sub_at) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Usage(format!("cannot read config {path}: {e}")))?;
    let ini = parse_ini(&text)?;
    let sub = args[sub_at].clone();
    let present = |args: &[String], key: &str| {
        let flag = format!("--{key}");
        let eq = format!("--{key}=");
        args.iter().any(|a| *a == flag || a.starts_with(&eq))
    };
    for section in ["", sub.as_str()] {
        if let Some(entries) = ini.get(section) {
            for (k, v) in entries {
                if k != "config" && !present(&args, k) {
                    args.push(format!("--{k}"));
                    args.push(v.clone());
                }
            }
        }
    }
    Ok(args)
}

// ------------------------------------------------------------------- helpers

fn write_bytes(dest: &str, bytes: &[u8]) -> Result<()> {
    if dest == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
    } else {
        write_file(Path::new(dest), bytes)?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn learner_spec(name: &str, seed: u64) -> Result<ClassifierSpec> {
    match name {
        "linear" => Ok(ClassifierSpec::linear(seed)),
        "probabilistic" | "nb" => Ok(ClassifierSpec::probabilistic(1.0)),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read spec {path}: {e}")))?;
            let spec: ClassifierSpec = serde_json::from_str(&text)
                .map_err(|e| Error::Usage(format!("invalid spec {path}: {e}")))?;
            spec.validate()?;
            Ok(spec)
        }
    }
}

fn parse_targets(text: &str) -> Result<BTreeMap<TdType, usize>> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (t, n) = part
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("target {part:?} is not type=count")))?;
        let t: TdType = t.trim().parse()?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("target count {n:?} is not a number")))?;
        out.insert(t, n);
    }
    Ok(out)
}

/// Packages per year from a JSON object or a two-column CSV.
pub fn read_packages_by_year(path: &Path) -> Result<BTreeMap<i32, u64>> {
    let text = fs::read_to_string(path)?;
    let bad = |m: String| Error::Usage(format!("{}: {m}", path.display()));
    if path.extension().is_some_and(|e| e == "csv") {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let mut out = BTreeMap::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let year = rec.get(0).unwrap_or("").trim().parse().map_err(|_| bad("bad year".into()))?;
            let n = rec.get(1).unwrap_or("").trim().parse().map_err(|_| bad("bad package count".into()))?;
            out.insert(year, n);
        }
        Ok(out)
    } else {
        let raw: BTreeMap<String, u64> = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        raw.into_iter()
            .map(|(y, n)| y.trim().parse().map(|y| (y, n)).map_err(|_| bad(format!("bad year {y:?}"))))
            .collect()
    }
}

fn read_comments(input: &str) -> Result<Vec<RawComment>> {
    if input == "-" {
        Ok(read_jsonl_from(io::stdin().lock(), "<stdin>")?)
    } else {
        Ok(load_corpus(Path::new(input))?)
    }
}

// --------------------------------------------------------------- subcommands

fn cmd_crawl(a: CrawlArgs) -> Result<i32> {
    let repo: RepoCoordinate = a.repo.parse()?;
    let mut cfg = CrawlConfig::new(repo, &a.platform, &a.label);
    if let Some(re) = &a.package_title_regex {
        cfg = cfg.with_title_regex(re)?;
    }
    cfg.api_base = a.api_base;
    cfg.token = std::env::var(&a.token_env).ok().filter(|t| !t.is_empty());
    cfg.concurrency = a.concurrency.max(1);
    cfg.per_page = a.per_page.clamp(1, 100);
    cfg.max_retries = a.max_retries;
    cfg.max_backoff = Duration::from_secs(a.max_backoff_secs);
    let report = Crawler::new(cfg).crawl()?;
    let n = persist_corpus(report.comments.iter().cloned(), &a.out)?;
    println!(
        "crawled {n} comments from {} issues ({} requests, {} rate-limit waits, {} skipped pages)",
        report.issues_visited,
        report.requests,
        report.backoffs.len(),
        report.skipped_pages.len()
    );
    for url in &report.skipped_pages {
        eprintln!("warning: skipped malformed page {url}");
    }
    Ok(if report.is_partial() { EXIT_PARTIAL } else { EXIT_OK })
}

fn cmd_prepare(a: PrepareArgs) -> Result<i32> {
    let comments = load_corpus(&a.corpus)?;
    let phrases = load_phrases(&a.labels)?;
    let out = derive_benchmark(&phrases, &comments);
    write_dataset(&out.sentences, &a.out)?;
    println!(
        "{} sentences ({} td, {} non_td); {} unresolved phrases, {} unmatched, {} multi-label",
        out.sentences.len(),
        out.count(true),
        out.count(false),
        out.unresolved.len(),
        out.unmatched_phrases.len(),
        out.multi_label.len()
    );
    Ok(EXIT_OK)
}

fn cmd_augment(a: AugmentArgs) -> Result<i32> {
    let sentences = load_dataset(&a.input)?;
    let lexicon = load_lexicon(&a.lexicon)?;
    let mut targets = default_targets(&sentences);
    if let Some(spec) = &a.targets {
        let given = parse_targets(spec)?;
        let mut current: BTreeMap<TdType, usize> = BTreeMap::new();
        for t in sentences.iter().filter_map(|s| s.label.td_type()) {
            *current.entry(t).or_default() += 1;
        }
        targets = TdType::ALL
            .iter()
            .map(|&t| (t, given.get(&t).copied().unwrap_or_else(|| current.get(&t).copied().unwrap_or(0))))
            .collect();
    }
    let out = augment(&sentences, &lexicon, &targets, a.seed)?;
    write_dataset(&out, &a.out)?;
    println!("{} sentences written ({} added)", out.len(), out.len() - sentences.len());
    Ok(EXIT_OK)
}

fn hierarchy_source(s: &str, learner: &LearnerArgs) -> Result<HierarchySource> {
    match s {
        "induce" => Ok(HierarchySource::Induce {
            k_max: learner.k_max,
            folds: learner.folds,
        }),
        "preset" => Ok(HierarchySource::Preset(TypeHierarchy::paper_preset())),
        other => match other.strip_prefix("preset:") {
            Some(path) => Ok(HierarchySource::Preset(TypeHierarchy::load(Path::new(path))?)),
            None => Err(Error::Usage(format!(
                "--hierarchy must be induce, preset or preset:<file>, got {other:?}"
            ))),
        },
    }
}

fn cmd_train(a: TrainArgs) -> Result<i32> {
    let dataset = load_dataset(&a.dataset)?;
    let spec = learner_spec(&a.learner.spec, a.learner.seed)?;
    let mut cfg = PipelineConfig::new(spec, hierarchy_source(&a.hierarchy, &a.learner)?, a.learner.seed);
    cfg.gate_threshold = a.gate_threshold;
    let (model, report) = train_pipeline_with_report(&dataset, &cfg)?;
    save_model(&model, &a.model_out)?;
    println!(
        "trained on {} sentences ({} td), vocabulary {} terms, K = {}",
        report.sentences, report.td_sentences, report.vocabulary_size, report.k
    );
    for cluster in model.hierarchy.clusters() {
        let types: Vec<&str> = cluster.types.iter().map(|t| t.name()).collect();
        println!("  {}: {}", cluster.name, types.join(", "));
    }
    println!("{:<24} {:>9} {:>10}", "stage", "examples", "train acc");
    for (stage, n) in &report.stage_examples {
        let acc = report.training_accuracy.get(stage).copied().unwrap_or(f64::NAN);
        println!("{stage:<24} {n:>9} {acc:>10.4}");
    }
    println!("model written to {}", a.model_out.display());
    Ok(EXIT_OK)
}

fn cmd_induce(a: InduceArgs) -> Result<i32> {
    let dataset = load_dataset(&a.dataset)?;
    let spec = learner_spec(&a.learner.spec, a.learner.seed)?;
    let ind = induce_for_dataset(
        &dataset,
        &spec,
        &VocabConfig::default(),
        a.learner.k_max,
        a.learner.folds,
        a.learner.seed,
    )?;
    write_file(&a.out, ind.hierarchy.to_json().as_bytes())?;
    let matrices = a.matrices_out.clone().unwrap_or_else(|| {
        let stem = a.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        a.out.with_file_name(format!("{stem}.matrices.json"))
    });
    write_file(&matrices, &pretty(&ind))?;
    println!("K = {} (eigenvalues: {})", ind.k, fmt_values(&ind.eigenvalues));
    for cluster in ind.hierarchy.clusters() {
        let types: Vec<&str> = cluster.types.iter().map(|t| t.name()).collect();
        println!("  {}: {}", cluster.name, types.join(", "));
    }
    println!("hierarchy: {}  matrices: {}", a.out.display(), matrices.display());
    Ok(EXIT_OK)
}

fn fmt_values(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn cmd_eval(a: EvalArgs) -> Result<i32> {
    let model = load_model(&a.model)?;
    let test = load_dataset(&a.test)?;
    let ev = evaluate_pipeline(&model, &test)?;
    write_file(&a.out, &pretty(&ev))?;
    print!("{}", ev.to_table());
    Ok(EXIT_OK)
}

fn cmd_classify(a: ClassifyArgs) -> Result<i32> {
    let model = load_model(&a.model)?;
    let comments = read_comments(&a.input)?;
    let instances = classify_comments(&model, &comments, a.workers.max(1));
    if a.out == "-" {
        let mut out = io::stdout().lock();
        for i in &instances {
            serde_json::to_writer(&mut out, i).map_err(io::Error::from)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
    } else {
        write_jsonl(&instances, Path::new(&a.out))?;
        eprintln!("{} TD instances from {} comments", instances.len(), comments.len());
    }
    Ok(EXIT_OK)
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<i32> {
    let instances: Vec<TdInstance> = read_jsonl(&a.instances)?;
    let csv = matches!(a.format, OutFormat::Csv);
    let bytes = match a.analysis {
        Analysis::Distribution => {
            let t = distribution(&instances);
            if csv { t.to_csv().into_bytes() } else { pretty(&t) }
        }
        Analysis::Correlation => {
            let m = correlation_matrix(&per_package_counts(&instances))?;
            if csv { m.to_csv().into_bytes() } else { pretty(&m) }
        }
        Analysis::Trend => {
            let s = trend_series(&a, &instances)?;
            if csv { s.to_csv().into_bytes() } else { pretty(&s) }
        }
        Analysis::Growth => {
            let s = trend_series(&a, &instances)?;
            let g = growth_window(&a, &s)?;
            if csv {
                g.to_csv().into_bytes()
            } else {
                #[derive(Serialize)]
                struct WithReference<'a> {
                    #[serde(flatten)]
                    growth: &'a crate::analytics::GrowthStats,
                    reference_delta_cagr: BTreeMap<TdType, (f64, f64)>,
                }
                pretty(&WithReference {
                    growth: &g,
                    reference_delta_cagr: REFERENCE_GROWTH.iter().map(|&(t, d, c)| (t, (d, c))).collect(),
                })
            }
        }
        Analysis::Impact => {
            let s = trend_series(&a, &instances)?;
            let g = growth_window(&a, &s)?;
            let corr = correlation_matrix(&per_package_counts(&instances))?;
            let points = impact(&g, &corr, &type_totals(&instances))?;
            if csv { impact_to_csv(&points).into_bytes() } else { pretty(&points) }
        }
    };
    write_bytes(&a.out, &bytes)?;
    Ok(EXIT_OK)
}

fn trend_series(a: &AnalyzeArgs, instances: &[TdInstance]) -> Result<TrendSeries> {
    let mode = match a.package_mode {
        CountMode::Cumulative => PackageCountMode::Cumulative,
        CountMode::PerYear => PackageCountMode::PerYear,
    };
    let pby = match (&a.packages_by_year, &a.corpus) {
        (Some(p), _) => read_packages_by_year(p)?,
        (None, Some(c)) => packages_by_year(&package_first_years(&load_corpus(c)?), mode),
        (None, None) => {
            // First year each package shows up among the instances themselves.
            let mut first: BTreeMap<String, i32> = BTreeMap::new();
            for i in instances {
                if let Some(ts) = i.created_at {
                    let y = chrono::Datelike::year(&ts);
                    let e = first.entry(i.package.clone()).or_insert(y);
                    *e = (*e).min(y);
                }
            }
            packages_by_year(&first, mode)
        }
    };
    Ok(trend(instances, &pby)?)
}

fn growth_window(a: &AnalyzeArgs, s: &TrendSeries) -> Result<crate::analytics::GrowthStats> {
    let years: Vec<i32> = s.series.values().flat_map(|p| p.iter().map(|p| p.year)).collect();
    let first = a.first_year.or_else(|| years.iter().min().copied());
    let last = a.last_year.or_else(|| years.iter().max().copied());
    match (first, last) {
        (Some(f), Some(l)) => Ok(growth(s, f, l)?),
        _ => Err(Error::Usage("no years to compute growth over".into())),
    }
}

fn cmd_report(a: ReportArgs) -> Result<i32> {
    let format: ReportFormat = a.format.parse().map_err(Error::Usage)?;
    let model = load_model(&a.model)?;
    let comments = load_corpus(&a.corpus)?;
    let stamp = match &a.generated_at {
        Some(s) => Some(
            DateTime::parse_from_rfc3339(s)
                .map_err(|e| Error::Usage(format!("--generated-at {s:?}: {e}")))?
                .with_timezone(&Utc),
        ),
        None => None,
    };
    let report = build_report(&model, &comments, &a.package, stamp);
    write_file(&a.out, &render_report(&report, format))?;
    println!("{} TD instances for {} written to {}", report.total(), a.package, a.out.display());
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ini_sections_and_normalization() {
        let ini = parse_ini("# defaults\nseed = 3\n\n[train]\nmodel_out = \"m.json\"\nk-max=4\n").unwrap();
        assert_eq!(ini[""]["seed"], "3");
        assert_eq!(ini["train"]["model-out"], "m.json");
        assert_eq!(ini["train"]["k-max"], "4");
        assert!(parse_ini("no equals sign").is_err());
    }

    #[test]
    fn config_fills_only_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.ini");
        fs::write(&p, "seed = 9\n[train]\nfolds = 3\nseed = 11\n[eval]\nout = x\n").unwrap();
        let args: Vec<String> = ["tdlens", "--config", p.to_str().unwrap(), "train", "--seed", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let got = apply_config(args).unwrap();
        assert_eq!(got.iter().filter(|a| *a == "--seed").count(), 1);
        assert!(got.windows(2).any(|w| w[0] == "--folds" && w[1] == "3"));
        assert!(!got.contains(&"--out".to_string()));
    }

    #[test]
    fn targets_parse() {
        let t = parse_targets("test=10, build=4").unwrap();
        assert_eq!(t[&TdType::Test], 10);
        assert_eq!(t[&TdType::Build], 4);
        assert!(parse_targets("test").is_err());
        assert!(parse_targets("nonsense=3").is_err());
    }

    #[test]
    fn usage_errors_are_one_line() {
        assert_eq!(run(["tdlens", "frobnicate"]), EXIT_FATAL);
        assert_eq!(run(["tdlens", "--help"]), EXIT_OK);
        let line = error_line(&Error::Usage("two\nlines".into()));
        assert_eq!(line, "error: kind=usage message=two lines");
    }
}
