use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use qep_core::corpus::io::{load_index, read_categories, read_documents, save_index};
use qep_core::evaluation::report::write_report;
use qep_core::evaluation::{run_experiment, Deviation, ExperimentConfig, Pipeline};
use qep_core::expansion::{rank_with_feedback, ExpandedQuery, Expander, ExpansionConfig};
use qep_core::exposure::{achievable_exposure, log_orderings, write_histogram_csv, HistogramConfig, HistogramMode};
use qep_core::predictors::{Builtin, Predictor, PredictorConfig, PredictorKind, QueryIdf};
use qep_core::retrieval::topics::{read_topics, Topic};
use qep_core::retrieval::trec::{read_run, write_run};
use qep_core::retrieval::{rank as rank_query, Bm25Params};
use qep_core::synthetic::{generate, SyntheticConfig};
use qep_core::{build_index, CollectionIndex, ExposureModel, Query, RankingModel};

use crate::args::*;
use crate::{CliError, Status};

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(invalid(format!("{what} {} does not exist", path.display())))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(qep_core::Error::from)?;
    w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

fn model(name: ModelName, k1: f64, b: f64) -> Result<RankingModel> {
    match name {
        ModelName::Bm25 => {
            if !(k1 >= 0.0 && (0.0..=1.0).contains(&b)) {
                return Err(invalid(format!(
                    "BM25 needs k1 >= 0 and b in [0, 1], got k1={k1} b={b}"
                )));
            }
            Ok(RankingModel::Bm25(Bm25Params { k1, b }))
        }
        ModelName::Tfidf => Ok(RankingModel::TfIdf),
    }
}

fn expander(name: ExpanderName) -> Option<Expander> {
    match name {
        ExpanderName::None => None,
        ExpanderName::Rm3 => Some(Expander::Rm3),
        ExpanderName::Klq => Some(Expander::Klq),
    }
}

fn feedback(args: &FeedbackArgs) -> Result<ExpansionConfig> {
    let config = ExpansionConfig {
        fb_docs: args.fb_docs,
        fb_terms: args.fb_terms,
        lambda: args.lambda,
    };
    config.validate()?;
    Ok(config)
}

fn predictor_kind(name: PredictorName) -> PredictorKind {
    match name {
        PredictorName::Gep => PredictorKind::Gep,
        PredictorName::Scs => PredictorKind::Scs,
        PredictorName::Avidf => PredictorKind::AvIdf,
        PredictorName::Avictf => PredictorKind::AvIctf,
        PredictorName::Avpmi => PredictorKind::AvPmi,
        PredictorName::Cori => PredictorKind::Cori,
        PredictorName::Uniform => PredictorKind::Uniform,
    }
}

fn predictor_kinds(names: &[PredictorName]) -> Vec<PredictorKind> {
    if names.is_empty() {
        return PredictorKind::ALL.to_vec();
    }
    let mut kinds: Vec<PredictorKind> = Vec::new();
    for k in names.iter().map(|&n| predictor_kind(n)) {
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    kinds
}

fn predictor_config(args: &PredictorArgs) -> Result<PredictorConfig> {
    if args.k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if !(0.0..=1.0).contains(&args.cori_b) {
        return Err(invalid(format!("cori-b must lie in [0, 1], got {}", args.cori_b)));
    }
    Ok(PredictorConfig {
        k: args.k,
        idf_floor: !args.no_idf_floor,
        query_idf: match args.query_idf {
            QueryIdfName::Bm25Style => QueryIdf::Bm25Style,
            QueryIdfName::Classic => QueryIdf::Classic,
        },
        cori_b: args.cori_b,
    })
}

fn exposure_model(name: ExposureName) -> ExposureModel {
    match name {
        ExposureName::Dcg => ExposureModel::Dcg,
        ExposureName::DcgTypeset => ExposureModel::DcgTypeset,
    }
}

fn check_source(source: &SourceArgs) -> Result<()> {
    match (&source.index, &source.corpus) {
        (Some(p), _) => require_file(p, "index"),
        (None, Some(c)) => {
            require_file(c, "corpus")?;
            if let Some(cats) = &source.categories_file {
                require_file(cats, "categories file")?;
            }
            Ok(())
        }
        (None, None) => Err(invalid("give either --index or --corpus")),
    }
}

fn build_from(corpus: &Path, categories: Option<&Path>) -> Result<CollectionIndex> {
    let docs = read_documents(corpus)?;
    let cats = match categories {
        Some(p) => read_categories(p)?,
        None => Vec::new(),
    };
    Ok(build_index(&docs, &cats)?)
}

fn load_source(source: &SourceArgs) -> Result<CollectionIndex> {
    check_source(source)?;
    match &source.index {
        Some(p) => Ok(load_index(p)?),
        None => build_from(
            source.corpus.as_deref().expect("checked"),
            source.categories_file.as_deref(),
        ),
    }
}

fn select_categories(index: &CollectionIndex, requested: &[String]) -> Result<Vec<String>> {
    if requested.is_empty() {
        let all: Vec<String> = index.categories().iter().map(|c| c.name().to_string()).collect();
        if all.is_empty() {
            return Err(invalid("the index has no categories; build it with --categories"));
        }
        return Ok(all);
    }
    for c in requested {
        index.category(c)?;
    }
    Ok(requested.to_vec())
}

#[derive(Serialize)]
struct TermCounts {
    df: u64,
    cf: u64,
}

#[derive(Serialize)]
struct GroupStats {
    docs: u64,
    tokens: u64,
    terms: BTreeMap<String, TermCounts>,
}

#[derive(Serialize)]
struct IndexStats {
    docs: usize,
    tokens: u64,
    vocabulary: usize,
    terms: BTreeMap<String, TermCounts>,
    categories: BTreeMap<String, BTreeMap<String, GroupStats>>,
}

fn index_stats(index: &CollectionIndex) -> IndexStats {
    let terms = (0..index.vocab_size() as u32)
        .map(|t| {
            (
                index.term(t).to_string(),
                TermCounts {
                    df: index.df(t) as u64,
                    cf: index.cf(t),
                },
            )
        })
        .collect();
    let categories = index
        .categories()
        .iter()
        .map(|cat| {
            let groups = (0..cat.num_groups())
                .map(|g| {
                    let terms = (0..index.vocab_size() as u32)
                        .filter(|&t| cat.df(t, g) > 0)
                        .map(|t| {
                            (
                                index.term(t).to_string(),
                                TermCounts {
                                    df: cat.df(t, g) as u64,
                                    cf: cat.cf(t, g),
                                },
                            )
                        })
                        .collect();
                    (
                        cat.groups()[g].clone(),
                        GroupStats {
                            docs: cat.group_num_docs(g) as u64,
                            tokens: cat.group_tokens(g),
                            terms,
                        },
                    )
                })
                .collect();
            (cat.name().to_string(), groups)
        })
        .collect();
    IndexStats {
        docs: index.num_docs(),
        tokens: index.total_tokens(),
        vocabulary: index.vocab_size(),
        terms,
        categories,
    }
}

pub fn index(args: &IndexArgs) -> Result<Status> {
    require_file(&args.corpus, "corpus")?;
    if let Some(c) = &args.categories {
        require_file(c, "categories file")?;
    }
    let index = build_from(&args.corpus, args.categories.as_deref())?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    save_index(&index, &args.out)?;
    println!(
        "docs={} terms={} tokens={}",
        index.num_docs(),
        index.vocab_size(),
        index.total_tokens()
    );
    for cat in index.categories() {
        let sizes: Vec<String> = (0..cat.num_groups())
            .map(|g| format!("{}={}", cat.groups()[g], cat.group_num_docs(g)))
            .collect();
        println!(
            "category={} groups={} [{}]",
            cat.name(),
            cat.num_groups(),
            sizes.join(" ")
        );
    }
    if let Some(p) = &args.stats {
        write_json_file(p, &index_stats(&index))?;
    }
    Ok(Status::Success)
}

fn load_topics(path: &Path) -> Result<Vec<Topic>> {
    require_file(path, "query file")?;
    Ok(read_topics(path)?)
}

pub fn rank(args: &RankArgs) -> Result<Status> {
    if args.k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let model = model(args.ranker.model, args.ranker.k1, args.ranker.b)?;
    let fb = feedback(&args.feedback)?;
    let topics = load_topics(&args.queries)?;
    let index = load_source(&args.source)?;
    let mut rankings = Vec::with_capacity(topics.len());
    let mut empty = 0;
    for t in &topics {
        let q = Query::parse(&t.text);
        let r = match expander(args.expander) {
            None => rank_query(&index, &t.query_id, &q, model, args.k)?,
            Some(e) => rank_with_feedback(&index, &t.query_id, &q, model, e, &fb, args.k)?.0,
        };
        if r.is_empty() {
            empty += 1;
        }
        rankings.push(r);
    }
    let mut w = create(&args.out)?;
    write_run(&rankings, &args.tag, &mut w)?;
    println!("queries={} empty={}", topics.len(), empty);
    Ok(Status::Success)
}

pub fn expand(args: &ExpandArgs) -> Result<Status> {
    let Some(e) = expander(args.expander) else {
        return Err(invalid("expand needs --expander rm3 or klq"));
    };
    let model = model(args.ranker.model, args.ranker.k1, args.ranker.b)?;
    let fb = feedback(&args.feedback)?;
    let topics = load_topics(&args.queries)?;
    let index = load_source(&args.source)?;
    let mut w = create(&args.out)?;
    let mut unchanged = 0;
    for t in &topics {
        let q = Query::parse(&t.text);
        let first = rank_query(&index, &t.query_id, &q, model, fb.fb_docs)?;
        let expansion = e.expand(&index, &q, &first, &fb)?;
        if !expansion.applied {
            unchanged += 1;
        }
        let line =
            serde_json::to_string(&ExpandedQuery::new(&t.query_id, &expansion.query)).map_err(qep_core::Error::from)?;
        writeln!(w, "{line}").map_err(|err| CliError::io(&args.out, err))?;
    }
    w.flush().map_err(|err| CliError::io(&args.out, err))?;
    println!("queries={} unchanged={}", topics.len(), unchanged);
    Ok(Status::Success)
}

#[derive(Serialize)]
struct PredictionLine<'a> {
    query_id: &'a str,
    category: &'a str,
    predictor: &'a str,
    groups: &'a [String],
    raw: &'a [f64],
    distribution: &'a [f64],
    degenerate: bool,
}

pub fn predict(args: &PredictArgs) -> Result<Status> {
    let config = predictor_config(&args.predictor)?;
    let topics = load_topics(&args.queries)?;
    let index = load_source(&args.source)?;
    let categories = select_categories(&index, &args.categories)?;
    let predictors: Vec<Builtin> = predictor_kinds(&args.predictors)
        .into_iter()
        .map(|k| Builtin::new(k, config))
        .collect();
    let mut w = create(&args.out)?;
    let mut failures = 0;
    for t in &topics {
        let q = Query::parse(&t.text);
        for c in &categories {
            for p in &predictors {
                match p.predict(&index, &q, c) {
                    Ok(out) => {
                        let line = serde_json::to_string(&PredictionLine {
                            query_id: &t.query_id,
                            category: c,
                            predictor: p.name(),
                            groups: &out.distribution.groups,
                            raw: &out.raw,
                            distribution: &out.distribution.values,
                            degenerate: out.distribution.degenerate,
                        })
                        .map_err(qep_core::Error::from)?;
                        writeln!(w, "{line}").map_err(|e| CliError::io(&args.out, e))?;
                    }
                    Err(e) => {
                        eprintln!("query {} category {c} predictor {}: {e}", t.query_id, p.name());
                        failures += 1;
                    }
                }
            }
        }
    }
    w.flush().map_err(|e| CliError::io(&args.out, e))?;
    Ok(if failures > 0 { Status::Partial } else { Status::Success })
}

/// Every input and knob of a `run`, frozen next to its outputs. The output
/// directory is left out so identical runs produce identical files.
#[derive(Serialize)]
struct ResolvedConfig {
    index: Option<String>,
    corpus: Option<String>,
    categories_file: Option<String>,
    queries: String,
    categories: Vec<String>,
    rankers: Vec<RankingModel>,
    expanders: Vec<Option<Expander>>,
    run_files: Vec<String>,
    predictors: Vec<PredictorKind>,
    predictor: PredictorConfig,
    experiment: ExperimentConfig,
    seed: u64,
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

pub fn run(args: &RunArgs) -> Result<Status> {
    // Validate everything before doing any work.
    let predictor_config = predictor_config(&args.predictor)?;
    let expansion = feedback(&args.feedback)?;
    let experiment = ExperimentConfig {
        k: args.predictor.k,
        exposure_model: exposure_model(args.exposure_model),
        expansion,
        alpha: args.alpha,
        comparisons: args.comparisons,
        deviation: match args.cv_deviation {
            DeviationName::Population => Deviation::Population,
            DeviationName::Sample => Deviation::Sample,
        },
    };
    experiment.validate()?;
    check_source(&args.source)?;
    require_file(&args.queries, "query file")?;
    for f in &args.run_files {
        require_file(f, "run file")?;
    }
    let model_names = if args.rankers.is_empty() && args.run_files.is_empty() {
        vec![ModelName::Bm25]
    } else {
        args.rankers.clone()
    };
    let rankers = model_names
        .iter()
        .map(|&m| model(m, args.k1, args.b))
        .collect::<Result<Vec<_>>>()?;
    let expanders: Vec<Option<Expander>> = if args.expanders.is_empty() {
        vec![None]
    } else {
        let mut v: Vec<Option<Expander>> = Vec::new();
        for e in args.expanders.iter().map(|&e| expander(e)) {
            if !v.contains(&e) {
                v.push(e);
            }
        }
        v
    };
    let kinds = predictor_kinds(&args.predictors);

    let topics = read_topics(&args.queries)?;
    let index = load_source(&args.source)?;
    let categories = select_categories(&index, &args.categories)?;
    let mut pipelines = Vec::new();
    for &model in &rankers {
        for &expander in &expanders {
            pipelines.push(Pipeline::Model { model, expander });
        }
    }
    for f in &args.run_files {
        let file = File::open(f).map_err(|e| CliError::io(f, e))?;
        let rankings = read_run(BufReader::new(file), &path_string(f))?;
        let name = f
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path_string(f));
        pipelines.push(Pipeline::Run { name, rankings });
    }
    let predictors: Vec<Box<dyn Predictor>> = kinds
        .iter()
        .map(|&k| Box::new(Builtin::new(k, predictor_config)) as Box<dyn Predictor>)
        .collect();

    let report = run_experiment(&index, &topics, &categories, &pipelines, &predictors, &experiment)?;

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    write_report(&report, &args.out)?;
    let resolved = ResolvedConfig {
        index: args.source.index.as_deref().map(path_string),
        corpus: args.source.corpus.as_deref().map(path_string),
        categories_file: args.source.categories_file.as_deref().map(path_string),
        queries: path_string(&args.queries),
        categories: categories.clone(),
        rankers,
        expanders,
        run_files: args.run_files.iter().map(|p| path_string(p)).collect(),
        predictors: kinds,
        predictor: predictor_config,
        experiment,
        seed: args.seed,
    };
    write_json_file(&args.out.join(RESOLVED_CONFIG_FILE), &resolved)?;

    for s in &report.summaries {
        let means: Vec<String> = s
            .means
            .iter()
            .map(|m| format!("{}={:.4}", m.predictor, m.mean_jsd))
            .collect();
        println!("{} {} {}", s.pipeline, s.category, means.join(" "));
    }
    println!("rows={} failures={}", report.rows.len(), report.failures.len());
    for f in &report.failures {
        eprintln!(
            "failed: pipeline={} query={} category={} predictor={}: {}",
            f.pipeline,
            f.query_id,
            f.category.as_deref().unwrap_or("*"),
            f.predictor.as_deref().unwrap_or("*"),
            f.message
        );
    }
    Ok(if report.failures.is_empty() {
        Status::Success
    } else {
        Status::Partial
    })
}

pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const ORDERINGS_FILE: &str = "orderings.csv";
pub const CURVE_FILE: &str = "exposure_curve.csv";

/// Parses `3`, `1..5` (inclusive) or `1,2,10`.
pub fn parse_m_values(text: &str) -> Result<Vec<usize>> {
    let num = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| invalid(format!("bad group size {s:?} in --m {text:?}")))
    };
    if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(invalid(format!("empty range --m {text:?}")));
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(num).collect()
}

pub fn analyze_exposure(args: &AnalyzeArgs) -> Result<Status> {
    let ms = parse_m_values(&args.m)?;
    if let Some(m) = ms.iter().find(|&&m| m > args.k) {
        return Err(invalid(format!("group size m={m} exceeds k={}", args.k)));
    }
    let model = exposure_model(args.exposure_model);
    let config = HistogramConfig {
        mode: match args.mode {
            HistogramModeName::Exact => HistogramMode::Exact { budget: args.budget },
            HistogramModeName::Sampled => HistogramMode::Sampled {
                samples: args.samples,
                seed: args.seed,
            },
        },
        bins: args.bins,
        max_distinct: args.max_distinct,
        model,
    };
    let histograms = ms
        .iter()
        .map(|&m| achievable_exposure(args.k, m, &config))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    write_histogram_csv(&histograms, create(&args.out.join(HISTOGRAM_FILE))?)?;

    let path = args.out.join(ORDERINGS_FILE);
    let mut w = create(&path)?;
    let o = log_orderings(args.k);
    let exact = o.exact.map(|e| e.to_string()).unwrap_or_default();
    write!(w, "k,log10_orderings,orderings\n{},{},{}\n", o.k, o.log10, exact).map_err(|e| CliError::io(&path, e))?;
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let path = args.out.join(CURVE_FILE);
    let mut w = create(&path)?;
    writeln!(w, "position,exposure").map_err(|e| CliError::io(&path, e))?;
    for (i, v) in model.curve(args.k).iter().enumerate() {
        writeln!(w, "{},{}", i + 1, v).map_err(|e| CliError::io(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    println!("k={} log10(k!)={:.2}", o.k, o.log10);
    for h in &histograms {
        println!(
            "m={} subsets={} min={:.4} max={:.4} mean={:.4} rows={}",
            h.m,
            h.subsets,
            h.min_achievable,
            h.max_achievable,
            h.mean_exposure,
            h.bins.len()
        );
    }
    Ok(Status::Success)
}

pub fn synth(args: &SynthArgs) -> Result<Status> {
    let corpus = generate(&SyntheticConfig {
        groups: args.groups,
        docs_per_group: args.docs_per_group,
        queries: args.queries,
        seed: args.seed,
        ..Default::default()
    })?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let docs_path: PathBuf = args.out.join("corpus.jsonl");
    let mut w = create(&docs_path)?;
    for d in &corpus.documents {
        let line = serde_json::to_string(d).map_err(qep_core::Error::from)?;
        writeln!(w, "{line}").map_err(|e| CliError::io(&docs_path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&docs_path, e))?;
    write_json_file(&args.out.join("categories.json"), &corpus.categories)?;
    let q_path = args.out.join("queries.tsv");
    let mut w = create(&q_path)?;
    for t in &corpus.topics {
        writeln!(w, "{}\t{}", t.query_id, t.text).map_err(|e| CliError::io(&q_path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&q_path, e))?;
    println!("docs={} queries={}", corpus.documents.len(), corpus.topics.len());
    Ok(Status::Success)
}
