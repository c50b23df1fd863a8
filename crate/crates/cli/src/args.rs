use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qep",
    version,
    about = "Predict how ranking exposure splits across document groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and save a collection index.
    Index(IndexArgs),
    /// Rank queries and write a TREC run file.
    Rank(RankArgs),
    /// Expand queries by pseudo-relevance feedback and write them as JSON lines.
    Expand(ExpandArgs),
    /// Write predicted group exposure for each query as JSON lines.
    Predict(PredictArgs),
    /// Run a full prediction experiment and write the report files.
    Run(RunArgs),
    /// Histograms of achievable group exposure for a ranking of size k.
    AnalyzeExposure(AnalyzeArgs),
    /// Write a seeded synthetic corpus with planted group skew.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Documents as JSON lines: {"doc_id", "text", "labels": {category: group}}.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Category definitions: one {"name", "groups"} object or an array.
    #[arg(long)]
    pub categories: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also dump collection and group statistics as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Bm25,
    Tfidf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpanderName {
    None,
    Rm3,
    Klq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictorName {
    Gep,
    Scs,
    Avidf,
    Avictf,
    Avpmi,
    Cori,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExposureName {
    Dcg,
    DcgTypeset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueryIdfName {
    Bm25Style,
    Classic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeviationName {
    Population,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HistogramModeName {
    Exact,
    Sampled,
}

/// Index source: a saved index, or a corpus to index on the fly.
#[derive(Debug, Args)]
pub struct SourceArgs {
    #[arg(long, conflicts_with = "corpus")]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long = "categories", requires = "corpus")]
    pub categories_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankerArgs {
    #[arg(long, value_enum, default_value_t = ModelName::Bm25)]
    pub model: ModelName,
    #[arg(long, default_value_t = 1.2)]
    pub k1: f64,
    #[arg(long, default_value_t = 0.75)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct FeedbackArgs {
    #[arg(long, default_value_t = 3)]
    pub fb_docs: usize,
    #[arg(long, default_value_t = 10)]
    pub fb_terms: usize,
    /// RM3 interpolation weight on the relevance model.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct PredictorArgs {
    /// Ranking depth the predictions are for.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Keep negative GEP idf values instead of flooring them at zero.
    #[arg(long)]
    pub no_idf_floor: bool,
    #[arg(long, value_enum, default_value_t = QueryIdfName::Bm25Style)]
    pub query_idf: QueryIdfName,
    #[arg(long, default_value_t = 0.4)]
    pub cori_b: f64,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Queries as TSV: query_id<TAB>text.
    #[arg(long)]
    pub queries: PathBuf,
    #[command(flatten)]
    pub ranker: RankerArgs,
    #[arg(long, value_enum, default_value_t = ExpanderName::None)]
    pub expander: ExpanderName,
    #[command(flatten)]
    pub feedback: FeedbackArgs,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, default_value = "qep")]
    pub tag: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub queries: PathBuf,
    #[command(flatten)]
    pub ranker: RankerArgs,
    #[arg(long, value_enum)]
    pub expander: ExpanderName,
    #[command(flatten)]
    pub feedback: FeedbackArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub queries: PathBuf,
    /// Categories to predict for; all indexed categories by default.
    #[arg(long = "category")]
    pub categories: Vec<String>,
    /// Predictors to run; all by default.
    #[arg(long = "predictor", value_enum)]
    pub predictors: Vec<PredictorName>,
    #[command(flatten)]
    pub predictor: PredictorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long = "category")]
    pub categories: Vec<String>,
    /// Ranking models; bm25 when none is given.
    #[arg(long = "ranker", value_enum)]
    pub rankers: Vec<ModelName>,
    /// Expanders applied to every ranker; `none` keeps the plain ranker.
    #[arg(long = "expander", value_enum)]
    pub expanders: Vec<ExpanderName>,
    /// Precomputed TREC run files evaluated as extra pipelines.
    #[arg(long = "run-file")]
    pub run_files: Vec<PathBuf>,
    #[arg(long = "predictor", value_enum)]
    pub predictors: Vec<PredictorName>,
    #[arg(long, default_value_t = 1.2)]
    pub k1: f64,
    #[arg(long, default_value_t = 0.75)]
    pub b: f64,
    #[command(flatten)]
    pub predictor: PredictorArgs,
    #[command(flatten)]
    pub feedback: FeedbackArgs,
    #[arg(long, value_enum, default_value_t = ExposureName::Dcg)]
    pub exposure_model: ExposureName,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Bonferroni m; the number of baselines compared by default.
    #[arg(long)]
    pub comparisons: Option<usize>,
    #[arg(long, value_enum, default_value_t = DeviationName::Population)]
    pub cv_deviation: DeviationName,
    /// Recorded in the resolved config; the pipeline itself draws no random
    /// numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Group sizes: `3`, `1..5` (inclusive) or `1,2,10`.
    #[arg(long, default_value = "1..5")]
    pub m: String,
    #[arg(long, value_enum, default_value_t = HistogramModeName::Exact)]
    pub mode: HistogramModeName,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_distinct: usize,
    #[arg(long, value_enum, default_value_t = ExposureName::Dcg)]
    pub exposure_model: ExposureName,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 4)]
    pub groups: usize,
    #[arg(long, default_value_t = 100)]
    pub docs_per_group: usize,
    #[arg(long, default_value_t = 40)]
    pub queries: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Writes corpus.jsonl, categories.json and queries.tsv here.
    #[arg(long)]
    pub out: PathBuf,
}
