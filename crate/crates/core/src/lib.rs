//! Pre-retrieval prediction of how exposure in a ranking splits across the
//! groups of a document category.
//!
//! The crate covers the full pipeline: text processing and a group-aware
//! inverted index ([`corpus`]), BM25 and TF-IDF ranking ([`retrieval`]),
//! pseudo-relevance feedback ([`expansion`]), the exposure model and its
//! combinatorics ([`exposure`]), the predictors ([`predictors`]) and the
//! evaluation harness ([`evaluation`]).

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod expansion;
pub mod exposure;
pub mod predictors;
pub mod retrieval;
pub mod special;
pub mod synthetic;
pub mod text;

pub use corpus::{build_index, Category, CategoryIndex, CollectionIndex, Document, TermStats};
pub use error::{Error, Result};
pub use expansion::{ExpandedQuery, Expander, Expansion, ExpansionConfig};
pub use exposure::{ExposureDistribution, ExposureModel};
pub use predictors::{Builtin, Predictor, PredictorConfig, PredictorKind, PredictorOutput};
pub use retrieval::{Bm25Params, Query, RankedDoc, Ranking, RankingModel};
