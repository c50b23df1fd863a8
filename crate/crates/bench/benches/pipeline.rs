use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qep_core::evaluation::{run_experiment, ExperimentConfig, Pipeline};
use qep_core::exposure::{achievable_exposure, HistogramConfig, HistogramMode};
use qep_core::predictors::{Builtin, Predictor, PredictorConfig, PredictorKind};
use qep_core::retrieval::rank;
use qep_core::synthetic::{generate, SyntheticConfig, SyntheticCorpus, CATEGORY};
use qep_core::{build_index, CollectionIndex, Expander, ExpansionConfig, Query, RankingModel};

fn corpus() -> SyntheticCorpus {
    generate(&SyntheticConfig {
        docs_per_group: 500,
        ..Default::default()
    })
    .unwrap()
}

fn indexing(c: &mut Criterion) {
    let corpus = corpus();
    c.bench_function("build_index/2000_docs", |b| {
        b.iter(|| build_index(black_box(&corpus.documents), &corpus.categories).unwrap())
    });
}

fn queries(corpus: &SyntheticCorpus) -> Vec<Query> {
    corpus.topics.iter().map(|t| Query::parse(&t.text)).collect()
}

fn ranking(c: &mut Criterion) {
    let corpus = corpus();
    let index = build_index(&corpus.documents, &corpus.categories).unwrap();
    let qs = queries(&corpus);
    for model in [RankingModel::bm25(), RankingModel::TfIdf] {
        c.bench_function(&format!("rank/{}/k100", model.name()), |b| {
            b.iter(|| {
                for q in &qs {
                    black_box(rank(&index, "q", q, model, 100).unwrap());
                }
            })
        });
    }
    let config = ExpansionConfig::default();
    for expander in Expander::ALL {
        c.bench_function(&format!("expand/{expander}"), |b| {
            b.iter(|| {
                for q in &qs {
                    let first = rank(&index, "q", q, RankingModel::bm25(), config.fb_docs).unwrap();
                    black_box(expander.expand(&index, q, &first, &config).unwrap());
                }
            })
        });
    }
}

fn prediction(c: &mut Criterion) {
    let corpus = corpus();
    let index = build_index(&corpus.documents, &corpus.categories).unwrap();
    let qs = queries(&corpus);
    for kind in PredictorKind::ALL {
        let p = Builtin::new(kind, PredictorConfig::default());
        c.bench_function(&format!("predict/{kind}"), |b| {
            b.iter(|| {
                for q in &qs {
                    black_box(p.predict(&index, q, CATEGORY).unwrap());
                }
            })
        });
    }
}

fn experiment(c: &mut Criterion) {
    let corpus = corpus();
    let index: CollectionIndex = build_index(&corpus.documents, &corpus.categories).unwrap();
    let predictors: Vec<Box<dyn Predictor>> = PredictorKind::ALL
        .into_iter()
        .map(|k| Box::new(Builtin::new(k, PredictorConfig::default())) as Box<dyn Predictor>)
        .collect();
    let pipelines = [Pipeline::Model {
        model: RankingModel::bm25(),
        expander: None,
    }];
    let categories = [CATEGORY.to_string()];
    c.bench_function("run_experiment/bm25/all_predictors", |b| {
        b.iter(|| {
            run_experiment(
                &index,
                &corpus.topics,
                &categories,
                &pipelines,
                &predictors,
                &ExperimentConfig::default(),
            )
            .unwrap()
        })
    });
}

fn exposure(c: &mut Criterion) {
    let config = HistogramConfig::default();
    c.bench_function("achievable_exposure/exact/k30_m4", |b| {
        b.iter(|| achievable_exposure(black_box(30), 4, &config).unwrap())
    });
    let sampled = HistogramConfig {
        mode: HistogramMode::Sampled {
            samples: 10_000,
            seed: 1,
        },
        ..Default::default()
    };
    c.bench_function("achievable_exposure/sampled/k100_m50", |b| {
        b.iter(|| achievable_exposure(black_box(100), 50, &sampled).unwrap())
    });
}

criterion_group!(benches, indexing, ranking, prediction, experiment, exposure);
criterion_main!(benches);
