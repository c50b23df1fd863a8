#[path = "support/fixtures.rs"]
mod fixtures;
#[path = "support/oracle.rs"]
mod oracle;

use fixtures::{random_fixture, CATEGORY};
use oracle::{rank_all, rankings_agree, OracleCorpus, OracleModel};
use qep_core::predictors::{Builtin, Predictor, PredictorConfig, PredictorKind};
use qep_core::retrieval::rank;
use qep_core::{build_index, Query, RankingModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn oracle_raw(kind: PredictorKind, c: &OracleCorpus, q: &[String], k: usize) -> Vec<f64> {
    match kind {
        PredictorKind::Gep => oracle::gep(c, q, CATEGORY, k),
        PredictorKind::Scs => oracle::scs(c, q, CATEGORY),
        PredictorKind::AvIdf => oracle::avidf(c, q, CATEGORY),
        PredictorKind::AvIctf => oracle::avictf(c, q, CATEGORY),
        PredictorKind::AvPmi => oracle::avpmi(c, q, CATEGORY),
        PredictorKind::Cori => oracle::cori(c, q, CATEGORY, 0.4),
        PredictorKind::Uniform => vec![1.0; c.categories[0].groups.len()],
    }
}

#[test]
fn predictors_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let fx = random_fixture(&mut rng, 20, 4);
        let index = build_index(&fx.docs, &fx.categories).unwrap();
        let oc = OracleCorpus::new(&fx.docs, &fx.categories);
        let query = Query::from_terms(fx.query.clone());
        for k in [1, 3, 10, 100] {
            let config = PredictorConfig {
                k,
                ..Default::default()
            };
            for kind in PredictorKind::ALL {
                let got = Builtin::new(kind, config).predict(&index, &query, CATEGORY).unwrap();
                let want = oracle_raw(kind, &oc, &fx.query, k);
                for (g, (a, b)) in got.raw.iter().zip(&want).enumerate() {
                    assert!((a - b).abs() <= 1e-9, "case {case} {kind} k={k} group {g}: {a} vs {b}");
                }
                for (a, b) in got.distribution.values.iter().zip(oracle::normalize(&want)) {
                    assert!((a - b).abs() <= 1e-9, "case {case} {kind} k={k}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn rank_matches_score_all_then_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..200 {
        let fx = random_fixture(&mut rng, 20, 2);
        let index = build_index(&fx.docs, &fx.categories).unwrap();
        let oc = OracleCorpus::new(&fx.docs, &fx.categories);
        let query = Query::from_terms(fx.query.clone());
        for (model, om) in [
            (RankingModel::bm25(), OracleModel::Bm25 { k1: 1.2, b: 0.75 }),
            (RankingModel::TfIdf, OracleModel::TfIdf),
        ] {
            for k in [1, 5, 100] {
                let got: Vec<(String, f64)> = rank(&index, "q", &query, model, k)
                    .unwrap()
                    .entries
                    .into_iter()
                    .map(|e| (e.doc_id, e.score))
                    .collect();
                let want = rank_all(&oc, &fx.query, om, k);
                if let Err(e) = rankings_agree(&got, &want, 1e-9) {
                    panic!("case {case} {} k={k}: {e}", model.name());
                }
            }
        }
    }
}
