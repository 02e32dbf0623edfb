use exact_kmeans::{DataSet, IndexMode, Tree};
use kmeans_tuner::select::split_records;
use kmeans_tuner::truth::{INDEX_MULTIPLE, INDEX_NONE, INDEX_PURE, INDEX_SINGLE};
use kmeans_tuner::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn blobs(n: usize, d: usize, centers: usize, sigma: f64, seed: u64) -> DataSet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cs: Vec<Vec<f64>> = (0..centers)
        .map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let noise = Normal::new(0.0, sigma).unwrap();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            cs[i % centers]
                .iter()
                .map(|&c| c + noise.sample(&mut rng))
                .collect()
        })
        .collect();
    DataSet::from_rows(&rows).unwrap()
}

#[test]
fn selective_run_labels_are_consistent() {
    let opts = SelectiveOptions {
        t_max: 3,
        repeats: 1,
        ..SelectiveOptions::default()
    };
    for (d, sigma) in [(2, 0.01), (24, 0.3)] {
        let data = blobs(600, d, 8, sigma, d as u64);
        let rec = selective_run(&data, 8, &SELECTION_POOL, &opts).unwrap();
        assert!(SELECTION_POOL.iter().any(|b| b.name() == rec.label));
        assert!([INDEX_NONE, INDEX_PURE, INDEX_SINGLE, INDEX_MULTIPLE].contains(&rec.index_label));
        assert_eq!(rec.ranking.len(), rec.timing_ms.len());
        let times: Vec<f64> = rec.ranking.iter().map(|c| rec.timing_ms[c]).collect();
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
        let best_seq = rec
            .ranking
            .iter()
            .find(|c| SELECTION_POOL.iter().any(|b| b.name() == c.as_str()))
            .unwrap();
        assert_eq!(best_seq, &rec.label);
        if rec.index_label == INDEX_NONE {
            assert_eq!(rec.ranking.len(), 6);
            assert!(rec.timing_ms["pure"] > rec.timing_ms[&rec.label]);
        } else {
            assert_eq!(rec.ranking.len(), 8);
        }
        let tree = Tree::build_ball(&data, opts.capacity);
        assert_eq!(
            rec.features,
            extract_features(&data, 8, &tree, opts.capacity)
        );
    }
}

fn synthetic_records(count: usize, seed: u64) -> Vec<GroundTruthRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = ["hame", "drak", "heap", "yinyang", "regroup", "pure"];
    (0..count)
        .map(|i| {
            let mut a = [0.0; FEATURE_COUNT];
            for v in a.iter_mut() {
                *v = rng.random_range(0.0..1.0);
            }
            a[2] = rng.random_range(1.0..64.0);
            a[1] = rng.random_range(2.0..128.0);
            let (label, index) = match (a[2] < 16.0, a[1] > 40.0) {
                (true, _) => ("hame", INDEX_PURE),
                (false, true) => ("regroup", INDEX_NONE),
                (false, false) => ("drak", INDEX_NONE),
            };
            let best = if index == INDEX_PURE {
                "pure".to_string()
            } else {
                label.to_string()
            };
            let mut ranking = vec![best.clone()];
            ranking.extend(all.iter().map(|s| s.to_string()).filter(|s| *s != best));
            GroundTruthRecord {
                dataset_id: format!("s{i}"),
                k: a[1] as usize,
                features: FeatureVector::from_array(a),
                label: label.into(),
                index_label: index,
                ranking,
                timing_ms: Default::default(),
            }
        })
        .collect()
}

#[test]
fn tree_learns_a_rule_the_baseline_misses() {
    let records = synthetic_records(200, 1);
    let (train, test) = split_records(&records, 0.7, 9);
    let sel = Selector::<DecisionTreeModel>::train(&train).unwrap();
    let acc = |set: &[GroundTruthRecord]| {
        set.iter()
            .filter(|r| sel.bound.predict(&r.features.to_array()) == r.label)
            .count() as f64
            / set.len() as f64
    };
    let majority = test
        .iter()
        .filter(|r| r.label == "drak")
        .count()
        .max(test.iter().filter(|r| r.label == "hame").count()) as f64
        / test.len() as f64;
    assert!(acc(&train) >= acc(&test));
    assert!(acc(&test) > majority, "{} vs {majority}", acc(&test));
    let cmp = compare_on_holdout(&records, 9).unwrap();
    assert!(cmp.tree_mrr > cmp.baseline_mrr, "{cmp:?}");
    assert!(cmp.knn_mrr > 0.0);
}

#[test]
fn models_round_trip_through_json() {
    let records = synthetic_records(50, 2);
    let sel = Selector::<DecisionTreeModel>::train(&records).unwrap();
    let json = serde_json::to_string(&sel).unwrap();
    let back: Selector<DecisionTreeModel> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, sel);
    let knn = Selector::<KnnModel>::train(&records).unwrap();
    let back: Selector<KnnModel> =
        serde_json::from_str(&serde_json::to_string(&knn).unwrap()).unwrap();
    assert_eq!(back, knn);
}

proptest! {
    #[test]
    fn mrr_ignores_record_order(ranks in prop::collection::vec(1usize..6, 1..20), seed in any::<u64>()) {
        let ranking: Vec<String> = (1..6).map(|i| i.to_string()).collect();
        let preds: Vec<String> = ranks.iter().map(|r| r.to_string()).collect();
        let rankings = vec![ranking; preds.len()];
        let a = mrr(&preds, &rankings).unwrap();
        let mut shuffled = preds.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = mrr(&shuffled, &rankings).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn predicted_configs_are_valid(bound in 0usize..5, index in 1u8..5) {
        let cfg = combine(SELECTION_POOL[bound].name(), index).unwrap();
        prop_assert!(cfg.validate().is_ok());
        prop_assert_eq!(cfg.index_mode == IndexMode::None, index == INDEX_NONE);
        let back: exact_kmeans::KnobConfig = cfg.to_string().parse().unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn features_are_finite(n in 1usize..400, d in 1usize..6, f in 1usize..40, seed in any::<u64>()) {
        let data = blobs(n, d, 3.min(n), 0.2, seed);
        let tree = Tree::build_ball(&data, f);
        let fv = extract_features(&data, 2, &tree, f);
        prop_assert!(fv.to_array().iter().all(|v| v.is_finite()));
        let cap = n as f64 / f as f64;
        prop_assert!(fv.mu_lp >= 0.0 && fv.mu_lp <= cap.max(1.0));
        prop_assert!(fv.sigma_lp >= 0.0 && fv.sigma_lp <= cap.max(1.0));
        prop_assert_eq!(fv, extract_features(&data, 2, &tree, f));
    }
}
