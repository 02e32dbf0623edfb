use exact_kmeans::KnobConfig;
use kmeans_bench::dataset::gen_gaussian;
use kmeans_bench::footprint::footprint_estimate;
use kmeans_bench::log::{read_logs, write_logs, IterationLog, RunLog, Totals, SCHEMA_VERSION};
use kmeans_bench::report::{report, report_rows, Format};
use kmeans_bench::runner::{run_benchmark, BenchDataset, BenchOptions};
use proptest::prelude::*;

fn log(config: &str, seed: u64, nanos: u64, iters: Vec<IterationLog>) -> RunLog {
    let config: KnobConfig = config.parse().unwrap();
    let mut iterations = iters;
    if let Some(first) = iterations.first_mut() {
        first.wall_nanos = nanos;
    }
    RunLog {
        schema_version: SCHEMA_VERSION,
        run_id: format!("d/k4/s{seed}/{config}"),
        dataset_id: "d".into(),
        n: 100,
        d: 2,
        k: 4,
        config,
        init_seed: seed,
        init_indices: vec![0, 1, 2, 3],
        setup_nanos: 0,
        totals: Totals::sum(&iterations),
        iterations,
        converged: true,
        footprint_bytes_estimate: 0.0,
        bound_violations: None,
        error: None,
    }
}

fn iter_log(i: usize) -> IterationLog {
    IterationLog {
        iter: i,
        wall_nanos: 1,
        assign_nanos: 1,
        refine_nanos: 0,
        dist_comps: 400,
        center_dist_comps: 0,
        data_accesses: 100,
        node_accesses: 0,
        bound_accesses: 0,
        bound_updates: 0,
        pruning_power: 0.0,
        changed: 0,
        sse: Some(1.5),
    }
}

#[test]
fn lone_lloyd_run_has_unit_speedup() {
    let rows = report_rows(&[log("lloyd", 0, 1000, vec![iter_log(0)])]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].mean_speedup, Some(1.0));
    assert_eq!(rows[0].median_speedup, Some(1.0));
}

#[test]
fn rows_sorted_by_speedup_and_missing_last() {
    let mut other = log("hame", 0, 10, vec![iter_log(0)]);
    other.dataset_id = "e".into();
    other.run_id = "e/k4/s0/hame".into();
    let logs = vec![
        log("lloyd", 0, 1000, vec![iter_log(0)]),
        log("hame", 0, 250, vec![iter_log(0)]),
        log("yinyang", 0, 500, vec![iter_log(0)]),
        other,
    ];
    let rows = report_rows(&logs);
    let order: Vec<(&str, Option<f64>)> = rows
        .iter()
        .map(|r| (r.config.as_str(), r.mean_speedup))
        .collect();
    assert_eq!(
        order,
        [
            ("hame", Some(4.0)),
            ("yinyang", Some(2.0)),
            ("lloyd", Some(1.0)),
            ("hame", None)
        ]
    );
}

#[test]
fn failed_runs_are_excluded_and_empty_reports_fail() {
    let mut failed = log("lloyd", 0, 1000, vec![]);
    failed.error = Some("boom".into());
    assert!(report_rows(std::slice::from_ref(&failed)).is_empty());
    assert!(report(&[failed], Format::Text).is_err());
    assert!(report(&[], Format::Json).is_err());
}

#[test]
fn text_and_json_formats() {
    let logs = vec![
        log("lloyd", 0, 1000, vec![iter_log(0)]),
        log("hame", 0, 500, vec![iter_log(0)]),
    ];
    let text = report(&logs, Format::Text).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().next().unwrap().starts_with("dataset"));
    let json: serde_json::Value =
        serde_json::from_str(&report(&logs, Format::Json).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
    assert_eq!(json[0]["config"], "hame");
}

#[test]
fn malformed_lines_are_skipped() {
    let mut buf = Vec::new();
    write_logs(&mut buf, &[log("lloyd", 0, 5, vec![iter_log(0)])]).unwrap();
    buf.extend_from_slice(b"\n{not json}\n");
    write_logs(&mut buf, &[log("hame", 1, 5, vec![iter_log(0)])]).unwrap();
    let (logs, skipped) = read_logs(buf.as_slice()).unwrap();
    assert_eq!(logs.len(), 2);
    assert_eq!(skipped.len(), 1);
    assert!(skipped[0].starts_with("line 3:"));
}

#[test]
fn one_leaf_footprint() {
    for (n, d) in [(10, 2), (500, 7)] {
        assert_eq!(footprint_estimate(n, d, n), (n + 2 * d + 4) as f64);
    }
}

#[test]
fn real_runs_round_trip() {
    let ds = BenchDataset {
        id: "g".into(),
        data: gen_gaussian(200, 3, 3, 0.01, 4).unwrap(),
    };
    let cfgs: Vec<KnobConfig> = ["lloyd", "hame", "pure", "multiple+elka"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let logs = run_benchmark(
        &[ds],
        &[3],
        &cfgs,
        &BenchOptions {
            audit: true,
            ..BenchOptions::default()
        },
    );
    let mut buf = Vec::new();
    write_logs(&mut buf, &logs).unwrap();
    let (back, skipped) = read_logs(buf.as_slice()).unwrap();
    assert!(skipped.is_empty());
    assert_eq!(back, logs);
    assert!(logs
        .iter()
        .all(|l| l.totals.iterations == l.iterations.len()));
}

fn arb_iter() -> impl Strategy<Value = IterationLog> {
    (
        0usize..50,
        any::<u32>(),
        any::<u32>(),
        0.0f64..=1.0,
        proptest::option::of(-1e12f64..1e12),
    )
        .prop_map(|(iter, a, b, pruning_power, sse)| IterationLog {
            iter,
            wall_nanos: a as u64 + b as u64,
            assign_nanos: a as u64,
            refine_nanos: b as u64,
            dist_comps: a as u64 * 3,
            center_dist_comps: b as u64,
            data_accesses: a as u64,
            node_accesses: b as u64 / 2,
            bound_accesses: a as u64 / 3,
            bound_updates: b as u64 / 5,
            pruning_power,
            changed: iter * 2,
            sse,
        })
}

proptest! {
    #[test]
    fn jsonl_round_trip_is_identity(
        iters in proptest::collection::vec(arb_iter(), 0..6),
        seed in any::<u64>(),
        cfg in prop::sample::select(vec!["lloyd", "hame", "pure", "single+yinyang", "kd-multiple+elka", "unik"]),
        error in proptest::option::of("[a-z ]{0,12}"),
        violations in proptest::option::of(any::<u64>()),
        footprint in 0.0f64..1e9,
    ) {
        let mut l = log(cfg, seed, 7, iters);
        l.error = error;
        l.bound_violations = violations;
        l.footprint_bytes_estimate = footprint;
        let mut buf = Vec::new();
        write_logs(&mut buf, std::slice::from_ref(&l)).unwrap();
        prop_assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 1);
        let (back, skipped) = read_logs(buf.as_slice()).unwrap();
        prop_assert!(skipped.is_empty());
        prop_assert_eq!(back, vec![l]);
    }
}
