use std::fs;

use mcsv::bench::*;
use mcsv::generators::Series;

const SUITE: &str = r#"
repeats = 3
oracle_max_n = 12
jobs = 2
emit_models = true

[[sweep]]
series = "sweepN"
values = [5, 8, 12]
q = 2

[[sweep]]
series = "sweepQ"
values = [1, 2]
n = 10

[[spec]]
series = "S1"
n = 9
q = 2
"#;

#[test]
fn report_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SuiteConfig::parse(SUITE).unwrap();
    let specs = cfg.specs().unwrap();
    let bc = cfg.bench_config(Some(dir.path())).unwrap();
    let report = run_suite(&specs, &bc).unwrap();
    assert_eq!(report.records.len(), 6 * 3);
    assert!(oracle_disagreements(&report.records).is_empty());
    assert!(report.records.iter().all(|r| r.status == Status::Ok));
    assert!(report.records.iter().all(|r| r.oracle_value.is_some()));

    let paths = write_report(dir.path(), &report).unwrap();
    let names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for n in ["records.tsv", "summary.tsv", "plot_sweepN.tsv", "plot_sweepQ.tsv", "plot_S1.tsv"] {
        assert!(names.iter().any(|x| x == n), "missing {n}");
    }

    let text = fs::read_to_string(dir.path().join("records.tsv")).unwrap();
    let back = records_from_tsv(&text).unwrap();
    assert_eq!(back, report.records);
    assert_eq!(summarize(&back), report.summary);
    assert_eq!(
        summary_to_tsv(&summarize(&back)),
        fs::read_to_string(dir.path().join("summary.tsv")).unwrap()
    );

    let sweep_n: Vec<f64> = report
        .summary
        .iter()
        .filter(|r| r.series == Series::SweepN)
        .map(|r| r.x)
        .collect();
    assert_eq!(sweep_n, vec![5.0, 8.0, 12.0]);

    for r in &report.records {
        let model = r.model_path.as_ref().expect("models requested");
        assert!(fs::read_to_string(model).unwrap().starts_with("\\ Maximum cardinality"));
    }
}

#[test]
fn seeds_are_reproducible() {
    let cfg = SuiteConfig::parse("repeats = 2\n[[spec]]\nseries = \"S2\"\nn = 10\nq = 2\n").unwrap();
    let bc = cfg.bench_config(None).unwrap();
    let a = run_suite(&cfg.specs().unwrap(), &bc).unwrap();
    let b = run_suite(&cfg.specs().unwrap(), &bc).unwrap();
    let key = |r: &BenchRecord| (r.instance_id.clone(), r.dp_value, r.dp_peak_states, r.oracle_value);
    assert_eq!(
        a.records.iter().map(key).collect::<Vec<_>>(),
        b.records.iter().map(key).collect::<Vec<_>>()
    );
    assert_ne!(a.records[0].seed, a.records[1].seed);
}

#[test]
fn rejects_malformed_records() {
    assert!(records_from_tsv("nope\n").is_err());
    let good = records_to_tsv(&[]);
    assert!(records_from_tsv(&format!("{good}a\tb\n")).is_err());
}
