use degcrit::config::{ExperimentConfig, Points};
use degcrit::experiment::{run_experiment, Aggregates, ResultTable, TrialRow};
use degcrit::io::{format_float, load_csv, load_json, save_csv, save_json, write_csv};

fn config(jobs: usize) -> ExperimentConfig {
    ExperimentConfig {
        degrees: "1,3,5,7".into(),
        n: 300,
        points: Points::Mu(vec![-1.0, 0.0, 1.5]),
        trials: 60,
        seed: 42,
        jobs,
        ..Default::default()
    }
}

fn csv_bytes(t: &ResultTable) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(t.rows(), &mut buf).unwrap();
    buf
}

#[test]
fn output_independent_of_thread_count() {
    let one = run_experiment(&config(1)).unwrap();
    let eight = run_experiment(&config(8)).unwrap();
    let again = run_experiment(&config(8)).unwrap();
    assert!(!one.has_errors());
    assert_eq!(csv_bytes(&one), csv_bytes(&eight));
    assert_eq!(csv_bytes(&eight), csv_bytes(&again));
    // Trial indices are global across points.
    let trials: Vec<u64> = one.rows().map(|r| r.trial).collect();
    assert_eq!(trials, (0..180).collect::<Vec<_>>());
}

#[test]
fn seed_changes_output() {
    let a = run_experiment(&config(2)).unwrap();
    let b = run_experiment(&ExperimentConfig { seed: 43, ..config(2) }).unwrap();
    assert_ne!(csv_bytes(&a), csv_bytes(&b));
}

#[test]
fn aggregates_match_rows() {
    let t = run_experiment(&config(4)).unwrap();
    for p in &t.points {
        assert!(Aggregates::from_rows(&p.rows).same_as(&p.aggregates));
        assert_eq!(p.aggregates.trials, 60);
        assert_eq!(p.aggregates.excess_histogram.iter().sum::<u64>(), 60);
    }
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let t = run_experiment(&config(4)).unwrap();

    let csv = dir.path().join("rows.csv");
    save_csv(&t, &csv).unwrap();
    let rows = load_csv(&csv).unwrap();
    // Floats are written with nine significant digits.
    let rounded: Vec<_> = t
        .rows()
        .map(|r| TrialRow { realized_mu: format_float(r.realized_mu).parse().unwrap(), ..r.clone() })
        .collect();
    assert_eq!(rows, rounded);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 181);

    let json = dir.path().join("table.json");
    save_json(&t, &json).unwrap();
    let back = load_json(&json).unwrap();
    assert_eq!(back.config, t.config);
    assert_eq!(back.points.len(), t.points.len());
    for (a, b) in back.points.iter().zip(&t.points) {
        assert_eq!(a.rows, b.rows);
        assert!(a.aggregates.same_as(&b.aggregates));
        assert!(Aggregates::from_rows(&a.rows).same_as(&a.aggregates));
    }
}

#[test]
fn corrupted_rows_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let t = run_experiment(&config(2)).unwrap();
    let csv = dir.path().join("rows.csv");
    save_csv(&t, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    // A complex part with a diameter but no longest path.
    let line = text.lines().skip(1).find(|l| !l.contains(",-1,-1,-1,")).expect("some complex part");
    let f: Vec<&str> = line.split(',').collect();
    let broken = [&f[..10], &["-1"], &f[11..]].concat().join(",");
    std::fs::write(&csv, text.replace(line, &broken)).unwrap();
    assert!(load_csv(&csv).is_err());
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(3);
    let path = dir.path().join("exp.conf");
    std::fs::write(&path, format!("# grid\n{}", cfg.to_text())).unwrap();
    assert_eq!(ExperimentConfig::from_file(&path).unwrap(), cfg);
    std::fs::write(&path, "degrees = 1,3\nbogus = 1\n").unwrap();
    assert!(ExperimentConfig::from_file(&path).is_err());
}
