use std::collections::BTreeMap;

use coexist::io::{
    emit_plot_script, emit_report_csv, read_report_csv, run_experiment, Experiment, FigureKind,
    RunManifest,
};
use coexist::{Error, MeasurementMode, SimOptions, Sweep, SystemConfig};

fn two_reports() -> Vec<coexist::SimReport> {
    let cfg = SystemConfig::default();
    coexist::run_sweep(&cfg, &Sweep::D1(vec![0.1, 0.45]), &SimOptions::new(400)).unwrap()
}

#[test]
fn csv_layout_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let reports = two_reports();
    emit_report_csv(&reports, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(
        text.starts_with("sweep_param,empirical_ap,stderr_ap,empirical_ip,stderr_ip,n_trials,seed")
    );

    let rows = read_report_csv(&path).unwrap();
    let sig10 = |a: f64, b: f64| a == b || ((a - b) / b).abs() < 5e-10;
    for (row, rep) in rows.iter().zip(&reports) {
        assert!(sig10(row.sweep_param, rep.d1));
        assert!(sig10(row.empirical_ap, rep.empirical_ap));
        assert!(sig10(row.stderr_ap, rep.stderr_ap));
        assert!(sig10(row.empirical_ip, rep.empirical_ip));
        assert!(sig10(row.stderr_ip, rep.stderr_ip));
        assert_eq!(row.n_trials, rep.n_trials);
        assert_eq!(row.cases.values().sum::<usize>(), rep.n_trials);
    }

    let again = dir.path().join("u.csv");
    emit_report_csv(&two_reports(), &again).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn empty_report_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let err = emit_report_csv(&[], &dir.path().join("x.csv")).unwrap_err();
    assert!(matches!(err, Error::Empty(_)));
}

#[test]
fn plot_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ApIpVsD1.csv");
    emit_report_csv(&two_reports(), &csv).unwrap();

    let ap = emit_plot_script(&[&csv], FigureKind::ApVsD1, 0.01).unwrap();
    let text = std::fs::read_to_string(&ap).unwrap();
    assert!(text.contains("\"empirical_ap\"") && text.contains("\"sweep_param\""));
    assert!(text.contains("\"ApIpVsD1.csv\""));
    assert!(
        !text.contains(dir.path().to_str().unwrap()),
        "must use relative path"
    );
    assert!(!text.contains("axhline"));

    let ip = emit_plot_script(&[&csv], FigureKind::IpVsD1, 0.01).unwrap();
    let text = std::fs::read_to_string(ip).unwrap();
    assert!(text.contains("\"empirical_ip\"") && text.contains("axhline(0.01"));

    let missing = dir.path().join("nope.csv");
    let err = emit_plot_script(&[&missing], FigureKind::ApVsD1, 0.01).unwrap_err();
    assert!(err.to_string().contains("nope.csv"), "{err}");
}

#[test]
fn experiments_write_only_under_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out");
    let cfg = SystemConfig {
        measurement: MeasurementMode::Ideal,
        ..Default::default()
    };
    let manifest = RunManifest {
        output_dir: out.clone(),
        experiment: Experiment::ImperfectGammaT,
        trials: 200,
        d1_grid: vec![0.1, 0.3],
        ..RunManifest::default()
    };
    let written = run_experiment(&cfg, &manifest).unwrap();
    assert_eq!(written.len(), 4);
    assert!(written.iter().all(|p| p.starts_with(&out) && p.is_file()));

    let single = RunManifest {
        experiment: Experiment::SingleDecision,
        decide_d0: Some(0.3),
        ..manifest
    };
    let written = run_experiment(&cfg, &single).unwrap();
    let text = std::fs::read_to_string(&written[0]).unwrap();
    assert!(text.contains("rho_ap = ") && text.contains("scenario = II"));
}

#[test]
fn load_reports_missing_file_path() {
    let err = coexist::io::load_config(
        Some(std::path::Path::new("/no/such/cfg.toml")),
        &BTreeMap::new(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/no/such/cfg.toml"));
}
