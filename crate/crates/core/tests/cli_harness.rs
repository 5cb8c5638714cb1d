use std::path::{Path, PathBuf};
use std::process::Command;

use besovq_flow::cli_harness::*;
use besovq_flow::function_spaces::{besovq_norm, SpaceParams};
use besovq_flow::meyer_wavelet::{analyze, BasisSpec, WaveletIndex};
use besovq_flow::operators::max_divergence;
use besovq_flow::Grid;

fn plans_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../plans")
}

fn spec(size: usize) -> BasisSpec {
    BasisSpec::for_grid(&Grid::new(2, size, 0).unwrap()).unwrap()
}

#[test]
fn initial_kinds_parse_and_reject_unknown() {
    for kind in InitialKind::ALL {
        assert_eq!(kind.name().parse::<InitialKind>().unwrap(), kind);
    }
    assert!("vortex-sheet".parse::<InitialKind>().is_err());
    assert!("bogus".parse::<Scenario>().is_err());
    assert_eq!("lemma-check".parse::<Scenario>().unwrap(), Scenario::LemmaCheck);
}

#[test]
fn generated_data_is_divergence_free() {
    let spec = spec(32);
    let space = SpaceParams::default();
    for kind in InitialKind::ALL {
        let mut data = InitialData::new(kind, 1.0);
        if kind == InitialKind::SingleWavelet {
            data.wavelet = Some(WaveletIndex::new(1, 1, &[1, 0]));
        }
        let f = generate_initial_data(&data, &spec, &space, 3).unwrap();
        assert!(f.l2_norm() > 0.0, "{kind}");
        assert!(max_divergence(&f).unwrap() < 1e-10 * f.sup_norm().max(1.0), "{kind}");
    }
    let tg = generate_initial_data(&InitialData::new(InitialKind::TaylorGreen, 1.0), &spec, &space, 0).unwrap();
    assert!(max_divergence(&tg).unwrap() < 1e-13);
}

#[test]
fn random_besov_is_normalized_and_scales() {
    let spec = spec(32);
    let space = SpaceParams::default();
    let unit = generate_initial_data(&InitialData::new(InitialKind::RandomBesov, 1.0), &spec, &space, 7).unwrap();
    let norm = besovq_norm(&analyze(&unit, &spec).unwrap().coefficients, &space).unwrap().value;
    assert!((0.5..=2.0).contains(&norm), "{norm}");
    let zero = generate_initial_data(&InitialData::new(InitialKind::RandomBesov, 0.0), &spec, &space, 7).unwrap();
    assert_eq!(zero.max_abs_coefficient(), 0.0);
    let again = generate_initial_data(&InitialData::new(InitialKind::RandomBesov, 1.0), &spec, &space, 7).unwrap();
    assert_eq!(again, unit);
    let other = generate_initial_data(&InitialData::new(InitialKind::RandomBesov, 1.0), &spec, &space, 8).unwrap();
    assert_ne!(other, unit);
}

#[test]
fn single_wavelet_needs_an_index() {
    let data = InitialData::new(InitialKind::SingleWavelet, 1.0);
    assert!(generate_initial_data(&data, &spec(32), &SpaceParams::default(), 0).is_err());
}

#[test]
fn example_plans_load_and_validate() {
    let mut names: Vec<_> = std::fs::read_dir(plans_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    names.sort();
    assert!(names.len() >= 4);
    for path in names {
        let plan = ExperimentPlan::load(&path).unwrap();
        plan.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn overrides_replace_plan_values() {
    let mut plan = ExperimentPlan::new(Scenario::Solve);
    let before = plan.clone();
    Overrides::default().apply(&mut plan);
    assert_eq!(plan, before);
    let o = Overrides {
        seed: Some(9),
        grid: Some(32),
        beta: Some(1.0),
        q: Some(3.0),
        t_final: Some(0.2),
        iters: Some(4),
        ..Default::default()
    };
    o.apply(&mut plan);
    assert_eq!((plan.seed, plan.grid, plan.max_iter), (9, 32, 4));
    assert_eq!((plan.space.beta, plan.space.q, plan.t_final), (1.0, 3.0, 0.2));
    assert_eq!(plan.space.p, before.space.p);
    let mut bad = plan.clone();
    bad.space.beta = 0.4;
    assert!(bad.validate().is_err());
    let mut bad = plan;
    bad.grid = 48;
    assert!(bad.validate().is_err());
}

#[test]
fn norms_of_a_single_wavelet_match_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = ExperimentPlan::load(plans_dir().join("norms_single_wavelet.json")).unwrap();
    plan.out = dir.path().to_path_buf();
    let report = run_plan(&plan).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert_eq!(report.assertions.len(), 1);
    for f in ["norms.json", "norms.csv", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn solve_meets_its_assertions_and_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut plan = ExperimentPlan::new(Scenario::Solve);
    plan.grid = 32;
    plan.space = SpaceParams::critical(0.5, 2.0, 2.0, 1.0, 3.0, 0.5).unwrap();
    plan.assertions = Assertions {
        max_contraction: Some(0.5),
        max_residual: Some(1e-8),
        max_oracle_distance: Some(1e-4),
        max_iterations: None,
    };
    plan.out = a.path().to_path_buf();
    let first = run_plan(&plan).unwrap();
    assert!(first.passed(), "{:?}", first.assertions);
    assert!(first.assertions.len() >= 3);
    plan.out = b.path().to_path_buf();
    let second = run_plan(&plan).unwrap();
    assert_eq!(second.files, first.files);
    for f in ["diagnostics.json", "iterations.csv", "initial.bqck", "final.bqck"] {
        assert!(first.files.iter().any(|x| x == f), "{f}");
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn impossible_assertion_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = ExperimentPlan::new(Scenario::Solve);
    plan.grid = 32;
    plan.out = dir.path().to_path_buf();
    plan.assertions.max_iterations = Some(1);
    let report = run_plan(&plan).unwrap();
    assert!(!report.passed());
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn traceability_fills_in_after_a_lemma_check() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = traceability_report(Some(dir.path())).unwrap();
    assert_eq!(fresh.rows.len(), 17);
    assert!(fresh.rows.iter().all(|r| r.status == NOT_YET_RUN));
    let mut plan = ExperimentPlan::new(Scenario::LemmaCheck);
    plan.suites = vec!["decay".into(), "partition_of_unity".into()];
    plan.out = dir.path().to_path_buf();
    let report = run_plan(&plan).unwrap();
    assert!(report.passed(), "{:?}", report.assertions);
    assert!(dir.path().join("suites/decay_reports.json").exists());
    let after = traceability_report(Some(dir.path())).unwrap();
    for r in &after.rows {
        let expected = if ["decay", "partition_of_unity"].contains(&r.suite.as_str()) { "PASS" } else { NOT_YET_RUN };
        assert_eq!(r.status, expected, "{}", r.suite);
    }
    let md = std::fs::read_to_string(dir.path().join("traceability.md")).unwrap();
    assert_eq!(md.lines().count(), 19);
    assert!(suite_by_name("no_such_suite").is_err());
}

#[test]
fn binary_reports_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_besovq-flow");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("norms");
    let status = Command::new(exe)
        .args(["norms", "--plan"])
        .arg(plans_dir().join("norms_single_wavelet.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("manifest.json").exists());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scenario": "solve", "grid": 48}"#).unwrap();
    let status = Command::new(exe).args(["solve", "--plan"]).arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let status = Command::new(exe)
        .args(["traceability", "--out"])
        .arg(dir.path().join("trace"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("trace/traceability.md").exists());
}
