use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::function_spaces::{
    besov_norm, besovq_norm, cube_levels, log_time_grid, tent_norm, write_reports_csv, NormReport, SpaceParams,
};
use crate::meyer_wavelet::{analyze, synthesize, CoefficientSet};
use crate::mild_solver::{
    etd_march, iteration_smallness_scan, picard_solve, write_checkpoint, write_scan_csv, IterationDiagnostics,
    ScanTable,
};
use crate::semigroup::semigroup_trajectory;

use super::initial::{generate_initial_data, InitialKind};
use super::plan::{ExperimentPlan, Scenario};
use super::suites::{run_suite, suite_by_name, write_json, SuiteContext, SUITES};
use super::trace::{suite_result_path, traceability_report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub assertions: Vec<AssertionResult>,
    /// Files written, relative to the output directory.
    pub files: Vec<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

struct Run<'a> {
    plan: &'a ExperimentPlan,
    assertions: Vec<AssertionResult>,
    files: Vec<String>,
}

impl Run<'_> {
    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let path = self.plan.out.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        self.files.push(name.into());
        Ok(path)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let path = self.path(name)?;
        write_json(&path, value)
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.assertions.push(AssertionResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn limit(&mut self, name: &str, value: f64, limit: Option<f64>) {
        if let Some(limit) = limit {
            self.check(name, value <= limit, format!("{value:e} <= {limit:e}"));
        }
    }
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    initial: &'a super::initial::InitialData,
    besovq_data_norm: f64,
    oracle_distance: f64,
    endpoint_l2: f64,
    diagnostics: &'a IterationDiagnostics,
}

fn solve(run: &mut Run) -> Result<()> {
    let plan = run.plan;
    let cfg = plan.solver_config()?;
    let a = generate_initial_data(&plan.initial, &cfg.spec, &cfg.space, plan.seed)?;
    let (tr, d) = picard_solve(&a, &cfg)?;
    let march = etd_march(&a, &cfg)?;
    let oracle = tr.endpoint().relative_l2_distance(march.endpoint())?;
    let besovq = besovq_norm(&analyze(&a, &cfg.spec)?.coefficients, &cfg.space)?.value;
    run.json(
        "diagnostics.json",
        &SolveSummary {
            initial: &plan.initial,
            besovq_data_norm: besovq,
            oracle_distance: oracle,
            endpoint_l2: tr.endpoint().l2_norm(),
            diagnostics: &d,
        },
    )?;
    let path = run.path("iterations.csv")?;
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    w.write_record(["iteration", "tent_norm", "diff_tent", "diff_l2"])?;
    for (k, tent) in d.tent_norms.iter().enumerate() {
        let diff = |v: &[f64]| k.checked_sub(1).and_then(|i| v.get(i)).map_or(String::new(), |x| x.to_string());
        w.write_record([k.to_string(), tent.to_string(), diff(&d.diff_tent), diff(&d.diff_l2)])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    write_checkpoint(run.path("initial.bqck")?, &a, cfg.beta, 0.0)?;
    write_checkpoint(run.path("final.bqck")?, tr.endpoint(), cfg.beta, cfg.t_final)?;
    let asserts = plan.assertions.clone();
    if !asserts.is_empty() {
        run.check("converged", d.converged(), format!("{:?}", d.status));
    }
    run.limit("contraction_factor", d.contraction_factor, asserts.max_contraction);
    run.limit("residual", d.residual, asserts.max_residual);
    run.limit("oracle_distance", oracle, asserts.max_oracle_distance);
    run.limit("iterations", d.iterations as f64, asserts.max_iterations.map(|v| v as f64));
    Ok(())
}

fn norm_input(plan: &ExperimentPlan) -> Result<(SpectralField, CoefficientSet)> {
    let spec = plan.spec()?;
    if plan.initial.kind == InitialKind::SingleWavelet {
        let idx = plan
            .initial
            .wavelet
            .ok_or_else(|| crate::error::invalid("single-wavelet needs a wavelet index"))?;
        let set = CoefficientSet::single(spec, idx, plan.initial.amplitude)?;
        return Ok((synthesize(&set, &spec)?, set));
    }
    let field = generate_initial_data(&plan.initial, &spec, &plan.space, plan.seed)?;
    let set = analyze(&field, &spec)?.coefficients;
    Ok((field, set))
}

fn norms(run: &mut Run) -> Result<()> {
    let plan = run.plan;
    let space: SpaceParams = plan.space;
    let (field, set) = norm_input(plan)?;
    let spec = *set.spec();
    let mut reports: Vec<(String, NormReport)> = Vec::new();
    let besov = besov_norm(&set, space.gamma1, space.p, space.q)?;
    reports.push(("besov".into(), besov.clone()));
    reports.push(("besov_q".into(), besovq_norm(&set, &space)?));
    let t_min = 0.25 * 2f64.powf(-2.0 * space.beta * spec.j_max as f64);
    let t_max = 8.0 * 2f64.powf(2.0 * space.beta * spec.box_exp as f64);
    let mut times = vec![0.0];
    times.extend(log_time_grid(t_min, t_max, 4)?);
    let tc = semigroup_trajectory(&field, space.beta, &times, &spec)?;
    let tent = tent_norm(&tc, &space, &cube_levels(&set))?;
    for part in &tent.parts {
        reports.push((format!("semigroup_{}", part.functional), part.clone()));
    }
    run.json("norms.json", &reports)?;
    let path = run.path("norms.csv")?;
    write_reports_csv(&path, &reports)?;
    if plan.initial.kind == InitialKind::SingleWavelet {
        let idx = plan.initial.wavelet.expect("checked in norm_input");
        let n = spec.dim as f64;
        let expected = plan.initial.amplitude.abs() * 2f64.powf(idx.j as f64 * (space.gamma1 + n / 2.0 - n / space.p));
        let err = (besov.value - expected).abs() / expected.max(f64::MIN_POSITIVE);
        run.check("single_wavelet_besov_closed_form", err <= 1e-12, format!("relative error {err:e}"));
    }
    Ok(())
}

fn lemma_check(run: &mut Run) -> Result<()> {
    let plan = run.plan;
    let ids: Vec<u32> = if plan.suites.is_empty() {
        SUITES.iter().map(|s| s.id).collect()
    } else {
        plan.suites.iter().map(|s| suite_by_name(s).map(|i| i.id)).collect::<Result<_>>()?
    };
    let ctx = SuiteContext {
        seed: plan.seed,
        out: Some(plan.out.join("suites")),
    };
    for id in ids {
        let outcome = run_suite(id, &ctx)?;
        let rel = format!("suites/{}.json", outcome.name);
        debug_assert_eq!(plan.out.join(&rel), suite_result_path(&plan.out, &outcome.name));
        run.json(&rel, &outcome)?;
        let detail = outcome.notes.join("; ");
        run.check(outcome.name.clone(), outcome.passed, detail);
    }
    if let Ok(entries) = std::fs::read_dir(plan.out.join("suites")) {
        let mut extra: Vec<String> = entries
            .filter_map(|e| e.ok())
            .map(|e| format!("suites/{}", e.file_name().to_string_lossy()))
            .filter(|name| !run.files.contains(name))
            .collect();
        extra.sort();
        run.files.extend(extra);
    }
    let report = traceability_report(Some(&plan.out))?;
    run.json("traceability.json", &report)?;
    let path = run.path("traceability.md")?;
    std::fs::write(&path, report.to_markdown()).map_err(|e| Error::io(&path, e))
}

#[derive(Serialize)]
struct ScanSummary {
    beta: f64,
    table: ScanTable,
}

fn scan(run: &mut Run) -> Result<()> {
    let plan = run.plan;
    let base = plan.solver_config()?;
    let mut summaries = Vec::new();
    for &beta in &plan.betas {
        let space = SpaceParams { beta, ..plan.space };
        let cfg = crate::mild_solver::SolverConfig { beta, space, ..base };
        let dir = generate_initial_data(&plan.initial, &cfg.spec, &space, plan.seed)?;
        let norm = dir.l2_norm();
        if norm == 0.0 {
            return Err(crate::error::invalid("scan direction is zero"));
        }
        let dir = dir.scaled(1.0 / norm);
        let table = iteration_smallness_scan(&dir, &cfg, &plan.amplitudes)?;
        if let Some(row) = table.rows.iter().find(|r| r.amplitude == 0.0) {
            run.check(format!("beta_{beta}_zero_amplitude_converges"), row.converged(), format!("{:?}", row.status));
        }
        let path = run.path(&format!("scan_beta_{beta}.csv"))?;
        write_scan_csv(&path, &table)?;
        summaries.push(ScanSummary { beta, table });
    }
    let boundaries: Vec<(f64, Option<f64>)> = summaries.iter().map(|s| (s.beta, s.table.boundary)).collect();
    let found: Vec<f64> = boundaries.iter().filter_map(|b| b.1).collect();
    let monotone = (found.len() == boundaries.len()).then(|| found.windows(2).all(|w| w[0] <= w[1]));
    run.json(
        "scan.json",
        &serde_json::json!({
            "boundaries": boundaries,
            "boundary_nondecreasing_in_beta": monotone,
            "scans": summaries,
        }),
    )
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: Scenario,
    seed: u64,
    plan: &'a ExperimentPlan,
    passed: bool,
    assertions: &'a [AssertionResult],
    files: &'a [String],
}

/// Executes a plan, writing its artifacts and `manifest.json` under `plan.out`.
pub fn run_plan(plan: &ExperimentPlan) -> Result<RunReport> {
    plan.validate()?;
    std::fs::create_dir_all(&plan.out).map_err(|e| Error::io(&plan.out, e))?;
    let mut run = Run {
        plan,
        assertions: Vec::new(),
        files: Vec::new(),
    };
    match plan.scenario {
        Scenario::Solve => solve(&mut run)?,
        Scenario::Norms => norms(&mut run)?,
        Scenario::LemmaCheck => lemma_check(&mut run)?,
        Scenario::Scan => scan(&mut run)?,
    }
    let report = RunReport {
        scenario: plan.scenario,
        seed: plan.seed,
        assertions: run.assertions,
        files: run.files,
    };
    let mut files = report.files.clone();
    files.push("manifest.json".into());
    write_json(
        &plan.out.join("manifest.json"),
        &Manifest {
            scenario: plan.scenario,
            seed: plan.seed,
            plan,
            passed: report.passed(),
            assertions: &report.assertions,
            files: &files,
        },
    )?;
    Ok(RunReport { files, ..report })
}

/// Writes the traceability matrix for `out` as JSON and markdown next to the results.
pub fn write_traceability(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let report = traceability_report(Some(out))?;
    write_json(&out.join("traceability.json"), &report)?;
    let path = out.join("traceability.md");
    std::fs::write(&path, report.to_markdown()).map_err(|e| Error::io(&path, e))
}
