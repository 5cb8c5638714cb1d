use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use besovq_flow::cli_harness::{run_plan, write_traceability, ExperimentPlan, Overrides, Scenario};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Solve,
    Norms,
    LemmaCheck,
    Scan,
    /// Write the suite-to-statement matrix for `--out` without running anything.
    Traceability,
}

/// Mild solutions and Besov-Q / tent norm verification on periodic grids.
///
/// Set BESOVQ_THREADS to cap the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "besovq-flow", version)]
struct Cli {
    command: Command,
    /// JSON experiment plan; the scenario's defaults are used without one.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    mprime: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            grid: self.grid,
            beta: self.beta,
            p: self.p,
            q: self.q,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            m: self.m,
            m_prime: self.mprime,
            t_final: self.tfinal,
            iters: self.iters,
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("BESOVQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .map_err(|_| format!("BESOVQ_THREADS must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<bool, String> {
    let scenario = match cli.command {
        Command::Solve => Scenario::Solve,
        Command::Norms => Scenario::Norms,
        Command::LemmaCheck => Scenario::LemmaCheck,
        Command::Scan => Scenario::Scan,
        Command::Traceability => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            write_traceability(&out).map_err(|e| e.to_string())?;
            println!("wrote {}", out.join("traceability.md").display());
            return Ok(true);
        }
    };
    let mut plan = match &cli.plan {
        Some(path) => ExperimentPlan::load(path).map_err(|e| e.to_string())?,
        None => ExperimentPlan::new(scenario),
    };
    if plan.scenario != scenario {
        return Err(format!("plan is for '{}' but '{}' was requested", plan.scenario, scenario));
    }
    cli.overrides().apply(&mut plan);
    let report = run_plan(&plan).map_err(|e| e.to_string())?;
    for a in &report.assertions {
        let tag = if a.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", a.name, a.detail);
    }
    println!("{} files under {}", report.files.len(), plan.out.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
