//! Subcommand bodies. Each writes its files into `out` and returns a
//! one-line report for standard output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::anyhow;
use serde::Serialize;
use wflo_core::optimizer::{derive_seeds, generations_to, run_aga, GenerationTrace};
use wflo_core::power::{cost_curve, Evaluator};
use wflo_core::study::{
    compare_uniform_vs_aga, convergence_comparison, fit_poly3, power_drop_at_budget, shrink_sweep,
    SweepSetup,
};

use crate::config::{load_config, parse_config, ConfigError, RunConfig};
use crate::output::{self, prepare_out_dir, resolve_out_dir};
use crate::verify;

/// Why a command failed, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Runtime(anyhow::Error),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    /// Single line: `error[<kind>]: <message>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            Failure::Config(e) => ("config", e.to_string()),
            Failure::Runtime(e) => ("runtime", format!("{e:#}")),
            Failure::Verification(m) => ("verification", m.clone()),
        };
        write!(f, "error[{kind}]: {}", msg.replace('\n', " "))
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<wflo_core::Error> for Failure {
    fn from(e: wflo_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<String, Failure>;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub seed: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Loads the config (defaults when absent), applies `--seed` and creates
/// the output directory.
pub fn prepare(common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let mut config = match &common.config {
        Some(path) => load_config(path),
        None => parse_config(""),
    }
    .map_err(Failure::Config)?;
    if let Some(seed) = common.seed {
        config.set_seed(seed).map_err(Failure::Config)?;
    }
    let out = resolve_out_dir(common.out.as_deref(), config.out_dir.as_deref());
    prepare_out_dir(&out)?;
    Ok((config, out))
}

#[derive(Serialize)]
struct OptimizeSummary<'a> {
    command: &'a str,
    scenario: &'a str,
    seed: f64,
    turbines: usize,
    positions: usize,
    efficiency: f64,
    expected_power_kw: f64,
    free_power_kw: f64,
    generations: usize,
    generations_to_target: Option<usize>,
    wall_time_s: f64,
}

pub fn optimize(config: &RunConfig, out: &Path) -> Outcome {
    let start = Instant::now();
    let outcome = run_aga(&config.ga, &config.grid, &config.scenario, &config.spec)?;
    let wall = start.elapsed().as_secs_f64();
    output::write_layout(&out.join("layout.csv"), &config.grid, &outcome.best)?;
    output::write_trace(&out.join("trace.jsonl"), &outcome.trace)?;
    let r = &outcome.best_result;
    let reached = config
        .ga
        .target_efficiency
        .and_then(|t| outcome.generations_to(t));
    output::write_json(
        &out.join("summary.json"),
        "wflo-summary/1",
        &OptimizeSummary {
            command: "optimize",
            scenario: config.preset.name(),
            seed: config.seed(),
            turbines: config.ga.turbines,
            positions: config.grid.len(),
            efficiency: r.efficiency,
            expected_power_kw: r.expected_power,
            free_power_kw: r.free_power,
            generations: outcome.generations(),
            generations_to_target: reached,
            wall_time_s: wall,
        },
    )?;
    Ok(format!(
        "eta={:.6} power_kw={:.3} generations={} out={}",
        r.efficiency,
        r.expected_power,
        outcome.generations(),
        out.display()
    ))
}

#[derive(Serialize)]
struct TurbineRow {
    x: f64,
    y: f64,
    mean_speed: f64,
    expected_power_kw: f64,
}

#[derive(Serialize)]
struct EvaluateSummary<'a> {
    command: &'a str,
    layout: String,
    scenario: &'a str,
    efficiency: f64,
    expected_power_kw: f64,
    free_power_kw: f64,
    turbines: Vec<TurbineRow>,
}

pub fn evaluate(config: &RunConfig, out: &Path, layout: &Path) -> Outcome {
    let points = output::read_layout(layout)?;
    let r = Evaluator::new(&config.scenario, &config.spec)?.evaluate(&points)?;
    let turbines = points
        .iter()
        .zip(r.per_turbine_speed.iter().zip(&r.per_turbine_power))
        .map(|(p, (&mean_speed, &power))| TurbineRow {
            x: p.x,
            y: p.y,
            mean_speed,
            expected_power_kw: power,
        })
        .collect();
    output::write_json(
        &out.join("evaluation.json"),
        "wflo-evaluation/1",
        &EvaluateSummary {
            command: "evaluate",
            layout: layout.display().to_string(),
            scenario: config.preset.name(),
            efficiency: r.efficiency,
            expected_power_kw: r.expected_power,
            free_power_kw: r.free_power,
            turbines,
        },
    )?;
    Ok(format!(
        "eta={:.6} power_kw={:.3} turbines={}",
        r.efficiency,
        r.expected_power,
        points.len()
    ))
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    command: &'a str,
    scenario: &'a str,
    seed: f64,
    cells: usize,
    repeats: usize,
    /// Cubic in the edge, ascending powers; absent with fewer than 4 edges.
    fit_coefficients: Option<[f64; 4]>,
    fit_residual: Option<f64>,
    budget: f64,
    budget_edge: Option<f64>,
    budget_area_saving: Option<f64>,
    budget_predicted_drop: Option<f64>,
}

pub fn sweep(config: &RunConfig, out: &Path) -> Outcome {
    let setup = SweepSetup {
        cells: config.grid.cells(),
        scenario: &config.scenario,
        spec: &config.spec,
        ga: &config.ga,
        repeats: config.study.repeats,
        spacing_check: config.study.spacing_check,
    };
    let points = shrink_sweep(&config.study.edges, &setup)?;
    output::write_sweep(&out.join("sweep.csv"), &points)?;
    let fit = fit_poly3(
        &points
            .iter()
            .map(|p| (p.edge, p.power_fraction))
            .collect::<Vec<_>>(),
    )
    .ok();
    let budget = power_drop_at_budget(&points, config.study.budget).ok();
    output::write_json(
        &out.join("sweep_summary.json"),
        "wflo-sweep-summary/1",
        &SweepSummary {
            command: "sweep",
            scenario: config.preset.name(),
            seed: config.seed(),
            cells: config.grid.cells(),
            repeats: config.study.repeats,
            fit_coefficients: fit.as_ref().map(|f| f.coefficients),
            fit_residual: fit.as_ref().map(|f| f.residual_norm),
            budget: config.study.budget,
            budget_edge: budget.map(|b| b.edge),
            budget_area_saving: budget.map(|b| b.area_saving),
            budget_predicted_drop: budget.map(|b| b.predicted_drop),
        },
    )?;
    let last = points.last().expect("sweep has at least one edge");
    Ok(format!(
        "edges={} smallest_edge={} power_fraction={:.5} area_saving_at_budget={}",
        points.len(),
        last.edge,
        last.power_fraction,
        budget.map_or("none".to_string(), |b| format!("{:.4}", b.area_saving))
    ))
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    seed: f64,
    variant: &'a str,
    generation: usize,
    best_eta: f64,
    mean_eta: f64,
}

#[derive(Serialize)]
struct PairSummary {
    seed: f64,
    adapted_generations_to_target: Option<usize>,
    ablated_generations_to_target: Option<usize>,
    adapted_best: f64,
    ablated_best: f64,
}

#[derive(Serialize)]
struct CompareSummary<'a> {
    command: &'a str,
    scenario: &'a str,
    uniform_pattern: wflo_core::scenario::UniformPattern,
    uniform_efficiency: f64,
    uniform_power_kw: f64,
    aga_efficiency: f64,
    aga_power_kw: f64,
    aga_generations: usize,
    target: Option<f64>,
    pairs: Vec<PairSummary>,
}

fn best(trace: &[GenerationTrace]) -> f64 {
    trace.last().map_or(0.0, |t| t.best_efficiency)
}

pub fn compare(config: &RunConfig, out: &Path) -> Outcome {
    let c = compare_uniform_vs_aga(
        &config.grid,
        &config.scenario,
        &config.spec,
        &config.ga,
        config.study.uniform_pattern,
    )?;
    output::write_layout(
        &out.join("uniform_layout.csv"),
        &config.grid,
        &c.uniform_layout,
    )?;
    output::write_layout(&out.join("aga_layout.csv"), &config.grid, &c.aga_layout)?;

    let seeds = derive_seeds(config.seed(), config.study.seeds)?;
    let pairs = convergence_comparison(
        &config.grid,
        &config.scenario,
        &config.spec,
        &config.ga,
        &seeds,
    )?;
    let mut records = Vec::new();
    for p in &pairs {
        for (variant, trace) in [("adapted", &p.adapted), ("ablated", &p.ablated)] {
            records.extend(trace.iter().map(|t| TraceRecord {
                seed: p.seed,
                variant,
                generation: t.generation,
                best_eta: t.best_efficiency,
                mean_eta: t.mean_efficiency,
            }));
        }
    }
    output::write_jsonl(
        &out.join("compare_traces.jsonl"),
        "wflo-compare-trace/1",
        &records,
    )?;

    let target = config.ga.target_efficiency;
    let reached = |t: &[GenerationTrace]| target.and_then(|v| generations_to(t, v));
    let summaries: Vec<PairSummary> = pairs
        .iter()
        .map(|p| PairSummary {
            seed: p.seed,
            adapted_generations_to_target: reached(&p.adapted),
            ablated_generations_to_target: reached(&p.ablated),
            adapted_best: best(&p.adapted),
            ablated_best: best(&p.ablated),
        })
        .collect();
    output::write_json(
        &out.join("compare_summary.json"),
        "wflo-compare-summary/1",
        &CompareSummary {
            command: "compare",
            scenario: config.preset.name(),
            uniform_pattern: config.study.uniform_pattern,
            uniform_efficiency: c.uniform.efficiency,
            uniform_power_kw: c.uniform.expected_power,
            aga_efficiency: c.aga.efficiency,
            aga_power_kw: c.aga.expected_power,
            aga_generations: c.generations,
            target,
            pairs: summaries,
        },
    )?;
    Ok(format!(
        "uniform_eta={:.6} aga_eta={:.6} paired_seeds={}",
        c.uniform.efficiency,
        c.aga.efficiency,
        pairs.len()
    ))
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    command: &'a str,
    seed: f64,
    passed: bool,
    checks: &'a [verify::Check],
    instances: &'a [verify::InstanceOutcome],
}

pub fn verify(config: &RunConfig, out: &Path) -> Outcome {
    let (checks, instances) = verify::run_suite(config)?;
    let passed = checks.iter().all(|c| c.passed);
    output::write_json(
        &out.join("verify.json"),
        "wflo-verify/1",
        &VerifyReport {
            command: "verify",
            seed: config.seed(),
            passed,
            checks: &checks,
            instances: &instances,
        },
    )?;
    let line = checks
        .iter()
        .map(|c| format!("{}={}", c.name, if c.passed { "pass" } else { "fail" }))
        .collect::<Vec<_>>()
        .join(" ");
    if passed {
        Ok(line)
    } else {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        Err(Failure::Verification(failed.join("; ")))
    }
}

pub fn cost_table(max_n: u32, out: &Path) -> Outcome {
    if max_n == 0 {
        return Err(Failure::Runtime(anyhow!("--max must be at least 1")));
    }
    let rows = (1..=max_n)
        .map(|n| cost_curve(n).map(|c| (n, c)))
        .collect::<wflo_core::Result<Vec<_>>>()?;
    output::write_cost_curve(&out.join("cost_curve.csv"), &rows)?;
    let (n, c) = rows[rows.len() - 1];
    Ok(format!(
        "rows={} cost_per_turbine_at_{n}={:.6}",
        rows.len(),
        c / f64::from(n)
    ))
}
