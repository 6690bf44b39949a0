//! Oracle suite behind `wflo verify`. Every random choice comes from the
//! chaos stream seeded with the run's `x0`.

use anyhow::Result;
use serde::Serialize;
use wflo_core::geometry::{circle_overlap_area, OverlapInputs};
use wflo_core::optimizer::{chaotic_layout, derive_seeds, run_aga, ChaosStream, GaParams};
use wflo_core::oracle::{exhaustive_best, mc_overlap, straight_line_eval};
use wflo_core::power::Evaluator;
use wflo_core::scenario::{build_grid, single_bin, uniform_directions, Grid, WindScenario};
use wflo_core::wake::TurbineSpec;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn fresh(stream: &mut ChaosStream) -> f64 {
    stream.decorrelate();
    stream.next_value()
}

/// Exact lens areas against Monte Carlo estimates on random intersecting
/// disc pairs. Passes when every estimate lies within 3 standard errors.
pub fn overlap_check(seed: f64, triples: usize, samples: u64) -> Result<Check> {
    let mut stream = ChaosStream::new(seed)?;
    let mut worst = 0.0_f64;
    let mut outside = 0;
    for k in 0..triples {
        let a = 20.0 + 180.0 * fresh(&mut stream);
        let b = 20.0 + 180.0 * fresh(&mut stream);
        let lo = (a - b).abs();
        let c = lo + (a + b - lo) * fresh(&mut stream);
        let exact = circle_overlap_area(&OverlapInputs::new(a, b, c)?)?;
        let mc = mc_overlap(a, b, c, samples, seed.to_bits() ^ k as u64);
        let z = if mc.std_error > 0.0 {
            (mc.area - exact).abs() / mc.std_error
        } else {
            0.0
        };
        worst = worst.max(z);
        if z > 3.0 {
            outside += 1;
        }
    }
    Ok(Check {
        name: "overlap_vs_monte_carlo",
        passed: outside == 0,
        detail: format!("{outside} of {triples} triples beyond 3 SE, largest |z| = {worst:.3}"),
    })
}

/// Main evaluator against the straight-line reimplementation on random
/// layouts of the configured grid and scenario.
pub fn evaluator_check(
    grid: &Grid,
    scenario: &WindScenario,
    spec: &TurbineSpec,
    turbines: usize,
    layouts: usize,
    seed: f64,
) -> Result<Check> {
    let ev = Evaluator::new(scenario, spec)?;
    let mut stream = ChaosStream::new(seed)?;
    let mut worst = 0.0_f64;
    for _ in 0..layouts {
        let layout = chaotic_layout(&mut stream, grid.len(), turbines)?;
        let pts = grid.positions(&layout);
        let a = ev.evaluate(&pts)?.expected_power;
        let b = straight_line_eval(&pts, scenario, spec)?.expected_power;
        let rel = if b != 0.0 {
            ((a - b) / b).abs()
        } else {
            a.abs()
        };
        worst = worst.max(rel);
    }
    Ok(Check {
        name: "evaluator_vs_straight_line",
        passed: worst <= 1e-9,
        detail: format!(
            "{layouts} layouts of {turbines} turbines, largest relative gap {worst:.3e}"
        ),
    })
}

/// A small problem that exhaustive search can solve.
#[derive(Debug, Clone)]
pub struct SmallInstance {
    pub grid: Grid,
    pub scenario: WindScenario,
}

/// Grids of 16 to 36 points with 60 to 200 m cells. Even instances blow
/// from a single sector, odd ones from 12 uniform sectors.
pub fn small_instances(seed: f64, count: usize) -> Result<Vec<SmallInstance>> {
    let mut stream = ChaosStream::new(seed)?;
    (0..count)
        .map(|k| {
            let cells = 3 + stream.next_index(3);
            let edge = 60.0 + 140.0 * fresh(&mut stream);
            let speed = 6.0 + 8.0 * fresh(&mut stream);
            let scenario = if k % 2 == 0 {
                single_bin(30.0 * stream.next_index(12) as f64, speed)
            } else {
                uniform_directions(speed, 12)?
            };
            Ok(SmallInstance {
                grid: build_grid(edge * cells as f64, cells)?,
                scenario,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceOutcome {
    pub positions: usize,
    pub optimum: f64,
    pub found: f64,
    pub matched: bool,
}

/// AGA best versus the exhaustive optimum with `turbines` turbines.
pub fn exhaustive_outcomes(
    instances: &[SmallInstance],
    spec: &TurbineSpec,
    turbines: usize,
    generations: usize,
    seed: f64,
) -> Result<Vec<InstanceOutcome>> {
    let seeds = derive_seeds(seed, instances.len())?;
    instances
        .iter()
        .zip(seeds)
        .map(|(inst, s)| {
            let (_, optimum) = exhaustive_best(&inst.grid, turbines, &inst.scenario, spec)?;
            let params = GaParams {
                turbines,
                max_generations: generations,
                target_efficiency: None,
                ..GaParams::default()
            }
            .with_seed(s);
            let found = run_aga(&params, &inst.grid, &inst.scenario, spec)?.best_efficiency();
            Ok(InstanceOutcome {
                positions: inst.grid.len(),
                optimum,
                found,
                matched: (found - optimum).abs() <= 1e-9 * optimum.abs(),
            })
        })
        .collect()
}

pub fn exhaustive_check(outcomes: &[InstanceOutcome]) -> Check {
    let hits = outcomes.iter().filter(|o| o.matched).count();
    let need = (outcomes.len() * 9).div_ceil(10);
    Check {
        name: "aga_vs_exhaustive",
        passed: hits >= need,
        detail: format!(
            "{hits} of {} small instances at the exhaustive optimum (need {need})",
            outcomes.len()
        ),
    }
}

/// The full suite for `config`.
pub fn run_suite(config: &RunConfig) -> Result<(Vec<Check>, Vec<InstanceOutcome>)> {
    let seed = config.seed();
    let mut checks = vec![
        overlap_check(seed, 100, 200_000)?,
        evaluator_check(
            &config.grid,
            &config.scenario,
            &config.spec,
            config.ga.turbines,
            50,
            seed,
        )?,
    ];
    let instances = small_instances(seed, config.study.instances)?;
    let outcomes = exhaustive_outcomes(&instances, &config.spec, 3, 500, seed)?;
    checks.push(exhaustive_check(&outcomes));
    Ok((checks, outcomes))
}
