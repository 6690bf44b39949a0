//! Experiments built on the optimizer: farm-area shrinking, the AGA versus
//! its relocation-free ablation, and the AGA versus an evenly spaced layout.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::optimizer::{derive_seeds, run_ga, GaParams, GenerationTrace, Layout, Variant};
use crate::power::{EvaluationResult, Evaluator};
use crate::scenario::{uniform_layout, Grid, UniformPattern, WindScenario};
use crate::wake::TurbineSpec;

/// Whether sweeps may use lattices tighter than one rotor diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingCheck {
    /// Reject edges below `2R`.
    Strict,
    #[default]
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkSweepPoint {
    /// Cell edge length, m.
    pub edge: f64,
    /// `(edge / edge₀)²`.
    pub area_fraction: f64,
    /// Mean optimized expected power over the repeats, kW.
    pub mean_power: f64,
    /// `mean_power` relative to the baseline edge.
    pub power_fraction: f64,
    pub n_runs: usize,
    /// Standard error of `power_fraction`.
    pub std_error: f64,
}

/// Settings shared by every point of a shrink sweep.
#[derive(Debug, Clone)]
pub struct SweepSetup<'a> {
    /// Cells per side, kept fixed while the edge shrinks.
    pub cells: usize,
    pub scenario: &'a WindScenario,
    pub spec: &'a TurbineSpec,
    pub ga: &'a GaParams,
    pub repeats: usize,
    pub spacing_check: SpacingCheck,
}

/// Optimizes the farm at each edge length. `edges` must be strictly
/// descending; the first one is the baseline. Every edge reuses the same
/// seeds, derived from `ga.seed`.
pub fn shrink_sweep(edges: &[f64], setup: &SweepSetup<'_>) -> Result<Vec<ShrinkSweepPoint>> {
    if edges.is_empty() {
        return Err(invalid("edges", "need at least one edge"));
    }
    if edges.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(invalid("edges", "edges must be finite and > 0"));
    }
    if edges.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid(
            "edges",
            "edges must be strictly descending from the baseline",
        ));
    }
    if setup.repeats == 0 {
        return Err(invalid("repeats", "repeats ≥ 1"));
    }
    if setup.spacing_check == SpacingCheck::Strict {
        let diameter = 2.0 * setup.spec.rotor_radius;
        if let Some(&e) = edges.iter().find(|&&e| e < diameter) {
            return Err(Error::SpacingInfeasible {
                spacing: e,
                diameter,
            });
        }
    }
    let evaluator = Evaluator::new(setup.scenario, setup.spec)?;
    let seeds = derive_seeds(setup.ga.seed, setup.repeats)?;
    let grids = edges
        .iter()
        .map(|&e| Grid::with_edge(e, setup.cells))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, f64)> = (0..edges.len())
        .flat_map(|g| seeds.iter().map(move |&s| (g, s)))
        .collect();
    let powers = jobs
        .par_iter()
        .map(|&(g, seed)| {
            let params = setup.ga.clone().with_seed(seed);
            run_ga(&params, &grids[g], &evaluator, Variant::Adapted)
                .map(|o| o.best_result.expected_power)
        })
        .collect::<Result<Vec<f64>>>()?;

    let r = setup.repeats;
    let mean_of = |g: usize| powers[g * r..(g + 1) * r].iter().sum::<f64>() / r as f64;
    let baseline = mean_of(0);
    let edge0 = edges[0];
    Ok(edges
        .iter()
        .enumerate()
        .map(|(g, &edge)| {
            let runs = &powers[g * r..(g + 1) * r];
            let mean = mean_of(g);
            let sd = if r > 1 {
                (runs.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (r - 1) as f64).sqrt()
            } else {
                0.0
            };
            let ratio = edge / edge0;
            ShrinkSweepPoint {
                edge,
                area_fraction: ratio * ratio,
                mean_power: mean,
                power_fraction: if baseline > 0.0 { mean / baseline } else { 0.0 },
                n_runs: r,
                std_error: if baseline > 0.0 {
                    sd / (r as f64).sqrt() / baseline
                } else {
                    0.0
                },
            }
        })
        .collect())
}

/// Least-squares cubic `c0 + c1 x + c2 x² + c3 x³`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyFit {
    pub coefficients: [f64; 4],
    pub residual_norm: f64,
}

impl PolyFit {
    pub const DEGREE: usize = 3;

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }
}

pub fn fit_poly3(points: &[(f64, f64)]) -> Result<PolyFit> {
    if points.len() < 4 {
        return Err(Error::RankDeficient(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|(x, y)| !(x.is_finite() && y.is_finite()))
    {
        return Err(invalid("points", "points must be finite"));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 4 {
        return Err(Error::RankDeficient(format!(
            "only {} distinct x values",
            xs.len()
        )));
    }
    // columns scaled by powers of max|x|; the scaling is undone exactly below
    let s = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    let design = DMatrix::from_fn(points.len(), 4, |r, c| (points[r].0 / s).powi(c as i32));
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let qr = design.clone().qr();
    let qtb = qr.q().transpose() * &rhs;
    let scaled = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::RankDeficient("singular triangular factor".into()))?;
    let residual_norm = (&rhs - &design * &scaled).norm();
    let mut coefficients = [0.0; 4];
    for (j, c) in coefficients.iter_mut().enumerate() {
        *c = scaled[j] / s.powi(j as i32);
    }
    Ok(PolyFit {
        coefficients,
        residual_norm,
    })
}

/// Smallest edge admitted by a power-drop budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetPoint {
    pub edge: f64,
    /// `1 − (edge / edge₀)²`.
    pub area_saving: f64,
    pub predicted_drop: f64,
}

/// Walks down from the baseline edge along the fitted power curve and
/// stops before the predicted drop first exceeds `budget`. Sweeps with
/// fewer than four points are interpolated linearly instead of fitted.
/// Never extrapolates below the smallest swept edge.
pub fn power_drop_at_budget(sweep: &[ShrinkSweepPoint], budget: f64) -> Result<BudgetPoint> {
    if sweep.is_empty() {
        return Err(invalid("sweep", "sweep is empty"));
    }
    if !(0.0..1.0).contains(&budget) {
        return Err(invalid(
            "budget",
            format!("must lie in [0, 1), got {budget}"),
        ));
    }
    let mut pts: Vec<(f64, f64)> = sweep.iter().map(|p| (p.edge, p.power_fraction)).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let edge0 = pts[0].0;
    let edge_min = pts[pts.len() - 1].0;

    let curve: Box<dyn Fn(f64) -> f64> = match fit_poly3(&pts) {
        Ok(fit) => Box::new(move |e| fit.eval(e)),
        Err(_) => {
            let pts = pts.clone();
            Box::new(move |e| interpolate(&pts, e))
        }
    };
    let base = curve(edge0);
    if !(base > 0.0) {
        return Err(Error::BudgetUnsatisfiable { budget });
    }
    let drop_at = |e: f64| 1.0 - curve(e) / base;

    const STEP: f64 = 0.01;
    let steps = ((edge0 - edge_min) / STEP).round() as usize;
    let mut chosen = (edge0, 0.0);
    for k in 1..=steps {
        let e = (edge0 - k as f64 * STEP).max(edge_min);
        let d = drop_at(e);
        if d > budget {
            break;
        }
        chosen = (e, d);
    }
    let ratio = chosen.0 / edge0;
    Ok(BudgetPoint {
        edge: chosen.0,
        area_saving: 1.0 - ratio * ratio,
        predicted_drop: chosen.1,
    })
}

/// Piecewise-linear interpolation over points sorted by descending x.
fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    if pts.len() == 1 {
        return pts[0].1;
    }
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x <= x0 && x >= x1 {
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    if x > pts[0].0 {
        pts[0].1
    } else {
        pts[pts.len() - 1].1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformComparison {
    pub uniform_layout: Layout,
    pub uniform: EvaluationResult,
    pub aga_layout: Layout,
    pub aga: EvaluationResult,
    pub generations: usize,
}

/// Scores the evenly spaced layout and the AGA optimum under one scenario.
pub fn compare_uniform_vs_aga(
    grid: &Grid,
    scenario: &WindScenario,
    spec: &TurbineSpec,
    ga: &GaParams,
    pattern: UniformPattern,
) -> Result<UniformComparison> {
    let evaluator = Evaluator::new(scenario, spec)?;
    let uniform_layout = uniform_layout(grid, ga.turbines, pattern)?;
    let uniform = evaluator.evaluate(&grid.positions(&uniform_layout))?;
    let outcome = run_ga(ga, grid, &evaluator, Variant::Adapted)?;
    let generations = outcome.generations();
    Ok(UniformComparison {
        uniform_layout,
        uniform,
        aga_layout: outcome.best,
        aga: outcome.best_result,
        generations,
    })
}

/// Traces of the AGA and the ablated GA started from the same seed.
#[derive(Debug, Clone, Serialize)]
pub struct PairedTrace {
    pub seed: f64,
    pub adapted: Vec<GenerationTrace>,
    pub ablated: Vec<GenerationTrace>,
}

pub fn convergence_comparison(
    grid: &Grid,
    scenario: &WindScenario,
    spec: &TurbineSpec,
    ga: &GaParams,
    seeds: &[f64],
) -> Result<Vec<PairedTrace>> {
    if seeds.is_empty() {
        return Err(invalid("seeds", "need at least one seed"));
    }
    let evaluator = Evaluator::new(scenario, spec)?;
    seeds
        .par_iter()
        .map(|&seed| {
            let params = ga.clone().with_seed(seed);
            let adapted = run_ga(&params, grid, &evaluator, Variant::Adapted)?;
            let ablated = run_ga(&params, grid, &evaluator, Variant::Ablated)?;
            Ok(PairedTrace {
                seed,
                adapted: adapted.trace,
                ablated: ablated.trace,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_grid, single_bin};

    fn point(edge: f64, frac: f64) -> ShrinkSweepPoint {
        ShrinkSweepPoint {
            edge,
            area_fraction: (edge / 200.0).powi(2),
            mean_power: frac * 1000.0,
            power_fraction: frac,
            n_runs: 1,
            std_error: 0.0,
        }
    }

    /// Normal equations solved by Gaussian elimination with partial pivoting.
    fn normal_equations(points: &[(f64, f64)]) -> [f64; 4] {
        let mut a = [[0.0f64; 5]; 4];
        for &(x, y) in points {
            for r in 0..4 {
                for c in 0..4 {
                    a[r][c] += x.powi((r + c) as i32);
                }
                a[r][4] += y * x.powi(r as i32);
            }
        }
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in 0..4 {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..5 {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        [
            a[0][4] / a[0][0],
            a[1][4] / a[1][1],
            a[2][4] / a[2][2],
            a[3][4] / a[3][3],
        ]
    }

    #[test]
    fn exact_cubic_recovered() {
        let truth = [1.5, -0.25, 0.03, -0.0004];
        let f = |x: f64| truth[0] + truth[1] * x + truth[2] * x * x + truth[3] * x * x * x;
        let pts: Vec<(f64, f64)> = (0..11)
            .map(|i| 100.0 + 10.0 * i as f64)
            .map(|x| (x, f(x)))
            .collect();
        let fit = fit_poly3(&pts).unwrap();
        for (c, t) in fit.coefficients.iter().zip(truth) {
            assert!((c - t).abs() < 1e-9, "{c} vs {t}");
        }
        assert!(fit.residual_norm < 1e-9);

        let four = [(0.0, 1.0), (1.0, -2.0), (2.5, 0.5), (4.0, 3.0)];
        assert!(fit_poly3(&four).unwrap().residual_norm < 1e-12);
    }

    #[test]
    fn noisy_cubic_matches_normal_equations() {
        let pts: Vec<(f64, f64)> = (0..15)
            .map(|i| {
                let x = -1.0 + i as f64 * 0.2;
                let noise = ((i * 7919) % 13) as f64 / 13.0 - 0.5;
                (x, 2.0 - x + 0.5 * x * x + 0.3 * x * x * x + 0.05 * noise)
            })
            .collect();
        let fit = fit_poly3(&pts).unwrap();
        let oracle = normal_equations(&pts);
        for (c, o) in fit.coefficients.iter().zip(oracle) {
            assert!((c - o).abs() < 1e-6, "{c} vs {o}");
        }
        assert!(fit.residual_norm > 0.0);
    }

    #[test]
    fn rank_deficient_fit() {
        let pts = [(3.0, 1.0), (3.0, 2.0), (3.0, 3.0), (3.0, 4.0), (3.0, 5.0)];
        assert!(matches!(fit_poly3(&pts), Err(Error::RankDeficient(_))));
        assert!(fit_poly3(&pts[..3]).is_err());
    }

    #[test]
    fn residual_ignores_point_order() {
        let mut pts: Vec<(f64, f64)> = (0..9).map(|i| (i as f64, ((i * i) % 5) as f64)).collect();
        let a = fit_poly3(&pts).unwrap().residual_norm;
        pts.reverse();
        pts.swap(2, 6);
        let b = fit_poly3(&pts).unwrap().residual_norm;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn budget_boundaries() {
        let sweep: Vec<_> = [
            (200.0, 1.0),
            (180.0, 0.99),
            (160.0, 0.97),
            (140.0, 0.94),
            (120.0, 0.90),
            (100.0, 0.85),
        ]
        .iter()
        .map(|&(e, f)| point(e, f))
        .collect();
        let generous = power_drop_at_budget(&sweep, 0.5).unwrap();
        assert!((generous.edge - 100.0).abs() < 1e-9);
        assert!((generous.area_saving - 0.75).abs() < 1e-9);

        let zero = power_drop_at_budget(&sweep, 0.0).unwrap();
        assert!((zero.edge - 200.0).abs() < 0.05, "{}", zero.edge);
        assert!(zero.area_saving < 1e-3);

        let mid = power_drop_at_budget(&sweep, 0.06).unwrap();
        assert!(mid.edge > 130.0 && mid.edge < 145.0, "{}", mid.edge);

        assert!(power_drop_at_budget(&[], 0.1).is_err());
        assert!(power_drop_at_budget(&sweep, 1.5).is_err());
        // two points: linear interpolation
        let short = [point(200.0, 1.0), point(100.0, 0.8)];
        let b = power_drop_at_budget(&short, 0.1).unwrap();
        assert!((b.edge - 150.0).abs() < 0.02);
    }

    #[test]
    fn sweep_validation_and_baseline() {
        let spec = TurbineSpec::default();
        let scen = single_bin(0.0, 12.0);
        let ga = GaParams {
            turbines: 3,
            population: 12,
            elites: 2,
            relocations: 4,
            aliens: 2,
            max_generations: 5,
            ..GaParams::default()
        };
        let setup = SweepSetup {
            cells: 4,
            scenario: &scen,
            spec: &spec,
            ga: &ga,
            repeats: 2,
            spacing_check: SpacingCheck::Off,
        };
        let pts = shrink_sweep(&[200.0, 150.0, 100.0], &setup).unwrap();
        assert_eq!(pts[0].power_fraction, 1.0);
        assert_eq!(pts[0].area_fraction, 1.0);
        assert_eq!(pts[1].area_fraction, 0.5625);
        assert!(shrink_sweep(&[150.0, 200.0], &setup).is_err());
        assert!(shrink_sweep(&[], &setup).is_err());
        let strict = SweepSetup {
            spacing_check: SpacingCheck::Strict,
            ..setup.clone()
        };
        assert!(matches!(
            shrink_sweep(&[200.0, 100.0], &strict),
            Err(Error::SpacingInfeasible { .. })
        ));
        assert!(shrink_sweep(&[200.0, 130.0], &strict).is_ok());
    }

    #[test]
    fn uniform_comparison_single_turbine() {
        let grid = build_grid(1000.0, 5).unwrap();
        let ga = GaParams {
            turbines: 1,
            target_efficiency: Some(1.0),
            ..GaParams::default()
        };
        let cmp = compare_uniform_vs_aga(
            &grid,
            &single_bin(0.0, 12.0),
            &TurbineSpec::default(),
            &ga,
            UniformPattern::Line,
        )
        .unwrap();
        assert_eq!(cmp.uniform.expected_power, cmp.aga.expected_power);
        assert_eq!(cmp.uniform.efficiency, 1.0);
    }
}
