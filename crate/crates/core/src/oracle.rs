//! Brute-force reference implementations. They share only the geometry
//! primitives with the main evaluator and are deliberately naive.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{circle_overlap_area, rotate_frame, OverlapInputs, Point};
use crate::optimizer::Layout;
use crate::power::EvaluationResult;
use crate::scenario::{ln_binomial, Grid, WindScenario};
use crate::wake::{DeficitNumerator, TurbineSpec, DOWNWIND_EPS};

/// Largest number of layouts [`exhaustive_best`] will enumerate.
pub const ENUMERATION_CAP: u64 = 1_000_000;

/// Monte Carlo area estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub area: f64,
    pub std_error: f64,
}

/// Estimates the wake/rotor overlap by sampling the rotor disc uniformly
/// and counting points inside the wake disc.
pub fn mc_overlap(
    wake_radius: f64,
    rotor_radius: f64,
    offset: f64,
    samples: u64,
    seed: u64,
) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let wake_sq = wake_radius * wake_radius;
    for _ in 0..samples {
        let r = rotor_radius * rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let dx = r * phi.cos() - offset;
        let dy = r * phi.sin();
        if dx * dx + dy * dy <= wake_sq {
            hits += 1;
        }
    }
    let disc = PI * rotor_radius * rotor_radius;
    let frac = hits as f64 / samples as f64;
    McEstimate {
        area: disc * frac,
        std_error: disc * (frac * (1.0 - frac) / samples as f64).sqrt(),
    }
}

fn naive_power(spec: &TurbineSpec, v: f64) -> f64 {
    let c = &spec.power_curve;
    if v < c.cut_in {
        return 0.0;
    }
    if v >= c.cut_out {
        return 0.0;
    }
    if v >= c.rated_speed {
        return c.rated_power;
    }
    let k = c.coefficients;
    let p = k[0] * v.powi(4) + k[1] * v.powi(3) + k[2] * v.powi(2) + k[3] * v + k[4];
    p.max(0.0).min(c.rated_power)
}

/// Direct double loop over bins, turbines and upstream turbines.
pub fn straight_line_eval(
    positions: &[Point],
    scenario: &WindScenario,
    spec: &TurbineSpec,
) -> Result<EvaluationResult> {
    spec.validate()?;
    scenario.validate()?;
    let n = positions.len();
    if n == 0 {
        return Err(invalid("turbines", "need at least one turbine"));
    }
    let radius = spec.rotor_radius;
    let k = 0.5 / (spec.hub_height / spec.surface_roughness).ln();
    let numerator = match spec.deficit_numerator {
        DeficitNumerator::Standard => 1.0 - (1.0 - spec.thrust_coefficient).sqrt(),
        DeficitNumerator::PaperLiteral => 1.0 + (1.0 - spec.thrust_coefficient).sqrt(),
    };
    let rotor_area = PI * radius * radius;

    let mut speed = vec![0.0; n];
    let mut power = vec![0.0; n];
    let mut total = 0.0;
    let mut free = 0.0;
    for bin in &scenario.bins {
        let turned: Vec<Point> = positions
            .iter()
            .map(|&p| rotate_frame(p, bin.theta))
            .collect();
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = turned[j].y - turned[i].y;
                if d <= DOWNWIND_EPS {
                    continue;
                }
                let x = (turned[j].x - turned[i].x).abs();
                let a = circle_overlap_area(&OverlapInputs::new(radius + k * d, radius, x)?)?;
                if a > 0.0 {
                    let dv = numerator / (1.0 + k * d / radius).powi(2) * a / rotor_area;
                    sum += dv * dv;
                }
            }
            let deficit = if sum.sqrt() > 1.0 { 1.0 } else { sum.sqrt() };
            let u = bin.speed * (1.0 - deficit);
            let p = naive_power(spec, u);
            speed[i] += bin.weight * u;
            power[i] += bin.weight * p;
            total += bin.weight * p;
        }
        free += bin.weight * n as f64 * naive_power(spec, bin.speed);
    }
    if !(free > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(EvaluationResult {
        per_turbine_speed: speed,
        per_turbine_power: power,
        expected_power: total,
        free_power: free,
        efficiency: total / free,
    })
}

/// Best layout of `n` turbines on `grid` by full enumeration. The first
/// layout in lexicographic order wins ties.
pub fn exhaustive_best(
    grid: &Grid,
    n: usize,
    scenario: &WindScenario,
    spec: &TurbineSpec,
) -> Result<(Layout, f64)> {
    let m = grid.len();
    if n == 0 || n > m {
        return Err(Error::TooManyTurbines {
            turbines: n,
            positions: m,
        });
    }
    let count = ln_binomial(m as u64, n as u64).map_or(0.0, f64::exp);
    if count > ENUMERATION_CAP as f64 + 0.5 {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: ENUMERATION_CAP,
        });
    }

    let mut combo: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let positions: Vec<Point> = combo.iter().map(|&i| grid.point(i)).collect();
        let eta = straight_line_eval(&positions, scenario, spec)?.efficiency;
        if best.as_ref().is_none_or(|(_, b)| eta > *b) {
            best = Some((combo.clone(), eta));
        }
        // next combination in lexicographic order
        let Some(pos) = (0..n).rev().find(|&i| combo[i] < m - n + i) else {
            break;
        };
        combo[pos] += 1;
        for i in pos + 1..n {
            combo[i] = combo[i - 1] + 1;
        }
    }
    let (indices, eta) = best.expect("at least one combination");
    Ok((Layout::new(indices, m)?, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::expected_farm_power;
    use crate::scenario::{build_grid, single_bin, uniform_directions};

    #[test]
    fn mc_regimes() {
        let disjoint = mc_overlap(100.0, 50.0, 200.0, 10_000, 1);
        assert_eq!((disjoint.area, disjoint.std_error), (0.0, 0.0));
        let inside = mc_overlap(100.0, 50.0, 0.0, 10_000, 2);
        assert_eq!(inside.area, PI * 2500.0);
    }

    #[test]
    fn lens_area_matches_sampling() {
        // closed form 1700.98 m²
        let exact = circle_overlap_area(&OverlapInputs::new(100.0, 50.0, 120.0).unwrap()).unwrap();
        assert!((exact - 1_700.980_010_455_243).abs() < 1e-9);
        let mc = mc_overlap(100.0, 50.0, 120.0, 10_000_000, 7);
        assert!(
            ((mc.area - exact) / exact).abs() < 0.002,
            "{} vs {exact}",
            mc.area
        );
        assert!((mc.area - exact).abs() < 3.0 * mc.std_error);
    }

    #[test]
    fn single_turbine_reference() {
        let spec = TurbineSpec::default();
        let r = straight_line_eval(&[Point::new(0.0, 0.0)], &single_bin(0.0, 12.0), &spec).unwrap();
        assert!((r.expected_power / spec.power_curve.power_at(12.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn agrees_with_main_evaluator() {
        let spec = TurbineSpec::default();
        let pts: Vec<Point> = (0..9)
            .map(|i| {
                Point::new(
                    (i % 3) as f64 * 170.0 + (i as f64) * 13.0,
                    (i / 3) as f64 * 420.0,
                )
            })
            .collect();
        let scen = uniform_directions(10.5, 12).unwrap();
        let a = straight_line_eval(&pts, &scen, &spec).unwrap();
        let b = expected_farm_power(&pts, &scen, &spec).unwrap();
        assert!(((a.expected_power - b.expected_power) / b.expected_power).abs() < 1e-12);
        assert!((a.efficiency - b.efficiency).abs() < 1e-12);
        for (x, y) in a.per_turbine_power.iter().zip(&b.per_turbine_power) {
            assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0));
        }
    }

    #[test]
    fn exhaustive_trivial_instances() {
        let spec = TurbineSpec::default();
        let grid = build_grid(400.0, 2).unwrap();
        // wind along x; a vertical pair is crosswind
        let (layout, eta) = exhaustive_best(&grid, 2, &single_bin(90.0, 12.0), &spec).unwrap();
        assert_eq!(eta, 1.0);
        assert_eq!(layout.indices(), &[0, 3]);

        let (full, _) = exhaustive_best(&grid, 9, &single_bin(0.0, 12.0), &spec).unwrap();
        assert_eq!(full.len(), 9);

        let big = build_grid(4000.0, 20).unwrap();
        assert!(matches!(
            exhaustive_best(&big, 16, &single_bin(0.0, 12.0), &spec),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
