use proptest::prelude::*;

use wflo_core::geometry::{circle_overlap_area, OverlapInputs, Point};
use wflo_core::optimizer::{
    chaotic_layout, mutate_twice, relocate_worst, run_aga, run_conventional_ga, ChaosStream,
    GaParams, Layout, MutationParent,
};
use wflo_core::power::{expected_farm_power, Evaluator};
use wflo_core::scenario::{build_grid, single_bin, uniform_directions, weibull_rose, SpeedBin};
use wflo_core::wake::{effective_speeds, TurbineSpec};

const CASES: u32 = 10_000;

fn seed() -> impl Strategy<Value = f64> {
    (1e-6..1.0 - 1e-6f64).prop_filter("fixed points", |s| ![0.25, 0.5, 0.75].contains(s))
}

/// Distinct lattice points with 50 m spacing, as a turbine layout.
fn positions(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::btree_set((0i32..40, 0i32..40), 1..=max).prop_map(|cells| {
        cells
            .into_iter()
            .map(|(c, r)| Point::new(c as f64 * 50.0, r as f64 * 50.0))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn chaotic_layouts_have_n_turbines(s in seed(), m in 1usize..60, frac in 0.0..1.0f64) {
        let n = ((m as f64 * frac) as usize).max(1);
        let mut stream = ChaosStream::new(s).unwrap();
        let layout = chaotic_layout(&mut stream, m, n).unwrap();
        prop_assert_eq!(layout.len(), n);
        prop_assert!(layout.indices().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(layout.indices().iter().all(|&i| i < m));
    }

    #[test]
    fn mutation_moves_exactly_one_turbine(s in seed(), m in 2usize..60, frac in 0.0..1.0f64) {
        let n = ((m as f64 * frac) as usize).clamp(1, m - 1);
        let mut stream = ChaosStream::new(s).unwrap();
        let layout = chaotic_layout(&mut stream, m, n).unwrap();
        let child = mutate_twice(&layout, &mut stream);
        prop_assert_eq!(child.len(), n);
        prop_assert_eq!(child.hamming(&layout), 2);
    }

    #[test]
    fn relocation_keeps_cardinality(s in seed(), n in 1usize..12, theta in 0.0..360.0f64) {
        let grid = build_grid(1000.0, 5).unwrap();
        let ev = Evaluator::new(&single_bin(theta, 12.0), &TurbineSpec::default()).unwrap();
        let mut stream = ChaosStream::new(s).unwrap();
        let layout = chaotic_layout(&mut stream, grid.len(), n).unwrap();
        let child = relocate_worst(&layout, &grid, &ev, &mut stream).unwrap();
        prop_assert_eq!(child.len(), n);
        prop_assert_eq!(child.hamming(&layout), 2);
    }

    #[test]
    fn best_efficiency_never_decreases(s in seed(), theta in 0.0..360.0f64, best_only: bool) {
        let grid = build_grid(300.0, 4).unwrap();
        let params = GaParams {
            turbines: 4,
            population: 10,
            elites: 2,
            relocations: 3,
            aliens: 2,
            max_generations: 6,
            target_efficiency: None,
            seed: s,
            mutation_parent: if best_only { MutationParent::BestOnly } else { MutationParent::ElitePool },
        };
        let scen = single_bin(theta, 10.0);
        let spec = TurbineSpec::default();
        for outcome in [
            run_aga(&params, &grid, &scen, &spec).unwrap(),
            run_conventional_ga(&params, &grid, &scen, &spec).unwrap(),
        ] {
            prop_assert!(outcome.trace.windows(2).all(|w| w[1].best_efficiency >= w[0].best_efficiency));
            prop_assert!(outcome.trace.iter().all(|t| t.best_layout.len() == 4));
        }
    }

    #[test]
    fn wakes_never_speed_up_the_flow(pts in positions(12), theta in -360.0..720.0f64, v in 0.0..30.0f64) {
        let speeds = effective_speeds(&pts, theta, v, &TurbineSpec::default()).unwrap();
        prop_assert!(speeds.iter().all(|&u| (0.0..=v).contains(&u)));
    }

    #[test]
    fn weibull_rose_is_normalized(
        shape in 0.5..5.0f64,
        scale in 2.0..20.0f64,
        width in 0.5..5.0f64,
        raw in prop::collection::vec(0.01..1.0f64, 1..16),
    ) {
        let total: f64 = raw.iter().sum();
        let dirs: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let bins = SpeedBin::uniform(width, 30.0).unwrap();
        let rose = weibull_rose(shape, scale, &bins, &dirs).unwrap();
        prop_assert!((rose.total_weight() - 1.0).abs() <= 1e-9);
        prop_assert!(rose.bins.iter().all(|b| b.weight >= 0.0));
    }

    #[test]
    fn uniform_directions_are_normalized(sectors in 1usize..72, v in 0.0..30.0f64) {
        let scen = uniform_directions(v, sectors).unwrap();
        prop_assert_eq!(scen.bins.len(), sectors);
        prop_assert!((scen.total_weight() - 1.0).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn translation_does_not_change_power(pts in positions(10), dx in -5e3..5e3f64, dy in -5e3..5e3f64) {
        let scen = uniform_directions(11.0, 12).unwrap();
        let spec = TurbineSpec::default();
        let a = expected_farm_power(&pts, &scen, &spec).unwrap();
        let moved: Vec<Point> = pts.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect();
        let b = expected_farm_power(&moved, &scen, &spec).unwrap();
        prop_assert!((a.expected_power - b.expected_power).abs() <= 1e-6 * a.expected_power.max(1.0));
    }

    #[test]
    fn removing_a_turbine_never_hurts_the_rest(pts in positions(10), drop in any::<prop::sample::Index>(), theta in 0.0..360.0f64) {
        prop_assume!(pts.len() >= 2);
        let spec = TurbineSpec::default();
        let k = drop.index(pts.len());
        let before = effective_speeds(&pts, theta, 12.0, &spec).unwrap();
        let mut rest = pts.clone();
        rest.remove(k);
        let after = effective_speeds(&rest, theta, 12.0, &spec).unwrap();
        let kept: Vec<f64> = before.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, u)| *u).collect();
        for (b, a) in kept.iter().zip(&after) {
            prop_assert!(a + 1e-12 >= *b);
        }
    }

    #[test]
    fn overlap_is_bounded_by_the_smaller_disc(a in 1.0..500.0f64, b in 1.0..500.0f64, c in 0.0..1200.0f64) {
        let area = circle_overlap_area(&OverlapInputs::new(a, b, c).unwrap()).unwrap();
        let small = a.min(b);
        prop_assert!(area >= 0.0);
        prop_assert!(area <= std::f64::consts::PI * small * small * (1.0 + 1e-12));
    }
}

#[test]
fn layout_rejects_duplicates_and_out_of_range() {
    assert!(Layout::new(vec![1, 1], 4).is_err());
    assert!(Layout::new(vec![4], 4).is_err());
}
