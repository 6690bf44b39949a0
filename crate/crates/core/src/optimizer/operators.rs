//! Cardinality-preserving variation operators.

use crate::error::{Error, Result};
use crate::power::Evaluator;
use crate::scenario::Grid;

use super::chaos::{chaos_position, ChaosStream};
use super::layout::Layout;

/// Places `n` turbines one after another at chaotic free positions.
pub fn chaotic_layout(stream: &mut ChaosStream, m: usize, n: usize) -> Result<Layout> {
    if n > m {
        return Err(Error::TooManyTurbines {
            turbines: n,
            positions: m,
        });
    }
    let mut taken = vec![false; m];
    let mut indices = Vec::with_capacity(n);
    for _ in 0..n {
        let p = chaos_position(stream, m, &taken).expect("n <= m leaves a free position");
        taken[p] = true;
        indices.push(p);
    }
    Layout::new(indices, m)
}

/// `count` chaotic layouts drawn from one stream.
pub fn chaotic_population(
    stream: &mut ChaosStream,
    count: usize,
    m: usize,
    n: usize,
) -> Result<Vec<Layout>> {
    (0..count).map(|_| chaotic_layout(stream, m, n)).collect()
}

/// Grid index of the turbine with the lowest expected power; ties go to the
/// lowest index. `powers` is aligned with `layout.indices()`.
pub(crate) fn weakest(layout: &Layout, powers: &[f64]) -> usize {
    let mut best = 0;
    for (k, p) in powers.iter().enumerate() {
        if *p < powers[best] {
            best = k;
        }
    }
    layout.indices()[best]
}

/// Grid index of the least productive turbine of `layout`.
pub fn worst_turbine(layout: &Layout, grid: &Grid, evaluator: &Evaluator) -> Result<usize> {
    if layout.is_empty() {
        return Err(Error::InvalidLayout("layout has no turbines".into()));
    }
    let result = evaluator.evaluate(&grid.positions(layout))?;
    Ok(weakest(layout, &result.per_turbine_power))
}

/// Moves the turbine at `from` to a chaotic empty position other than
/// `from`. A full grid is returned unchanged.
pub(crate) fn relocate_from(layout: &Layout, from: usize, stream: &mut ChaosStream) -> Layout {
    let mut out = layout.clone();
    match chaos_position(stream, layout.positions(), &layout.occupancy()) {
        Some(to) => {
            out.relocate(from, to);
            out
        }
        None => out,
    }
}

/// Relocates the least productive turbine to a chaotic empty position.
pub fn relocate_worst(
    layout: &Layout,
    grid: &Grid,
    evaluator: &Evaluator,
    stream: &mut ChaosStream,
) -> Result<Layout> {
    let worst = worst_turbine(layout, grid, evaluator)?;
    Ok(relocate_from(layout, worst, stream))
}

/// Clears one chaotically chosen occupied bit, then sets one chaotically
/// chosen empty bit other than the one just cleared. Empty and full
/// layouts are returned unchanged.
pub fn mutate_twice(layout: &Layout, stream: &mut ChaosStream) -> Layout {
    let m = layout.positions();
    if layout.is_empty() || layout.len() == m {
        return layout.clone();
    }
    let occupied = layout.occupancy();
    let free: Vec<bool> = occupied.iter().map(|o| !o).collect();
    let from = chaos_position(stream, m, &free).expect("layout is not empty");
    relocate_from(layout, from, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_grid, single_bin};
    use crate::wake::TurbineSpec;

    #[test]
    fn full_grid_layout() {
        let mut s = ChaosStream::new(0.3).unwrap();
        let l = chaotic_layout(&mut s, 9, 9).unwrap();
        assert_eq!(l.indices(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
        assert!(chaotic_layout(&mut s, 9, 10).is_err());
    }

    #[test]
    fn worst_is_lowest_index_without_wakes() {
        let grid = build_grid(4000.0, 20).unwrap();
        let ev = Evaluator::new(&single_bin(0.0, 12.0), &TurbineSpec::default()).unwrap();
        // same row, far apart: no wakes at 0°
        let l = Layout::new(vec![5, 12, 20], grid.len()).unwrap();
        assert_eq!(worst_turbine(&l, &grid, &ev).unwrap(), 5);
    }

    #[test]
    fn worst_is_the_shaded_turbine() {
        let grid = build_grid(4000.0, 20).unwrap();
        let ev = Evaluator::new(&single_bin(0.0, 12.0), &TurbineSpec::default()).unwrap();
        // column 3, rows 2 and 9: wind from +y shades row 2
        let down = grid.index_of(2, 3);
        let up = grid.index_of(9, 3);
        let l = Layout::new(vec![up, down], grid.len()).unwrap();
        assert_eq!(worst_turbine(&l, &grid, &ev).unwrap(), down);

        let mut s = ChaosStream::new(0.61).unwrap();
        let moved = relocate_worst(&l, &grid, &ev, &mut s).unwrap();
        assert!(moved.contains(up));
        assert!(!moved.contains(down));
        assert_eq!(moved.len(), 2);
    }

    #[test]
    fn worst_in_chain_matches_exhaustive_comparison() {
        let grid = build_grid(4000.0, 20).unwrap();
        let spec = TurbineSpec::default();
        let ev = Evaluator::new(&single_bin(0.0, 11.0), &spec).unwrap();
        let l = Layout::new(
            vec![
                grid.index_of(0, 4),
                grid.index_of(3, 4),
                grid.index_of(12, 5),
            ],
            grid.len(),
        )
        .unwrap();
        let pos = grid.positions(&l);
        let u = crate::wake::effective_speeds(&pos, 0.0, 11.0, &spec).unwrap();
        let powers: Vec<f64> = u.iter().map(|&v| spec.power_curve.power_at(v)).collect();
        let k = (0..3)
            .min_by(|&a, &b| powers[a].total_cmp(&powers[b]))
            .unwrap();
        assert_eq!(worst_turbine(&l, &grid, &ev).unwrap(), l.indices()[k]);
    }

    #[test]
    fn relocation_on_full_grid_is_identity() {
        let grid = build_grid(100.0, 1).unwrap();
        let ev = Evaluator::new(&single_bin(0.0, 12.0), &TurbineSpec::default()).unwrap();
        let full = Layout::new(vec![0, 1, 2, 3], 4).unwrap();
        let mut s = ChaosStream::new(0.41).unwrap();
        assert_eq!(relocate_worst(&full, &grid, &ev, &mut s).unwrap(), full);
        assert_eq!(mutate_twice(&full, &mut s), full);
    }

    #[test]
    fn mutation_swaps_single_turbine() {
        let mut s = ChaosStream::new(0.13).unwrap();
        let l = Layout::new(vec![0], 2).unwrap();
        assert_eq!(mutate_twice(&l, &mut s).indices(), &[1]);
        let l = Layout::new(vec![1], 2).unwrap();
        assert_eq!(mutate_twice(&l, &mut s).indices(), &[0]);
    }

    #[test]
    fn mutation_moves_exactly_one_turbine() {
        let mut s = ChaosStream::new(0.2718).unwrap();
        let mut l = chaotic_layout(&mut s, 441, 16).unwrap();
        for _ in 0..500 {
            let next = mutate_twice(&l, &mut s);
            assert_eq!(next.len(), 16);
            assert_eq!(next.hamming(&l), 2);
            l = next;
        }
    }

    #[test]
    fn mutation_covers_every_free_cell() {
        let mut s = ChaosStream::new(0.5772).unwrap();
        let base = Layout::new(vec![6, 12, 18], 25).unwrap();
        let mut seen = [false; 25];
        for _ in 0..10_000 {
            let next = mutate_twice(&base, &mut s);
            for &i in next.indices() {
                if !base.contains(i) {
                    seen[i] = true;
                }
            }
        }
        for i in 0..25 {
            assert_eq!(seen[i], !base.contains(i), "cell {i}");
        }
    }
}
