//! Candidate-position grids, wind distributions and the evenly spaced
//! baseline layouts.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::optimizer::Layout;

/// Square farm cut into `cells × cells` cells. Turbines may stand on any
/// cell corner, so there are `(cells + 1)²` candidate positions.
///
/// Position `index` sits at row `index / (cells + 1)` and column
/// `index % (cells + 1)`, i.e. `x = col · edge`, `y = row · edge`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    side: f64,
    cells: usize,
    edge: f64,
    points: Vec<Point>,
}

pub fn build_grid(side: f64, cells: usize) -> Result<Grid> {
    if !(side.is_finite() && side > 0.0) {
        return Err(invalid("side", format!("must be > 0, got {side}")));
    }
    if cells == 0 {
        return Err(invalid("cells", "cells ≥ 1"));
    }
    let edge = side / cells as f64;
    let per_side = cells + 1;
    let points = (0..per_side * per_side)
        .map(|i| Point::new((i % per_side) as f64 * edge, (i / per_side) as f64 * edge))
        .collect();
    Ok(Grid {
        side,
        cells,
        edge,
        points,
    })
}

impl Grid {
    /// Grid with the given cell count and cell edge length.
    pub fn with_edge(edge: f64, cells: usize) -> Result<Self> {
        build_grid(edge * cells as f64, cells)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn points_per_side(&self) -> usize {
        self.cells + 1
    }

    /// Number of candidate positions `M`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    pub fn index_of(&self, row: usize, col: usize) -> usize {
        row * self.points_per_side() + col
    }

    pub fn positions(&self, layout: &Layout) -> Vec<Point> {
        layout.indices().iter().map(|&i| self.points[i]).collect()
    }
}

/// `ln C(m, n)`, or `None` when `n > m`.
pub fn ln_binomial(m: u64, n: u64) -> Option<f64> {
    if n > m {
        return None;
    }
    let n = n.min(m - n);
    Some(
        (0..n)
            .map(|i| ((m - i) as f64).ln() - ((i + 1) as f64).ln())
            .sum(),
    )
}

/// Number of ways to place `n` identical turbines on `m` positions.
pub fn solution_space_size(m: u64, n: u64) -> f64 {
    ln_binomial(m, n).map_or(0.0, f64::exp)
}

/// Exact `C(m, n)` when it fits in a `u128`.
pub fn binomial_exact(m: u64, n: u64) -> Option<u128> {
    if n > m {
        return Some(0);
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for i in 0..n {
        // acc·(m-i) is divisible by (i+1) at every step
        acc = acc.checked_mul(u128::from(m - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// One cell of the joint direction/speed distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindBin {
    /// Direction in degrees, clockwise from the reference.
    pub theta: f64,
    /// Free-stream speed, m/s.
    pub speed: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindScenario {
    pub bins: Vec<WindBin>,
    pub sector_count: usize,
}

impl WindScenario {
    pub fn new(bins: Vec<WindBin>, sector_count: usize) -> Result<Self> {
        let s = Self { bins, sector_count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins.is_empty() {
            return Err(invalid("bins", "scenario has no bins"));
        }
        for b in &self.bins {
            if !(b.weight.is_finite() && b.weight >= 0.0) {
                return Err(invalid(
                    "weight",
                    format!("must be finite and >= 0, got {}", b.weight),
                ));
            }
            if !(b.speed.is_finite() && b.speed >= 0.0) {
                return Err(invalid(
                    "speed",
                    format!("must be finite and >= 0, got {}", b.speed),
                ));
            }
            if !b.theta.is_finite() {
                return Err(invalid("theta", "must be finite"));
            }
        }
        let sum = self.total_weight();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Unnormalized { sum });
        }
        Ok(())
    }

    pub fn total_weight(&self) -> f64 {
        self.bins.iter().map(|b| b.weight).sum()
    }

    /// Total probability mass of each direction, in first-seen order.
    pub fn direction_mass(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for b in &self.bins {
            match out.iter_mut().find(|(t, _)| *t == b.theta) {
                Some((_, m)) => *m += b.weight,
                None => out.push((b.theta, b.weight)),
            }
        }
        out
    }
}

/// A single direction at a single speed.
pub fn single_bin(theta: f64, speed: f64) -> WindScenario {
    WindScenario {
        bins: vec![WindBin {
            theta,
            speed,
            weight: 1.0,
        }],
        sector_count: 1,
    }
}

/// Sector-center directions `s · 360° / sectors`.
pub fn sector_centers(sectors: usize) -> Vec<f64> {
    (0..sectors)
        .map(|s| s as f64 * 360.0 / sectors as f64)
        .collect()
}

/// Constant speed, direction uniform over `sectors` sectors.
pub fn uniform_directions(speed: f64, sectors: usize) -> Result<WindScenario> {
    if sectors == 0 {
        return Err(invalid("sectors", "sectors ≥ 1"));
    }
    let w = 1.0 / sectors as f64;
    WindScenario::new(
        sector_centers(sectors)
            .into_iter()
            .map(|theta| WindBin {
                theta,
                speed,
                weight: w,
            })
            .collect(),
        sectors,
    )
}

/// Half-open speed interval `[low, high)`; `high` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedBin {
    pub low: f64,
    pub high: f64,
}

impl SpeedBin {
    /// Consecutive bins of width `width` covering `[0, max)`.
    pub fn uniform(width: f64, max: f64) -> Result<Vec<SpeedBin>> {
        if !(width > 0.0 && max > 0.0 && max.is_finite()) {
            return Err(invalid(
                "speed_bin_width",
                "width and max speed must be > 0",
            ));
        }
        let count = (max / width).ceil() as usize;
        Ok((0..count)
            .map(|i| SpeedBin {
                low: i as f64 * width,
                high: ((i + 1) as f64 * width).min(max),
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weibull {
    pub shape: f64,
    pub scale: f64,
}

impl Weibull {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(invalid(
                "weibull_shape",
                format!("must be > 0, got {shape}"),
            ));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(
                "weibull_scale",
                format!("must be > 0, got {scale}"),
            ));
        }
        Ok(Self { shape, scale })
    }

    pub fn cdf(&self, v: f64) -> f64 {
        if v <= 0.0 {
            0.0
        } else if v.is_infinite() {
            1.0
        } else {
            1.0 - (-(v / self.scale).powf(self.shape)).exp()
        }
    }

    pub fn pdf(&self, v: f64) -> f64 {
        if v < 0.0 {
            return 0.0;
        }
        let z = v / self.scale;
        self.shape / self.scale * z.powf(self.shape - 1.0) * (-z.powf(self.shape)).exp()
    }

    /// Median of the distribution conditioned on `v >= low`.
    fn tail_median(&self, low: f64) -> f64 {
        let survival = 1.0 - self.cdf(low);
        self.scale * (-(survival / 2.0).ln()).powf(1.0 / self.shape)
    }
}

/// Joint distribution with Weibull speeds and independent directions.
///
/// Bin `(s, b)` carries `direction_weights[s] · (F(high_b) − F(low_b))`,
/// renormalized over the covered speeds. Finite bins are represented by
/// their midpoint; an unbounded last bin by its conditional median.
pub fn weibull_rose(
    shape: f64,
    scale: f64,
    speed_bins: &[SpeedBin],
    direction_weights: &[f64],
) -> Result<WindScenario> {
    let dist = Weibull::new(shape, scale)?;
    if speed_bins.is_empty() {
        return Err(invalid("speed_bins", "need at least one speed bin"));
    }
    if direction_weights.is_empty() {
        return Err(invalid("direction_weights", "need at least one direction"));
    }
    if direction_weights
        .iter()
        .any(|w| !(w.is_finite() && *w >= 0.0))
    {
        return Err(invalid(
            "direction_weights",
            "weights must be finite and >= 0",
        ));
    }
    let dir_sum: f64 = direction_weights.iter().sum();
    if (dir_sum - 1.0).abs() > 1e-9 {
        return Err(invalid(
            "direction_weights",
            format!("must sum to 1, got {dir_sum}"),
        ));
    }

    let mut speed_mass = Vec::with_capacity(speed_bins.len());
    for b in speed_bins {
        if !(b.low >= 0.0 && b.high > b.low && b.low.is_finite()) {
            return Err(invalid(
                "speed_bins",
                format!("bad interval [{}, {})", b.low, b.high),
            ));
        }
        let rep = if b.high.is_finite() {
            0.5 * (b.low + b.high)
        } else {
            dist.tail_median(b.low)
        };
        speed_mass.push((rep, dist.cdf(b.high) - dist.cdf(b.low)));
    }
    let covered: f64 = speed_mass.iter().map(|(_, m)| m).sum();
    if !(covered > 0.0) {
        return Err(invalid("speed_bins", "bins carry zero probability mass"));
    }

    let sectors = direction_weights.len();
    let mut bins = Vec::with_capacity(sectors * speed_bins.len());
    for (theta, dw) in sector_centers(sectors).into_iter().zip(direction_weights) {
        for &(speed, m) in &speed_mass {
            bins.push(WindBin {
                theta,
                speed,
                weight: dw * m / covered,
            });
        }
    }
    WindScenario::new(bins, sectors)
}

/// Arrangement used by [`uniform_layout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformPattern {
    /// Evenly spaced columns of the middle row.
    #[default]
    Line,
    /// `s × s` evenly spaced rows and columns with `s = ceil(sqrt(N))`,
    /// filled row by row.
    SquareLattice,
}

/// `count` evenly spread lattice coordinates out of `0..=cells`.
fn spread(count: usize, cells: usize) -> Vec<usize> {
    if count == 1 {
        return vec![cells / 2];
    }
    (0..count)
        .map(|k| ((k * cells) as f64 / (count - 1) as f64).round() as usize)
        .collect()
}

/// Deterministic evenly spaced baseline with `n` turbines.
pub fn uniform_layout(grid: &Grid, n: usize, pattern: UniformPattern) -> Result<Layout> {
    if n == 0 {
        return Err(invalid("turbines", "need at least one turbine"));
    }
    let per_side = grid.points_per_side();
    let indices = match pattern {
        UniformPattern::Line => {
            if n > per_side {
                return Err(Error::TooManyTurbines {
                    turbines: n,
                    positions: per_side,
                });
            }
            let row = grid.cells() / 2;
            spread(n, grid.cells())
                .into_iter()
                .map(|col| grid.index_of(row, col))
                .collect::<Vec<_>>()
        }
        UniformPattern::SquareLattice => {
            let s = (n as f64).sqrt().ceil() as usize;
            if s > per_side {
                return Err(Error::TooManyTurbines {
                    turbines: n,
                    positions: per_side * per_side,
                });
            }
            let lines = spread(s, grid.cells());
            lines
                .iter()
                .flat_map(|&r| lines.iter().map(move |&c| (r, c)))
                .take(n)
                .map(|(r, c)| grid.index_of(r, c))
                .collect()
        }
    };
    Layout::new(indices, grid.len())
}
