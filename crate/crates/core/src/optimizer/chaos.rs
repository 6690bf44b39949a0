//! Logistic-map randomness. Every random choice in the optimizer is drawn
//! from a [`ChaosStream`], so a run is fully determined by its seed.

use crate::error::{invalid, Result};

/// Distance from an absorbing or periodic point that triggers a nudge.
const GUARD: f64 = 1e-12;
const NUDGE: f64 = 1e-9;
/// Iterates discarded before each independent decision. Consecutive values
/// of the map are strongly correlated; with a Lyapunov exponent of ln 2 an
/// index bucket of width 1/M spreads over the whole interval in about
/// log2(M) steps.
pub const DECORRELATION_STEPS: usize = 16;
/// Fixed point and period-2 orbit of `4x(1-x)`.
const CYCLE_POINTS: [f64; 3] = [
    0.75,
    0.345_491_502_812_526_3, // (5 - sqrt 5) / 8
    0.904_508_497_187_473_7, // (5 + sqrt 5) / 8
];

/// State of the map `x ← 4x(1 − x)` on the open unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosStream {
    x: f64,
    prev: f64,
}

impl ChaosStream {
    /// Seeds must lie in (0, 1) and avoid the points that fall onto the
    /// fixed point or the absorbing 0.
    pub fn new(seed: f64) -> Result<Self> {
        if !(seed > 0.0 && seed < 1.0) {
            return Err(invalid(
                "seed",
                format!("chaos seed must lie in (0, 1), got {seed}"),
            ));
        }
        if [0.25, 0.5, 0.75].contains(&seed) {
            return Err(invalid(
                "seed",
                format!("chaos seed {seed} falls onto a fixed point"),
            ));
        }
        Ok(Self {
            x: seed,
            prev: f64::NAN,
        })
    }

    pub fn state(&self) -> f64 {
        self.x
    }

    /// Advances the map and returns the new state.
    pub fn next_value(&mut self) -> f64 {
        let x = self.x;
        let mut y = 4.0 * x * (1.0 - x);
        if y < GUARD {
            y = NUDGE;
        } else if y > 1.0 - GUARD {
            y = 1.0 - NUDGE;
        } else if y == x || y == self.prev || CYCLE_POINTS.iter().any(|c| (y - c).abs() < GUARD) {
            y += NUDGE;
        }
        self.prev = x;
        self.x = y;
        y
    }

    /// Advances the map [`DECORRELATION_STEPS`] times.
    pub fn decorrelate(&mut self) {
        for _ in 0..DECORRELATION_STEPS {
            self.next_value();
        }
    }

    /// Index in `0..n` from rounding `x · n` of a decorrelated draw; `n`
    /// must be positive.
    pub fn next_index(&mut self, n: usize) -> usize {
        self.decorrelate();
        scale(self.next_value(), n)
    }
}

impl Iterator for ChaosStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_value())
    }
}

/// Rounds `x · n` half up and clamps into `0..n`.
fn scale(x: f64, n: usize) -> usize {
    ((x * n as f64 + 0.5).floor() as usize).min(n - 1)
}

/// Draws a position in `0..m` that is not marked in `exclude`.
///
/// The stream is decorrelated from earlier decisions first. Redraws on
/// excluded hits. After `10·m` misses it scans forward from a chaotic
/// offset. Returns `None` only when every position is excluded.
pub fn chaos_position(stream: &mut ChaosStream, m: usize, exclude: &[bool]) -> Option<usize> {
    debug_assert_eq!(exclude.len(), m);
    if m == 0 || exclude.iter().all(|&e| e) {
        return None;
    }
    stream.decorrelate();
    for _ in 0..10 * m {
        let idx = scale(stream.next_value(), m);
        if !exclude[idx] {
            return Some(idx);
        }
    }
    let start = scale(stream.next_value(), m);
    (start..m).chain(0..start).find(|&i| !exclude[i])
}

/// `count` distinct seeds derived from `base`, for repeated runs.
///
/// Seeds step through the unit interval by the golden ratio rather than
/// following the map itself: two seeds on the same orbit give streams that
/// differ by a shift, and the redraws in [`chaos_position`] can bring such
/// streams back into lockstep.
pub fn derive_seeds(base: f64, count: usize) -> Result<Vec<f64>> {
    ChaosStream::new(base)?;
    const STEP: f64 = 0.618_033_988_749_894_9;
    let mut seeds = Vec::with_capacity(count);
    let mut s = base;
    while seeds.len() < count {
        if ChaosStream::new(s).is_ok() && !seeds.contains(&s) {
            seeds.push(s);
        }
        s = (s + STEP).fract();
    }
    Ok(seeds)
}
