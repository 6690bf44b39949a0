//! Jensen top-hat wake model with root-sum-square superposition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{overlap_unchecked, Point};
use crate::power::PowerCurve;

/// Downwind separations at or below this are treated as side by side.
/// Rotating lattice coordinates leaves residues around 1e-11 m.
pub const DOWNWIND_EPS: f64 = 1e-9;

/// Which numerator the single-wake deficit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeficitNumerator {
    /// `1 - sqrt(1 - C_T)`, the classic Jensen initial deficit.
    #[default]
    Standard,
    /// `1 + sqrt(1 - C_T)`, the sign-flipped variant.
    PaperLiteral,
}

/// One turbine type shared by the whole farm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TurbineSpec {
    /// Rotor radius, m.
    pub rotor_radius: f64,
    /// Hub height, m.
    pub hub_height: f64,
    pub thrust_coefficient: f64,
    /// Surface roughness length, m.
    pub surface_roughness: f64,
    pub power_curve: PowerCurve,
    pub deficit_numerator: DeficitNumerator,
}

impl Default for TurbineSpec {
    /// 5 MW offshore class: 126 m rotor, 90 m hub, open-sea roughness.
    fn default() -> Self {
        Self {
            rotor_radius: 63.0,
            hub_height: 90.0,
            thrust_coefficient: 0.88,
            surface_roughness: 0.0005,
            power_curve: PowerCurve::default(),
            deficit_numerator: DeficitNumerator::Standard,
        }
    }
}

impl TurbineSpec {
    pub fn validate(&self) -> Result<()> {
        let r = self.rotor_radius;
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("rotor_radius", format!("must be > 0, got {r}")));
        }
        if !(self.hub_height.is_finite() && self.hub_height > r) {
            return Err(invalid(
                "hub_height",
                format!("must exceed rotor_radius {r}, got {}", self.hub_height),
            ));
        }
        let ct = self.thrust_coefficient;
        if !(ct > 0.0 && ct < 1.0) {
            return Err(invalid(
                "thrust_coefficient",
                format!("must lie in (0, 1), got {ct}"),
            ));
        }
        let z0 = self.surface_roughness;
        if !(z0 > 0.0 && z0 < self.hub_height) {
            return Err(invalid(
                "surface_roughness",
                format!("must lie in (0, hub_height), got {z0}"),
            ));
        }
        self.power_curve.validate()
    }

    pub fn rotor_area(&self) -> f64 {
        PI * self.rotor_radius * self.rotor_radius
    }

    pub fn decay_factor(&self) -> Result<f64> {
        decay_factor(self.hub_height, self.surface_roughness)
    }

    /// Deficit immediately behind the rotor, before any expansion.
    pub fn initial_deficit(&self) -> f64 {
        let root = (1.0 - self.thrust_coefficient).sqrt();
        match self.deficit_numerator {
            DeficitNumerator::Standard => 1.0 - root,
            DeficitNumerator::PaperLiteral => 1.0 + root,
        }
    }
}

/// Wake expansion rate `0.5 / ln(h / z0)`.
pub fn decay_factor(hub_height: f64, roughness: f64) -> Result<f64> {
    if !(roughness > 0.0 && hub_height.is_finite() && hub_height > roughness) {
        return Err(invalid(
            "hub_height",
            format!("need hub_height > surface_roughness > 0, got h={hub_height}, z0={roughness}"),
        ));
    }
    Ok(0.5 / (hub_height / roughness).ln())
}

/// Radius of the wake `d` meters behind a rotor: `R + k d`.
pub fn wake_radius(spec: &TurbineSpec, d: f64) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(invalid(
            "distance",
            format!("must be finite and >= 0, got {d}"),
        ));
    }
    Ok(spec.rotor_radius + spec.decay_factor()? * d)
}

/// Fractional speed loss at a rotor sitting `d_ij` meters behind another,
/// with `overlap` m² of its disc inside the upstream wake.
pub fn pairwise_deficit(spec: &TurbineSpec, d_ij: f64, overlap: f64) -> Result<f64> {
    if !(d_ij > 0.0) {
        return Err(Error::NonPositiveDistance(d_ij));
    }
    let rotor_area = spec.rotor_area();
    if !(overlap >= 0.0 && overlap <= rotor_area * (1.0 + 1e-12)) {
        return Err(invalid(
            "overlap",
            format!("must lie in [0, {rotor_area}], got {overlap}"),
        ));
    }
    let model = WakeModel::new(spec)?;
    Ok(model.deficit(d_ij, overlap))
}

/// One edge of the wake graph: `upstream` shades `downstream`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WakeGraphEntry {
    pub downstream: usize,
    pub upstream: usize,
    pub downwind_distance: f64,
    pub lateral_offset: f64,
    pub overlap: f64,
}

/// All shading relations for wind direction `theta_deg`.
pub fn build_wake_sets(
    positions: &[Point],
    theta_deg: f64,
    spec: &TurbineSpec,
) -> Result<Vec<WakeGraphEntry>> {
    let model = WakeModel::new(spec)?;
    check_positions(positions)?;
    let frame = Frame::new(theta_deg);
    let rotated: Vec<Point> = positions.iter().map(|&p| frame.apply(p)).collect();

    let mut entries = Vec::new();
    for (i, pi) in rotated.iter().enumerate() {
        for (j, pj) in rotated.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some((d, x, area)) = model.shading(pi, pj) {
                entries.push(WakeGraphEntry {
                    downstream: i,
                    upstream: j,
                    downwind_distance: d,
                    lateral_offset: x,
                    overlap: area,
                });
            }
        }
    }
    Ok(entries)
}

/// Combined velocity deficit `D_i` of every turbine, clamped to 1.
pub fn velocity_deficits(
    positions: &[Point],
    theta_deg: f64,
    spec: &TurbineSpec,
) -> Result<Vec<f64>> {
    let model = WakeModel::new(spec)?;
    check_positions(positions)?;
    let mut out = vec![0.0; positions.len()];
    model.deficits_into(positions, &Frame::new(theta_deg), &mut out);
    Ok(out)
}

/// Speed arriving at each rotor: `v (1 - D_i)`.
pub fn effective_speeds(
    positions: &[Point],
    theta_deg: f64,
    v: f64,
    spec: &TurbineSpec,
) -> Result<Vec<f64>> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(invalid(
            "speed",
            format!("must be finite and >= 0, got {v}"),
        ));
    }
    Ok(velocity_deficits(positions, theta_deg, spec)?
        .into_iter()
        .map(|d| v * (1.0 - d))
        .collect())
}

pub(crate) fn check_positions(positions: &[Point]) -> Result<()> {
    for (i, p) in positions.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidLayout(format!("position {i} is not finite")));
        }
        for (j, q) in positions.iter().enumerate().skip(i + 1) {
            if p == q {
                return Err(Error::DuplicatePosition {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Precomputed rotation for one wind direction. Quarter turns are exact.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    sin: f64,
    cos: f64,
}

impl Frame {
    pub(crate) fn new(theta_deg: f64) -> Self {
        let turns = theta_deg / 90.0;
        let (sin, cos) = if turns.fract() == 0.0 {
            match turns.rem_euclid(4.0) as u8 {
                0 => (0.0, 1.0),
                1 => (1.0, 0.0),
                2 => (0.0, -1.0),
                _ => (-1.0, 0.0),
            }
        } else {
            theta_deg.to_radians().sin_cos()
        };
        Self { sin, cos }
    }

    #[inline]
    pub(crate) fn apply(&self, p: Point) -> Point {
        Point {
            x: self.cos * p.x - self.sin * p.y,
            y: self.sin * p.x + self.cos * p.y,
        }
    }
}

/// Spec-derived constants for the inner loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WakeModel {
    rotor_radius: f64,
    decay: f64,
    initial_deficit: f64,
    rotor_area: f64,
}

impl WakeModel {
    pub(crate) fn new(spec: &TurbineSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            rotor_radius: spec.rotor_radius,
            decay: spec.decay_factor()?,
            initial_deficit: spec.initial_deficit(),
            rotor_area: spec.rotor_area(),
        })
    }

    #[inline]
    fn deficit(&self, d: f64, overlap: f64) -> f64 {
        let expansion = 1.0 + self.decay * d / self.rotor_radius;
        self.initial_deficit / (expansion * expansion) * (overlap / self.rotor_area)
    }

    /// `(d, x, A)` when `up` shades `down` in an already rotated frame.
    #[inline]
    fn shading(&self, down: &Point, up: &Point) -> Option<(f64, f64, f64)> {
        let d = up.y - down.y;
        if d <= DOWNWIND_EPS {
            return None;
        }
        let x = (up.x - down.x).abs();
        let area = overlap_unchecked(self.rotor_radius + self.decay * d, self.rotor_radius, x);
        (area > 0.0).then_some((d, x, area))
    }

    /// Writes clamped `D_i` for every turbine into `out`.
    pub(crate) fn deficits_into(&self, positions: &[Point], frame: &Frame, out: &mut [f64]) {
        let rotated: Vec<Point> = positions.iter().map(|&p| frame.apply(p)).collect();
        for (i, down) in rotated.iter().enumerate() {
            let mut sum_sq = 0.0;
            for (j, up) in rotated.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some((d, _, area)) = self.shading(down, up) {
                    let dv = self.deficit(d, area);
                    sum_sq += dv * dv;
                }
            }
            out[i] = sum_sq.sqrt().min(1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{circle_overlap_area, rotate_frame, OverlapInputs};
    use approx::assert_relative_eq;

    fn onshore(radius: f64) -> TurbineSpec {
        TurbineSpec {
            rotor_radius: radius,
            hub_height: 60.0,
            surface_roughness: 0.3,
            ..TurbineSpec::default()
        }
    }

    #[test]
    fn decay_factor_values() {
        assert_relative_eq!(
            decay_factor(60.0, 0.3).unwrap(),
            0.094_369_582_908_877_43,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            decay_factor(std::f64::consts::E * 0.2, 0.2).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            decay_factor(90.0, 0.0005).unwrap(),
            0.041_319_882_221_284_99,
            max_relative = 1e-12
        );
        assert!(decay_factor(0.3, 0.3).is_err());
        assert!(decay_factor(1.0, 0.0).is_err());
    }

    #[test]
    fn wake_radius_is_linear() {
        let spec = TurbineSpec::default();
        assert_eq!(wake_radius(&spec, 0.0).unwrap(), 63.0);
        assert_relative_eq!(
            wake_radius(&spec, 1000.0).unwrap(),
            104.319_882_221_284_99,
            max_relative = 1e-12
        );
        assert!(wake_radius(&spec, 500.0).unwrap() < wake_radius(&spec, 1000.0).unwrap());
        assert!(wake_radius(&spec, -1.0).is_err());
    }

    #[test]
    fn pairwise_deficit_values() {
        let spec = onshore(20.0);
        assert_eq!(pairwise_deficit(&spec, 250.0, 0.0).unwrap(), 0.0);
        // (1 - sqrt(0.12)) / (1 + 0.0943696 * 12.5)^2
        let full = spec.rotor_area();
        assert_relative_eq!(
            pairwise_deficit(&spec, 250.0, full).unwrap(),
            0.137_576_357_893_977_3,
            max_relative = 1e-12
        );
        assert!(
            pairwise_deficit(&spec, 2000.0, full).unwrap()
                < pairwise_deficit(&spec, 200.0, full).unwrap()
        );
        assert!(pairwise_deficit(&spec, 0.0, full).is_err());
        assert!(pairwise_deficit(&spec, 10.0, full * 1.01).is_err());
    }

    #[test]
    fn literal_numerator_is_larger() {
        let mut spec = TurbineSpec::default();
        let standard = pairwise_deficit(&spec, 300.0, spec.rotor_area()).unwrap();
        spec.deficit_numerator = DeficitNumerator::PaperLiteral;
        let literal = pairwise_deficit(&spec, 300.0, spec.rotor_area()).unwrap();
        let root = 0.12_f64.sqrt();
        assert_relative_eq!(
            literal / standard,
            (1.0 + root) / (1.0 - root),
            max_relative = 1e-12
        );
    }

    #[test]
    fn crosswind_pair_has_no_wake() {
        let spec = TurbineSpec::default();
        let pts = [Point::new(0.0, 0.0), Point::new(200.0, 0.0)];
        assert!(build_wake_sets(&pts, 0.0, &spec).unwrap().is_empty());
        // at 90° the same pair lines up with the wind
        assert_eq!(build_wake_sets(&pts, 90.0, &spec).unwrap().len(), 1);
        // a column is crosswind at 90° and 270° despite rounding in sin/cos
        let column = [Point::new(400.0, 0.0), Point::new(400.0, 200.0)];
        assert!(build_wake_sets(&column, 90.0, &spec).unwrap().is_empty());
        assert!(build_wake_sets(&column, 270.0, &spec).unwrap().is_empty());
        assert!(build_wake_sets(&column, -90.0, &spec).unwrap().is_empty());
    }

    #[test]
    fn aligned_pair_entry_matches_geometry() {
        let spec = TurbineSpec::default();
        let r = spec.rotor_radius;
        let pts = [Point::new(0.0, 0.0), Point::new(0.0, 7.0 * r)];
        let entries = build_wake_sets(&pts, 0.0, &spec).unwrap();
        assert_eq!(entries.len(), 1);
        let e = entries[0];
        assert_eq!((e.downstream, e.upstream), (0, 1));
        assert_relative_eq!(e.downwind_distance, 7.0 * r, max_relative = 1e-15);
        let wake = r + spec.decay_factor().unwrap() * 7.0 * r;
        let expected = circle_overlap_area(&OverlapInputs::new(wake, r, 0.0).unwrap()).unwrap();
        assert_relative_eq!(e.overlap, expected, max_relative = 1e-12);
        assert_relative_eq!(e.overlap, spec.rotor_area(), max_relative = 1e-12);
    }

    #[test]
    fn frame_invariance() {
        let spec = TurbineSpec::default();
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(40.0, 600.0),
            Point::new(-90.0, 1400.0),
            Point::new(150.0, 2100.0),
        ];
        for (theta, phi) in [(0.0, 30.0), (30.0, 47.0), (200.0, -75.0)] {
            let base = build_wake_sets(&pts, theta, &spec).unwrap();
            let turned: Vec<Point> = pts.iter().map(|&p| rotate_frame(p, -phi)).collect();
            let moved = build_wake_sets(&turned, theta + phi, &spec).unwrap();
            assert_eq!(base.len(), moved.len());
            for (a, b) in base.iter().zip(&moved) {
                assert_eq!((a.downstream, a.upstream), (b.downstream, b.upstream));
                assert_relative_eq!(
                    a.downwind_distance,
                    b.downwind_distance,
                    max_relative = 1e-9
                );
                assert!((a.lateral_offset - b.lateral_offset).abs() < 1e-6);
                assert_relative_eq!(a.overlap, b.overlap, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn never_both_directions() {
        let spec = TurbineSpec::default();
        let pts: Vec<Point> = (0..12)
            .map(|i| Point::new((i % 4) as f64 * 150.0, (i / 4) as f64 * 170.0))
            .collect();
        for theta in [0.0, 30.0, 45.0, 90.0, 135.0, 300.0] {
            let entries = build_wake_sets(&pts, theta, &spec).unwrap();
            for e in &entries {
                assert!(!entries
                    .iter()
                    .any(|f| f.downstream == e.upstream && f.upstream == e.downstream));
            }
        }
    }

    #[test]
    fn duplicates_rejected() {
        let spec = TurbineSpec::default();
        let pts = [
            Point::new(1.0, 2.0),
            Point::new(3.0, 4.0),
            Point::new(1.0, 2.0),
        ];
        assert_eq!(
            build_wake_sets(&pts, 0.0, &spec),
            Err(Error::DuplicatePosition {
                first: 0,
                second: 2
            })
        );
    }

    #[test]
    fn single_turbine_and_calm() {
        let spec = TurbineSpec::default();
        assert_eq!(
            effective_speeds(&[Point::new(5.0, 5.0)], 0.0, 12.0, &spec).unwrap(),
            vec![12.0]
        );
        let pts = [Point::new(0.0, 0.0), Point::new(0.0, 500.0)];
        assert_eq!(
            effective_speeds(&pts, 0.0, 0.0, &spec).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn three_turbine_chain_matches_hand_evaluation() {
        let spec = TurbineSpec::default();
        let r = spec.rotor_radius;
        let k = 0.5 / (90.0_f64 / 0.0005).ln();
        let a0 = 1.0 - 0.12_f64.sqrt();
        // chain along the wind, every rotor fully inside every wake upstream of it
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(0.0, 500.0),
            Point::new(0.0, 1300.0),
        ];
        let dv = |d: f64| a0 / (1.0 + k * d / r).powi(2);
        let expected = [
            12.0 * (1.0 - (dv(500.0).powi(2) + dv(1300.0).powi(2)).sqrt()),
            12.0 * (1.0 - dv(800.0)),
            12.0,
        ];
        let got = effective_speeds(&pts, 0.0, 12.0, &spec).unwrap();
        for (g, e) in got.iter().zip(expected) {
            assert_relative_eq!(*g, e, max_relative = 1e-12);
        }
    }

    #[test]
    fn superposition_clamps_at_full_stop() {
        let spec = TurbineSpec {
            deficit_numerator: DeficitNumerator::PaperLiteral,
            ..TurbineSpec::default()
        };
        let pts = [Point::new(0.0, 0.0), Point::new(0.0, 10.0)];
        let u = effective_speeds(&pts, 0.0, 12.0, &spec).unwrap();
        assert_eq!(u[0], 0.0);
        assert_eq!(u[1], 12.0);
    }

    #[test]
    fn spec_validation() {
        let mut spec = TurbineSpec::default();
        assert!(spec.validate().is_ok());
        spec.thrust_coefficient = 1.0;
        assert!(spec.validate().is_err());
        spec = TurbineSpec {
            hub_height: 50.0,
            ..TurbineSpec::default()
        };
        assert!(spec.validate().is_err());
        spec = TurbineSpec {
            surface_roughness: 0.0,
            ..TurbineSpec::default()
        };
        assert!(spec.validate().is_err());
    }
}
