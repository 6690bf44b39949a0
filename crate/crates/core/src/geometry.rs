//! Planar geometry used by the wake model: rotating the farm into the
//! wind-aligned frame and intersecting a wake disc with a rotor disc.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A position in the farm plane, meters east (`x`) and north (`y`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Coordinates of `p` in the frame of a wind that has turned `theta_deg`
/// degrees clockwise from the reference direction.
///
/// Applies `[cos θ, -sin θ; sin θ, cos θ]` to `p`.
pub fn rotate_frame(p: Point, theta_deg: f64) -> Point {
    let (sin, cos) = theta_deg.to_radians().sin_cos();
    Point {
        x: cos * p.x - sin * p.y,
        y: sin * p.x + cos * p.y,
    }
}

/// Inputs to [`circle_overlap_area`]: a wake disc of radius `wake_radius`
/// and a rotor disc of radius `rotor_radius` whose centers are
/// `lateral_offset` apart, measured across the wind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapInputs {
    pub wake_radius: f64,
    pub rotor_radius: f64,
    pub lateral_offset: f64,
}

impl OverlapInputs {
    pub fn new(wake_radius: f64, rotor_radius: f64, lateral_offset: f64) -> Result<Self> {
        let inputs = Self {
            wake_radius,
            rotor_radius,
            lateral_offset,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wake_radius.is_finite() && self.wake_radius > 0.0) {
            return Err(invalid(
                "wake_radius",
                format!("must be finite and > 0, got {}", self.wake_radius),
            ));
        }
        if !(self.rotor_radius.is_finite() && self.rotor_radius > 0.0) {
            return Err(invalid(
                "rotor_radius",
                format!("must be finite and > 0, got {}", self.rotor_radius),
            ));
        }
        if !(self.lateral_offset.is_finite() && self.lateral_offset >= 0.0) {
            return Err(invalid(
                "lateral_offset",
                format!("must be finite and >= 0, got {}", self.lateral_offset),
            ));
        }
        Ok(())
    }
}

/// Exact area shared by the wake disc and the rotor disc.
///
/// Disjoint discs give 0 and a disc lying inside the other gives the area of
/// the smaller one. Offsets exactly on a regime boundary are evaluated with
/// the lens formula, which meets both neighbours continuously.
pub fn circle_overlap_area(inputs: &OverlapInputs) -> Result<f64> {
    inputs.validate()?;
    Ok(overlap_unchecked(
        inputs.wake_radius,
        inputs.rotor_radius,
        inputs.lateral_offset,
    ))
}

/// [`circle_overlap_area`] without input validation, for hot loops whose
/// radii are already known to be positive.
pub(crate) fn overlap_unchecked(a: f64, b: f64, c: f64) -> f64 {
    if c > a + b {
        return 0.0;
    }
    let small = a.min(b);
    if c < (a - b).abs() || c == 0.0 {
        return PI * small * small;
    }
    lens_area(a, b, c)
}

/// Sum of the two circular segments cut by the common chord.
///
/// The half-angles come from `atan2` rather than `acos`, which loses about
/// half the significant digits near tangency.
fn lens_area(a: f64, b: f64, c: f64) -> f64 {
    // four times the area of the triangle with sides a, b, c
    let kite = ((-c + a + b) * (c + a - b) * (c - a + b) * (c + a + b))
        .max(0.0)
        .sqrt();
    let half_a = kite.atan2(c * c + a * a - b * b);
    let half_b = kite.atan2(c * c + b * b - a * a);
    let area = a * a * half_a + b * b * half_b - 0.5 * kite;
    area.clamp(0.0, PI * a.min(b).powi(2))
}
