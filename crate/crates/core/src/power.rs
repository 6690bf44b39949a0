//! Turbine power curve, expected farm output over a wind distribution and
//! layout efficiency.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::scenario::WindScenario;
use crate::wake::{check_positions, Frame, TurbineSpec, WakeModel};

/// Piecewise power curve: zero below cut-in, a quartic fit up to rated
/// speed, flat at rated power until cut-out. Powers in kW, speeds in m/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerCurve {
    pub cut_in: f64,
    pub rated_speed: f64,
    pub cut_out: f64,
    pub rated_power: f64,
    /// Quartic coefficients, highest power first.
    pub coefficients: [f64; 5],
}

impl Default for PowerCurve {
    fn default() -> Self {
        Self {
            cut_in: 3.0,
            rated_speed: 14.0,
            cut_out: 25.0,
            rated_power: 5000.0,
            coefficients: [-0.9114, 21.6654, -113.1189, 201.1211, -55.0267],
        }
    }
}

impl PowerCurve {
    pub fn validate(&self) -> Result<()> {
        if !(self.cut_in >= 0.0 && self.cut_in < self.rated_speed) {
            return Err(invalid(
                "cut_in",
                format!(
                    "need 0 <= cut_in < rated_speed, got {} and {}",
                    self.cut_in, self.rated_speed
                ),
            ));
        }
        // infinite cut-out means the turbine never shuts down
        if !(self.cut_out > self.rated_speed) {
            return Err(invalid(
                "cut_out",
                format!(
                    "must exceed rated_speed {}, got {}",
                    self.rated_speed, self.cut_out
                ),
            ));
        }
        if !(self.rated_power.is_finite() && self.rated_power > 0.0) {
            return Err(invalid(
                "rated_power",
                format!("must be > 0, got {}", self.rated_power),
            ));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(invalid("power_poly", "coefficients must be finite"));
        }
        Ok(())
    }

    /// Raw quartic value, unclamped.
    pub fn polynomial(&self, v: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, c| acc * v + c)
    }

    pub fn power_at(&self, v: f64) -> f64 {
        if v < self.cut_in || v >= self.cut_out {
            0.0
        } else if v >= self.rated_speed {
            self.rated_power
        } else {
            self.polynomial(v).clamp(0.0, self.rated_power)
        }
    }
}

pub fn power_at(curve: &PowerCurve, v: f64) -> f64 {
    curve.power_at(v)
}

/// Scored layout. Per-turbine quantities are expectations over the wind
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationResult {
    /// Expected effective wind speed at each rotor, m/s.
    pub per_turbine_speed: Vec<f64>,
    /// Expected power of each turbine, kW.
    pub per_turbine_power: Vec<f64>,
    /// Expected farm power, kW.
    pub expected_power: f64,
    /// Expected farm power with every wake removed, kW.
    pub free_power: f64,
    pub efficiency: f64,
}

/// Expected output of the turbines at `positions`.
pub fn expected_farm_power(
    positions: &[Point],
    scenario: &WindScenario,
    spec: &TurbineSpec,
) -> Result<EvaluationResult> {
    Evaluator::new(scenario, spec)?.evaluate(positions)
}

/// Wake-free expected output of `n` turbines.
pub fn free_power(n: usize, scenario: &WindScenario, curve: &PowerCurve) -> f64 {
    let mut free = 0.0;
    for bin in &scenario.bins {
        let p = curve.power_at(bin.speed);
        let mut bin_power = 0.0;
        for _ in 0..n {
            bin_power += p;
        }
        free += bin.weight * bin_power;
    }
    free
}

/// Expected power divided by the wake-free power of `n` turbines.
pub fn efficiency(
    expected_power: f64,
    n: usize,
    scenario: &WindScenario,
    curve: &PowerCurve,
) -> Result<f64> {
    if n == 0 {
        return Err(invalid("turbines", "need at least one turbine"));
    }
    let free = free_power(n, scenario, curve);
    if !(free > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(expected_power / free)
}

/// Mosetti aggregate cost `N (2/3 + 1/3 e^{-0.00174 N^2})`.
pub fn cost_curve(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid("turbines", "cost curve needs N >= 1"));
    }
    let n = f64::from(n);
    Ok(n * (2.0 / 3.0 + (-0.00174 * n * n).exp() / 3.0))
}

/// Reusable scorer for one scenario and turbine type. Wake deficits depend
/// only on direction, so they are computed once per distinct direction and
/// shared by every speed bin of that direction.
#[derive(Debug, Clone)]
pub struct Evaluator {
    spec: TurbineSpec,
    model: WakeModel,
    scenario: WindScenario,
    frames: Vec<Frame>,
    /// Index into `frames` for every scenario bin.
    bin_frame: Vec<usize>,
}

impl Evaluator {
    pub fn new(scenario: &WindScenario, spec: &TurbineSpec) -> Result<Self> {
        scenario.validate()?;
        let model = WakeModel::new(spec)?;
        let mut thetas: Vec<f64> = Vec::new();
        let mut bin_frame = Vec::with_capacity(scenario.bins.len());
        for bin in &scenario.bins {
            let idx = match thetas
                .iter()
                .position(|t| t.to_bits() == bin.theta.to_bits())
            {
                Some(i) => i,
                None => {
                    thetas.push(bin.theta);
                    thetas.len() - 1
                }
            };
            bin_frame.push(idx);
        }
        Ok(Self {
            spec: spec.clone(),
            model,
            scenario: scenario.clone(),
            frames: thetas.into_iter().map(Frame::new).collect(),
            bin_frame,
        })
    }

    pub fn scenario(&self) -> &WindScenario {
        &self.scenario
    }

    pub fn spec(&self) -> &TurbineSpec {
        &self.spec
    }

    pub fn evaluate(&self, positions: &[Point]) -> Result<EvaluationResult> {
        check_positions(positions)?;
        if positions.is_empty() {
            return Err(invalid("turbines", "need at least one turbine"));
        }
        Ok(self.evaluate_unchecked(positions))
    }

    /// Scores positions already known to be distinct and finite.
    pub(crate) fn evaluate_unchecked(&self, positions: &[Point]) -> EvaluationResult {
        let n = positions.len();
        let curve = &self.spec.power_curve;
        let mut deficits = vec![0.0; n * self.frames.len()];
        for (f, frame) in self.frames.iter().enumerate() {
            self.model
                .deficits_into(positions, frame, &mut deficits[f * n..(f + 1) * n]);
        }

        let mut speed = vec![0.0; n];
        let mut power = vec![0.0; n];
        let mut total = 0.0;
        for (bin, &f) in self.scenario.bins.iter().zip(&self.bin_frame) {
            let d = &deficits[f * n..(f + 1) * n];
            let mut bin_power = 0.0;
            for i in 0..n {
                let u = bin.speed * (1.0 - d[i]);
                let p = curve.power_at(u);
                bin_power += p;
                speed[i] += bin.weight * u;
                power[i] += bin.weight * p;
            }
            total += bin.weight * bin_power;
        }
        let free = free_power(n, &self.scenario, curve);
        // zero free power (all mass below cut-in) scores as zero efficiency
        let eta = if free > 0.0 { total / free } else { 0.0 };
        EvaluationResult {
            per_turbine_speed: speed,
            per_turbine_power: power,
            expected_power: total,
            free_power: free,
            efficiency: eta,
        }
    }
}
