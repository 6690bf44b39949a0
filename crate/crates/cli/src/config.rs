//! Run configuration: a TOML document whose every key is optional.
//!
//! ```toml
//! scenario = "case4"        # case1 | case2 | case3 | case4 | custom
//! seed = 0.123456789
//! out_dir = "runs/case4"
//!
//! [grid]
//! side = 4000.0
//! cells = 20
//!
//! [wind]                    # overrides the preset's parameters
//! scale = 11.0
//!
//! [ga]
//! max_generations = 300
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wflo_core::optimizer::{GaParams, MutationParent};
use wflo_core::scenario::{
    build_grid, single_bin, uniform_directions, weibull_rose, Grid, SpeedBin, UniformPattern,
    WindScenario,
};
use wflo_core::study::SpacingCheck;
use wflo_core::wake::TurbineSpec;
use wflo_core::Error as CoreError;

/// A config problem, tied to a file location or a dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

impl ConfigError {
    fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            location: field.to_string(),
            message: message.into(),
        }
    }

    /// Maps a core validation error onto the config section it came from.
    fn core(section: &str, err: CoreError) -> Self {
        match err {
            CoreError::InvalidParameter { name, reason } => {
                Self::field(&format!("{section}.{name}"), reason)
            }
            other => Self::field(section, other.to_string()),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Case1,
    Case2,
    Case3,
    Case4,
    Custom,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
            Preset::Case3 => "case3",
            Preset::Case4 => "case4",
            Preset::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindKind {
    Single,
    Uniform,
    Weibull,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    scenario: Preset,
    seed: Option<f64>,
    out_dir: Option<PathBuf>,
    grid: RawGrid,
    turbine: TurbineSpec,
    wind: RawWind,
    ga: RawGa,
    study: RawStudy,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawGrid {
    side: f64,
    cells: i64,
}

impl Default for RawGrid {
    fn default() -> Self {
        Self {
            side: 4000.0,
            cells: 20,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawWind {
    kind: Option<WindKind>,
    theta: Option<f64>,
    speed: Option<f64>,
    sectors: Option<i64>,
    shape: Option<f64>,
    scale: Option<f64>,
    bin_width: Option<f64>,
    max_speed: Option<f64>,
    direction_weights: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawGa {
    turbines: Option<i64>,
    population: Option<i64>,
    elites: Option<i64>,
    relocations: Option<i64>,
    aliens: Option<i64>,
    max_generations: Option<i64>,
    target_efficiency: Option<f64>,
    mutation_parent: Option<MutationParent>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawStudy {
    edges: Option<Vec<f64>>,
    repeats: Option<i64>,
    budget: Option<f64>,
    spacing_check: Option<SpacingCheck>,
    uniform_pattern: Option<UniformPattern>,
    seeds: Option<i64>,
    instances: Option<i64>,
}

/// Settings for `sweep`, `compare` and `verify`.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// Cell edges, descending from the baseline.
    pub edges: Vec<f64>,
    pub repeats: usize,
    /// Tolerated power drop for the area-saving estimate.
    pub budget: f64,
    pub spacing_check: SpacingCheck,
    pub uniform_pattern: UniformPattern,
    /// Paired seeds for the AGA versus ablation comparison.
    pub seeds: usize,
    /// Small instances checked against exhaustive search by `verify`.
    pub instances: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            edges: (0..=10).map(|k| 200.0 - 10.0 * k as f64).collect(),
            repeats: 5,
            budget: 0.05,
            spacing_check: SpacingCheck::Off,
            uniform_pattern: UniformPattern::Line,
            seeds: 20,
            instances: 10,
        }
    }
}

/// A validated configuration with presets and defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset: Preset,
    pub grid: Grid,
    pub spec: TurbineSpec,
    pub scenario: WindScenario,
    pub ga: GaParams,
    pub study: StudyConfig,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn seed(&self) -> f64 {
        self.ga.seed
    }

    /// Replaces the chaos seed, rejecting values outside (0, 1).
    pub fn set_seed(&mut self, seed: f64) -> Result<(), ConfigError> {
        let ga = GaParams {
            seed,
            ..self.ga.clone()
        };
        ga.validate().map_err(|e| match e {
            CoreError::InvalidParameter { reason, .. } => ConfigError::field("seed", reason),
            other => ConfigError::field("seed", other.to_string()),
        })?;
        self.ga = ga;
        Ok(())
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        location: path.display().to_string(),
        message: format!("cannot read config: {e}"),
    })?;
    parse_config(&text).map_err(|mut e| {
        e.location = format!("{}:{}", path.display(), e.location);
        e
    })
}

/// Parses config text. Syntax errors carry a `line:column` location.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => {
                let before = &text[..span.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                format!("{line}:{col}")
            }
            None => "config".to_string(),
        };
        ConfigError {
            location,
            message: e.message().replace('\n', " "),
        }
    })?;
    resolve(raw)
}

fn count(field: &str, value: Option<i64>, default: usize, min: i64) -> Result<usize, ConfigError> {
    let v = value.unwrap_or(default as i64);
    if v < min {
        let name = field.rsplit('.').next().unwrap_or(field);
        return Err(ConfigError::field(field, format!("{name} ≥ {min}")));
    }
    Ok(v as usize)
}

fn resolve(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let cells = count("grid.cells", Some(raw.grid.cells), 20, 1)?;
    if !(raw.grid.side.is_finite() && raw.grid.side > 0.0) {
        return Err(ConfigError::field("grid.side", "side > 0"));
    }
    let grid = build_grid(raw.grid.side, cells).map_err(|e| ConfigError::core("grid", e))?;

    raw.turbine
        .validate()
        .map_err(|e| ConfigError::core("turbine", e))?;
    let scenario = build_scenario(raw.scenario, &raw.wind)?;

    let defaults = GaParams::default();
    let target = match raw.ga.target_efficiency {
        Some(t) => Some(t),
        None if matches!(raw.scenario, Preset::Case1 | Preset::Case2) => Some(1.0),
        None => None,
    };
    let ga = GaParams {
        turbines: count("ga.turbines", raw.ga.turbines, defaults.turbines, 1)?,
        population: count("ga.population", raw.ga.population, defaults.population, 1)?,
        elites: count("ga.elites", raw.ga.elites, defaults.elites, 1)?,
        relocations: count(
            "ga.relocations",
            raw.ga.relocations,
            defaults.relocations,
            0,
        )?,
        aliens: count("ga.aliens", raw.ga.aliens, defaults.aliens, 0)?,
        max_generations: count(
            "ga.max_generations",
            raw.ga.max_generations,
            defaults.max_generations,
            1,
        )?,
        target_efficiency: target,
        seed: raw.seed.unwrap_or(defaults.seed),
        mutation_parent: raw.ga.mutation_parent.unwrap_or_default(),
    };
    ga.validate().map_err(|e| match e {
        CoreError::InvalidParameter {
            name: "seed",
            reason,
        } => ConfigError::field("seed", reason),
        other => ConfigError::core("ga", other),
    })?;
    if ga.turbines > grid.len() {
        return Err(ConfigError::field(
            "ga.turbines",
            format!("turbines ≤ {} grid positions", grid.len()),
        ));
    }

    let d = StudyConfig::default();
    let edges = raw.study.edges.unwrap_or(d.edges);
    if edges.is_empty() || edges.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(ConfigError::field(
            "study.edges",
            "edges must be a non-empty list of values > 0",
        ));
    }
    if edges.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ConfigError::field(
            "study.edges",
            "edges must be strictly descending",
        ));
    }
    let budget = raw.study.budget.unwrap_or(d.budget);
    if !(0.0..1.0).contains(&budget) {
        return Err(ConfigError::field("study.budget", "0 ≤ budget < 1"));
    }
    let study = StudyConfig {
        edges,
        repeats: count("study.repeats", raw.study.repeats, d.repeats, 1)?,
        budget,
        spacing_check: raw.study.spacing_check.unwrap_or(d.spacing_check),
        uniform_pattern: raw.study.uniform_pattern.unwrap_or(d.uniform_pattern),
        seeds: count("study.seeds", raw.study.seeds, d.seeds, 1)?,
        instances: count("study.instances", raw.study.instances, d.instances, 1)?,
    };

    Ok(RunConfig {
        preset: raw.scenario,
        grid,
        spec: raw.turbine,
        scenario,
        ga,
        study,
        out_dir: raw.out_dir,
    })
}

fn build_scenario(preset: Preset, w: &RawWind) -> Result<WindScenario, ConfigError> {
    let kind = match (preset, w.kind) {
        (Preset::Custom, Some(k)) => k,
        (Preset::Custom, None) => {
            return Err(ConfigError::field(
                "wind.kind",
                "required when scenario = \"custom\"",
            ));
        }
        (_, Some(_)) => {
            return Err(ConfigError::field(
                "wind.kind",
                "only allowed when scenario = \"custom\"",
            ));
        }
        (Preset::Case1 | Preset::Case2, None) => WindKind::Single,
        (Preset::Case3, None) => WindKind::Uniform,
        (Preset::Case4, None) => WindKind::Weibull,
    };
    let speed = || -> Result<f64, ConfigError> {
        let v = w
            .speed
            .unwrap_or(if preset == Preset::Case2 { 20.0 } else { 12.0 });
        if !(v.is_finite() && v >= 0.0) {
            return Err(ConfigError::field("wind.speed", "speed ≥ 0"));
        }
        Ok(v)
    };
    let sectors = count("wind.sectors", w.sectors, 12, 1)?;
    let scenario = match kind {
        WindKind::Single => {
            let theta = w.theta.unwrap_or(0.0);
            if !theta.is_finite() {
                return Err(ConfigError::field("wind.theta", "must be finite"));
            }
            single_bin(theta, speed()?)
        }
        WindKind::Uniform => {
            uniform_directions(speed()?, sectors).map_err(|e| ConfigError::core("wind", e))?
        }
        WindKind::Weibull => {
            let bins = SpeedBin::uniform(w.bin_width.unwrap_or(1.0), w.max_speed.unwrap_or(30.0))
                .map_err(|e| ConfigError::core("wind", e))?;
            let dirs = match &w.direction_weights {
                Some(d) => d.clone(),
                None => vec![1.0 / sectors as f64; sectors],
            };
            weibull_rose(
                w.shape.unwrap_or(2.1),
                w.scale.unwrap_or(10.5),
                &bins,
                &dirs,
            )
            .map_err(|e| ConfigError::core("wind", e))?
        }
    };
    scenario
        .validate()
        .map_err(|e| ConfigError::core("wind", e))?;
    Ok(scenario)
}
