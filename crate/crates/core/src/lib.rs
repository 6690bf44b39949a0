//! Wake-aware wind farm layout optimization.
//!
//! Turbines of one type are placed on the corners of a square grid. A Jensen
//! wake model scores each layout against a joint direction/speed
//! distribution, and a chaotic genetic algorithm searches for the layout
//! with the highest expected power at a fixed turbine count.

pub mod error;
pub mod geometry;
pub mod optimizer;
pub mod oracle;
pub mod power;
pub mod scenario;
pub mod study;
pub mod wake;

pub use error::{Error, Result};
pub use geometry::Point;
pub use optimizer::{GaParams, Layout};
pub use power::{EvaluationResult, Evaluator, PowerCurve};
pub use scenario::{Grid, WindScenario};
pub use wake::TurbineSpec;
