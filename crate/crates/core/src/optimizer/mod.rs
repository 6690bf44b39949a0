//! Fixed-cardinality genetic search over grid layouts.
//!
//! Crossover is absent: it cannot keep the turbine count fixed. Variation
//! comes from relocating each elite's least productive turbine, injecting
//! chaotic aliens and moving single turbines.

mod chaos;
mod engine;
mod layout;
mod operators;

pub use chaos::{chaos_position, derive_seeds, ChaosStream};
pub use engine::{
    generations_to, initialize_population, run_aga, run_conventional_ga, run_ga, GaOutcome,
    GaParams, GenerationTrace, MutationParent, Variant,
};
pub use layout::Layout;
pub use operators::{
    chaotic_layout, chaotic_population, mutate_twice, relocate_worst, worst_turbine,
};
