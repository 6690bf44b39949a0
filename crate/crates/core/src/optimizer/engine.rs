use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::power::{EvaluationResult, Evaluator};
use crate::scenario::{Grid, WindScenario};
use crate::wake::TurbineSpec;

use super::chaos::ChaosStream;
use super::layout::Layout;
use super::operators::{chaotic_layout, chaotic_population, mutate_twice, relocate_from, weakest};

/// Where mutants take their parent from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationParent {
    /// Always the best individual of the generation.
    BestOnly,
    /// A chaotically chosen elite.
    #[default]
    ElitePool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    /// Turbines per layout.
    pub turbines: usize,
    pub population: usize,
    pub elites: usize,
    /// Descendants produced by relocating an elite's worst turbine.
    pub relocations: usize,
    /// Fresh chaotic layouts injected every generation.
    pub aliens: usize,
    pub max_generations: usize,
    /// Stop as soon as the best efficiency reaches this value.
    pub target_efficiency: Option<f64>,
    /// Chaos seed in (0, 1).
    pub seed: f64,
    pub mutation_parent: MutationParent,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            turbines: 16,
            population: 120,
            elites: 12,
            relocations: 36,
            aliens: 12,
            max_generations: 200,
            target_efficiency: None,
            seed: 0.123_456_789,
            mutation_parent: MutationParent::ElitePool,
        }
    }
}

impl GaParams {
    pub fn with_seed(mut self, seed: f64) -> Self {
        self.seed = seed;
        self
    }

    pub fn mutants(&self) -> usize {
        self.population
            .saturating_sub(self.elites + self.relocations + self.aliens)
    }

    pub fn validate(&self) -> Result<()> {
        if self.turbines == 0 {
            return Err(invalid("turbines", "need at least one turbine"));
        }
        if self.elites == 0 {
            return Err(invalid("elites", "elites ≥ 1"));
        }
        if self.elites + self.relocations + self.aliens > self.population {
            return Err(invalid(
                "population",
                format!(
                    "elites + relocations + aliens = {} exceeds population {}",
                    self.elites + self.relocations + self.aliens,
                    self.population
                ),
            ));
        }
        if self.max_generations == 0 {
            return Err(invalid("max_generations", "max_generations ≥ 1"));
        }
        if let Some(t) = self.target_efficiency {
            if !t.is_finite() {
                return Err(invalid("target_efficiency", "must be finite"));
            }
        }
        ChaosStream::new(self.seed).map(|_| ())
    }
}

/// Summary of one generation after evaluation and sorting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationTrace {
    pub generation: usize,
    pub best_efficiency: f64,
    pub mean_efficiency: f64,
    pub best_layout: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: Layout,
    pub best_result: EvaluationResult,
    pub trace: Vec<GenerationTrace>,
}

impl GaOutcome {
    pub fn best_efficiency(&self) -> f64 {
        self.best_result.efficiency
    }

    pub fn generations(&self) -> usize {
        self.trace.len()
    }

    /// First generation whose best efficiency reached `target`.
    pub fn generations_to(&self, target: f64) -> Option<usize> {
        generations_to(&self.trace, target)
    }
}

pub fn generations_to(trace: &[GenerationTrace], target: f64) -> Option<usize> {
    trace
        .iter()
        .find(|t| t.best_efficiency >= target)
        .map(|t| t.generation)
}

/// What fills the relocation slots of each generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Worst-turbine relocation from the elites.
    Adapted,
    /// Relocation replaced by fresh chaotic layouts.
    Ablated,
}

struct Individual {
    layout: Layout,
    result: EvaluationResult,
}

/// Adapted GA: elites, worst-turbine relocation, aliens and mutation.
pub fn run_aga(
    params: &GaParams,
    grid: &Grid,
    scenario: &WindScenario,
    spec: &TurbineSpec,
) -> Result<GaOutcome> {
    run_ga(
        params,
        grid,
        &Evaluator::new(scenario, spec)?,
        Variant::Adapted,
    )
}

/// The same loop with the relocation step replaced by random layouts.
pub fn run_conventional_ga(
    params: &GaParams,
    grid: &Grid,
    scenario: &WindScenario,
    spec: &TurbineSpec,
) -> Result<GaOutcome> {
    run_ga(
        params,
        grid,
        &Evaluator::new(scenario, spec)?,
        Variant::Ablated,
    )
}

/// `params.population` chaotic layouts from a stream seeded with `params.seed`.
pub fn initialize_population(params: &GaParams, m: usize) -> Result<Vec<Layout>> {
    if params.turbines > m {
        return Err(Error::TooManyTurbines {
            turbines: params.turbines,
            positions: m,
        });
    }
    let mut stream = ChaosStream::new(params.seed)?;
    chaotic_population(&mut stream, params.population, m, params.turbines)
}

pub fn run_ga(
    params: &GaParams,
    grid: &Grid,
    evaluator: &Evaluator,
    variant: Variant,
) -> Result<GaOutcome> {
    params.validate()?;
    let m = grid.len();
    let n = params.turbines;
    if n > m {
        return Err(Error::TooManyTurbines {
            turbines: n,
            positions: m,
        });
    }
    let mut stream = ChaosStream::new(params.seed)?;
    let evaluate = |layouts: Vec<Layout>| -> Vec<Individual> {
        layouts
            .into_par_iter()
            .map(|layout| {
                let result = evaluator.evaluate_unchecked(&grid.positions(&layout));
                Individual { layout, result }
            })
            .collect()
    };

    let mut population = evaluate(chaotic_population(&mut stream, params.population, m, n)?);
    let mut trace = Vec::new();
    let mut generation = 1;
    loop {
        // stable: ties keep elites ahead of newcomers
        population.sort_by(|a, b| b.result.efficiency.total_cmp(&a.result.efficiency));
        let best = &population[0];
        let mean =
            population.iter().map(|i| i.result.efficiency).sum::<f64>() / population.len() as f64;
        trace.push(GenerationTrace {
            generation,
            best_efficiency: best.result.efficiency,
            mean_efficiency: mean,
            best_layout: best.layout.indices().to_vec(),
        });

        let reached = params
            .target_efficiency
            .is_some_and(|t| best.result.efficiency >= t);
        if reached || generation >= params.max_generations {
            break;
        }

        let elite_count = params.elites.min(population.len());
        let mut offspring = Vec::with_capacity(params.population - elite_count);
        for k in 0..params.relocations {
            let child = match variant {
                Variant::Adapted => {
                    let parent = &population[k % elite_count];
                    let worst = weakest(&parent.layout, &parent.result.per_turbine_power);
                    relocate_from(&parent.layout, worst, &mut stream)
                }
                Variant::Ablated => chaotic_layout(&mut stream, m, n)?,
            };
            offspring.push(child);
        }
        for _ in 0..params.aliens {
            offspring.push(chaotic_layout(&mut stream, m, n)?);
        }
        for _ in 0..params.mutants() {
            let parent = match params.mutation_parent {
                MutationParent::BestOnly => &population[0],
                MutationParent::ElitePool => &population[stream.next_index(elite_count)],
            };
            offspring.push(mutate_twice(&parent.layout, &mut stream));
        }

        population.truncate(elite_count);
        population.extend(evaluate(offspring));
        generation += 1;
    }

    let best = population.swap_remove(0);
    Ok(GaOutcome {
        best: best.layout,
        best_result: best.result,
        trace,
    })
}
