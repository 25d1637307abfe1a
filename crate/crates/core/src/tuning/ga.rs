//! Real-coded genetic algorithm over a box in log-θ space.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Bounds, StageRecord, TuneTrace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaSettings {
    pub population: usize,
    pub generations: usize,
    pub crossover_fraction: f64,
    pub migration_fraction: f64,
    /// Standard deviation of the Gaussian mutation, in decades.
    pub mutation_sigma: f64,
}

impl GaSettings {
    /// Population `4d` and 125 generations, i.e. at most `500d` evaluations.
    pub fn for_dimension(d: usize) -> Self {
        Self {
            population: 4 * d.max(1),
            generations: 125,
            crossover_fraction: 0.8,
            migration_fraction: 0.2,
            mutation_sigma: 0.1,
        }
    }

    pub fn max_evaluations(&self) -> usize {
        self.population * self.generations
    }
}

#[derive(Clone)]
struct Individual {
    genes: Vec<f64>,
    fitness: f64,
}

fn tournament<'a>(pop: &'a [Individual], rng: &mut ChaCha8Rng) -> &'a Individual {
    let a = pop.choose(rng).expect("population is never empty");
    let b = pop.choose(rng).expect("population is never empty");
    if b.fitness > a.fitness {
        b
    } else {
        a
    }
}

fn random_point(bounds: &Bounds, d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(bounds.lo..=bounds.hi)).collect()
}

/// Maximizes `objective` with elitism, random immigrants, blend crossover
/// and Gaussian mutation. Non-finite objective values count as failures.
pub fn ga_maximize<F>(
    mut objective: F,
    d: usize,
    bounds: Bounds,
    settings: &GaSettings,
    seed: u64,
) -> Result<(Vec<f64>, TuneTrace)>
where
    F: FnMut(&[f64]) -> f64,
{
    if d == 0 || settings.population < 2 || settings.generations == 0 {
        return Err(Error::Input("GA needs d >= 1, population >= 2 and generations >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mutation = Normal::new(0.0, settings.mutation_sigma)
        .map_err(|e| Error::Input(format!("mutation sigma: {e}")))?;
    let mut evals = 0usize;
    let mut eval = |genes: Vec<f64>, evals: &mut usize| {
        *evals += 1;
        let v = objective(&genes);
        Individual {
            genes,
            fitness: if v.is_nan() { f64::NEG_INFINITY } else { v },
        }
    };

    let n = settings.population;
    let mut pop: Vec<Individual> = (0..n)
        .map(|_| {
            let g = random_point(&bounds, d, &mut rng);
            eval(g, &mut evals)
        })
        .collect();

    let n_new = n - 1;
    let n_immigrants = (settings.migration_fraction * n_new as f64).round() as usize;
    let rest = n_new - n_immigrants.min(n_new);
    let n_cross = (settings.crossover_fraction * rest as f64).round() as usize;

    for _ in 1..settings.generations {
        pop.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
        let mut next = Vec::with_capacity(n);
        next.push(pop[0].clone());
        for k in 0..n_new {
            let genes = if k < n_immigrants {
                random_point(&bounds, d, &mut rng)
            } else if k < n_immigrants + n_cross {
                let p1 = tournament(&pop, &mut rng);
                let p2 = tournament(&pop, &mut rng);
                p1.genes
                    .iter()
                    .zip(&p2.genes)
                    .map(|(a, b)| {
                        let u: f64 = rng.random_range(-0.5..=1.5);
                        bounds.clip(a + u * (b - a))
                    })
                    .collect()
            } else {
                let p = tournament(&pop, &mut rng);
                p.genes
                    .iter()
                    .map(|g| bounds.clip(g + mutation.sample(&mut rng)))
                    .collect()
            };
            next.push(eval(genes, &mut evals));
        }
        pop = next;
    }
    debug_assert!(evals <= settings.max_evaluations());

    let best = pop
        .iter()
        .max_by(|a, b| a.fitness.total_cmp(&b.fitness))
        .expect("population is never empty");
    if !best.fitness.is_finite() {
        return Err(Error::TuningFailed(
            "every GA candidate produced a singular or non-finite likelihood".into(),
        ));
    }
    let mut trace = TuneTrace::default();
    trace.push(StageRecord {
        stage: "ga".into(),
        evals,
        objective_before: None,
        objective_after: best.fitness,
        theta: best.genes.iter().map(|t| 10f64.powf(*t)).collect(),
    });
    Ok((best.genes.clone(), trace))
}
