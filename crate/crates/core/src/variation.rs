//! Trial-solution generation: DE/current/1 mutation, binomial crossover and
//! polynomial mutation, followed by clamping into the box.

use alloc::vec::Vec;
use rand::Rng;

use crate::math::powf;
use crate::model::{clip_to_bounds, evaluate, Individual, ProblemDefinition};
use crate::{Error, Result};

/// Operator parameters shared by every offspring of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    /// DE scaling factor.
    pub f: f64,
    /// Binomial crossover rate.
    pub cr: f64,
    /// Per-variable polynomial mutation probability.
    pub pm: f64,
    /// Polynomial mutation distribution index.
    pub eta_m: f64,
    /// Force at least one coordinate of every trial vector to come from the
    /// mutant.
    pub force_inherit: bool,
}

impl VariationParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(alloc::format!(
                    "{name} = {v} must lie in [0, 1]"
                )))
            }
        };
        unit("f", self.f)?;
        unit("cr", self.cr)?;
        unit("pm", self.pm)?;
        if !(self.eta_m >= 0.0 && self.eta_m.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "eta_m = {} must be a finite non-negative number",
                self.eta_m
            )));
        }
        Ok(())
    }
}

/// `current + f * (r1 - r2)`, not clipped.
pub fn de_mutation(current: &[f64], r1: &[f64], r2: &[f64], f: f64) -> Vec<f64> {
    current
        .iter()
        .zip(r1.iter().zip(r2))
        .map(|(&c, (&a, &b))| c + f * (a - b))
        .collect()
}

/// Takes `mutant[j]` where a uniform draw in `[0, 1)` falls below `cr`,
/// `target[j]` otherwise.
///
/// With `force_inherit` the forced index is drawn first, then one draw per
/// coordinate.
pub fn binomial_crossover<R: Rng + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut R,
    force_inherit: bool,
) -> Vec<f64> {
    assert_eq!(target.len(), mutant.len());
    let forced = if force_inherit && !target.is_empty() {
        Some(rng.gen_range(0..target.len()))
    } else {
        None
    };
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&t, &v))| {
            let take = rng.gen::<f64>() < cr;
            if take || forced == Some(j) {
                v
            } else {
                t
            }
        })
        .collect()
}

/// Perturbation in `[-1, 1]` for a uniform `rho`, distributed with density
/// `0.5 (eta + 1) (1 - |delta|)^eta`.
pub fn polynomial_mutation_delta(rho: f64, eta_m: f64) -> f64 {
    let exponent = 1.0 / (eta_m + 1.0);
    if rho <= 0.5 {
        powf(2.0 * rho, exponent) - 1.0
    } else {
        1.0 - powf(2.0 * (1.0 - rho), exponent)
    }
}

/// Mutates each coordinate with probability `pm` by
/// `(upper - lower) * delta`, then clamps into the bounds.
///
/// Per coordinate: one draw decides whether to mutate; a mutated coordinate
/// takes a second draw for `rho`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    u: &mut [f64],
    problem: &ProblemDefinition,
    pm: f64,
    eta_m: f64,
    rng: &mut R,
) {
    for (j, uj) in u.iter_mut().enumerate() {
        if rng.gen::<f64>() < pm {
            let rho = rng.gen::<f64>();
            let span = problem.upper()[j] - problem.lower()[j];
            *uj += span * polynomial_mutation_delta(rho, eta_m);
        }
    }
    clip_to_bounds(u, problem);
}

/// Builds and evaluates one offspring per mating pair.
///
/// Pair `(p1, p2)` indexes `pool` (the main population followed by the
/// archive). `p1` is the base and crossover target, `p2` the first endpoint
/// of the difference vector; the second endpoint is drawn uniformly from the
/// rest of the pool. With fewer than three pool members it is drawn from the
/// whole pool instead.
#[allow(clippy::too_many_arguments)]
pub fn generate_offspring<R: Rng + ?Sized>(
    pairs: &[(usize, usize)],
    pool: &[&Individual],
    params: &VariationParams,
    problem: &ProblemDefinition,
    epsilon: f64,
    rng: &mut R,
    fe: &mut u64,
) -> Result<Vec<Individual>> {
    let mut offspring = Vec::with_capacity(pairs.len());
    for &(p1, p2) in pairs {
        let r2 = draw_excluding(pool.len(), p1, p2, rng);
        let base = &pool[p1].x;
        let mutant = de_mutation(base, &pool[p2].x, &pool[r2].x, params.f);
        let mut trial = binomial_crossover(base, &mutant, params.cr, rng, params.force_inherit);
        polynomial_mutation(&mut trial, problem, params.pm, params.eta_m, rng);
        clip_to_bounds(&mut trial, problem);
        offspring.push(evaluate(problem, &trial, epsilon, fe)?);
    }
    Ok(offspring)
}

fn draw_excluding<R: Rng + ?Sized>(len: usize, a: usize, b: usize, rng: &mut R) -> usize {
    let excluded = if a == b { 1 } else { 2 };
    if len <= excluded {
        return rng.gen_range(0..len);
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut k = rng.gen_range(0..len - excluded);
    if k >= lo {
        k += 1;
    }
    if a != b && k >= hi {
        k += 1;
    }
    k
}
