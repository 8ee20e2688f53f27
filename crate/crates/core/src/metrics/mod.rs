//! Performance indicators on the final feasible front, and the rank-sum
//! comparison of samples of indicator values.

mod indicators;
mod wilcoxon;

pub use indicators::{hypervolume, hypervolume_at, igd, HV_REFERENCE_FACTOR};
pub use wilcoxon::{
    rank_sum_exact_p_value, rank_sum_p_value, wilcoxon_rank_sum, ComparisonVerdict, Orientation,
    Verdict, SIGNIFICANCE,
};

use alloc::vec::Vec;

use crate::model::Individual;
use crate::ranking::{nondominated_indices, pareto_dominates};
use crate::Result;

/// The feasible members of `population`, reduced to their Pareto
/// non-dominated subset. Metrics are only ever computed on this set.
pub fn final_front(population: &[Individual]) -> Vec<&Individual> {
    let feasible: Vec<&Individual> = population.iter().filter(|i| i.is_feasible()).collect();
    nondominated_indices(&feasible, |a, b| pareto_dominates(&a.objectives, &b.objectives))
        .into_iter()
        .map(|i| feasible[i])
        .collect()
}

/// Non-dominated subset of a point set, duplicates collapsed, in ascending
/// lexicographic order.
pub fn nondominated_points(mut points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| lexicographic(a, b));
    points.dedup();
    if points.first().is_some_and(|p| p.len() == 2) {
        // Sorted by f1 then f2: a point survives iff it improves on the best f2 so far.
        let mut best = f64::INFINITY;
        points.retain(|p| {
            let keep = p[1] < best;
            if keep {
                best = p[1];
            }
            keep
        });
        return points;
    }
    let keep = nondominated_indices(&points, |a, b| pareto_dominates(a, b));
    keep.into_iter().map(|i| points[i].clone()).collect()
}

fn lexicographic(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            core::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn feasible_ratio(population: &[Individual]) -> f64 {
    if population.is_empty() {
        return 0.0;
    }
    population.iter().filter(|i| i.is_feasible()).count() as f64 / population.len() as f64
}

/// An indicator value together with the size of the set it was computed
/// on. `value` is NaN exactly when no member was feasible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub n_feasible: usize,
    pub n_nondominated: usize,
}

/// Every indicator for one final population.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub igd: MetricResult,
    /// `None` when hypervolume is not available for the objective count.
    pub hv: Option<MetricResult>,
    pub feasible_ratio: f64,
    /// Objective vectors of the final front.
    pub front: Vec<Vec<f64>>,
}

/// Scores `population` against `reference`.
pub fn assess(population: &[Individual], reference: &[Vec<f64>]) -> Result<Assessment> {
    let n_feasible = population.iter().filter(|i| i.is_feasible()).count();
    let front: Vec<Vec<f64>> = final_front(population)
        .into_iter()
        .map(|i| i.objectives.clone())
        .collect();
    let result = |value: f64| MetricResult {
        value: if n_feasible == 0 { f64::NAN } else { value },
        n_feasible,
        n_nondominated: front.len(),
    };
    let igd_value = igd(&front, reference)?;
    let hv = match hypervolume(&front, reference) {
        Ok(v) => Some(result(v)),
        Err(crate::Error::UnsupportedObjectiveCount(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Assessment {
        igd: result(igd_value),
        hv,
        feasible_ratio: feasible_ratio(population),
        front,
    })
}
