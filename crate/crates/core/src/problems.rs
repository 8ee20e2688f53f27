//! Built-in two-objective test problems and their reference fronts.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::math::{atan, cos, sin};
use crate::metrics::nondominated_points;
use crate::model::{evaluate, Evaluation, ProblemDefinition, ReferenceSource, DEFAULT_EPSILON};
use crate::{Error, Result};

/// Binh and Korn.
pub fn bnh() -> ProblemDefinition {
    ProblemDefinition::new("bnh", 2, 2, 2, vec![0.0, 0.0], vec![5.0, 3.0], |x: &[f64]| {
        let (x1, x2) = (x[0], x[1]);
        Evaluation {
            objectives: vec![
                4.0 * x1 * x1 + 4.0 * x2 * x2,
                (x1 - 5.0) * (x1 - 5.0) + (x2 - 5.0) * (x2 - 5.0),
            ],
            constraints: vec![
                (x1 - 5.0) * (x1 - 5.0) + x2 * x2 - 25.0,
                7.7 - (x1 - 8.0) * (x1 - 8.0) - (x2 + 3.0) * (x2 + 3.0),
            ],
        }
    })
    .expect("valid built-in")
    .with_reference(ReferenceSource::Grid)
}

/// Srinivas and Deb.
pub fn srn() -> ProblemDefinition {
    ProblemDefinition::new(
        "srn",
        2,
        2,
        2,
        vec![-20.0, -20.0],
        vec![20.0, 20.0],
        |x: &[f64]| {
            let (x1, x2) = (x[0], x[1]);
            Evaluation {
                objectives: vec![
                    2.0 + (x1 - 2.0) * (x1 - 2.0) + (x2 - 1.0) * (x2 - 1.0),
                    9.0 * x1 - (x2 - 1.0) * (x2 - 1.0),
                ],
                constraints: vec![x1 * x1 + x2 * x2 - 225.0, x1 - 3.0 * x2 + 10.0],
            }
        },
    )
    .expect("valid built-in")
    .with_reference(ReferenceSource::Grid)
}

/// Tanaka. The constrained front is disconnected and lies on the boundary
/// of the first constraint.
pub fn tnk() -> ProblemDefinition {
    ProblemDefinition::new("tnk", 2, 2, 2, vec![1e-9, 1e-9], vec![PI, PI], |x: &[f64]| {
        let (x1, x2) = (x[0], x[1]);
        let theta = if x2.abs() < 1e-12 { 0.0 } else { atan(x1 / x2) };
        Evaluation {
            objectives: vec![x1, x2],
            constraints: vec![
                -x1 * x1 - x2 * x2 + 1.0 + 0.1 * cos(16.0 * theta),
                (x1 - 0.5) * (x1 - 0.5) + (x2 - 0.5) * (x2 - 0.5) - 0.5,
            ],
        }
    })
    .expect("valid built-in")
    .with_reference(ReferenceSource::Grid)
}

/// Identity objectives on `[0, 1.2]²` with the single equality
/// `x1² + x2² = 1`; the front is the quarter unit circle.
pub fn eq_ring() -> ProblemDefinition {
    ProblemDefinition::new(
        "eq_ring",
        2,
        0,
        1,
        vec![0.0, 0.0],
        vec![1.2, 1.2],
        |x: &[f64]| Evaluation {
            objectives: vec![x[0], x[1]],
            constraints: vec![x[0] * x[0] + x[1] * x[1] - 1.0],
        },
    )
    .expect("valid built-in")
    .with_reference(ReferenceSource::Analytic(quarter_arc))
}

/// `count` points at evenly spaced angles over `[0, π/2]`.
fn quarter_arc(count: usize) -> Vec<Vec<f64>> {
    let steps = count.saturating_sub(1).max(1) as f64;
    (0..count)
        .map(|i| {
            let t = FRAC_PI_2 * i as f64 / steps;
            vec![cos(t), sin(t)]
        })
        .collect()
}

/// Names of the built-in problems, in registry order.
pub const BUILTIN: [&str; 4] = ["bnh", "srn", "tnk", "eq_ring"];

/// Every built-in problem.
pub fn registry() -> Vec<ProblemDefinition> {
    vec![bnh(), srn(), tnk(), eq_ring()]
}

pub fn lookup(name: &str) -> Result<ProblemDefinition> {
    match name {
        "bnh" => Ok(bnh()),
        "srn" => Ok(srn()),
        "tnk" => Ok(tnk()),
        "eq_ring" => Ok(eq_ring()),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

/// Objective vectors approximating the true constrained front.
///
/// Analytic problems return `count` exact samples. Grid problems evaluate a
/// regular grid with `count` points per decision axis (bounds included) and
/// keep the feasible (at the default ε), non-dominated objective vectors.
pub fn reference_front(problem: &ProblemDefinition, count: usize) -> Result<Vec<Vec<f64>>> {
    match problem.reference() {
        ReferenceSource::None => Err(Error::NoReferenceFront(problem.name().to_string())),
        ReferenceSource::Analytic(generate) => Ok(generate(count)),
        ReferenceSource::Grid => grid_front(problem, count),
    }
}

fn grid_front(problem: &ProblemDefinition, count: usize) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let n = problem.n();
    let axis = |k: usize, i: usize| {
        let (lo, hi) = (problem.lower()[k], problem.upper()[k]);
        if count == 1 {
            lo
        } else if i + 1 == count {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        }
    };
    let mut index = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut feasible = Vec::new();
    let mut fe = 0;
    'grid: loop {
        for k in 0..n {
            x[k] = axis(k, index[k]);
        }
        let ind = evaluate(problem, &x, DEFAULT_EPSILON, &mut fe)?;
        if ind.is_feasible() {
            feasible.push(ind.objectives);
        }
        for k in 0..n {
            index[k] += 1;
            if index[k] < count {
                continue 'grid;
            }
            index[k] = 0;
        }
        break;
    }
    Ok(nondominated_points(feasible))
}
