//! Problem definitions, evaluated individuals and constraint-violation
//! arithmetic.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Default tolerance applied to equality constraints.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Raw output of a problem's evaluator for one decision vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: Vec<f64>,
    /// Inequalities first (`g(x) <= 0`), then equalities (`h(x) = 0`).
    pub constraints: Vec<f64>,
}

pub type EvaluatorFn = dyn Fn(&[f64]) -> Evaluation + Send + Sync;

/// How a true front can be produced for a problem.
#[derive(Clone, Copy)]
pub enum ReferenceSource {
    None,
    /// Exact parametric sample of `count` points.
    Analytic(fn(usize) -> Vec<Vec<f64>>),
    /// Non-dominated feasible subset of a `count`-per-axis decision grid.
    Grid,
}

impl fmt::Debug for ReferenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceSource::None => f.write_str("None"),
            ReferenceSource::Analytic(_) => f.write_str("Analytic"),
            ReferenceSource::Grid => f.write_str("Grid"),
        }
    }
}

/// A box-constrained CMOP: `m` objectives, `p` inequality and `l - p`
/// equality constraints over `n` bounded decision variables.
#[derive(Clone)]
pub struct ProblemDefinition {
    name: String,
    m: usize,
    p: usize,
    l: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    evaluator: Arc<EvaluatorFn>,
    reference: ReferenceSource,
}

impl ProblemDefinition {
    pub fn new<F>(
        name: impl Into<String>,
        objectives: usize,
        inequalities: usize,
        constraints: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
        evaluator: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> Evaluation + Send + Sync + 'static,
    {
        let name = name.into();
        if lower.is_empty() {
            return Err(Error::InvalidProblem(alloc::format!(
                "{name}: decision dimension must be at least 1"
            )));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                what: "upper bounds",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if objectives < 2 {
            return Err(Error::InvalidProblem(alloc::format!(
                "{name}: at least two objectives required, got {objectives}"
            )));
        }
        if inequalities > constraints {
            return Err(Error::InvalidProblem(alloc::format!(
                "{name}: {inequalities} inequalities exceed {constraints} constraints"
            )));
        }
        if let Some(k) = (0..lower.len()).find(|&k| !(lower[k] < upper[k])) {
            return Err(Error::InvalidProblem(alloc::format!(
                "{name}: bounds of variable {k} are not ordered ({} >= {})",
                lower[k],
                upper[k]
            )));
        }
        Ok(ProblemDefinition {
            name,
            m: objectives,
            p: inequalities,
            l: constraints,
            lower,
            upper,
            evaluator: Arc::new(evaluator),
            reference: ReferenceSource::None,
        })
    }

    pub fn with_reference(mut self, reference: ReferenceSource) -> Self {
        self.reference = reference;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Decision dimension.
    pub fn n(&self) -> usize {
        self.lower.len()
    }

    /// Objective count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Inequality constraint count.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Total constraint count.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn reference(&self) -> ReferenceSource {
        self.reference
    }

    /// Calls the evaluator directly, without bookkeeping or validation.
    pub fn evaluate_raw(&self, x: &[f64]) -> Evaluation {
        (self.evaluator)(x)
    }
}

impl fmt::Debug for ProblemDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("m", &self.m)
            .field("p", &self.p)
            .field("l", &self.l)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("reference", &self.reference)
            .finish()
    }
}

/// An evaluated candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    pub objectives: Vec<f64>,
    pub raw_constraints: Vec<f64>,
    /// Total constraint violation; `+inf` when the evaluator produced
    /// non-finite output.
    pub cv: f64,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
}

impl Individual {
    pub fn is_feasible(&self) -> bool {
        self.cv == 0.0
    }

    /// False when the evaluator returned NaN or infinite values.
    pub fn is_valid(&self) -> bool {
        self.cv.is_finite()
    }
}

/// The main population: members plus the size it is held to between
/// generations.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub capacity: usize,
}

impl Population {
    pub fn new(capacity: usize) -> Self {
        Population {
            members: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Violation of constraint `index` (zero-based); indices below
/// `inequalities` are `g <= 0`, the rest are equalities relaxed by
/// `epsilon`.
pub fn constraint_violation_component(
    raw: f64,
    index: usize,
    inequalities: usize,
    epsilon: f64,
) -> f64 {
    if index < inequalities {
        raw.max(0.0)
    } else {
        (raw.abs() - epsilon).max(0.0)
    }
}

pub fn total_cv<I: IntoIterator<Item = f64>>(components: I) -> f64 {
    components.into_iter().sum()
}

/// `[f1, ..., fm, CV]`, the unconstrained (m+1)-objective view used when
/// updating the archive.
pub fn augmented_objectives(ind: &Individual) -> Vec<f64> {
    let mut out = Vec::with_capacity(ind.objectives.len() + 1);
    out.extend_from_slice(&ind.objectives);
    out.push(ind.cv);
    out
}

pub fn clip_to_bounds(x: &mut [f64], problem: &ProblemDefinition) {
    for ((xk, &lo), &hi) in x.iter_mut().zip(problem.lower()).zip(problem.upper()) {
        *xk = xk.clamp(lo, hi);
    }
}

/// Evaluates `x`, fills in the violation and bumps `fe` by one.
///
/// Non-finite objective or constraint values produce an individual with
/// `cv = +inf`, which loses every constraint-dominance comparison.
pub fn evaluate(
    problem: &ProblemDefinition,
    x: &[f64],
    epsilon: f64,
    fe: &mut u64,
) -> Result<Individual> {
    if x.len() != problem.n() {
        return Err(Error::DimensionMismatch {
            what: "decision vector",
            expected: problem.n(),
            found: x.len(),
        });
    }
    let Evaluation {
        objectives,
        constraints,
    } = problem.evaluate_raw(x);
    *fe += 1;
    if objectives.len() != problem.m() {
        return Err(Error::DimensionMismatch {
            what: "objective vector",
            expected: problem.m(),
            found: objectives.len(),
        });
    }
    if constraints.len() != problem.l() {
        return Err(Error::DimensionMismatch {
            what: "constraint vector",
            expected: problem.l(),
            found: constraints.len(),
        });
    }
    let finite = objectives.iter().chain(&constraints).all(|v| v.is_finite());
    let cv = if finite {
        total_cv(
            constraints
                .iter()
                .enumerate()
                .map(|(j, &g)| constraint_violation_component(g, j, problem.p(), epsilon)),
        )
    } else {
        f64::INFINITY
    };
    Ok(Individual {
        x: x.to_vec(),
        objectives,
        raw_constraints: constraints,
        cv,
        rank: None,
        crowding: None,
    })
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={:?} f={:?} cv={}", self.x, self.objectives, self.cv)
    }
}
