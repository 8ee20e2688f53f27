//! Dominance relations, non-dominated sorting, crowding distance and the
//! elitist environmental selection of the main population.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::model::Individual;

/// Pareto dominance under minimization.
///
/// # Panics
///
/// If the vectors differ in length.
pub fn pareto_dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors differ in length");
    let mut strict = false;
    for (&ai, &bi) in a.iter().zip(b) {
        if !(ai <= bi) {
            return false;
        }
        if ai < bi {
            strict = true;
        }
    }
    strict
}

/// Constraint-dominance: feasible beats infeasible, lower CV wins among
/// infeasible solutions, Pareto dominance decides among feasible ones.
pub fn cdp_dominates(a: &Individual, b: &Individual) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.cv < b.cv,
        (true, true) => pareto_dominates(&a.objectives, &b.objectives),
    }
}

/// Which dominance relation to sort a population with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    /// Pareto dominance on raw objectives, ignoring constraints.
    Pareto,
    /// Constraint-dominance principle.
    Cdp,
    /// Pareto dominance on objectives with CV appended as an extra objective.
    Augmented,
}

impl Comparator {
    pub fn dominates(self, a: &Individual, b: &Individual) -> bool {
        match self {
            Comparator::Pareto => pareto_dominates(&a.objectives, &b.objectives),
            Comparator::Cdp => cdp_dominates(a, b),
            Comparator::Augmented => augmented_dominates(a, b),
        }
    }
}

fn augmented_dominates(a: &Individual, b: &Individual) -> bool {
    assert_eq!(a.objectives.len(), b.objectives.len());
    if !(a.cv <= b.cv) {
        return false;
    }
    let mut strict = a.cv < b.cv;
    for (&ai, &bi) in a.objectives.iter().zip(&b.objectives) {
        if !(ai <= bi) {
            return false;
        }
        if ai < bi {
            strict = true;
        }
    }
    strict
}

/// Non-domination levels of a set. `fronts[0]` is the first front; every
/// front lists its members in ascending input order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrontPartition {
    pub fronts: Vec<Vec<usize>>,
    /// Zero-based front index of every input item.
    pub ranks: Vec<usize>,
}

impl FrontPartition {
    pub fn len(&self) -> usize {
        self.fronts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fronts.is_empty()
    }
}

/// Deb's fast non-dominated sort under an arbitrary strict partial order.
pub fn fast_nondominated_sort<T, D>(items: &[T], dominates: D) -> FrontPartition
where
    D: Fn(&T, &T) -> bool,
{
    let len = items.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut domination_count = vec![0usize; len];
    for i in 0..len {
        for j in (i + 1)..len {
            if dominates(&items[i], &items[j]) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&items[j], &items[i]) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut ranks = vec![usize::MAX; len];
    let mut current: Vec<usize> = (0..len).filter(|&i| domination_count[i] == 0).collect();
    let mut fronts = Vec::new();
    let mut level = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            ranks[i] = level;
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
        level += 1;
    }
    FrontPartition { fronts, ranks }
}

/// Sorts `pop` and writes each member's front index into its `rank`.
pub fn sort_population(pop: &mut [Individual], comparator: Comparator) -> FrontPartition {
    let partition = fast_nondominated_sort(pop, |a, b| comparator.dominates(a, b));
    for (ind, &r) in pop.iter_mut().zip(&partition.ranks) {
        ind.rank = Some(r);
    }
    partition
}

/// Indices of the members no other member dominates.
pub fn nondominated_indices<T, D>(items: &[T], dominates: D) -> Vec<usize>
where
    D: Fn(&T, &T) -> bool,
{
    (0..items.len())
        .filter(|&i| {
            !items
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && dominates(other, &items[i]))
        })
        .collect()
}

/// Crowding distance of every point of a front.
///
/// Per objective, a point's neighbours are the nearest *other* values below
/// and above it. A point whose value is shared by another member therefore
/// gets a zero contribution for that objective, and a point holding the
/// unique minimum or maximum gets `+inf`. This equals the usual sorted-order
/// formula when values are distinct and makes the result independent of the
/// input order. Fronts of at most two points are all `+inf`.
pub fn crowding_distance<V: AsRef<[f64]>>(front: &[V]) -> Vec<f64> {
    let len = front.len();
    if len <= 2 {
        return vec![f64::INFINITY; len];
    }
    let m = front[0].as_ref().len();
    let mut distance = vec![0.0; len];
    let mut order: Vec<usize> = (0..len).collect();
    for k in 0..m {
        let value = |i: usize| front[i].as_ref()[k];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        let range = value(order[len - 1]) - value(order[0]);
        if !(range.is_finite() && range > 0.0) {
            continue;
        }
        // Runs of equal values.
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for pos in 1..=len {
            if pos == len || value(order[pos]) != value(order[start]) {
                groups.push((start, pos));
                start = pos;
            }
        }
        for (g, &(lo, hi)) in groups.iter().enumerate() {
            if hi - lo > 1 {
                continue;
            }
            let i = order[lo];
            if g == 0 || g == groups.len() - 1 {
                distance[i] = f64::INFINITY;
                continue;
            }
            let below = value(order[groups[g - 1].0]);
            let above = value(order[groups[g + 1].0]);
            let gap = (above - below) / range;
            if gap.is_finite() {
                distance[i] += gap;
            }
        }
    }
    distance
}

/// Picks the next population of size `n` from `P ∪ Q`: whole
/// constraint-dominance fronts while they fit, then the most crowded-apart
/// members of the first front that overflows. Equal crowding distances keep
/// union order.
///
/// Returns the whole union when it holds no more than `n` members. Selected
/// members carry their `rank` and `crowding`.
pub fn environmental_selection(
    parents: Vec<Individual>,
    offspring: Vec<Individual>,
    n: usize,
) -> Vec<Individual> {
    let mut union = parents;
    union.extend(offspring);
    let partition = sort_population(&mut union, Comparator::Cdp);

    let mut chosen: Vec<usize> = Vec::with_capacity(n.min(union.len()));
    for front in &partition.fronts {
        let crowd = crowding_distance(
            &front
                .iter()
                .map(|&i| union[i].objectives.as_slice())
                .collect::<Vec<_>>(),
        );
        for (&i, &c) in front.iter().zip(&crowd) {
            union[i].crowding = Some(c);
        }
        if chosen.len() + front.len() <= n {
            chosen.extend_from_slice(front);
            if chosen.len() == n {
                break;
            }
        } else {
            let mut by_crowding: Vec<(usize, f64)> = front.iter().copied().zip(crowd).collect();
            by_crowding.sort_by(|a, b| descending(a.1, b.1));
            chosen.extend(by_crowding[..n - chosen.len()].iter().map(|&(i, _)| i));
            break;
        }
    }

    let mut slots: Vec<Option<Individual>> = union.into_iter().map(Some).collect();
    chosen
        .into_iter()
        .map(|i| slots[i].take().expect("index selected twice"))
        .collect()
}

fn descending(a: f64, b: f64) -> Ordering {
    b.total_cmp(&a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feasible(objectives: &[f64]) -> Individual {
        Individual {
            x: vec![0.0],
            objectives: objectives.to_vec(),
            raw_constraints: vec![],
            cv: 0.0,
            rank: None,
            crowding: None,
        }
    }

    fn infeasible(objectives: &[f64], cv: f64) -> Individual {
        Individual {
            cv,
            ..feasible(objectives)
        }
    }

    #[test]
    fn pareto_cases() {
        assert!(pareto_dominates(&[1.0, 2.0], &[2.0, 3.0]));
        assert!(!pareto_dominates(&[1.0, 2.0], &[1.0, 2.0]));
        assert!(!pareto_dominates(&[1.0, 3.0], &[3.0, 1.0]));
        assert!(pareto_dominates(&[1.0, 2.0], &[1.0, 3.0]));
    }

    #[test]
    #[should_panic]
    fn pareto_length_mismatch_panics() {
        pareto_dominates(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn cdp_cases() {
        assert!(cdp_dominates(&feasible(&[5.0, 5.0]), &infeasible(&[1.0, 1.0], 0.1)));
        assert!(cdp_dominates(&infeasible(&[9.0, 9.0], 0.2), &infeasible(&[0.0, 0.0], 0.5)));
        assert!(!cdp_dominates(&feasible(&[1.0, 2.0]), &feasible(&[0.0, 3.0])));
        assert!(!cdp_dominates(&infeasible(&[0.0, 0.0], 0.5), &infeasible(&[0.0, 0.0], 0.5)));
    }

    #[test]
    fn sort_five_points() {
        let mut pop: Vec<_> = [[1.0, 4.0], [2.0, 3.0], [3.0, 2.0], [4.0, 1.0], [3.0, 3.0]]
            .iter()
            .map(|o| feasible(o))
            .collect();
        let part = sort_population(&mut pop, Comparator::Cdp);
        assert_eq!(part.fronts, vec![vec![0, 1, 2, 3], vec![4]]);
        assert_eq!(pop[4].rank, Some(1));
        assert_eq!(pop[0].rank, Some(0));
    }

    #[test]
    fn sort_degenerate_inputs() {
        let mut single = vec![feasible(&[1.0, 1.0])];
        assert_eq!(sort_population(&mut single, Comparator::Cdp).fronts, vec![vec![0]]);
        let mut same = vec![feasible(&[1.0, 1.0]); 4];
        assert_eq!(
            sort_population(&mut same, Comparator::Cdp).fronts,
            vec![vec![0, 1, 2, 3]]
        );
        let empty: Vec<Individual> = vec![];
        assert!(fast_nondominated_sort(&empty, cdp_dominates).is_empty());
    }

    #[test]
    fn crowding_three_points() {
        let d = crowding_distance(&[[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]]);
        assert_eq!(d, vec![f64::INFINITY, 2.0, f64::INFINITY]);
        assert_eq!(crowding_distance(&[[0.0, 1.0], [1.0, 0.0]]), vec![f64::INFINITY; 2]);
    }

    #[test]
    fn crowding_with_duplicates() {
        // Oracle, by hand: on f1 the sorted values are 0, .5, .5, 1 so the
        // duplicated .5 contributes 0; on f2 likewise. Extremes are unique.
        let d = crowding_distance(&[[0.0, 1.0], [0.5, 0.5], [0.5, 0.5], [1.0, 0.0]]);
        assert_eq!(d, vec![f64::INFINITY, 0.0, 0.0, f64::INFINITY]);
        // A duplicate pair that only ties on the first objective.
        let d = crowding_distance(&[[0.0, 1.0], [0.5, 0.75], [0.5, 0.25], [1.0, 0.0]]);
        assert_eq!(d[1], 0.0 + (1.0 - 0.25) / 1.0);
        assert_eq!(d[2], 0.0 + (0.75 - 0.0) / 1.0);
    }

    #[test]
    fn crowding_zero_range_objective() {
        let d = crowding_distance(&[[0.0, 1.0], [0.5, 1.0], [1.0, 1.0]]);
        assert_eq!(d, vec![f64::INFINITY, 1.0, f64::INFINITY]);
    }

    #[test]
    fn selection_takes_fitting_front_then_best_crowding() {
        // N = 3: F1 = {(0,0.5),(0.5,0)} fits, F2 = {(0,2),(1,1),(2,0)} overflows.
        let p = vec![feasible(&[0.0, 0.5]), feasible(&[1.0, 1.0]), feasible(&[0.0, 2.0])];
        let q = vec![feasible(&[0.5, 0.0]), feasible(&[2.0, 0.0]), feasible(&[3.0, 3.0])];
        let next = environmental_selection(p, q, 3);
        let objs: Vec<_> = next.iter().map(|i| i.objectives.clone()).collect();
        // Both boundary members of F2 have infinite crowding; the lower union
        // index (0,2) wins the tie.
        assert_eq!(objs, vec![vec![0.0, 0.5], vec![0.5, 0.0], vec![0.0, 2.0]]);
        assert_eq!(next[2].rank, Some(1));
    }

    #[test]
    fn selection_all_nondominated_keeps_largest_crowding() {
        let pts: Vec<[f64; 2]> = [0.0, 0.1, 0.15, 0.5, 0.9, 1.0]
            .iter()
            .map(|&t| [t, 1.0 - t])
            .collect();
        let p: Vec<_> = pts[..3].iter().map(|o| feasible(o)).collect();
        let q: Vec<_> = pts[3..].iter().map(|o| feasible(o)).collect();
        let next = environmental_selection(p, q, 3);
        // Brute force: crowding = (next - prev) * 2 for interior points:
        // 0.1 -> 0.3, 0.15 -> 0.8, 0.5 -> 1.5, 0.9 -> 1.0; extremes inf.
        let firsts: Vec<f64> = next.iter().map(|i| i.objectives[0]).collect();
        assert_eq!(firsts, vec![0.0, 1.0, 0.5]);
    }

    #[test]
    fn selection_small_union_returns_everything() {
        let next = environmental_selection(vec![feasible(&[1.0, 1.0])], vec![], 3);
        assert_eq!(next.len(), 1);
    }

    #[test]
    fn selection_exact_fill_skips_truncation() {
        let p = vec![feasible(&[0.0, 1.0]), feasible(&[1.0, 0.0])];
        let q = vec![feasible(&[2.0, 2.0]), feasible(&[3.0, 3.0])];
        let next = environmental_selection(p, q, 2);
        assert_eq!(next.len(), 2);
        assert!(next.iter().all(|i| i.rank == Some(0)));
    }

    #[test]
    fn feasible_members_survive_before_infeasible() {
        let p = vec![infeasible(&[0.0, 0.0], 0.1), feasible(&[9.0, 9.0])];
        let q = vec![infeasible(&[0.0, 0.0], 0.05), infeasible(&[0.0, 0.0], 3.0)];
        let next = environmental_selection(p, q, 2);
        assert_eq!(next[0].objectives, vec![9.0, 9.0]);
        assert_eq!(next[1].cv, 0.05);
    }
}
