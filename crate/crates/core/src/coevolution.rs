//! The infeasible-solution archive and how it interacts with the main
//! population.
//!
//! Each generation the archive is rebuilt from the infeasible members of
//! the first front of `P ∪ A ∪ Q` under the (m+1)-objective view
//! `[f1, ..., fm, CV]`. When that set is larger than the capacity, the pair
//! of solutions with the smallest vector angle in normalized objective space
//! is found and its higher-CV member is deleted, one solution at a time.
//!
//! Mating draws one parent by a CV tournament and the other by an
//! angle-diversity (AD) tournament between a population member and an
//! archive member, once the archive is full.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use rand::Rng;

use crate::math::{atan2, round, sqrt};
use crate::model::Individual;
use crate::ranking::{nondominated_indices, Comparator};

/// Orientation of the normalization used by archive truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArchiveNormalization {
    /// `(z_max - f) / (z_max - z_min)`: the ideal point maps to 1.
    #[default]
    Reversed,
    /// `(f - z_min) / (z_max - z_min)`: the ideal point maps to 0.
    Standard,
}

/// Per-objective ideal and nadir estimates over a reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationFrame {
    pub z_min: Vec<f64>,
    pub z_max: Vec<f64>,
}

impl NormalizationFrame {
    /// Extremes of `points`; `None` when there are no points.
    pub fn from_points<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut z_min = first.to_vec();
        let mut z_max = first.to_vec();
        for p in iter {
            for (k, &v) in p.iter().enumerate() {
                z_min[k] = z_min[k].min(v);
                z_max[k] = z_max[k].max(v);
            }
        }
        Some(NormalizationFrame { z_min, z_max })
    }

    pub fn from_individuals<'a, I>(inds: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a Individual>,
    {
        Self::from_points(inds.into_iter().map(|i| i.objectives.as_slice()))
    }

    pub fn normalize(&self, f: &[f64], orientation: ArchiveNormalization) -> Vec<f64> {
        match orientation {
            ArchiveNormalization::Reversed => normalize_reversed(f, self),
            ArchiveNormalization::Standard => normalize_standard(f, self),
        }
    }
}

/// `(z_max - f) / (z_max - z_min)` per objective; 0 where the frame is flat.
pub fn normalize_reversed(f: &[f64], frame: &NormalizationFrame) -> Vec<f64> {
    f.iter()
        .zip(frame.z_min.iter().zip(&frame.z_max))
        .map(|(&fi, (&lo, &hi))| if hi > lo { (hi - fi) / (hi - lo) } else { 0.0 })
        .collect()
}

/// `(f - z_min) / (z_max - z_min)` per objective; 0 where the frame is flat.
pub fn normalize_standard(f: &[f64], frame: &NormalizationFrame) -> Vec<f64> {
    f.iter()
        .zip(frame.z_min.iter().zip(&frame.z_max))
        .map(|(&fi, (&lo, &hi))| if hi > lo { (fi - lo) / (hi - lo) } else { 0.0 })
        .collect()
}

const ZERO_NORM: f64 = 1e-12;

/// `arccos(|a·b| / (|a| |b|))`, in `[0, π/2]`. Zero when either vector has
/// (near) zero norm.
///
/// Evaluated as `2 atan2(|â - b̂|, |â + b̂|)` on unit vectors, with `b`
/// flipped when the dot product is negative. This is the same angle but
/// stays accurate for nearly parallel vectors, where `acos` loses half its
/// digits.
pub fn vector_angle(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na < ZERO_NORM || nb < ZERO_NORM {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let u = x / na;
        let v = sign * y / nb;
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    (2.0 * atan2(sqrt(diff), sqrt(sum))).clamp(0.0, FRAC_PI_2)
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// First-front members of `P ∪ A ∪ Q` under Pareto dominance on
/// `[f, CV]` that are infeasible, in union order. Individuals with
/// non-finite evaluations never qualify.
pub fn select_infeasible_nondominated(
    population: &[Individual],
    archive: &[Individual],
    offspring: &[Individual],
) -> Vec<Individual> {
    let union: Vec<&Individual> = population
        .iter()
        .chain(archive)
        .chain(offspring)
        .filter(|i| i.is_valid())
        .collect();
    nondominated_indices(&union, |a, b| Comparator::Augmented.dominates(a, b))
        .into_iter()
        .map(|i| union[i])
        .filter(|i| i.cv > 0.0)
        .cloned()
        .collect()
}

/// The archive for the next generation: at most `capacity` infeasible,
/// mutually non-dominated solutions.
pub fn update_archive(
    population: &[Individual],
    archive: &[Individual],
    offspring: &[Individual],
    capacity: usize,
    orientation: ArchiveNormalization,
) -> Vec<Individual> {
    let candidates = select_infeasible_nondominated(population, archive, offspring);
    truncate_by_angle(candidates, capacity, orientation)
}

/// Deletes solutions one at a time until `capacity` remain. Each round finds
/// the pair `(u_i, u_j)`, `i < j`, with the smallest angle (ties go to the
/// lexicographically first pair) and removes `u_i` if `CV(u_j) < CV(u_i)`,
/// `u_j` otherwise. The frame is fixed from the full candidate set.
pub fn truncate_by_angle(
    candidates: Vec<Individual>,
    capacity: usize,
    orientation: ArchiveNormalization,
) -> Vec<Individual> {
    let len = candidates.len();
    if len <= capacity {
        return candidates;
    }
    let frame = NormalizationFrame::from_individuals(&candidates).expect("non-empty candidates");
    let normalized: Vec<Vec<f64>> = candidates
        .iter()
        .map(|c| frame.normalize(&c.objectives, orientation))
        .collect();
    let mut angles = vec![0.0; len * len];
    for i in 0..len {
        for j in (i + 1)..len {
            let t = vector_angle(&normalized[i], &normalized[j]);
            angles[i * len + j] = t;
            angles[j * len + i] = t;
        }
    }

    let mut alive = vec![true; len];
    // Row i: nearest alive j > i, smallest j on ties.
    let row_best = |i: usize, alive: &[bool]| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in (i + 1)..len {
            if alive[j] && angles[i * len + j] < best.0 {
                best = (angles[i * len + j], j);
            }
        }
        best
    };
    let mut rows: Vec<(f64, usize)> = (0..len).map(|i| row_best(i, &alive)).collect();

    let mut remaining = len;
    while remaining > capacity {
        let mut pick: Option<usize> = None;
        for i in 0..len {
            if alive[i] && rows[i].1 != usize::MAX && pick.is_none_or(|p| rows[i].0 < rows[p].0)
            {
                pick = Some(i);
            }
        }
        let i = pick.expect("at least two alive candidates");
        let j = rows[i].1;
        let removed = if candidates[j].cv < candidates[i].cv { i } else { j };
        alive[removed] = false;
        remaining -= 1;
        for r in 0..removed {
            if alive[r] && rows[r].1 == removed {
                rows[r] = row_best(r, &alive);
            }
        }
    }

    candidates
        .into_iter()
        .zip(alive)
        .filter_map(|(c, keep)| keep.then_some(c))
        .collect()
}

/// Neighbour rank used for angle diversity: `round(√n)`, at least 1.
pub fn diversity_neighbor_rank(n: usize) -> usize {
    (round(sqrt(n as f64)) as usize).max(1)
}

/// The `k`-th smallest angle from member `j` to the other members of
/// `normalized`, with `k` clamped to the number of peers. A lone member
/// gets `π/2`.
pub fn angle_diversity(j: usize, normalized: &[Vec<f64>], k: usize) -> f64 {
    if normalized.len() < 2 {
        return FRAC_PI_2;
    }
    let mut peers: Vec<f64> = normalized
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, v)| vector_angle(&normalized[j], v))
        .collect();
    let k = k.clamp(1, peers.len());
    let (_, kth, _) = peers.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
    *kth
}

/// AD of every member of `group`, measured against the rest of `group` in
/// `frame`'s standard normalization.
pub fn angle_diversity_table(group: &[Individual], frame: &NormalizationFrame, k: usize) -> Vec<f64> {
    let normalized: Vec<Vec<f64>> = group
        .iter()
        .map(|ind| normalize_standard(&ind.objectives, frame))
        .collect();
    (0..group.len())
        .map(|j| angle_diversity(j, &normalized, k))
        .collect()
}

/// Per-generation tables consulted by [`restricted_mating`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatingContext {
    /// AD of each population member; empty while the archive is not full.
    pub population_ad: Vec<f64>,
    /// AD of each archive member; empty while the archive is not full.
    pub archive_ad: Vec<f64>,
}

impl MatingContext {
    /// AD tables are only needed, and only built, once `|A| >= capacity`.
    /// Both use the frame of `P ∪ A`; each member is compared with its own
    /// group.
    pub fn prepare(population: &[Individual], archive: &[Individual], capacity: usize) -> Self {
        if archive.len() < capacity || population.is_empty() || archive.is_empty() {
            return MatingContext::default();
        }
        let frame = NormalizationFrame::from_individuals(population.iter().chain(archive))
            .expect("non-empty union");
        let k = diversity_neighbor_rank(capacity);
        MatingContext {
            population_ad: angle_diversity_table(population, &frame, k),
            archive_ad: angle_diversity_table(archive, &frame, k),
        }
    }
}

/// Draws one mating pair as indices into `P ∪ A` (population first).
///
/// While `|A| < capacity` both parents are uniform over the union and
/// distinct whenever it has two members. Otherwise `p1` is the lower-CV of
/// a population draw and an archive draw (the population draw wins ties),
/// and `p2` the higher-AD of two fresh draws (again population on ties).
pub fn restricted_mating<R: Rng + ?Sized>(
    population: &[Individual],
    archive: &[Individual],
    capacity: usize,
    context: &MatingContext,
    rng: &mut R,
) -> (usize, usize) {
    let np = population.len();
    assert!(np > 0, "mating needs a non-empty population");
    if archive.len() < capacity || context.archive_ad.len() != archive.len() {
        let len = np + archive.len();
        let p1 = rng.gen_range(0..len);
        if len == 1 {
            return (p1, p1);
        }
        let mut p2 = rng.gen_range(0..len - 1);
        if p2 >= p1 {
            p2 += 1;
        }
        return (p1, p2);
    }
    let x1 = rng.gen_range(0..np);
    let a1 = rng.gen_range(0..archive.len());
    let p1 = if population[x1].cv <= archive[a1].cv { x1 } else { np + a1 };
    let x2 = rng.gen_range(0..np);
    let a2 = rng.gen_range(0..archive.len());
    let p2 = if context.population_ad[x2] >= context.archive_ad[a2] {
        x2
    } else {
        np + a2
    };
    (p1, p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(objectives: &[f64], cv: f64) -> Individual {
        Individual {
            x: objectives.to_vec(),
            objectives: objectives.to_vec(),
            raw_constraints: vec![],
            cv,
            rank: None,
            crowding: None,
        }
    }

    #[test]
    fn angles() {
        assert!((vector_angle(&[1.0, 0.0], &[0.0, 1.0]) - PI / 2.0).abs() < 1e-15);
        assert_eq!(vector_angle(&[1.0, 1.0], &[2.0, 2.0]), 0.0);
        assert_eq!(vector_angle(&[1.0, 0.0], &[-1.0, 0.0]), 0.0);
        assert_eq!(vector_angle(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
        let t = vector_angle(&[1.0, 0.0], &[1.0, 1.0]);
        assert!((t - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn normalizations() {
        let frame = NormalizationFrame {
            z_min: vec![1.0, 2.0, 5.0],
            z_max: vec![3.0, 6.0, 5.0],
        };
        assert_eq!(normalize_reversed(&[1.0, 6.0, 5.0], &frame), vec![1.0, 0.0, 0.0]);
        assert_eq!(normalize_standard(&[1.0, 6.0, 5.0], &frame), vec![0.0, 1.0, 0.0]);
        assert_eq!(normalize_standard(&[2.0, 4.0, 5.0], &frame), vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn all_feasible_union_empties_archive() {
        let p = vec![ind(&[0.0, 1.0], 0.0), ind(&[1.0, 0.0], 0.0)];
        assert!(update_archive(&p, &[], &p, 5, ArchiveNormalization::Reversed).is_empty());
    }

    #[test]
    fn dominated_infeasible_is_dropped() {
        let p = vec![ind(&[1.0, 1.0], 0.5), ind(&[2.0, 2.0], 0.6)];
        let v = select_infeasible_nondominated(&p, &[], &[]);
        assert_eq!(v, vec![p[0].clone()]);
    }

    #[test]
    fn lower_cv_but_worse_objectives_both_survive() {
        let p = vec![ind(&[1.0, 1.0], 0.5), ind(&[2.0, 2.0], 0.1)];
        assert_eq!(select_infeasible_nondominated(&p, &[], &[]).len(), 2);
    }

    #[test]
    fn feasible_member_can_evict_infeasible_ones() {
        let p = vec![ind(&[1.0, 1.0], 0.0), ind(&[2.0, 2.0], 0.1), ind(&[0.0, 3.0], 0.1)];
        let v = select_infeasible_nondominated(&p, &[], &[]);
        assert_eq!(v, vec![p[2].clone()]);
    }

    #[test]
    fn invalid_individuals_never_archived() {
        let mut bad = ind(&[f64::NAN, 0.0], f64::INFINITY);
        bad.objectives[0] = f64::NAN;
        let v = select_infeasible_nondominated(&[bad], &[], &[]);
        assert!(v.is_empty());
    }

    #[test]
    fn truncation_deletes_higher_cv_of_closest_pair() {
        // Reversed-normalized directions: a=(0,1), b=(0.1,0.9)-ish, c=(1,0).
        let a = ind(&[1.0, 0.0], 0.2);
        let b = ind(&[0.9, 0.1], 0.5);
        let c = ind(&[0.0, 1.0], 0.3);
        let kept = truncate_by_angle(
            vec![a.clone(), b, c.clone()],
            2,
            ArchiveNormalization::Reversed,
        );
        assert_eq!(kept, vec![a, c]);
    }

    #[test]
    fn truncation_tie_deletes_second_of_pair() {
        let a = ind(&[1.0, 0.0], 0.4);
        let b = ind(&[0.9, 0.1], 0.4);
        let c = ind(&[0.0, 1.0], 0.4);
        let kept = truncate_by_angle(vec![a.clone(), b, c.clone()], 2, ArchiveNormalization::Reversed);
        assert_eq!(kept, vec![a, c]);
    }

    #[test]
    fn truncation_noop_when_small() {
        let v = vec![ind(&[1.0, 0.0], 0.1), ind(&[0.0, 1.0], 0.2)];
        assert_eq!(truncate_by_angle(v.clone(), 2, ArchiveNormalization::Reversed), v);
    }

    #[test]
    fn diversity_rank_and_values() {
        assert_eq!(diversity_neighbor_rank(100), 10);
        assert_eq!(diversity_neighbor_rank(2), 1);
        assert_eq!(diversity_neighbor_rank(0), 1);
        let t1 = 0.1f64;
        let t3 = 0.3f64;
        let normalized = vec![
            vec![1.0, 0.0],
            vec![libm::cos(t1), libm::sin(t1)],
            vec![libm::cos(t3), libm::sin(t3)],
        ];
        assert!((angle_diversity(0, &normalized, 1) - 0.1).abs() < 1e-12);
        assert!((angle_diversity(0, &normalized, 2) - 0.3).abs() < 1e-12);
        assert!((angle_diversity(0, &normalized, 9) - 0.3).abs() < 1e-12);
        let dup = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(angle_diversity(0, &dup, 1), 0.0);
        assert_eq!(angle_diversity(0, &[vec![1.0, 2.0]], 1), FRAC_PI_2);
    }

    #[test]
    fn mating_from_union_while_archive_small() {
        let p = vec![ind(&[0.0, 1.0], 0.0), ind(&[1.0, 0.0], 0.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (a, b) = restricted_mating(&p, &[], 2, &MatingContext::default(), &mut rng);
            assert!(a < 2 && b < 2 && a != b);
        }
    }

    #[test]
    fn mating_tournaments_when_archive_full() {
        let p = vec![ind(&[0.0, 1.0], 0.0)];
        let a = vec![ind(&[1.0, 0.0], 0.5)];
        let ctx = MatingContext {
            population_ad: vec![0.2],
            archive_ad: vec![0.4],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(restricted_mating(&p, &a, 1, &ctx, &mut rng), (0, 1));
        let tie = MatingContext {
            population_ad: vec![0.4],
            archive_ad: vec![0.4],
        };
        let equal_cv = vec![ind(&[1.0, 0.0], 0.0)];
        assert_eq!(restricted_mating(&p, &equal_cv, 1, &tie, &mut rng), (0, 0));
    }

    #[test]
    fn context_only_built_for_full_archive() {
        let p = vec![ind(&[0.0, 1.0], 0.0), ind(&[1.0, 0.0], 0.0)];
        let a = vec![ind(&[0.5, 0.5], 0.1)];
        assert_eq!(MatingContext::prepare(&p, &a, 2), MatingContext::default());
        let ctx = MatingContext::prepare(&p, &a, 1);
        assert_eq!(ctx.population_ad.len(), 2);
        assert_eq!(ctx.archive_ad, vec![FRAC_PI_2]);
    }
}
