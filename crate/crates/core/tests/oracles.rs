//! Brute-force reference implementations checked against the fast paths.

use nsbidico::coevolution::{truncate_by_angle, vector_angle, ArchiveNormalization, NormalizationFrame};
use nsbidico::metrics::{hypervolume_at, rank_sum_exact_p_value, rank_sum_p_value, SIGNIFICANCE};
use nsbidico::ranking::{fast_nondominated_sort, Comparator};
use nsbidico::Individual;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rank by repeated peeling: a member's rank is the round in which nothing
/// left in the pool dominates it.
pub fn peel_ranks<T>(items: &[T], dominates: impl Fn(&T, &T) -> bool) -> Vec<usize> {
    let mut rank = vec![usize::MAX; items.len()];
    let mut round = 0;
    while rank.contains(&usize::MAX) {
        let layer: Vec<usize> = (0..items.len())
            .filter(|&i| rank[i] == usize::MAX)
            .filter(|&i| {
                !(0..items.len()).any(|j| rank[j] == usize::MAX && dominates(&items[j], &items[i]))
            })
            .collect();
        for i in layer {
            rank[i] = round;
        }
        round += 1;
    }
    rank
}

fn random_individual(rng: &mut ChaCha8Rng, m: usize) -> Individual {
    // Coarse values so that ties and duplicates actually occur.
    let objectives: Vec<f64> = (0..m).map(|_| rng.gen_range(0..6) as f64).collect();
    let cv = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(1..4) as f64 * 0.5 };
    Individual {
        x: vec![0.0],
        objectives,
        raw_constraints: vec![cv],
        cv,
        rank: None,
        crowding: None,
    }
}

#[test]
fn fast_sort_matches_peeling_on_random_populations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let m = 2 + case % 2;
        let len = rng.gen_range(1..=50);
        let pop: Vec<Individual> = (0..len).map(|_| random_individual(&mut rng, m)).collect();
        for cmp in [Comparator::Pareto, Comparator::Cdp, Comparator::Augmented] {
            let fast = fast_nondominated_sort(&pop, |a, b| cmp.dominates(a, b));
            let slow = peel_ranks(&pop, |a, b| cmp.dominates(a, b));
            assert_eq!(fast.ranks, slow, "case {case}, {cmp:?}");
        }
    }
}

/// Every `k`-subset of the pooled ranks, counted directly.
fn enumerated_p_value(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let midrank = |v: f64| {
        let below = sorted.iter().filter(|&&s| s < v).count() as f64;
        let equal = sorted.iter().filter(|&&s| s == v).count() as f64;
        below + (equal + 1.0) / 2.0
    };
    let ranks: Vec<f64> = pooled.iter().map(|&v| midrank(v)).collect();
    let expected = a.len() as f64 * (n as f64 + 1.0) / 2.0;
    let observed: f64 = ranks[..a.len()].iter().sum::<f64>() - expected;
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        total += 1;
        if (s - expected).abs() >= observed.abs() - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

#[test]
fn exact_p_value_of_fully_separated_triples() {
    let a = [1.0, 2.0, 3.0];
    let b = [4.0, 5.0, 6.0];
    assert_eq!(enumerated_p_value(&a, &b), 0.1);
    assert!((rank_sum_exact_p_value(&a, &b).unwrap() - 0.1).abs() < 1e-15);
}

#[test]
fn exact_p_value_matches_enumeration_with_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let na = rng.gen_range(1..=7);
        let nb = rng.gen_range(1..=7);
        let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..5) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..5) as f64).collect();
        let exact = rank_sum_exact_p_value(&a, &b).unwrap();
        assert!((exact - enumerated_p_value(&a, &b)).abs() < 1e-12, "{a:?} vs {b:?}");
    }
}

/// `(n_a, n_b, U)` where the normal approximation and the exact test fall
/// on different sides of 0.05. All sit just above 0.05 under the
/// approximation and just below it exactly.
pub const NORMAL_APPROXIMATION_BOUNDARY: [(usize, usize, usize); 8] = [
    (3, 6, 1),
    (3, 6, 17),
    (5, 7, 5),
    (5, 7, 30),
    (6, 3, 1),
    (6, 3, 17),
    (7, 5, 5),
    (7, 5, 30),
];

/// Every untied configuration with both sizes at most 7, reduced to the
/// distinct `(n_a, n_b, U)` triples whose verdicts disagree.
pub fn verdict_disagreements() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for na in 1..=7usize {
        for nb in 1..=7usize {
            let n = na + nb;
            let mut seen = std::collections::BTreeSet::new();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != na {
                    continue;
                }
                let a: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1) as f64).collect();
                let b: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| (i + 1) as f64).collect();
                let u = a.iter().sum::<f64>() as usize - na * (na + 1) / 2;
                if !seen.insert(u) {
                    continue;
                }
                let normal = rank_sum_p_value(&a, &b) < SIGNIFICANCE;
                let exact = enumerated_p_value(&a, &b) < SIGNIFICANCE;
                if normal != exact {
                    out.push((na, nb, u));
                }
            }
        }
    }
    out
}

#[test]
fn normal_approximation_disagrees_only_on_known_boundary() {
    assert_eq!(verdict_disagreements(), NORMAL_APPROXIMATION_BOUNDARY);
}

/// One full pair scan per deletion.
fn naive_truncate(candidates: &[Individual], capacity: usize, orientation: ArchiveNormalization) -> Vec<Individual> {
    let frame = NormalizationFrame::from_individuals(candidates).unwrap();
    let norm: Vec<Vec<f64>> = candidates.iter().map(|c| frame.normalize(&c.objectives, orientation)).collect();
    let mut alive: Vec<usize> = (0..candidates.len()).collect();
    while alive.len() > capacity {
        let mut best = (f64::INFINITY, 0, 0);
        for (p, &i) in alive.iter().enumerate() {
            for &j in &alive[p + 1..] {
                let t = vector_angle(&norm[i], &norm[j]);
                if t < best.0 {
                    best = (t, i, j);
                }
            }
        }
        let (_, i, j) = best;
        let drop = if candidates[j].cv < candidates[i].cv { i } else { j };
        alive.retain(|&k| k != drop);
    }
    alive.into_iter().map(|k| candidates[k].clone()).collect()
}

#[test]
fn truncation_matches_naive_pair_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let m = 2 + case % 2;
        let len = rng.gen_range(2..=30);
        let cands: Vec<Individual> = (0..len)
            .map(|_| {
                let mut ind = random_individual(&mut rng, m);
                // Finer objectives here; duplicate angles still arise from the grid.
                for v in &mut ind.objectives {
                    *v += rng.gen_range(0..4) as f64 * 0.25;
                }
                ind.cv = rng.gen_range(1..5) as f64;
                ind
            })
            .collect();
        let capacity = rng.gen_range(1..=len);
        for orientation in [ArchiveNormalization::Reversed, ArchiveNormalization::Standard] {
            assert_eq!(
                truncate_by_angle(cands.clone(), capacity, orientation),
                naive_truncate(&cands, capacity, orientation),
                "case {case}"
            );
        }
    }
}

/// Union area of the boxes `[p, r]` summed over the cells of the grid
/// spanned by every coordinate.
fn compressed_volume(front: &[Vec<f64>], r: &[f64]) -> f64 {
    let m = r.len();
    let axes: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let mut a: Vec<f64> = front.iter().map(|p| p[k]).filter(|&v| v < r[k]).chain([r[k]]).collect();
            a.sort_by(f64::total_cmp);
            a.dedup();
            a
        })
        .collect();
    let mut volume = 0.0;
    let mut idx = vec![0usize; m];
    'cells: loop {
        if idx.iter().zip(&axes).all(|(&i, a)| i + 1 < a.len()) {
            let centre: Vec<f64> = (0..m).map(|k| (axes[k][idx[k]] + axes[k][idx[k] + 1]) / 2.0).collect();
            if front.iter().any(|p| p.iter().zip(&centre).all(|(a, c)| a <= c)) {
                volume += (0..m).map(|k| axes[k][idx[k] + 1] - axes[k][idx[k]]).product::<f64>();
            }
        }
        for k in 0..m {
            idx[k] += 1;
            if idx[k] + 1 < axes[k].len() {
                continue 'cells;
            }
            idx[k] = 0;
        }
        break;
    }
    volume
}

#[test]
fn hypervolume_matches_grid_compression() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..600 {
        let m = 2 + case % 2;
        let size = rng.gen_range(1..=15);
        let front: Vec<Vec<f64>> = (0..size)
            .map(|_| (0..m).map(|_| rng.gen_range(-0.1..1.2)).collect())
            .collect();
        let r = vec![1.0; m];
        let exact = hypervolume_at(&front, &r).unwrap();
        let oracle = compressed_volume(&front, &r);
        assert!((exact - oracle).abs() < 1e-12, "case {case}: {exact} vs {oracle}");
    }
}
