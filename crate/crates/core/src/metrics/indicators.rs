use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

/// Each coordinate of the hypervolume reference point, in normalized units.
pub const HV_REFERENCE_FACTOR: f64 = 1.1;

/// Mean over the reference points of the Euclidean distance to the nearest
/// front point. NaN for an empty front.
pub fn igd<A: AsRef<[f64]>, B: AsRef<[f64]>>(front: &[A], reference: &[B]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    if front.is_empty() {
        return Ok(f64::NAN);
    }
    let total: f64 = reference
        .iter()
        .map(|r| {
            front
                .iter()
                .map(|a| squared_distance(r.as_ref(), a.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .map(sqrt)
        .sum();
    Ok(total / reference.len() as f64)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Hypervolume of `front` after normalizing every objective by the ideal
/// and nadir of `reference_front`, against the point
/// `(1.1, ..., 1.1)`. Objectives along which the reference front is flat
/// are left unscaled. NaN for an empty front.
pub fn hypervolume<A: AsRef<[f64]>, B: AsRef<[f64]>>(
    front: &[A],
    reference_front: &[B],
) -> Result<f64> {
    if reference_front.is_empty() {
        return Err(Error::EmptyReference);
    }
    let m = reference_front[0].as_ref().len();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedObjectiveCount(m));
    }
    if front.is_empty() {
        return Ok(f64::NAN);
    }
    let mut ideal = alloc::vec![f64::INFINITY; m];
    let mut nadir = alloc::vec![f64::NEG_INFINITY; m];
    for r in reference_front {
        for (k, &v) in r.as_ref().iter().enumerate() {
            ideal[k] = ideal[k].min(v);
            nadir[k] = nadir[k].max(v);
        }
    }
    let normalized: Vec<Vec<f64>> = front
        .iter()
        .map(|p| {
            p.as_ref()
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let range = nadir[k] - ideal[k];
                    let scale = if range > 0.0 { range } else { 1.0 };
                    (v - ideal[k]) / scale
                })
                .collect()
        })
        .collect();
    hypervolume_at(&normalized, &alloc::vec![HV_REFERENCE_FACTOR; m])
}

/// Exact hypervolume dominated by `points` and bounded by `reference`.
/// Points that do not strictly dominate the reference point contribute
/// nothing. Two objectives use a sweep; three slice along the last
/// objective and sweep each slab.
pub fn hypervolume_at<A: AsRef<[f64]>>(points: &[A], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedObjectiveCount(m));
    }
    let mut inside: Vec<&[f64]> = points
        .iter()
        .map(|p| p.as_ref())
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v < r))
        .collect();
    if inside.is_empty() {
        return Ok(0.0);
    }
    if m == 2 {
        return Ok(sweep_2d(&mut inside, reference[0], reference[1]));
    }
    inside.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    let mut slab: Vec<&[f64]> = Vec::with_capacity(inside.len());
    for (i, p) in inside.iter().enumerate() {
        slab.push(p);
        let top = inside.get(i + 1).map_or(reference[2], |q| q[2]);
        let depth = top - p[2];
        if depth > 0.0 {
            volume += sweep_2d(&mut slab, reference[0], reference[1]) * depth;
        }
    }
    Ok(volume)
}

fn sweep_2d(points: &mut [&[f64]], r0: f64, r1: f64) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = r1;
    for p in points.iter() {
        if p[1] < ceiling {
            area += (r0 - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn igd_cases() {
        let r = [[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(igd(&r, &r).unwrap(), 0.0);
        let v = igd(&[[0.0, 1.0]], &r).unwrap();
        assert!((v - core::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
        let superset = [[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]];
        assert_eq!(igd(&superset, &r).unwrap(), 0.0);
        let empty: [[f64; 2]; 0] = [];
        assert!(igd(&empty, &r).unwrap().is_nan());
        assert!(matches!(igd(&r, &empty), Err(Error::EmptyReference)));
    }

    #[test]
    fn hv_unit_reference() {
        assert_eq!(hypervolume_at(&[[0.5, 0.5]], &[1.0, 1.0]).unwrap(), 0.25);
        let two = [[0.25, 0.75], [0.75, 0.25]];
        assert_eq!(hypervolume_at(&two, &[1.0, 1.0]).unwrap(), 0.3125);
        assert_eq!(hypervolume_at(&[[1.5, 0.5]], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(hypervolume_at(&[[1.0, 0.5]], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn hv_three_objectives() {
        assert_eq!(hypervolume_at(&[[0.5, 0.5, 0.5]], &[1.0, 1.0, 1.0]).unwrap(), 0.125);
        // Inclusion-exclusion: 0.5 + 0.5 - 0.25.
        let two = [[0.0, 0.0, 0.5], [0.0, 0.5, 0.0]];
        assert_eq!(hypervolume_at(&two, &[1.0, 1.0, 1.0]).unwrap(), 0.75);
        assert!(matches!(
            hypervolume_at(&[[0.0; 4]], &[1.0; 4]),
            Err(Error::UnsupportedObjectiveCount(4))
        ));
    }

    #[test]
    fn hv_normalized_by_reference_front() {
        let reference = [[0.0, 2.0], [2.0, 0.0]];
        // (1, 1) normalizes to (0.5, 0.5): box up to 1.1 is 0.6².
        let v = hypervolume(&[[1.0, 1.0]], &reference).unwrap();
        assert!((v - 0.36).abs() < 1e-15);
        let empty: [[f64; 2]; 0] = [];
        assert!(hypervolume(&empty, &reference).unwrap().is_nan());
        let flat = vec![vec![0.0, 1.0]];
        assert!(hypervolume(&[[0.5, 1.0]], &flat).unwrap() > 0.0);
    }
}
