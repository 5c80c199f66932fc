#![allow(dead_code)]

use moarchive::{better, minimal_set, ObjectiveVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn ov(values: &[f64]) -> ObjectiveVector {
    ObjectiveVector::new(values.to_vec()).unwrap()
}

/// Random point with integer coordinates in `0..=hi`.
pub fn int_point(rng: &mut ChaCha8Rng, d: usize, hi: i32) -> ObjectiveVector {
    ov(&(0..d).map(|_| rng.gen_range(0..=hi) as f64).collect::<Vec<_>>())
}

pub fn int_set(rng: &mut ChaCha8Rng, d: usize, n: usize, hi: i32) -> Vec<ObjectiveVector> {
    (0..n).map(|_| int_point(rng, d, hi)).collect()
}

/// Monte-Carlo estimate of the region dominated by `set` and bounded by
/// `reference`, sampling uniformly in the box spanned by the set's minimum
/// and the reference point.
pub fn mc_hypervolume(set: &[ObjectiveVector], reference: &[f64], samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let d = reference.len();
    let lo: Vec<f64> = (0..d).map(|k| set.iter().map(|a| a.values()[k]).fold(f64::INFINITY, f64::min)).collect();
    let volume: f64 = (0..d).map(|k| reference[k] - lo[k]).product();
    let mut x = vec![0.0; d];
    let mut hits = 0usize;
    for _ in 0..samples {
        for k in 0..d {
            x[k] = rng.gen_range(lo[k]..reference[k]);
        }
        if set.iter().any(|a| a.values().iter().zip(&x).all(|(ai, xi)| ai <= xi)) {
            hits += 1;
        }
    }
    volume * hits as f64 / samples as f64
}

/// Optimality straight from the definition, written independently of the
/// library: no subset of the distinct members of `y` with at most `n`
/// elements is better than the distinct members of `a`.
pub fn optimal_by_enumeration(a: &[ObjectiveVector], y: &[ObjectiveVector], n: usize) -> bool {
    let mut a_set = a.to_vec();
    a_set.sort();
    a_set.dedup();
    if a_set.is_empty() || minimal_set(&a_set).unwrap().len() != a_set.len() {
        return false;
    }
    let mut pool = y.to_vec();
    pool.sort();
    pool.dedup();
    let m = pool.len();
    for mask in 1u32..(1u32 << m) {
        if mask.count_ones() as usize > n {
            continue;
        }
        let b: Vec<ObjectiveVector> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| pool[i].clone()).collect();
        if better(&b, &a_set).unwrap() {
            return false;
        }
    }
    true
}
