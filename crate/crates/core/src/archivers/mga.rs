//! Multi-level grid archiver.
//!
//! While the nondominated set fits, MGA behaves like a plain Pareto archive.
//! Once it overflows, members are compared on dyadic grids
//! `floor(a_i * 2^-b)` and the finest level `b` at which some member's box
//! weakly dominates another member's box decides which members are
//! candidates for removal.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::UpdateRule;
use crate::dominance::{minimal_unchecked, ObjectiveVector};
use crate::error::Result;

/// `floor(log2(x))` for finite `x > 0`, exact.
pub(crate) fn floor_log2(x: f64) -> i32 {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut k = x.log2().floor() as i32;
    while 2f64.powi(k + 1) <= x {
        k += 1;
    }
    while 2f64.powi(k) > x {
        k -= 1;
    }
    k
}

pub(crate) fn grid_box(a: &ObjectiveVector, level: i32) -> Vec<f64> {
    let scale = 2f64.powi(-level);
    a.values().iter().map(|v| (v * scale).floor()).collect()
}

fn box_wdom(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Whether some member's box weakly dominates a distinct member's box.
fn level_has_overlap(boxes: &[Vec<f64>], set: &[ObjectiveVector]) -> bool {
    (0..set.len()).any(|i| (0..set.len()).any(|j| set[i] != set[j] && box_wdom(&boxes[j], &boxes[i])))
}

/// Indices of members whose box is weakly dominated by a distinct member's
/// box at `level`.
pub(crate) fn box_dominated(set: &[ObjectiveVector], level: i32) -> Vec<usize> {
    let boxes: Vec<_> = set.iter().map(|a| grid_box(a, level)).collect();
    (0..set.len()).filter(|&i| (0..set.len()).any(|j| set[i] != set[j] && box_wdom(&boxes[j], &boxes[i]))).collect()
}

/// Finest level `b ≤ b̄` at which two distinct members overlap, if any.
///
/// Levels below `floor(log2(δ)) - 1`, with `δ` the smallest nonzero
/// coordinate gap, preserve the componentwise order exactly and so cannot
/// produce an overlap between distinct nondominated members.
pub(crate) fn finest_overlap_level(set: &[ObjectiveVector]) -> Option<i32> {
    let max_abs = set.iter().flat_map(|a| a.values().iter().map(|v| v.abs())).fold(0.0, f64::max);
    if max_abs == 0.0 {
        return None;
    }
    let top = floor_log2(max_abs) + 1;
    let mut gap = f64::INFINITY;
    for (i, a) in set.iter().enumerate() {
        for b in &set[i + 1..] {
            for (x, y) in a.values().iter().zip(b.values()) {
                let g = (x - y).abs();
                if g > 0.0 {
                    gap = gap.min(g);
                }
            }
        }
    }
    let bottom = if gap.is_finite() { floor_log2(gap) - 1 } else { top };
    (bottom.min(top)..=top).find(|&b| {
        let boxes: Vec<_> = set.iter().map(|a| grid_box(a, b)).collect();
        level_has_overlap(&boxes, set)
    })
}

#[derive(Debug)]
pub(super) struct Mga {
    capacity: usize,
    members: Vec<ObjectiveVector>,
}

impl Mga {
    pub(super) fn new(capacity: usize) -> Self {
        Self { capacity, members: Vec::new() }
    }
}

impl UpdateRule for Mga {
    fn insert(&mut self, s: &ObjectiveVector, rng: &mut ChaCha8Rng) -> Result<()> {
        // The archive is a set: a copy of a member changes nothing.
        if self.members.iter().any(|a| a.dom(s) || a == s) {
            return Ok(());
        }
        let mut merged = self.members.clone();
        merged.push(s.clone());
        let merged = minimal_unchecked(&merged);
        if merged.len() <= self.capacity {
            self.members = merged;
            return Ok(());
        }
        let Some(level) = finest_overlap_level(&merged) else {
            return Ok(());
        };
        let candidates = box_dominated(&merged, level);
        if candidates.iter().any(|&i| merged[i] == *s) {
            return Ok(());
        }
        let evict = candidates[rng.gen_range(0..candidates.len())];
        let mut merged = merged;
        merged.remove(evict);
        self.members = merged;
        Ok(())
    }

    fn members(&self) -> Vec<ObjectiveVector> {
        self.members.clone()
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::ov;

    /// Plain scan over a wide band of levels.
    fn overlap_level_oracle(set: &[ObjectiveVector]) -> Option<i32> {
        let max_abs = set.iter().flat_map(|a| a.values().iter().map(|v| v.abs())).fold(0.0, f64::max);
        let top = max_abs.log2().floor() as i32 + 1;
        (-40..=top).find(|&b| {
            set.iter().enumerate().any(|(i, a)| {
                set.iter().enumerate().any(|(j, c)| {
                    i != j && a != c && {
                        let ba = grid_box(a, b);
                        let bc = grid_box(c, b);
                        bc.iter().zip(&ba).all(|(x, y)| x <= y)
                    }
                })
            })
        })
    }

    fn fold(cap: usize, seq: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
        let mut m = Mga::new(cap);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in seq {
            m.insert(s, &mut rng).unwrap();
        }
        m.members()
    }

    #[test]
    fn floor_log2_is_exact() {
        assert_eq!(floor_log2(1.0), 0);
        assert_eq!(floor_log2(3.0), 1);
        assert_eq!(floor_log2(4.0), 2);
        assert_eq!(floor_log2(0.25), -2);
        assert_eq!(floor_log2(0.3), -2);
    }

    #[test]
    fn overflow_with_box_dominated_newcomer_rejects_it() {
        let set = [ov![1, 3], ov![3, 1], ov![2, 2]];
        assert_eq!(overlap_level_oracle(&set), Some(1));
        assert_eq!(finest_overlap_level(&set), Some(1));
        assert_eq!(box_dominated(&set, 1), vec![2]);
        assert_eq!(fold(2, &set), vec![ov![1, 3], ov![3, 1]]);
    }

    #[test]
    fn room_available_accepts() {
        assert_eq!(fold(2, &[ov![5, 5], ov![1, 9]]), vec![ov![5, 5], ov![1, 9]]);
    }

    #[test]
    fn overflow_level_scan_matches_oracle() {
        // At level 1 the boxes are (0,1), (1,0), (0,2): the newcomer's box
        // is weakly dominated by (1,3)'s box, so it is rejected.
        let set = [ov![1, 3], ov![3, 1], ov![0, 4]];
        assert_eq!(overlap_level_oracle(&set), Some(1));
        assert_eq!(finest_overlap_level(&set), Some(1));
        assert_eq!(box_dominated(&set, 1), vec![2]);
        assert_eq!(fold(2, &set), vec![ov![1, 3], ov![3, 1]]);
    }

    #[test]
    fn overflow_evicts_box_dominated_incumbent() {
        // Level 1 boxes: (0,2)->(0,1), (3,0)->(1,0), (1,1)->(0,0).
        let set = [ov![0, 2], ov![3, 0], ov![1, 1]];
        assert_eq!(finest_overlap_level(&set), Some(1));
        assert_eq!(box_dominated(&set, 1), vec![0, 1]);
        let kept = fold(2, &set);
        assert_eq!(kept.len(), 2);
        assert!(kept.contains(&ov![1, 1]));
    }

    #[test]
    fn duplicates_and_dominated_are_ignored() {
        assert_eq!(fold(3, &[ov![2, 2], ov![2, 2], ov![3, 3]]), vec![ov![2, 2]]);
    }

    #[test]
    fn fast_scan_agrees_with_oracle_on_random_sets() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let n = rng.gen_range(2..7);
            let pts: Vec<_> = (0..n)
                .map(|_| {
                    let x: f64 = rng.gen_range(0..40) as f64 / 4.0;
                    let y: f64 = rng.gen_range(0..40) as f64 / 4.0;
                    ov![x, y]
                })
                .collect();
            let front = crate::dominance::distinct(&minimal_unchecked(&pts));
            if front.len() < 2 {
                continue;
            }
            assert_eq!(finest_overlap_level(&front), overlap_level_oracle(&front), "{front:?}");
        }
    }
}
