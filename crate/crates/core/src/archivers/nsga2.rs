//! Archiver built on NSGA-II environmental selection.

use rand_chacha::ChaCha8Rng;

use super::sorting::{crowding_distance, front_indices};
use super::UpdateRule;
use crate::dominance::ObjectiveVector;
use crate::error::Result;

#[derive(Debug)]
pub(super) struct Nsga2 {
    capacity: usize,
    batch_native: bool,
    /// Oldest first; position doubles as arrival order.
    members: Vec<ObjectiveVector>,
}

impl Nsga2 {
    pub(super) fn new(capacity: usize, batch_native: bool) -> Self {
        Self { capacity, batch_native, members: Vec::new() }
    }
}

/// Index (into `pool`) of the member to drop: minimum crowding distance in
/// the last front, the most recent one among ties.
fn worst_index(pool: &[ObjectiveVector]) -> usize {
    let fronts = front_indices(pool);
    let last = fronts.last().expect("nonempty pool");
    let front: Vec<_> = last.iter().map(|&i| pool[i].clone()).collect();
    let cd = crowding_distance(&front);
    let min = cd.iter().copied().fold(f64::INFINITY, f64::min);
    last.iter().zip(&cd).filter(|(_, &c)| c == min).map(|(&i, _)| i).max().expect("front is nonempty")
}

/// Keeps the best `capacity` members of `pool`: whole fronts first, the
/// split front truncated by descending crowding distance (older first on
/// ties).
fn truncate(pool: &[ObjectiveVector], capacity: usize) -> Vec<ObjectiveVector> {
    let mut keep = Vec::with_capacity(capacity);
    for front in front_indices(pool) {
        if keep.len() + front.len() <= capacity {
            keep.extend(front);
            continue;
        }
        let members: Vec<_> = front.iter().map(|&i| pool[i].clone()).collect();
        let cd = crowding_distance(&members);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]).then(a.cmp(&b)));
        let room = capacity - keep.len();
        keep.extend(order[..room].iter().map(|&k| front[k]));
        break;
    }
    keep.sort_unstable();
    keep.into_iter().map(|i| pool[i].clone()).collect()
}

impl UpdateRule for Nsga2 {
    fn insert(&mut self, s: &ObjectiveVector, _: &mut ChaCha8Rng) -> Result<()> {
        self.members.push(s.clone());
        if self.members.len() > self.capacity {
            let drop = worst_index(&self.members);
            self.members.remove(drop);
        }
        Ok(())
    }

    fn insert_batch(&mut self, batch: &[ObjectiveVector], rng: &mut ChaCha8Rng) -> Result<()> {
        if !self.batch_native {
            return batch.iter().try_for_each(|s| self.insert(s, rng));
        }
        let mut pool = std::mem::take(&mut self.members);
        pool.extend_from_slice(batch);
        self.members = if pool.len() > self.capacity { truncate(&pool, self.capacity) } else { pool };
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

    fn fold(n: &mut Nsga2, seq: &[ObjectiveVector]) {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for s in seq {
            n.insert(s, &mut rng).unwrap();
        }
    }

    #[test]
    fn crowding_removal_sequence() {
        let mut n = Nsga2::new(3, false);
        fold(&mut n, &[ov![0, 10], ov![2, 7], ov![10, 0]]);
        fold(&mut n, &[ov![6, 2]]);
        assert_eq!(n.members(), vec![ov![0, 10], ov![10, 0], ov![6, 2]]);
        fold(&mut n, &[ov![4, 7.5]]);
        assert_eq!(n.members(), vec![ov![0, 10], ov![10, 0], ov![4, 7.5]]);
        let before = [ov![0, 10], ov![2, 7], ov![10, 0]];
        assert!(crate::dominance::better(&before, &n.members()).unwrap());
    }

    #[test]
    fn dominated_last_front_goes_first() {
        let mut n = Nsga2::new(1, false);
        fold(&mut n, &[ov![5, 5], ov![1, 1]]);
        assert_eq!(n.members(), vec![ov![1, 1]]);
        let mut n = Nsga2::new(2, false);
        fold(&mut n, &[ov![5, 5], ov![1, 1], ov![0, 3]]);
        assert_eq!(n.members(), vec![ov![1, 1], ov![0, 3]]);
    }

    #[test]
    fn fills_below_capacity() {
        let mut n = Nsga2::new(3, false);
        fold(&mut n, &[ov![5, 5], ov![1, 1]]);
        assert_eq!(n.members(), vec![ov![5, 5], ov![1, 1]]);
    }

    #[test]
    fn crowding_tie_removes_most_recent() {
        let mut n = Nsga2::new(2, false);
        fold(&mut n, &[ov![0, 2], ov![2, 0], ov![1, 1]]);
        // Front of three: the two extremes are infinite, (1,1) is interior.
        assert_eq!(n.members(), vec![ov![0, 2], ov![2, 0]]);
        let mut n = Nsga2::new(1, false);
        fold(&mut n, &[ov![0, 2], ov![2, 0]]);
        assert_eq!(n.members(), vec![ov![0, 2]]);
    }

    #[test]
    fn batch_native_truncates_once() {
        let mut n = Nsga2::new(3, true);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        n.insert_batch(&[ov![0, 10], ov![2, 7], ov![10, 0]], &mut rng).unwrap();
        n.insert_batch(&[ov![6, 2], ov![4, 7.5], ov![20, 20]], &mut rng).unwrap();
        // Pool front: (0,10),(2,7),(10,0),(6,2),(4,7.5); crowding in one shot
        // keeps the two extremes and the most isolated interior point.
        let front = [ov![0, 10], ov![2, 7], ov![10, 0], ov![6, 2], ov![4, 7.5]];
        let cd = crowding_distance(&front);
        let best_interior = (1..5).filter(|&i| i != 2).max_by(|&a, &b| cd[a].total_cmp(&cd[b])).unwrap();
        let mut expected = vec![ov![0, 10], ov![10, 0], front[best_interior].clone()];
        expected.sort();
        let mut got = n.members();
        got.sort();
        assert_eq!(got, expected);
    }
}
