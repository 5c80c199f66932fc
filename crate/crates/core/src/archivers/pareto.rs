//! Dominance-only archivers: the unbounded nondominated list and `A_dom`.

use rand_chacha::ChaCha8Rng;

use super::UpdateRule;
use crate::dominance::ObjectiveVector;
use crate::error::Result;

/// Keeps every nondominated solution seen, without duplicates.
#[derive(Debug, Default)]
pub(super) struct Unbounded {
    members: Vec<ObjectiveVector>,
}

impl UpdateRule for Unbounded {
    fn insert(&mut self, s: &ObjectiveVector, _: &mut ChaCha8Rng) -> Result<()> {
        if self.members.iter().any(|a| a.wdom(s)) {
            return Ok(());
        }
        self.members.retain(|a| !s.dom(a));
        self.members.push(s.clone());
        Ok(())
    }

    fn members(&self) -> Vec<ObjectiveVector> {
        self.members.clone()
    }
}

/// Accepts a nondominated newcomer only while the nondominated set still
/// fits; once full, only a dominating newcomer can get in.
#[derive(Debug)]
pub(super) struct ADom {
    capacity: usize,
    members: Vec<ObjectiveVector>,
}

impl ADom {
    pub(super) fn new(capacity: usize) -> Self {
        Self { capacity, members: Vec::new() }
    }
}

impl UpdateRule for ADom {
    fn insert(&mut self, s: &ObjectiveVector, _: &mut ChaCha8Rng) -> Result<()> {
        if self.members.iter().any(|a| a.wdom(s)) {
            return Ok(());
        }
        let kept = self.members.iter().filter(|a| !s.dom(a)).count();
        if kept < self.capacity {
            self.members.retain(|a| !s.dom(a));
            self.members.push(s.clone());
        }
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

    fn fold(rule: &mut dyn UpdateRule, seq: &[ObjectiveVector]) {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for s in seq {
            rule.insert(s, &mut rng).unwrap();
        }
    }

    #[test]
    fn unbounded_examples() {
        let mut u = Unbounded::default();
        fold(&mut u, &[ov![3, 3]]);
        assert_eq!(u.members(), vec![ov![3, 3]]);
        fold(&mut u, &[ov![1, 1]]);
        assert_eq!(u.members(), vec![ov![1, 1]]);

        let mut u = Unbounded::default();
        fold(&mut u, &[ov![1, 3], ov![3, 1], ov![2, 2], ov![2, 2]]);
        assert_eq!(u.members(), vec![ov![1, 3], ov![3, 1], ov![2, 2]]);
    }

    #[test]
    fn a_dom_rejects_nondominated_when_full() {
        let mut a = ADom::new(2);
        fold(&mut a, &[ov![4, 5], ov![5, 4], ov![1, 8]]);
        assert_eq!(a.members(), vec![ov![4, 5], ov![5, 4]]);
    }

    #[test]
    fn a_dom_accepts_dominating_newcomer() {
        let mut a = ADom::new(2);
        fold(&mut a, &[ov![4, 5], ov![5, 4], ov![3, 3]]);
        assert_eq!(a.members(), vec![ov![3, 3]]);
    }

    #[test]
    fn a_dom_fills_free_slot() {
        let mut a = ADom::new(2);
        fold(&mut a, &[ov![3, 3], ov![2, 9]]);
        assert_eq!(a.members(), vec![ov![3, 3], ov![2, 9]]);
    }

    #[test]
    fn a_dom_full_replaces_one_of_several_dominated() {
        let mut a = ADom::new(2);
        fold(&mut a, &[ov![2, 5], ov![5, 2], ov![1, 6]]);
        assert_eq!(a.members().len(), 2);
        fold(&mut a, &[ov![1, 4]]);
        assert_eq!(a.members(), vec![ov![5, 2], ov![1, 4]]);
    }
}
