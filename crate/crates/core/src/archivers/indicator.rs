//! Indicator-driven archivers: the generic steady-state scheme and the
//! weakly-Pareto-compliant-indicator archiver.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::sorting::front_indices;
use super::{RefPolicy, TiePolicy, UpdateRule};
use crate::dominance::{minimal_unchecked, ObjectiveVector};
use crate::error::Result;
use crate::indicators::{bounds, IndicatorSpec};

/// Nondominated sort, then drop the member of the last front whose removal
/// leaves that front with the best indicator value. Duplicates are allowed.
#[derive(Debug)]
pub(super) struct IndicatorMu1 {
    capacity: usize,
    indicator: IndicatorSpec,
    tie_policy: TiePolicy,
    ref_policy: RefPolicy,
    members: Vec<ObjectiveVector>,
}

impl IndicatorMu1 {
    pub(super) fn new(capacity: usize, indicator: IndicatorSpec, tie_policy: TiePolicy, ref_policy: RefPolicy) -> Self {
        Self { capacity, indicator, tie_policy, ref_policy, members: Vec::new() }
    }

    fn indicator_for(&self, pool: &[ObjectiveVector]) -> Result<IndicatorSpec> {
        Ok(match self.ref_policy {
            RefPolicy::Fixed => self.indicator.clone(),
            RefPolicy::AdaptiveNadirPlusOne => IndicatorSpec::Hypervolume {
                reference_point: ObjectiveVector::new(bounds(pool).1.into_iter().map(|v| v + 1.0).collect())?,
            },
        })
    }
}

impl UpdateRule for IndicatorMu1 {
    fn insert(&mut self, s: &ObjectiveVector, rng: &mut ChaCha8Rng) -> Result<()> {
        if self.members.len() < self.capacity {
            self.members.push(s.clone());
            return Ok(());
        }
        let mut pool = self.members.clone();
        pool.push(s.clone());
        let newcomer = pool.len() - 1;
        let indicator = self.indicator_for(&pool)?;
        let fronts = front_indices(&pool);
        let last = fronts.last().expect("nonempty pool");

        let mut losses = Vec::with_capacity(last.len());
        for skip in 0..last.len() {
            let rest: Vec<_> =
                last.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| pool[i].clone()).collect();
            losses.push(indicator.loss_or_empty(&rest)?);
        }
        let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
        let ties: Vec<usize> = last.iter().zip(&losses).filter(|(_, &l)| l == best).map(|(&i, _)| i).collect();

        let evict = match self.tie_policy {
            TiePolicy::RejectNew => {
                if ties.contains(&newcomer) {
                    return Ok(());
                }
                ties[rng.gen_range(0..ties.len())]
            }
            TiePolicy::UniformRandom => ties[rng.gen_range(0..ties.len())],
        };
        if evict != newcomer {
            pool.remove(evict);
            self.members = pool;
        }
        Ok(())
    }

    fn members(&self) -> Vec<ObjectiveVector> {
        self.members.clone()
    }
}

/// Rejects weakly dominated newcomers, keeps the nondominated set while it
/// fits, and otherwise swaps the newcomer in only if that strictly improves
/// the indicator.
#[derive(Debug)]
pub(super) struct WeakCompliant {
    capacity: usize,
    indicator: IndicatorSpec,
    members: Vec<ObjectiveVector>,
}

impl WeakCompliant {
    pub(super) fn new(capacity: usize, indicator: IndicatorSpec) -> Self {
        Self { capacity, indicator, members: Vec::new() }
    }
}

impl UpdateRule for WeakCompliant {
    fn insert(&mut self, s: &ObjectiveVector, _: &mut ChaCha8Rng) -> Result<()> {
        // Rule 1: weakly dominated, including exact copies.
        if self.members.iter().any(|a| a.wdom(s)) {
            return Ok(());
        }
        // Rule 2: the nondominated set still fits.
        let mut merged = self.members.clone();
        merged.push(s.clone());
        let merged = minimal_unchecked(&merged);
        if merged.len() <= self.capacity {
            self.members = merged;
            return Ok(());
        }
        // Rules 3 and 4: swap only on strict improvement.
        let current = self.indicator.loss(&self.members)?;
        let mut best: Option<(usize, f64)> = None;
        for skip in 0..self.members.len() {
            let mut candidate: Vec<_> =
                self.members.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, a)| a.clone()).collect();
            candidate.push(s.clone());
            let loss = self.indicator.loss(&candidate)?;
            if best.is_none_or(|(_, b)| loss < b) {
                best = Some((skip, loss));
            }
        }
        let (skip, loss) = best.expect("archive is full, hence nonempty");
        if current <= loss {
            return Ok(());
        }
        self.members.remove(skip);
        self.members.push(s.clone());
        Ok(())
    }

    fn members(&self) -> Vec<ObjectiveVector> {
        self.members.clone()
    }
}
