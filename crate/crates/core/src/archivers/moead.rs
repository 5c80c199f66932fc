//! Archiver built on MOEA/D's per-weight replacement rule.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Scalarizer, UpdateRule};
use crate::dominance::ObjectiveVector;
use crate::error::Result;
use crate::indicators::tchebycheff;

/// Penalty-based boundary intersection: distance along the weight
/// direction plus `theta` times the perpendicular distance.
pub fn pbi(a: &[f64], w: &[f64], r: &[f64], theta: f64) -> f64 {
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(r).map(|(a, r)| a - r).collect();
    let along = diff.iter().zip(w).map(|(d, w)| d * w).sum::<f64>() / norm;
    let perp = diff
        .iter()
        .zip(w)
        .map(|(d, w)| {
            let e = d - along * w / norm;
            e * e
        })
        .sum::<f64>()
        .sqrt();
    along.abs() + theta * perp
}

fn scalarize(kind: Scalarizer, a: &[f64], w: &[f64], r: &[f64]) -> f64 {
    match kind {
        Scalarizer::Tch => tchebycheff(a, w, r),
        Scalarizer::Pbi { theta } => pbi(a, w, r, theta),
    }
}

/// Per-weight associations and the ideal point they are scored against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoeadState {
    pub assoc: Vec<ObjectiveVector>,
    pub ideal: Vec<f64>,
}

#[derive(Debug)]
pub(super) struct Moead {
    scalarizer: Scalarizer,
    weights: Vec<Vec<f64>>,
    frozen_ideal: Option<Vec<f64>>,
    state: Option<MoeadState>,
}

impl Moead {
    pub(super) fn new(scalarizer: Scalarizer, weights: Vec<Vec<f64>>, frozen_ideal: Option<Vec<f64>>) -> Self {
        Self { scalarizer, weights, frozen_ideal, state: None }
    }
}

impl UpdateRule for Moead {
    fn insert(&mut self, s: &ObjectiveVector, _: &mut ChaCha8Rng) -> Result<()> {
        let Some(state) = &mut self.state else {
            self.state = Some(MoeadState {
                assoc: vec![s.clone(); self.weights.len()],
                ideal: self.frozen_ideal.clone().unwrap_or_else(|| s.values().to_vec()),
            });
            return Ok(());
        };
        if self.frozen_ideal.is_none() {
            for (r, v) in state.ideal.iter_mut().zip(s.values()) {
                *r = r.min(*v);
            }
        }
        for (w, slot) in self.weights.iter().zip(state.assoc.iter_mut()) {
            let new = scalarize(self.scalarizer, s.values(), w, &state.ideal);
            let old = scalarize(self.scalarizer, slot.values(), w, &state.ideal);
            if new < old {
                *slot = s.clone();
            }
        }
        Ok(())
    }

    /// Distinct associated solutions in weight order.
    fn members(&self) -> Vec<ObjectiveVector> {
        let mut out: Vec<ObjectiveVector> = Vec::new();
        if let Some(state) = &self.state {
            for a in &state.assoc {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out
    }

    fn moead_state(&self) -> Option<&MoeadState> {
        self.state.as_ref()
    }
}
