//! ε-Pareto and ε-approx archivers on a logarithmic box grid.

use rand_chacha::ChaCha8Rng;

use super::{EpsMode, UpdateRule};
use crate::dominance::ObjectiveVector;
use crate::error::{Error, Result};

/// Box index `floor(log(a_i) / log(1 + ε))` of every component.
///
/// The floating estimate is corrected against powers of `1 + ε` so the
/// index is a monotone step function of each component.
pub fn box_index(a: &ObjectiveVector, epsilon: f64) -> Result<Vec<i64>> {
    let base = 1.0 + epsilon;
    a.values()
        .iter()
        .map(|&v| {
            if v <= 0.0 {
                return Err(Error::Domain(format!("ε-box grid needs strictly positive objectives, got {v}")));
            }
            let mut k = (v.ln() / base.ln()).floor() as i64;
            while base.powi((k + 1) as i32) <= v {
                k += 1;
            }
            while base.powi(k as i32) > v {
                k -= 1;
            }
            Ok(k)
        })
        .collect()
}

fn box_wdom(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn box_dom(a: &[i64], b: &[i64]) -> bool {
    box_wdom(a, b) && a != b
}

#[derive(Debug)]
pub(super) struct EpsBox {
    epsilon: f64,
    mode: EpsMode,
    members: Vec<(ObjectiveVector, Vec<i64>)>,
}

impl EpsBox {
    pub(super) fn new(epsilon: f64, mode: EpsMode) -> Self {
        Self { epsilon, mode, members: Vec::new() }
    }
}

impl UpdateRule for EpsBox {
    fn insert(&mut self, s: &ObjectiveVector, _: &mut ChaCha8Rng) -> Result<()> {
        let sb = box_index(s, self.epsilon)?;
        if self.members.iter().any(|(_, b)| box_dom(&sb, b)) {
            self.members.retain(|(_, b)| !box_dom(&sb, b));
            self.members.push((s.clone(), sb));
            return Ok(());
        }
        if self.mode == EpsMode::Pareto {
            if let Some(pos) = self.members.iter().position(|(a, b)| *b == sb && s.dom(a)) {
                self.members.remove(pos);
                self.members.push((s.clone(), sb));
                return Ok(());
            }
        }
        if !self.members.iter().any(|(_, b)| box_wdom(b, &sb)) {
            self.members.push((s.clone(), sb));
        }
        Ok(())
    }

    fn members(&self) -> Vec<ObjectiveVector> {
        self.members.iter().map(|(a, _)| a.clone()).collect()
    }
}
