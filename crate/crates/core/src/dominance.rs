//! Pareto dominance on objective vectors and on sets of them.
//!
//! All objectives are minimised. Equality is exact componentwise equality,
//! so `dominates` and `weakly_dominates` differ only on identical vectors.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

/// The image of one solution in objective space.
///
/// Always has at least two finite components. `-0.0` is normalised to
/// `0.0` on construction so that equality, ordering and hashing agree.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return usage(format!("objective vectors need at least 2 components, got {}", values.len()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite objective value {bad}")));
        }
        Ok(Self(values.into_iter().map(|v| v + 0.0).collect()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// `self ⪯ other`; dimensions must already agree.
    #[inline]
    pub(crate) fn wdom(&self, other: &Self) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self ≺ other`; dimensions must already agree.
    #[inline]
    pub(crate) fn dom(&self, other: &Self) -> bool {
        let mut strict = false;
        for (a, b) in self.0.iter().zip(&other.0) {
            if a > b {
                return false;
            }
            strict |= a < b;
        }
        strict
    }
}

impl<'de> Deserialize<'de> for ObjectiveVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        ObjectiveVector::new(values).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl fmt::Debug for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

// Components are finite and zero is normalised, so the derived-style
// total order and bitwise hash are consistent with `PartialEq`.
impl Eq for ObjectiveVector {}

impl Ord for ObjectiveVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b).expect("finite components") {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for ObjectiveVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for ObjectiveVector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.len().hash(state);
        for v in &self.0 {
            v.to_bits().hash(state);
        }
    }
}

/// Builds an objective vector from a literal, panicking on invalid input.
/// Intended for tests and examples.
#[macro_export]
macro_rules! ov {
    ($($x:expr),+ $(,)?) => {
        $crate::ObjectiveVector::new(vec![$($x as f64),+]).expect("valid objective vector")
    };
}

fn check_pair(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<()> {
    if a.dim() != b.dim() {
        return usage(format!("dimension mismatch: {} vs {}", a.dim(), b.dim()));
    }
    Ok(())
}

/// Checks that a set is nonempty and all members share one dimension,
/// returning that dimension.
pub fn check_set(set: &[ObjectiveVector], what: &str) -> Result<usize> {
    let Some(first) = set.first() else {
        return usage(format!("{what} must be nonempty"));
    };
    let d = first.dim();
    if let Some(bad) = set.iter().find(|v| v.dim() != d) {
        return usage(format!("{what} mixes dimensions {d} and {}", bad.dim()));
    }
    Ok(d)
}

fn check_sets(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> Result<()> {
    let da = check_set(a, "first set")?;
    let db = check_set(b, "second set")?;
    if da != db {
        return usage(format!("dimension mismatch: {da} vs {db}"));
    }
    Ok(())
}

/// `y ⪯ y2`: every component of `y` is no worse.
pub fn weakly_dominates(y: &ObjectiveVector, y2: &ObjectiveVector) -> Result<bool> {
    check_pair(y, y2)?;
    Ok(y.wdom(y2))
}

/// `y ≺ y2`: `y ⪯ y2` and the two differ.
pub fn dominates(y: &ObjectiveVector, y2: &ObjectiveVector) -> Result<bool> {
    check_pair(y, y2)?;
    Ok(y.dom(y2))
}

/// Members of `set` not dominated by any other member. Duplicates of a
/// minimal element are all kept, in input order.
pub fn minimal_set(set: &[ObjectiveVector]) -> Result<Vec<ObjectiveVector>> {
    check_set(set, "set")?;
    Ok(minimal_unchecked(set))
}

pub(crate) fn minimal_unchecked(set: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    set.iter().filter(|y| !set.iter().any(|o| o.dom(y))).cloned().collect()
}

pub(crate) fn is_minimal_unchecked(set: &[ObjectiveVector]) -> bool {
    set.iter().all(|y| !set.iter().any(|o| o.dom(y)))
}

/// `A ⪯ B`: every member of `B` is weakly dominated by some member of `A`.
pub fn set_weakly_dominates(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> Result<bool> {
    check_sets(a, b)?;
    Ok(set_wdom(a, b))
}

pub(crate) fn set_wdom(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> bool {
    b.iter().all(|y| a.iter().any(|x| x.wdom(y)))
}

/// `A ◁ B`: `A ⪯ B` but not `B ⪯ A`.
pub fn better(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> Result<bool> {
    check_sets(a, b)?;
    Ok(better_unchecked(a, b))
}

pub(crate) fn better_unchecked(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> bool {
    set_wdom(a, b) && !set_wdom(b, a)
}

/// Sorted copy of a set, used as its canonical multiset form.
pub fn canonical(set: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut v = set.to_vec();
    v.sort();
    v
}

/// Sorted, duplicate-free copy of a set.
pub fn distinct(set: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut v = canonical(set);
    v.dedup();
    v
}
