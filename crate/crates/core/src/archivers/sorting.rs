//! Nondominated sorting and crowding distance.

use crate::dominance::{check_set, ObjectiveVector};
use crate::error::Result;

/// Partitions `set` into nondominated fronts, best first.
pub fn nondom_sorting(set: &[ObjectiveVector]) -> Result<Vec<Vec<ObjectiveVector>>> {
    check_set(set, "set")?;
    Ok(front_indices(set).into_iter().map(|f| f.into_iter().map(|i| set[i].clone()).collect()).collect())
}

/// Front membership as indices into `set`; each front lists indices in
/// ascending order.
pub(crate) fn front_indices(set: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = set.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if set[i].dom(&set[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if set[j].dom(&set[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of every member of one front, in input order.
///
/// Boundary members of each objective get `+inf`; interior members add the
/// normalised gap between their neighbours. Objectives with zero range add
/// nothing. Fronts of at most two members are all boundary.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let d = front[0].dim();
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..d {
        let key = |i: usize| front[i].values()[m];
        order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = key(order[n - 1]) - key(order[0]);
        if range <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            dist[w[1]] += (key(w[2]) - key(w[0])) / range;
        }
    }
    dist
}
