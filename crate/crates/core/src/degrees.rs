//! Joint-neighbourhood size and induced minimum-degree inequalities for
//! graphs with `δ(G) ≥ (k/(k+1) + ε)n`.
//!
//! For every `j ∈ 1..=k+1` and every `j`-set `J`:
//!
//! * `|N(J)| ≥ ((k+1−j)/(k+1) + jε)·n`
//! * for `j ≤ k`: `δ(G[N(J)]) ≥ ((k−j)/(k−j+1) + ε)·|N(J)|`
//!
//! Small graphs are checked over all `J`; larger ones over a fixed-seed
//! sample of sets per `j`.

use rand::seq::index;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::rng;

/// Slack absorbing floating-point error in the inequality comparisons.
pub const TOLERANCE: f64 = 1e-9;

/// Graphs up to this many vertices are checked over every `J`.
pub const EXHAUSTIVE_LIMIT: usize = 14;

/// Sampled sets per `j` above [`EXHAUSTIVE_LIMIT`].
pub const SAMPLES_PER_SIZE: usize = 10_000;

const SAMPLE_SEED: u64 = 0x4c33_315f_7361_6d70;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegreeCheckError {
    #[error("minimum degree {min_degree} is below the required {required:.4}")]
    PreconditionViolated { min_degree: usize, required: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// Joint neighbourhood size.
    NeighbourhoodSize,
    /// Minimum degree inside the joint neighbourhood.
    InducedDegree,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub inequality: Inequality,
    pub set: Vec<Vertex>,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub exhaustive: bool,
    pub sets_checked: usize,
    pub violations: Vec<Violation>,
}

impl DegreeReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The minimum degree `(k/(k+1) + ε)·n` assumed throughout.
pub fn degree_hypothesis(k: usize, eps: f64, n: usize) -> f64 {
    (k as f64 / (k as f64 + 1.0) + eps) * n as f64
}

/// Checks both inequalities for `j ∈ 1..=k+1` (the second for `j ≤ k`).
pub fn check_joint_neighbourhoods(
    g: &Graph,
    k: usize,
    eps: f64,
) -> Result<DegreeReport, DegreeCheckError> {
    let n = g.n();
    let required = degree_hypothesis(k, eps, n);
    let min_degree = g.min_degree();
    if (min_degree as f64) + TOLERANCE < required {
        return Err(DegreeCheckError::PreconditionViolated { min_degree, required });
    }
    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let mut report = DegreeReport {
        exhaustive,
        sets_checked: 0,
        violations: Vec::new(),
    };
    let mut rng = rng::stream(SAMPLE_SEED);
    for j in 1..=(k + 1).min(n) {
        if exhaustive {
            for_each_subset(n, j, &mut |set| check_set(g, k, eps, set, &mut report));
        } else {
            for _ in 0..SAMPLES_PER_SIZE {
                let mut set = index::sample(&mut rng, n, j).into_vec();
                set.sort_unstable();
                check_set(g, k, eps, &set, &mut report);
            }
        }
    }
    Ok(report)
}

fn check_set(g: &Graph, k: usize, eps: f64, set: &[Vertex], report: &mut DegreeReport) {
    let n = g.n() as f64;
    let j = set.len();
    let (kf, jf) = (k as f64, j as f64);
    report.sets_checked += 1;
    let joint = g.joint_neighborhood(set);
    let size = joint.count_ones(..) as f64;
    let size_bound = ((kf + 1.0 - jf) / (kf + 1.0) + jf * eps) * n;
    if size + TOLERANCE < size_bound {
        report.violations.push(Violation {
            inequality: Inequality::NeighbourhoodSize,
            set: set.to_vec(),
            observed: size,
            bound: size_bound,
        });
    }
    if j <= k {
        let degree_bound = ((kf - jf) / (kf - jf + 1.0) + eps) * size;
        if let Some(d) = g.induced_min_degree(&joint) {
            if (d as f64) + TOLERANCE < degree_bound {
                report.violations.push(Violation {
                    inequality: Inequality::InducedDegree,
                    set: set.to_vec(),
                    observed: d as f64,
                    bound: degree_bound,
                });
            }
        }
    }
}

/// Calls `f` on every `j`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, j: usize, f: &mut impl FnMut(&[Vertex])) {
    if j > n {
        return;
    }
    let mut idx: Vec<usize> = (0..j).collect();
    loop {
        f(&idx);
        let mut i = j;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - j + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for t in i + 1..j {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_is_clean() {
        for k in 0..3 {
            // the largest eps with (k/(k+1) + eps)·9 ≤ 8
            let eps = 1.0 / (k as f64 + 1.0) - 1.0 / 9.0;
            let report = check_joint_neighbourhoods(&Graph::complete(9), k, eps).unwrap();
            assert!(report.exhaustive);
            assert!(report.is_clean(), "{:?}", report.violations);
        }
    }

    #[test]
    fn six_cycle_fails_precondition() {
        assert!(matches!(
            check_joint_neighbourhoods(&Graph::cycle(6), 1, 0.1),
            Err(DegreeCheckError::PreconditionViolated { min_degree: 2, .. })
        ));
    }

    #[test]
    fn subset_enumeration_counts() {
        for (n, j, expected) in [(5, 2, 10), (6, 3, 20), (4, 0, 1), (4, 4, 1), (3, 4, 0)] {
            let mut count = 0;
            for_each_subset(n, j, &mut |_| count += 1);
            assert_eq!(count, expected, "C({n},{j})");
        }
    }

    #[test]
    fn large_graphs_are_sampled() {
        let report = check_joint_neighbourhoods(&Graph::complete(20), 1, 0.4).unwrap();
        assert!(!report.exhaustive);
        assert_eq!(report.sets_checked, 2 * SAMPLES_PER_SIZE);
        assert!(report.is_clean());
    }
}
