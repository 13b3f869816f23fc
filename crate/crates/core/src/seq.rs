//! Power paths, power walks and ordered cliques.

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqKind {
    Walk,
    Path,
}

/// An ordered tuple of pairwise adjacent vertices. The empty tuple is the
/// 0-clique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderedClique(pub Vec<Vertex>);

impl OrderedClique {
    /// Returns `None` unless `vertices` is a clique of `g`.
    pub fn new(g: &Graph, vertices: Vec<Vertex>) -> Option<Self> {
        g.is_clique(&vertices).then_some(Self(vertices))
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn is_disjoint(&self, other: &OrderedClique) -> bool {
        self.0.iter().all(|v| !other.0.contains(v))
    }
}

/// A vertex sequence in which all pairs at sequence distance at most
/// `power` are adjacent. Paths additionally have distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSeq {
    pub vertices: Vec<Vertex>,
    pub power: usize,
    pub kind: SeqKind,
}

impl PowerSeq {
    pub fn path(vertices: Vec<Vertex>, power: usize) -> Self {
        Self {
            vertices,
            power,
            kind: SeqKind::Path,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The first `power` vertices.
    pub fn first_end(&self) -> OrderedClique {
        OrderedClique(self.vertices[..self.power.min(self.len())].to_vec())
    }

    /// The last `power` vertices, in sequence order.
    pub fn last_end(&self) -> OrderedClique {
        let start = self.len().saturating_sub(self.power);
        OrderedClique(self.vertices[start..].to_vec())
    }

    /// Vertices strictly between the two end-sets.
    pub fn internal(&self) -> &[Vertex] {
        if self.len() <= 2 * self.power {
            &[]
        } else {
            &self.vertices[self.power..self.len() - self.power]
        }
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            vertices,
            power: self.power,
            kind: self.kind,
        }
    }

    pub fn is_valid_in(&self, g: &Graph) -> bool {
        is_power_seq(g, &self.vertices, self.power, self.kind)
    }
}

/// Checks the power-sequence invariants of `seq` in `g`:
/// every pair at sequence distance `1..=r` is adjacent, any `r` consecutive
/// vertices are distinct, and for paths all vertices are distinct.
pub fn is_power_seq(g: &Graph, seq: &[Vertex], r: usize, kind: SeqKind) -> bool {
    if seq.iter().any(|&v| v >= g.n()) {
        return false;
    }
    if kind == SeqKind::Path {
        let mut seen = vec![false; g.n()];
        for &v in seq {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
    }
    for i in 0..seq.len() {
        for j in i + 1..seq.len().min(i + r.max(1)) {
            // any r consecutive entries are distinct
            if seq[i] == seq[j] {
                return false;
            }
        }
        for d in 1..=r {
            match seq.get(i + d) {
                Some(&w) if !g.has_edge(seq[i], w) => return false,
                Some(_) => {}
                None => break,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_path_in_complete_graph() {
        assert!(is_power_seq(&Graph::complete(5), &[0, 1, 2, 3, 4], 2, SeqKind::Path));
    }

    #[test]
    fn square_path_fails_on_plain_path() {
        assert!(!is_power_seq(&Graph::path(5), &[0, 1, 2, 3, 4], 2, SeqKind::Path));
        assert!(is_power_seq(&Graph::path(5), &[0, 1, 2, 3, 4], 1, SeqKind::Path));
    }

    #[test]
    fn repeated_vertex_is_not_a_path() {
        let k4 = Graph::complete(4);
        assert!(!is_power_seq(&k4, &[0, 1, 2, 0], 2, SeqKind::Path));
        // a 2-walk may come back once the window has passed
        assert!(is_power_seq(&k4, &[0, 1, 2, 0], 2, SeqKind::Walk));
        assert!(!is_power_seq(&k4, &[0, 1, 0], 2, SeqKind::Walk));
    }

    #[test]
    fn end_sets() {
        let p = PowerSeq::path(vec![4, 3, 2, 1, 0], 2);
        assert_eq!(p.first_end().0, vec![4, 3]);
        assert_eq!(p.last_end().0, vec![1, 0]);
        assert_eq!(p.internal(), &[2]);
        assert_eq!(p.reversed().first_end().0, vec![0, 1]);
    }
}
