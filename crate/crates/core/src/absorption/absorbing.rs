use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{connect, Absorber, AbsorptionError, PipelineParams};
use crate::augment::AugmentedGraph;
use crate::graph::Vertex;
use crate::seq::{OrderedClique, PowerSeq};

/// A `(k+1)`-path threading a vertex-disjoint absorber family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorbingPath {
    pub path: PowerSeq,
    /// Start position of each absorber in `path`, aligned with `family`.
    pub placements: Vec<usize>,
    pub family: Vec<Absorber>,
}

impl AbsorbingPath {
    pub fn vertex_set(&self, n: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(n);
        for &v in &self.path.vertices {
            set.insert(v);
        }
        set
    }
}

/// Joins the absorbers in index order, each connection avoiding `reserved`,
/// the other absorbers and the path built so far.
pub fn build_absorbing_path(
    h: &AugmentedGraph,
    reserved: &FixedBitSet,
    family: &[Absorber],
    params: &PipelineParams,
) -> Result<AbsorbingPath, AbsorptionError> {
    let n = h.n();
    let r = params.k + 1;
    let first = family
        .first()
        .ok_or(AbsorptionError::AbsorberShortfall {
            x: None,
            count: 0,
            floor: 1,
        })?;
    let mut blocked = reserved.clone();
    blocked.grow(n);
    for a in family {
        for &v in &a.tuple {
            blocked.insert(v);
        }
    }
    let mut vertices = first.tuple.clone();
    let mut placements = vec![0];
    for next in &family[1..] {
        let from = OrderedClique(vertices[vertices.len() - r..].to_vec());
        let to = OrderedClique(next.tuple[..r].to_vec());
        let mut avoid = blocked.clone();
        for &v in from.vertices().iter().chain(to.vertices()) {
            avoid.set(v, false);
        }
        let link = connect(h, &from, &to, &avoid, params)?;
        for &v in link.internal() {
            blocked.insert(v);
        }
        vertices.extend_from_slice(link.internal());
        placements.push(vertices.len());
        vertices.extend_from_slice(&next.tuple);
    }
    let cap = params.absorbing_path_cap(n);
    if vertices.len() > cap {
        return Err(AbsorptionError::PathTooLong {
            len: vertices.len(),
            cap,
        });
    }
    Ok(AbsorbingPath {
        path: PowerSeq::path(vertices, r),
        placements,
        family: family.to_vec(),
    })
}

/// One insertion performed by [`absorb`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Insertion {
    pub x: Vertex,
    /// Index of the absorber in the family.
    pub absorber: usize,
    /// Position of `x` in the sequence right after the insertion.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Absorbed {
    pub path: PowerSeq,
    /// Insertions in the order they were applied.
    pub steps: Vec<Insertion>,
}

/// Inserts `x` right after position `at` of `seq`.
pub fn insert_vertex(seq: &PowerSeq, at: usize, x: Vertex) -> PowerSeq {
    let mut vertices = seq.vertices.clone();
    vertices.insert(at + 1, x);
    PowerSeq { vertices, ..seq.clone() }
}

/// Absorbs every vertex of `u` into a distinct `x`-absorber of `a`.
///
/// Vertices are matched to absorbers by augmenting paths, trying absorbers
/// in index order; the output has the same end-sets as `a.path`.
pub fn absorb(h: &AugmentedGraph, a: &AbsorbingPath, u: &[Vertex]) -> Result<Absorbed, AbsorptionError> {
    let on_path = a.vertex_set(h.n());
    if let Some(&x) = u.iter().find(|&&x| x >= h.n() || on_path.contains(x)) {
        return Err(AbsorptionError::AbsorptionFailure { x });
    }
    let options: Vec<Vec<usize>> = u
        .iter()
        .map(|&x| (0..a.family.len()).filter(|&j| a.family[j].absorbs(&h.det, x)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; a.family.len()];
    for i in 0..u.len() {
        let mut seen = vec![false; a.family.len()];
        if !augment(i, &options, &mut owner, &mut seen) {
            return Err(AbsorptionError::AbsorptionFailure { x: u[i] });
        }
    }
    let k = a.path.power - 1;
    // insert from the back so earlier placements keep their positions
    let mut order: Vec<usize> = (0..a.family.len()).filter(|&j| owner[j].is_some()).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(a.placements[j]));
    let mut path = a.path.clone();
    let mut steps = Vec::new();
    for j in order {
        let x = u[owner[j].unwrap()];
        let at = a.placements[j] + k;
        path = insert_vertex(&path, at, x);
        if !path.is_valid_in(&h.union) || path.first_end() != a.path.first_end() || path.last_end() != a.path.last_end()
        {
            return Err(AbsorptionError::AbsorptionFailure { x });
        }
        steps.push(Insertion {
            x,
            absorber: j,
            position: at + 1,
        });
    }
    Ok(Absorbed { path, steps })
}

fn augment(i: usize, options: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &options[i] {
        if std::mem::replace(&mut seen[j], true) {
            continue;
        }
        if owner[j].is_none_or(|o| augment(o, options, owner, seen)) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::RandomPart;
    use crate::graph::{set_of, Graph};

    fn with_random(det: Graph, rnd_edges: &[(usize, usize)]) -> AugmentedGraph {
        let n = det.n();
        let rnd = Graph::from_edges(n, rnd_edges.iter().copied()).unwrap();
        AugmentedGraph::new(det, RandomPart { graph: rnd, p: 0.0, seed: 0 }).unwrap()
    }

    #[test]
    fn single_absorber_path_is_valid() {
        let h = with_random(Graph::complete(10), &[(1, 2)]);
        let p = PipelineParams::new(1, 0.5, 1.0, 1.0, 0);
        let fam = vec![Absorber {
            tuple: vec![0, 1, 2, 3],
        }];
        let a = build_absorbing_path(&h, &set_of(10, []), &fam, &p).unwrap();
        assert_eq!(a.path.vertices, vec![0, 1, 2, 3]);
        assert!(a.path.is_valid_in(&h.union));
    }

    #[test]
    fn two_absorbers_use_one_connection() {
        let h = with_random(Graph::complete(20), &[(1, 2), (5, 6)]);
        let p = PipelineParams {
            desk: super::super::DeskScale {
                path_length: 100.0,
                ..Default::default()
            },
            ..PipelineParams::new(1, 0.5, 1.0, 1.0, 0)
        };
        let fam = vec![
            Absorber {
                tuple: vec![0, 1, 2, 3],
            },
            Absorber {
                tuple: vec![4, 5, 6, 7],
            },
        ];
        let a = build_absorbing_path(&h, &set_of(20, [19]), &fam, &p).unwrap();
        assert_eq!(a.path.len(), 16);
        assert_eq!(a.placements, vec![0, 12]);
        assert!(a.path.is_valid_in(&h.union));
        assert!(!a.path.vertices.contains(&19));
    }

    #[test]
    fn absorb_empty_and_single() {
        let h = with_random(Graph::complete(10), &[(1, 2)]);
        let a = AbsorbingPath {
            path: PowerSeq::path(vec![0, 1, 2, 3], 2),
            placements: vec![0],
            family: vec![Absorber {
                tuple: vec![0, 1, 2, 3],
            }],
        };
        let same = absorb(&h, &a, &[]).unwrap();
        assert_eq!(same.path, a.path);
        let out = absorb(&h, &a, &[7]).unwrap();
        assert_eq!(out.path.vertices, vec![0, 1, 7, 2, 3]);
        assert!(out.path.is_valid_in(&h.union));
        assert_eq!(out.steps[0].position, 2);
        assert!(matches!(absorb(&h, &a, &[7, 8]), Err(AbsorptionError::AbsorptionFailure { x: 8 })));
        assert!(matches!(absorb(&h, &a, &[1]), Err(AbsorptionError::AbsorptionFailure { x: 1 })));
    }

    #[test]
    fn matching_reassigns_absorbers() {
        // 8 sees only the first absorber, 9 sees both: greedy on 9 first
        // would strand 8
        let mut det = Graph::complete(12);
        det = Graph::from_edges(12, det.edges().filter(|&(u, v)| !(v == 8 && (4..8).contains(&u)))).unwrap();
        let h = with_random(det, &[(1, 2), (5, 6)]);
        let a = AbsorbingPath {
            path: PowerSeq::path((0..8).collect(), 2),
            placements: vec![0, 4],
            family: vec![
                Absorber {
                    tuple: vec![0, 1, 2, 3],
                },
                Absorber {
                    tuple: vec![4, 5, 6, 7],
                },
            ],
        };
        let out = absorb(&h, &a, &[9, 8]).unwrap();
        assert!(out.path.is_valid_in(&h.union));
        assert_eq!(out.path.len(), 10);
        assert_eq!(out.path.first_end(), a.path.first_end());
        assert_eq!(out.path.last_end(), a.path.last_end());
    }
}
