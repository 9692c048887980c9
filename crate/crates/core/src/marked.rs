//! Marked-vertex sets, optionally with a declared pair/clique partition.

use thiserror::Error;

use crate::graphs::{Graph, VertexId};

#[derive(Debug, Error)]
pub enum MarkedError {
    #[error("marked vertex {vertex} out of range (graph has {vertices} vertices)")]
    OutOfRange { vertex: VertexId, vertices: usize },
    #[error("marked vertex {0} listed twice")]
    Duplicate(VertexId),
    #[error("pair ({0}, {1}) is not an edge")]
    PairNotAnEdge(VertexId, VertexId),
    #[error("clique group {0:?} is not mutually adjacent ({1} and {2} are not neighbors)")]
    NotAClique(Vec<VertexId>, VertexId, VertexId),
    #[error("clique group {0:?} needs at least 3 vertices")]
    GroupTooSmall(Vec<VertexId>),
}

/// One partition group: an adjacent pair or a clique of `k >= 3` vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    Pair(VertexId, VertexId),
    Clique(Vec<VertexId>),
}

impl Group {
    pub fn iter(&self) -> GroupIter<'_> {
        match self {
            Group::Pair(u, v) => GroupIter::Pair([*u, *v], 0),
            Group::Clique(vs) => GroupIter::Clique(vs.iter()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Group::Pair(_, _) => 2,
            Group::Clique(vs) => vs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Group::Pair(u, v) => write!(f, "pair({u},{v})"),
            Group::Clique(vs) => {
                write!(f, "clique(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub enum GroupIter<'a> {
    Pair([VertexId; 2], usize),
    Clique(std::slice::Iter<'a, VertexId>),
}

impl Iterator for GroupIter<'_> {
    type Item = VertexId;

    fn next(&mut self) -> Option<VertexId> {
        match self {
            GroupIter::Pair(pair, idx) => {
                let out = pair.get(*idx).copied();
                *idx += 1;
                out
            }
            GroupIter::Clique(it) => it.next().copied(),
        }
    }
}

/// Validated marked set. Vertices are distinct and in range; a declared
/// partition, if present, consists of vertex-disjoint groups covering the
/// set, each group an edge (pairs) or mutually adjacent (cliques).
///
/// Pair groups are *not* required to have equal-degree endpoints here;
/// that is a precondition of the stationary-state constructors, which
/// report it as their own error.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedConfig {
    vertices: Vec<VertexId>,
    partition: Option<Vec<Group>>,
}

impl MarkedConfig {
    /// Marked set without a declared partition. The empty set is allowed
    /// (the query operator degenerates to the identity).
    pub fn new(graph: &Graph, vertices: &[VertexId]) -> Result<MarkedConfig, MarkedError> {
        let sorted = check_vertices(graph, vertices.iter().copied())?;
        Ok(MarkedConfig {
            vertices: sorted,
            partition: None,
        })
    }

    /// Marked set given directly by its partition; the marked vertices are
    /// the union of the groups.
    pub fn with_partition(graph: &Graph, groups: Vec<Group>) -> Result<MarkedConfig, MarkedError> {
        let sorted = check_vertices(graph, groups.iter().flat_map(|g| g.iter()))?;
        for group in &groups {
            match group {
                Group::Pair(u, v) => {
                    if !graph.adjacent(*u, *v) {
                        return Err(MarkedError::PairNotAnEdge(*u, *v));
                    }
                }
                Group::Clique(vs) => {
                    if vs.len() < 3 {
                        return Err(MarkedError::GroupTooSmall(vs.clone()));
                    }
                    for (i, &u) in vs.iter().enumerate() {
                        for &v in &vs[i + 1..] {
                            if !graph.adjacent(u, v) {
                                return Err(MarkedError::NotAClique(vs.clone(), u, v));
                            }
                        }
                    }
                }
            }
        }
        Ok(MarkedConfig {
            vertices: sorted,
            partition: Some(groups),
        })
    }

    pub fn empty() -> MarkedConfig {
        MarkedConfig {
            vertices: Vec::new(),
            partition: None,
        }
    }

    /// Marked vertices, ascending.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn partition(&self) -> Option<&[Group]> {
        self.partition.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Total number of arcs owned by marked vertices.
    pub fn marked_arc_count(&self, graph: &Graph) -> usize {
        self.vertices.iter().map(|&v| graph.degree(v)).sum()
    }
}

fn check_vertices(
    graph: &Graph,
    vertices: impl Iterator<Item = VertexId>,
) -> Result<Vec<VertexId>, MarkedError> {
    let mut sorted: Vec<VertexId> = vertices.collect();
    for &v in &sorted {
        if v >= graph.num_vertices() {
            return Err(MarkedError::OutOfRange {
                vertex: v,
                vertices: graph.num_vertices(),
            });
        }
    }
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(MarkedError::Duplicate(w[0]));
        }
    }
    Ok(sorted)
}
