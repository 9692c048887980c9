//! Arc-indexed graph representation.
//!
//! A graph on `n` vertices with `m` undirected edges is stored as `2m`
//! directed arcs. Vertex `v`'s arcs occupy the contiguous index range
//! `[offsets[v], offsets[v+1])`; the arc at `(v, port)` has global index
//! `offsets[v] + port`. Every arc has a partner — the reverse arc of the
//! same edge — and the partner map is a fixed-point-free involution.
//!
//! Port semantics are part of the public contract:
//!
//! * torus grid: ports `(↑, ↓, ←, →)` in that order, `↑` increments `y`,
//!   `→` increments `x`, both modulo the side length;
//! * hypercube: port `c` crosses bit `c`, so `partner((v, c)) = (v ^ 2^c, c)`;
//! * everything else: ports in ascending neighbor order.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::marked::{Group, MarkedConfig};

pub type VertexId = usize;
pub type ArcId = usize;
pub type Port = usize;

/// Torus-grid port indices, in the documented `(↑, ↓, ←, →)` order.
pub mod grid_port {
    use super::Port;
    pub const UP: Port = 0;
    pub const DOWN: Port = 1;
    pub const LEFT: Port = 2;
    pub const RIGHT: Port = 3;
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("attachment count {count} at block vertex {vertex} exceeds clique size {clique_size}")]
    AttachmentExceedsClique {
        vertex: VertexId,
        count: usize,
        clique_size: usize,
    },
}

/// A `(vertex, port)` pair naming one directed arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ArcRef {
    pub vertex: VertexId,
    pub port: Port,
}

impl fmt::Display for ArcRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vertex, self.port)
    }
}

/// Which constructor produced a graph, with its parameters. Recorded in
/// snapshot and time-series headers.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphFamily {
    TorusGrid {
        side: usize,
    },
    Hypercube {
        dim: usize,
    },
    Complete {
        size: usize,
    },
    CliqueGadget {
        block_edges: Vec<(VertexId, VertexId)>,
        attachments: Vec<usize>,
        clique_size: usize,
    },
    General,
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::TorusGrid { .. } => "torus-grid",
            GraphFamily::Hypercube { .. } => "hypercube",
            GraphFamily::Complete { .. } => "complete",
            GraphFamily::CliqueGadget { .. } => "clique-gadget",
            GraphFamily::General => "general",
        }
    }

    /// `(key, value)` parameter pairs for text headers.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        match self {
            GraphFamily::TorusGrid { side } => vec![("side", side.to_string())],
            GraphFamily::Hypercube { dim } => vec![("dim", dim.to_string())],
            GraphFamily::Complete { size } => vec![("size", size.to_string())],
            GraphFamily::CliqueGadget {
                block_edges,
                attachments,
                clique_size,
            } => {
                let edges = block_edges
                    .iter()
                    .map(|(u, v)| format!("{u}-{v}"))
                    .collect::<Vec<_>>()
                    .join(",");
                let att = attachments
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                vec![
                    ("block-edges", edges),
                    ("attachments", att),
                    ("clique-size", clique_size.to_string()),
                ]
            }
            GraphFamily::General => vec![],
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for (k, v) in self.params() {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Immutable arc-indexed graph. Safe to share across threads behind `Arc`.
#[derive(Clone, Debug)]
pub struct Graph {
    family: GraphFamily,
    /// Prefix sums of vertex degrees; `offsets[n] == arc_count`.
    offsets: Vec<usize>,
    /// Owning vertex of each arc.
    owner: Vec<VertexId>,
    /// Reverse arc of each arc; fixed-point-free involution.
    partner: Vec<ArcId>,
}

impl Graph {
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn arc_count(&self) -> usize {
        self.partner.len()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Global indices of `v`'s arcs.
    pub fn arcs_at(&self, v: VertexId) -> std::ops::Range<ArcId> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn arc_index(&self, v: VertexId, port: Port) -> ArcId {
        assert!(port < self.degree(v), "port {port} out of range at vertex {v}");
        self.offsets[v] + port
    }

    pub fn arc_ref(&self, arc: ArcId) -> ArcRef {
        let vertex = self.owner[arc];
        ArcRef {
            vertex,
            port: arc - self.offsets[vertex],
        }
    }

    pub fn partner(&self, arc: ArcId) -> ArcId {
        self.partner[arc]
    }

    /// Vertex the arc leaves from.
    pub fn tail(&self, arc: ArcId) -> VertexId {
        self.owner[arc]
    }

    /// Vertex the arc points to (= tail of its partner).
    pub fn head(&self, arc: ArcId) -> VertexId {
        self.owner[self.partner[arc]]
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.arcs_at(v).map(move |arc| self.head(arc))
    }

    /// The arc leaving `u` toward `v`, if the edge exists.
    pub fn arc_between(&self, u: VertexId, v: VertexId) -> Option<ArcId> {
        self.arcs_at(u).find(|&arc| self.head(arc) == v)
    }

    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.arc_between(u, v).is_some()
    }

    pub fn family(&self) -> &GraphFamily {
        &self.family
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn owners(&self) -> &[VertexId] {
        &self.owner
    }

    pub(crate) fn partners(&self) -> &[ArcId] {
        &self.partner
    }

    /// True when both graphs have the same arc structure (used to reject
    /// cross-graph state operations). Pointer equality short-circuits the
    /// structural comparison.
    pub fn same_structure(&self, other: &Graph) -> bool {
        std::ptr::eq(self, other) || (self.offsets == other.offsets && self.partner == other.partner)
    }

    /// Torus grid of `side x side` vertices (`side >= 3`). Vertex `(x, y)`
    /// has id `y*side + x`; ports follow [`grid_port`]. Wrap-around is
    /// modulo `side` in both directions.
    pub fn torus_grid(side: usize) -> Result<Graph, GraphError> {
        if side < 3 {
            return Err(GraphError::InvalidParameter(format!(
                "torus grid needs side >= 3, got {side}"
            )));
        }
        let n = side * side;
        let offsets: Vec<usize> = (0..=n).map(|v| 4 * v).collect();
        let mut owner = vec![0; 4 * n];
        let mut partner = vec![0; 4 * n];
        for y in 0..side {
            for x in 0..side {
                let v = grid_vertex(side, x, y);
                let up = grid_vertex(side, x, (y + 1) % side);
                let down = grid_vertex(side, x, (y + side - 1) % side);
                let left = grid_vertex(side, (x + side - 1) % side, y);
                let right = grid_vertex(side, (x + 1) % side, y);
                let base = 4 * v;
                owner[base..base + 4].fill(v);
                partner[base + grid_port::UP] = 4 * up + grid_port::DOWN;
                partner[base + grid_port::DOWN] = 4 * down + grid_port::UP;
                partner[base + grid_port::LEFT] = 4 * left + grid_port::RIGHT;
                partner[base + grid_port::RIGHT] = 4 * right + grid_port::LEFT;
            }
        }
        Ok(Graph {
            family: GraphFamily::TorusGrid { side },
            offsets,
            owner,
            partner,
        })
    }

    /// `dim`-dimensional hypercube on `2^dim` vertices. Port `c` crosses
    /// bit `c`: `partner((v, c)) = (v ^ 2^c, c)`.
    pub fn hypercube(dim: usize) -> Result<Graph, GraphError> {
        if dim == 0 {
            return Err(GraphError::InvalidParameter(
                "hypercube needs dim >= 1".into(),
            ));
        }
        let n = 1usize
            .checked_shl(dim as u32)
            .filter(|_| dim < usize::BITS as usize)
            .ok_or_else(|| {
                GraphError::InvalidParameter(format!("hypercube dim {dim} overflows vertex index"))
            })?;
        let arcs = n.checked_mul(dim).ok_or_else(|| {
            GraphError::InvalidParameter(format!("hypercube dim {dim} overflows arc index"))
        })?;
        let offsets: Vec<usize> = (0..=n).map(|v| dim * v).collect();
        let mut owner = vec![0; arcs];
        let mut partner = vec![0; arcs];
        for v in 0..n {
            let base = dim * v;
            owner[base..base + dim].fill(v);
            for c in 0..dim {
                partner[base + c] = dim * (v ^ (1 << c)) + c;
            }
        }
        Ok(Graph {
            family: GraphFamily::Hypercube { dim },
            offsets,
            owner,
            partner,
        })
    }

    /// Complete graph on `size >= 2` vertices.
    pub fn complete(size: usize) -> Result<Graph, GraphError> {
        if size < 2 {
            return Err(GraphError::InvalidParameter(format!(
                "complete graph needs size >= 2, got {size}"
            )));
        }
        let mut edges = Vec::with_capacity(size * (size - 1) / 2);
        for u in 0..size {
            for v in u + 1..size {
                edges.push((u, v));
            }
        }
        assemble(size, &edges, GraphFamily::Complete { size })
    }

    /// Marked block plus per-vertex attachments into fresh complete graphs.
    ///
    /// `block_edges` describes a connected graph on vertices `0..b` (the
    /// marked set). For each block vertex `i`, a fresh complete graph of
    /// `clique_size` vertices is created and `i` is joined to its first
    /// `attachments[i]` vertices, so `degree(i) = block_degree(i) +
    /// attachments[i]`. Returns the composite graph and its marked set;
    /// when the block is a single edge or itself a clique, the marked set
    /// carries the corresponding declared partition.
    pub fn clique_gadget(
        block_edges: &[(VertexId, VertexId)],
        attachments: &[usize],
        clique_size: usize,
    ) -> Result<(Graph, MarkedConfig), GraphError> {
        if block_edges.is_empty() {
            return Err(GraphError::InvalidParameter("empty marked block".into()));
        }
        if clique_size == 0 {
            return Err(GraphError::InvalidParameter(
                "clique size must be >= 1".into(),
            ));
        }
        let b = block_edges
            .iter()
            .map(|&(u, v)| u.max(v))
            .max()
            .unwrap()
            + 1;
        if attachments.len() != b {
            return Err(GraphError::InvalidParameter(format!(
                "block has {b} vertices but {} attachment counts given",
                attachments.len()
            )));
        }
        for (vertex, &count) in attachments.iter().enumerate() {
            if count == 0 {
                return Err(GraphError::InvalidParameter(format!(
                    "attachment count at block vertex {vertex} must be >= 1"
                )));
            }
            if count > clique_size {
                return Err(GraphError::AttachmentExceedsClique {
                    vertex,
                    count,
                    clique_size,
                });
            }
        }
        if !block_connected(b, block_edges) {
            return Err(GraphError::InvalidParameter(
                "marked block is not connected".into(),
            ));
        }

        let mut edges = block_edges.to_vec();
        for (i, &count) in attachments.iter().enumerate() {
            let base = b + i * clique_size;
            for p in 0..clique_size {
                for q in p + 1..clique_size {
                    edges.push((base + p, base + q));
                }
            }
            for t in 0..count {
                edges.push((i, base + t));
            }
        }
        let n = b + b * clique_size;
        let graph = assemble(
            n,
            &edges,
            GraphFamily::CliqueGadget {
                block_edges: block_edges.to_vec(),
                attachments: attachments.to_vec(),
                clique_size,
            },
        )?;

        let block_vertices: Vec<VertexId> = (0..b).collect();
        let pair_count = b * (b - 1) / 2;
        let marked = if block_edges.len() == 1 {
            let (u, v) = block_edges[0];
            MarkedConfig::with_partition(&graph, vec![Group::Pair(u.min(v), u.max(v))])
        } else if b >= 3 && block_edges.len() == pair_count {
            MarkedConfig::with_partition(&graph, vec![Group::Clique(block_vertices)])
        } else {
            MarkedConfig::new(&graph, &block_vertices)
        }
        .expect("gadget marked set is valid by construction");
        Ok((graph, marked))
    }

    /// Build from an explicit edge list. Vertices are labeled `0..=max`,
    /// ports in ascending neighbor order. Self-loops and duplicate edges
    /// are rejected with the offending pair.
    pub fn from_edge_list(edges: &[(VertexId, VertexId)]) -> Result<Graph, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::InvalidParameter("empty edge list".into()));
        }
        let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
        assemble(n, edges, GraphFamily::General)
    }

    /// Build from edge-list text: one `u v` pair per line, `#` comments
    /// and blank lines ignored.
    pub fn from_edge_list_text(text: &str) -> Result<Graph, GraphError> {
        Graph::from_edge_list(&parse_edge_list(text)?)
    }

    /// Edge-list text for this graph: one `u v` line per edge (`u < v`),
    /// ascending. Parsing it back reproduces the adjacency structure,
    /// though family-specific port orders are not preserved.
    pub fn edge_list_text(&self) -> String {
        let mut out = String::new();
        for u in 0..self.num_vertices() {
            let mut heads: Vec<VertexId> = self.neighbors(u).filter(|&v| v > u).collect();
            heads.sort_unstable();
            for v in heads {
                out.push_str(&format!("{u} {v}\n"));
            }
        }
        out
    }
}

/// Vertex id of grid coordinate `(x, y)`.
pub fn grid_vertex(side: usize, x: usize, y: usize) -> VertexId {
    debug_assert!(x < side && y < side);
    y * side + x
}

/// Inverse of [`grid_vertex`].
pub fn grid_coords(side: usize, v: VertexId) -> (usize, usize) {
    (v % side, v / side)
}

/// Parse edge-list text (`u v` per line, `#` comments, blank lines ok).
pub fn parse_edge_list(text: &str) -> Result<Vec<(VertexId, VertexId)>, GraphError> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut it = content.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<VertexId, GraphError> {
            let tok = tok.ok_or_else(|| GraphError::Parse {
                line,
                msg: "expected two vertex ids".into(),
            })?;
            tok.parse().map_err(|_| GraphError::Parse {
                line,
                msg: format!("invalid vertex id {tok:?}"),
            })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(GraphError::Parse {
                line,
                msg: "trailing tokens after edge".into(),
            });
        }
        edges.push((u, v));
    }
    Ok(edges)
}

fn block_connected(b: usize, edges: &[(VertexId, VertexId)]) -> bool {
    let mut adj = vec![Vec::new(); b];
    for &(u, v) in edges {
        if u < b && v < b {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut seen = vec![false; b];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == b
}

/// Shared constructor: validates the edge list, assigns ports in ascending
/// neighbor order, and wires up the partner involution.
fn assemble(
    n: usize,
    edges: &[(VertexId, VertexId)],
    family: GraphFamily,
) -> Result<Graph, GraphError> {
    let mut canonical: Vec<(VertexId, VertexId)> = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u >= n || v >= n {
            return Err(GraphError::InvalidParameter(format!(
                "edge ({u}, {v}) references vertex >= {n}"
            )));
        }
        canonical.push((u.min(v), u.max(v)));
    }
    canonical.sort_unstable();
    for w in canonical.windows(2) {
        if w[0] == w[1] {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
    }

    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &canonical {
        adj[u].push(v);
        adj[v].push(u);
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for list in &adj {
        offsets.push(offsets.last().unwrap() + list.len());
    }
    let arc_count = *offsets.last().unwrap();
    let mut owner = vec![0; arc_count];
    for (v, list) in adj.iter().enumerate() {
        owner[offsets[v]..offsets[v] + list.len()].fill(v);
    }
    let mut partner = vec![0; arc_count];
    for &(u, v) in &canonical {
        let pu = adj[u].binary_search(&v).expect("neighbor present");
        let pv = adj[v].binary_search(&u).expect("neighbor present");
        let au = offsets[u] + pu;
        let av = offsets[v] + pv;
        partner[au] = av;
        partner[av] = au;
    }
    Ok(Graph {
        family,
        offsets,
        owner,
        partner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_involution(g: &Graph) {
        for arc in 0..g.arc_count() {
            let p = g.partner(arc);
            assert_ne!(p, arc, "partner must be fixed-point-free");
            assert_eq!(g.partner(p), arc, "partner must be an involution");
        }
        let degree_sum: usize = (0..g.num_vertices()).map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * g.num_edges());
    }

    #[test]
    fn torus_grid_counts() {
        let g = Graph::torus_grid(50).unwrap();
        assert_eq!(g.num_vertices(), 2500);
        assert_eq!(g.num_edges(), 5000);
        assert_eq!(g.arc_count(), 10000);
        assert!((0..g.num_vertices()).all(|v| g.degree(v) == 4));
    }

    #[test]
    fn torus_grid_pinned_partners() {
        let g = Graph::torus_grid(50).unwrap();
        let origin = grid_vertex(50, 0, 0);
        let right = g.arc_index(origin, grid_port::RIGHT);
        assert_eq!(
            g.arc_ref(g.partner(right)),
            ArcRef {
                vertex: grid_vertex(50, 1, 0),
                port: grid_port::LEFT
            }
        );
        let up = g.arc_index(origin, grid_port::UP);
        assert_eq!(
            g.arc_ref(g.partner(up)),
            ArcRef {
                vertex: grid_vertex(50, 0, 1),
                port: grid_port::DOWN
            }
        );
    }

    #[test]
    fn torus_grid_neighbors_exhaustive() {
        for side in [3, 4, 7, 10] {
            let g = Graph::torus_grid(side).unwrap();
            assert_involution(&g);
            for y in 0..side {
                for x in 0..side {
                    let v = grid_vertex(side, x, y);
                    let expect = [
                        grid_vertex(side, x, (y + 1) % side),
                        grid_vertex(side, x, (y + side - 1) % side),
                        grid_vertex(side, (x + side - 1) % side, y),
                        grid_vertex(side, (x + 1) % side, y),
                    ];
                    let got: Vec<_> = g.neighbors(v).collect();
                    assert_eq!(got, expect, "side {side}, vertex ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn torus_grid_rejects_small_sides() {
        assert!(matches!(
            Graph::torus_grid(2),
            Err(GraphError::InvalidParameter(_))
        ));
        assert!(Graph::torus_grid(1).is_err());
    }

    #[test]
    fn hypercube_counts_and_partners() {
        let g = Graph::hypercube(10).unwrap();
        assert_eq!(g.num_vertices(), 1024);
        assert_eq!(g.num_edges(), 5120);
        let arc = g.arc_index(0, 0);
        assert_eq!(g.arc_ref(g.partner(arc)), ArcRef { vertex: 1, port: 0 });
        assert!(!g.adjacent(0, 3));
    }

    #[test]
    fn hypercube_hamming_adjacency_exhaustive() {
        for dim in 1..=6 {
            let g = Graph::hypercube(dim).unwrap();
            assert_involution(&g);
            for v in 0..g.num_vertices() {
                for w in 0..g.num_vertices() {
                    let adjacent = g.adjacent(v, w);
                    assert_eq!(adjacent, (v ^ w).count_ones() == 1, "dim {dim}: {v} {w}");
                }
                for c in 0..dim {
                    let arc = g.arc_index(v, c);
                    assert_eq!(g.head(arc), v ^ (1 << c));
                    assert_eq!(g.arc_ref(g.partner(arc)).port, c);
                }
            }
        }
    }

    #[test]
    fn complete_graphs() {
        let g = Graph::complete(5).unwrap();
        assert_eq!(g.num_edges(), 10);
        assert!((0..5).all(|v| g.degree(v) == 4));
        assert_involution(&g);

        let k2 = Graph::complete(2).unwrap();
        assert_eq!(k2.num_edges(), 1);
        assert_eq!(k2.degree(0), 1);
        assert_eq!(k2.degree(1), 1);
        assert_involution(&k2);
    }

    #[test]
    fn gadget_pair_degrees() {
        let (g, marked) = Graph::clique_gadget(&[(0, 1)], &[2, 2], 5).unwrap();
        assert_eq!(g.num_vertices(), 12);
        assert_eq!(g.num_edges(), 1 + 2 * 10 + 4);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(1), 3);
        assert_eq!(marked.vertices(), &[0, 1]);
        assert!(matches!(marked.partition(), Some([Group::Pair(0, 1)])));
        assert_involution(&g);
    }

    #[test]
    fn gadget_unequal_pair_degrees() {
        let (g, _) = Graph::clique_gadget(&[(0, 1)], &[1, 2], 5).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 3);
    }

    #[test]
    fn gadget_triangle_degrees() {
        let triangle = [(0, 1), (0, 2), (1, 2)];
        let (g, marked) = Graph::clique_gadget(&triangle, &[2, 1, 3], 5).unwrap();
        assert_eq!(
            (g.degree(0), g.degree(1), g.degree(2)),
            (4, 3, 5),
            "attachments (2, 1, 3) into size-5 cliques"
        );
        assert!(matches!(marked.partition(), Some([Group::Clique(_)])));

        let (g, _) = Graph::clique_gadget(&triangle, &[2, 1, 4], 5).unwrap();
        assert_eq!((g.degree(0), g.degree(1), g.degree(2)), (4, 3, 6));
        assert_involution(&g);
    }

    #[test]
    fn gadget_rejects_bad_attachments() {
        assert!(matches!(
            Graph::clique_gadget(&[(0, 1)], &[6, 2], 5),
            Err(GraphError::AttachmentExceedsClique {
                vertex: 0,
                count: 6,
                clique_size: 5
            })
        ));
        assert!(Graph::clique_gadget(&[(0, 1)], &[0, 2], 5).is_err());
        assert!(Graph::clique_gadget(&[(0, 1), (2, 3)], &[1, 1, 1, 1], 5).is_err());
    }

    #[test]
    fn edge_list_single_edge() {
        let g = Graph::from_edge_list(&[(0, 1)]).unwrap();
        assert_eq!(g.num_vertices(), 2);
        let arc = g.arc_index(0, 0);
        assert_eq!(g.arc_ref(g.partner(arc)), ArcRef { vertex: 1, port: 0 });
    }

    #[test]
    fn edge_list_triangle() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!((0..3).all(|v| g.degree(v) == 2));
        assert_involution(&g);
    }

    #[test]
    fn edge_list_ports_ascend() {
        let g = Graph::from_edge_list(&[(2, 5), (2, 0), (2, 9), (0, 5)]).unwrap();
        let heads: Vec<_> = g.neighbors(2).collect();
        assert_eq!(heads, vec![0, 5, 9]);
    }

    #[test]
    fn edge_list_rejections() {
        assert!(matches!(
            Graph::from_edge_list(&[(3, 3)]),
            Err(GraphError::SelfLoop(3))
        ));
        assert!(matches!(
            Graph::from_edge_list(&[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(Graph::from_edge_list(&[]).is_err());
    }

    #[test]
    fn edge_list_text_round_trip() {
        let g = Graph::torus_grid(4).unwrap();
        let h = Graph::from_edge_list_text(&g.edge_list_text()).unwrap();
        assert_eq!(h.num_vertices(), g.num_vertices());
        assert_eq!(h.num_edges(), g.num_edges());
        assert_involution(&h);
        for v in 0..g.num_vertices() {
            let mut a: Vec<_> = g.neighbors(v).collect();
            let mut b: Vec<_> = h.neighbors(v).collect();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b, "adjacency of vertex {v}");
        }
    }

    #[test]
    fn parse_edge_list_diagnostics() {
        let parsed = parse_edge_list("# comment\n0 1\n\n2 3 # trailing comment\n").unwrap();
        assert_eq!(parsed, vec![(0, 1), (2, 3)]);
        assert!(matches!(
            parse_edge_list("0 1\n2"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 x"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 2"),
            Err(GraphError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn family_labels() {
        let g = Graph::torus_grid(5).unwrap();
        assert_eq!(g.family().to_string(), "torus-grid side=5");
        let (g, _) = Graph::clique_gadget(&[(0, 1)], &[2, 2], 5).unwrap();
        assert_eq!(
            g.family().to_string(),
            "clique-gadget block-edges=0-1 attachments=2,2 clique-size=5"
        );
    }

    #[test]
    fn same_structure_checks() {
        let a = Graph::torus_grid(4).unwrap();
        let b = Graph::torus_grid(4).unwrap();
        let c = Graph::torus_grid(5).unwrap();
        assert!(a.same_structure(&b));
        assert!(!a.same_structure(&c));
        // Same adjacency, different port order: not the same arc structure.
        let d = Graph::from_edge_list_text(&a.edge_list_text()).unwrap();
        assert!(!a.same_structure(&d));
    }
}
