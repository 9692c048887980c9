//! Stationary states of the search step.
//!
//! A stationary state is a uniform baseline `a` on every arc, corrected on
//! marked-internal edges: both arcs of a corrected edge `e` carry
//! amplitude `-a*l_e`. Such a state is fixed by the full step exactly when
//!
//! 1. all amplitudes at unmarked vertices are equal,
//! 2. the amplitudes at each marked vertex sum to zero,
//! 3. partner arcs carry equal amplitudes.
//!
//! (The query flips marked blocks, the coin then reflects them back
//! because their mean is zero, unmarked blocks are fixed by the coin
//! because they are constant, and the shift is absorbed by partner
//! symmetry.)
//!
//! Condition 2 over a marked group of internal degree `k-1` reads
//! `sum_{e at v} l_e = d'_v` with `d'_v = degree(v) - (k-1)`. The
//! constructors solve that system in closed form for pairs (`l = d - 1`)
//! and triangles (`l_ij = (d_i + d_j - d_k)/2 - 1`), by reduction for
//! larger cliques, and by least squares for arbitrary marked subgraphs.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{ArcId, Graph, VertexId};
use crate::marked::{Group, MarkedConfig, MarkedError};
use crate::walk::{WalkError, WalkState};

/// Default stationarity tolerance, scaled by the state norm.
pub const DEFAULT_STATIONARITY_TOL: f64 = 1e-12;

/// Default marked-set size cap for the partition search.
pub const DEFAULT_PARTITION_CAP: usize = 20;

/// Relative residual below which the least-squares system counts as
/// solved exactly.
const SOLVE_FEASIBLE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum StationaryError {
    #[error("vertices {0} and {1} are not adjacent")]
    NotAnEdge(VertexId, VertexId),
    #[error("pair ({i}, {j}) has mismatched degrees ({di} != {dj})")]
    DegreeMismatch {
        i: VertexId,
        j: VertexId,
        di: usize,
        dj: usize,
    },
    #[error("vertices {0:?} do not form a clique ({1} and {2} are not adjacent)")]
    NotAClique(Vec<VertexId>, VertexId, VertexId),
    #[error("a group needs at least 2 vertices")]
    GroupTooSmall,
    #[error("marked set declares no partition")]
    NoPartition,
    #[error("partition group {index}: {source}")]
    PartitionGroup {
        index: usize,
        #[source]
        source: Box<StationaryError>,
    },
    #[error("marked set of {size} vertices exceeds partition search cap {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("baseline amplitude must be positive and finite, got {0}")]
    InvalidBaseline(f64),
    #[error(transparent)]
    Marked(#[from] MarkedError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// Correction on one marked-internal edge: both arcs carry `-a * weight`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeCorrection {
    /// Edge endpoints, `u < v`.
    pub edge: (VertexId, VertexId),
    /// The arc from `u` to `v` and its partner.
    pub arcs: (ArcId, ArcId),
    /// Correction weight `l`. Zero still overrides the baseline: the arc
    /// amplitude is `-a*l = 0`, not `a`.
    pub weight: f64,
}

/// Uniform baseline plus per-edge corrections; see the module docs.
#[derive(Clone, Debug)]
pub struct StationaryState {
    graph: Arc<Graph>,
    baseline: f64,
    /// Sorted by edge endpoints.
    corrections: Vec<EdgeCorrection>,
}

#[derive(Serialize)]
struct ExportDoc<'a> {
    baseline: f64,
    corrections: &'a [EdgeCorrection],
}

impl StationaryState {
    fn new(graph: &Arc<Graph>, baseline: f64, mut corrections: Vec<EdgeCorrection>) -> Self {
        corrections.sort_by_key(|c| c.edge);
        StationaryState {
            graph: Arc::clone(graph),
            baseline,
            corrections,
        }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// Corrections in canonical edge order.
    pub fn corrections(&self) -> &[EdgeCorrection] {
        &self.corrections
    }

    /// Correction weights in canonical edge order.
    pub fn weights(&self) -> Vec<f64> {
        self.corrections.iter().map(|c| c.weight).collect()
    }

    /// Endpoints of corrected edges, ascending. For constructor outputs
    /// this is exactly the marked set the state was built for.
    pub fn marked_vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self
            .corrections
            .iter()
            .flat_map(|c| [c.edge.0, c.edge.1])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn to_walk_state(&self) -> WalkState {
        let mut amp = vec![self.baseline; self.graph.arc_count()];
        for c in &self.corrections {
            let value = -self.baseline * c.weight;
            amp[c.arcs.0] = value;
            amp[c.arcs.1] = value;
        }
        WalkState::from_amplitudes(&self.graph, amp).expect("amplitude count matches arc count")
    }

    /// Residual check against the step built from this state's own marked
    /// set.
    pub fn verify(&self, tol: f64) -> StationarityReport {
        let marked = MarkedConfig::new(&self.graph, &self.marked_vertices())
            .expect("correction endpoints are valid, distinct vertices");
        is_stationary(&self.to_walk_state(), &marked, tol)
            .expect("marked set belongs to this graph")
    }

    /// JSON document: baseline and `(edge, arcs, weight)` corrections in
    /// canonical edge order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ExportDoc {
            baseline: self.baseline,
            corrections: &self.corrections,
        })
        .expect("plain data serializes")
    }
}

/// `1/sqrt(2m)`: the baseline that matches the uniform state.
pub fn uniform_baseline(graph: &Graph) -> f64 {
    1.0 / (graph.arc_count() as f64).sqrt()
}

fn check_baseline(a: f64) -> Result<(), StationaryError> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(StationaryError::InvalidBaseline(a))
    }
}

fn check_vertex_range(graph: &Graph, vs: &[VertexId]) -> Result<(), StationaryError> {
    for &v in vs {
        if v >= graph.num_vertices() {
            return Err(MarkedError::OutOfRange {
                vertex: v,
                vertices: graph.num_vertices(),
            }
            .into());
        }
    }
    Ok(())
}

fn correction(graph: &Graph, u: VertexId, v: VertexId, weight: f64) -> EdgeCorrection {
    let (u, v) = (u.min(v), u.max(v));
    let arc = graph
        .arc_between(u, v)
        .expect("corrected edge exists by construction");
    EdgeCorrection {
        edge: (u, v),
        arcs: (arc, graph.partner(arc)),
        weight,
    }
}

/// Stationary state for an adjacent, equal-degree marked pair: the two
/// facing arcs carry `-(d-1)a`, everything else stays at `a`.
pub fn pair_state(
    graph: &Arc<Graph>,
    i: VertexId,
    j: VertexId,
    a: f64,
) -> Result<StationaryState, StationaryError> {
    check_baseline(a)?;
    check_vertex_range(graph, &[i, j])?;
    if !graph.adjacent(i, j) {
        return Err(StationaryError::NotAnEdge(i, j));
    }
    let (di, dj) = (graph.degree(i), graph.degree(j));
    if di != dj {
        return Err(StationaryError::DegreeMismatch { i, j, di, dj });
    }
    let weight = (di - 1) as f64;
    Ok(StationaryState::new(
        graph,
        a,
        vec![correction(graph, i, j, weight)],
    ))
}

/// Triangle closed form in terms of vertex-sum targets `r_v`:
/// `l_uv = (r_u + r_v - r_w) / 2`.
fn triangle_weights(r: [f64; 3]) -> [f64; 3] {
    [
        (r[0] + r[1] - r[2]) / 2.0,
        (r[0] + r[2] - r[1]) / 2.0,
        (r[1] + r[2] - r[0]) / 2.0,
    ]
}

/// Stationary state for a marked triangle with arbitrary degrees:
/// `l_ij = (d_i + d_j - d_k)/2 - 1` and cyclically. Weights may be
/// negative or half-integer.
pub fn triangle_state(
    graph: &Arc<Graph>,
    i: VertexId,
    j: VertexId,
    k: VertexId,
    a: f64,
) -> Result<StationaryState, StationaryError> {
    clique_state(graph, &[i, j, k], a)
}

/// Stationary state for a marked clique of any size `k >= 2` and arbitrary
/// degrees. `k = 2` delegates to [`pair_state`] (which requires equal
/// degrees); `k = 3` is the triangle closed form; larger cliques reduce:
/// sort vertex-sum targets ascending (ties by vertex id), give the edge
/// between the two smallest the minimal target as weight, zero the
/// minimal vertex's other edges, subtract, and recurse.
pub fn clique_state(
    graph: &Arc<Graph>,
    vertices: &[VertexId],
    a: f64,
) -> Result<StationaryState, StationaryError> {
    check_baseline(a)?;
    check_vertex_range(graph, vertices)?;
    let k = vertices.len();
    if k < 2 {
        return Err(StationaryError::GroupTooSmall);
    }
    if k == 2 {
        return pair_state(graph, vertices[0], vertices[1], a);
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(StationaryError::Marked(MarkedError::Duplicate(w[0])));
        }
    }
    for (idx, &u) in vertices.iter().enumerate() {
        for &v in &vertices[idx + 1..] {
            if !graph.adjacent(u, v) {
                return Err(StationaryError::NotAClique(vertices.to_vec(), u, v));
            }
        }
    }

    // Vertex-sum targets: external degree d'_v = d_v - (k-1).
    let mut items: Vec<(VertexId, f64)> = vertices
        .iter()
        .map(|&v| (v, (graph.degree(v) - (k - 1)) as f64))
        .collect();
    let mut weights: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    let key = |u: VertexId, v: VertexId| (u.min(v), u.max(v));
    while items.len() > 3 {
        items.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let (v1, r1) = items[0];
        let (v2, _) = items[1];
        weights.insert(key(v1, v2), r1);
        for &(vj, _) in &items[2..] {
            weights.insert(key(v1, vj), 0.0);
        }
        items.remove(0);
        items[0].1 -= r1;
    }
    items.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let tri = triangle_weights([items[0].1, items[1].1, items[2].1]);
    weights.insert(key(items[0].0, items[1].0), tri[0]);
    weights.insert(key(items[0].0, items[2].0), tri[1]);
    weights.insert(key(items[1].0, items[2].0), tri[2]);

    let corrections = weights
        .into_iter()
        .map(|((u, v), w)| correction(graph, u, v, w))
        .collect();
    Ok(StationaryState::new(graph, a, corrections))
}

/// Stationary state for a marked set with a declared partition: the union
/// of each group's corrections. Groups are vertex-disjoint, so the
/// corrections never collide; arcs between different groups keep the
/// baseline.
pub fn partition_state(
    graph: &Arc<Graph>,
    marked: &MarkedConfig,
    a: f64,
) -> Result<StationaryState, StationaryError> {
    check_baseline(a)?;
    let groups = marked.partition().ok_or(StationaryError::NoPartition)?;
    let mut corrections = Vec::new();
    for (index, group) in groups.iter().enumerate() {
        let part = match group {
            Group::Pair(u, v) => pair_state(graph, *u, *v, a),
            Group::Clique(vs) => clique_state(graph, vs, a),
        }
        .map_err(|source| StationaryError::PartitionGroup {
            index,
            source: Box::new(source),
        })?;
        corrections.extend_from_slice(part.corrections());
    }
    Ok(StationaryState::new(graph, a, corrections))
}

/// Residual of the stationarity check `||step(state) - state||`.
#[derive(Clone, Copy, Debug)]
pub struct StationarityReport {
    pub residual: f64,
    /// `tol * ||state||`.
    pub threshold: f64,
    pub stationary: bool,
}

/// Compare `step(state)` against `state`. The tolerance is relative to
/// the state norm.
pub fn is_stationary(
    state: &WalkState,
    marked: &MarkedConfig,
    tol: f64,
) -> Result<StationarityReport, StationaryError> {
    let stepped = state.step(marked)?;
    let residual = state.distance(&stepped)?;
    let threshold = tol * state.norm();
    Ok(StationarityReport {
        residual,
        threshold,
        stationary: residual <= threshold,
    })
}

/// One of the three stationarity conditions, with its worst violation.
#[derive(Clone, Copy, Debug)]
pub struct ConditionCheck {
    pub violation: f64,
    pub pass: bool,
}

/// Per-condition report of the three-part stationarity characterization.
#[derive(Clone, Copy, Debug)]
pub struct ConditionsReport {
    /// Spread (max - min) of amplitudes over arcs at unmarked vertices.
    pub unmarked_uniform: ConditionCheck,
    /// Largest `|sum of amplitudes|` over marked vertices.
    pub marked_sums_zero: ConditionCheck,
    /// Largest `|amp(arc) - amp(partner)|` over all arcs.
    pub partner_symmetric: ConditionCheck,
    pub tol: f64,
}

impl ConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.unmarked_uniform.pass && self.marked_sums_zero.pass && self.partner_symmetric.pass
    }
}

/// Check the three conditions directly on an arbitrary state, with
/// absolute tolerance `tol` on each violation.
pub fn check_general_conditions(
    state: &WalkState,
    marked: &MarkedConfig,
    tol: f64,
) -> Result<ConditionsReport, StationaryError> {
    let graph = state.graph();
    check_vertex_range(graph, marked.vertices())?;
    let amp = state.amplitudes();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any_unmarked = false;
    for v in 0..graph.num_vertices() {
        if marked.contains(v) {
            continue;
        }
        for arc in graph.arcs_at(v) {
            any_unmarked = true;
            lo = lo.min(amp[arc]);
            hi = hi.max(amp[arc]);
        }
    }
    let spread = if any_unmarked { hi - lo } else { 0.0 };

    let mut worst_sum: f64 = 0.0;
    for &v in marked.vertices() {
        let sum: f64 = amp[graph.arcs_at(v)].iter().sum();
        worst_sum = worst_sum.max(sum.abs());
    }

    let mut worst_pair: f64 = 0.0;
    for arc in 0..graph.arc_count() {
        worst_pair = worst_pair.max((amp[arc] - amp[graph.partner(arc)]).abs());
    }

    let check = |violation: f64| ConditionCheck {
        violation,
        pass: violation <= tol,
    };
    Ok(ConditionsReport {
        unmarked_uniform: check(spread),
        marked_sums_zero: check(worst_sum),
        partner_symmetric: check(worst_pair),
        tol,
    })
}

/// Exhaustive backtracking search for a partition of `marked` into
/// adjacent equal-degree pairs and cliques (size >= 3, any degrees).
/// Deterministic: vertices are processed ascending, so the first partition
/// found is stable. Sets larger than [`DEFAULT_PARTITION_CAP`] are
/// rejected; use [`find_exceptional_partition_capped`] to override.
pub fn find_exceptional_partition(
    graph: &Graph,
    marked: &[VertexId],
) -> Result<Option<Vec<Group>>, StationaryError> {
    find_exceptional_partition_capped(graph, marked, DEFAULT_PARTITION_CAP)
}

pub fn find_exceptional_partition_capped(
    graph: &Graph,
    marked: &[VertexId],
    cap: usize,
) -> Result<Option<Vec<Group>>, StationaryError> {
    if marked.len() > cap {
        return Err(StationaryError::TooLarge {
            size: marked.len(),
            cap,
        });
    }
    // Range/duplicate validation.
    let config = MarkedConfig::new(graph, marked)?;
    let mut remaining: Vec<VertexId> = config.vertices().to_vec();
    let mut groups = Vec::new();
    if backtrack(graph, &mut remaining, &mut groups) {
        Ok(Some(groups))
    } else {
        Ok(None)
    }
}

fn backtrack(graph: &Graph, remaining: &mut Vec<VertexId>, groups: &mut Vec<Group>) -> bool {
    let Some(&v) = remaining.first() else {
        return true;
    };

    // Pairs: adjacent, equal degree.
    let mut candidates: Vec<VertexId> = remaining
        .iter()
        .copied()
        .filter(|&u| u != v && graph.adjacent(v, u))
        .collect();
    candidates.sort_unstable();
    for &u in &candidates {
        if graph.degree(u) != graph.degree(v) {
            continue;
        }
        let kept: Vec<VertexId> = remaining
            .iter()
            .copied()
            .filter(|&w| w != v && w != u)
            .collect();
        let mut rest = kept;
        groups.push(Group::Pair(v, u));
        if backtrack(graph, &mut rest, groups) {
            *remaining = rest;
            return true;
        }
        groups.pop();
    }

    // Cliques of size >= 3 containing v, grown in ascending id order.
    let mut clique = vec![v];
    grow_clique(graph, &candidates, &mut clique, remaining, groups)
}

fn grow_clique(
    graph: &Graph,
    candidates: &[VertexId],
    clique: &mut Vec<VertexId>,
    remaining: &mut Vec<VertexId>,
    groups: &mut Vec<Group>,
) -> bool {
    for (idx, &u) in candidates.iter().enumerate() {
        clique.push(u);
        if clique.len() >= 3 {
            let mut rest: Vec<VertexId> = remaining
                .iter()
                .copied()
                .filter(|w| !clique.contains(w))
                .collect();
            groups.push(Group::Clique(clique.clone()));
            if backtrack(graph, &mut rest, groups) {
                *remaining = rest;
                return true;
            }
            groups.pop();
        }
        let narrowed: Vec<VertexId> = candidates[idx + 1..]
            .iter()
            .copied()
            .filter(|&w| graph.adjacent(u, w))
            .collect();
        if grow_clique(graph, &narrowed, clique, remaining, groups) {
            return true;
        }
        clique.pop();
    }
    false
}

/// Outcome of the least-squares construction.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Feasible(StationaryState),
    /// No correction weights satisfy the vertex-sum equations; the
    /// residual is the distance to the closest least-squares fit.
    Infeasible { residual: f64 },
}

/// Solve the vertex-sum equations `sum_{e at v} l_e = d'_v` over all
/// marked-internal edges directly, for an arbitrary marked set. Returns
/// the minimum-norm solution when the system is underdetermined. This
/// generalizes the closed-form constructors: any marked set whose system
/// is consistent gets a stationary state, partition or not.
pub fn solve_correction_weights(
    graph: &Arc<Graph>,
    marked: &MarkedConfig,
    a: f64,
) -> Result<SolveOutcome, StationaryError> {
    check_baseline(a)?;
    check_vertex_range(graph, marked.vertices())?;
    let vertices = marked.vertices();
    let index_of = |v: VertexId| vertices.binary_search(&v).expect("marked vertex");

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            if graph.adjacent(u, v) {
                edges.push((u, v));
            }
        }
    }

    // Vertex-sum targets: degree minus marked-internal degree.
    let mut internal_degree = vec![0usize; vertices.len()];
    for &(u, v) in &edges {
        internal_degree[index_of(u)] += 1;
        internal_degree[index_of(v)] += 1;
    }
    let targets: Vec<f64> = vertices
        .iter()
        .zip(&internal_degree)
        .map(|(&v, &int)| (graph.degree(v) - int) as f64)
        .collect();

    let b = DVector::from_vec(targets);
    if edges.is_empty() {
        let residual = b.norm();
        return Ok(if residual == 0.0 {
            SolveOutcome::Feasible(StationaryState::new(graph, a, Vec::new()))
        } else {
            SolveOutcome::Infeasible { residual }
        });
    }

    let mut incidence = DMatrix::zeros(vertices.len(), edges.len());
    for (col, &(u, v)) in edges.iter().enumerate() {
        incidence[(index_of(u), col)] = 1.0;
        incidence[(index_of(v), col)] = 1.0;
    }

    let svd = incidence.clone().svd(true, true);
    let solution = svd
        .solve(&b, 1e-12)
        .expect("svd computed with both sets of singular vectors");
    let residual = (&incidence * &solution - &b).norm();
    if residual > SOLVE_FEASIBLE_TOL * b.norm().max(1.0) {
        return Ok(SolveOutcome::Infeasible { residual });
    }
    let corrections = edges
        .iter()
        .zip(solution.iter())
        .map(|(&(u, v), &w)| correction(graph, u, v, w))
        .collect();
    Ok(SolveOutcome::Feasible(StationaryState::new(
        graph,
        a,
        corrections,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{grid_port, grid_vertex};
    use approx::assert_abs_diff_eq;

    fn arc(graph: &Graph, side: usize, x: usize, y: usize, port: usize) -> ArcId {
        graph.arc_index(grid_vertex(side, x, y), port)
    }

    #[test]
    fn pair_state_on_grid() {
        let g = Arc::new(Graph::torus_grid(50).unwrap());
        let a = uniform_baseline(&g);
        let (i, j) = (grid_vertex(50, 0, 0), grid_vertex(50, 0, 1));
        let state = pair_state(&g, i, j, a).unwrap();
        assert_eq!(state.weights(), vec![3.0]);

        let phi = state.to_walk_state();
        let up = arc(&g, 50, 0, 0, grid_port::UP);
        let down = arc(&g, 50, 0, 1, grid_port::DOWN);
        assert_eq!(phi.amplitude(up), -3.0 * a);
        assert_eq!(phi.amplitude(down), -3.0 * a);
        let changed = phi.amplitudes().iter().filter(|&&x| x != a).count();
        assert_eq!(changed, 2);

        let report = state.verify(DEFAULT_STATIONARITY_TOL);
        assert!(report.stationary, "residual {}", report.residual);
    }

    #[test]
    fn pair_state_rejections() {
        let g = Arc::new(Graph::torus_grid(50).unwrap());
        let a = uniform_baseline(&g);
        let err = pair_state(&g, grid_vertex(50, 0, 0), grid_vertex(50, 0, 2), a).unwrap_err();
        assert!(matches!(err, StationaryError::NotAnEdge(_, _)));

        let (g, _) = Graph::clique_gadget(&[(0, 1)], &[1, 2], 5).unwrap();
        let g = Arc::new(g);
        let err = pair_state(&g, 0, 1, uniform_baseline(&g)).unwrap_err();
        assert!(matches!(
            err,
            StationaryError::DegreeMismatch {
                di: 2,
                dj: 3,
                ..
            }
        ));

        assert!(matches!(
            pair_state(&g, 0, 1, 0.0),
            Err(StationaryError::InvalidBaseline(_))
        ));
    }

    #[test]
    fn unequal_pair_has_no_stationary_fix() {
        // Degrees (2, 3): force the equal-degree construction anyway and
        // watch it move.
        let (g, marked) = Graph::clique_gadget(&[(0, 1)], &[1, 2], 5).unwrap();
        let g = Arc::new(g);
        let a = uniform_baseline(&g);
        let mut amp = vec![a; g.arc_count()];
        let facing = g.arc_between(0, 1).unwrap();
        amp[facing] = -a * (g.degree(0) - 1) as f64;
        amp[g.partner(facing)] = -a * (g.degree(0) - 1) as f64;
        let naive = WalkState::from_amplitudes(&g, amp).unwrap();

        let config = MarkedConfig::new(&g, marked.vertices()).unwrap();
        let report = is_stationary(&naive, &config, DEFAULT_STATIONARITY_TOL).unwrap();
        assert!(!report.stationary);
        assert!(report.residual > 0.1 * a, "residual {}", report.residual);

        let conditions = check_general_conditions(&naive, &config, 1e-12).unwrap();
        assert!(conditions.unmarked_uniform.pass);
        assert!(!conditions.marked_sums_zero.pass);
        assert!(conditions.partner_symmetric.pass);
    }

    #[test]
    fn triangle_closed_forms() {
        let triangle = [(0, 1), (0, 2), (1, 2)];
        let (g, _) = Graph::clique_gadget(&triangle, &[2, 1, 3], 5).unwrap();
        let g = Arc::new(g);
        let state = triangle_state(&g, 0, 1, 2, uniform_baseline(&g)).unwrap();
        assert_eq!(state.weights(), vec![0.0, 2.0, 1.0]);
        assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);

        // Degrees (4, 3, 6): negative and half-integer weights.
        let (g, _) = Graph::clique_gadget(&triangle, &[2, 1, 4], 5).unwrap();
        let g = Arc::new(g);
        let state = triangle_state(&g, 0, 1, 2, uniform_baseline(&g)).unwrap();
        assert_eq!(state.weights(), vec![-0.5, 2.5, 1.5]);
        assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
    }

    #[test]
    fn isolated_triangle_gets_zero_weights() {
        // Triangle with no external edges, embedded next to a separate
        // component so unmarked arcs exist.
        let g = Arc::new(
            Graph::from_edge_list(&[(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (3, 5)]).unwrap(),
        );
        let a = uniform_baseline(&g);
        let state = triangle_state(&g, 0, 1, 2, a).unwrap();
        assert_eq!(state.weights(), vec![0.0, 0.0, 0.0]);
        // Zero weight still zeroes the arcs; the state is stationary but
        // not uniform.
        let phi = state.to_walk_state();
        assert_eq!(phi.amplitude(g.arc_between(0, 1).unwrap()), 0.0);
        assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
    }

    #[test]
    fn triangle_rejects_non_cliques() {
        let g = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2)]).unwrap());
        let err = triangle_state(&g, 0, 1, 2, 0.1).unwrap_err();
        assert!(matches!(err, StationaryError::NotAClique(_, 0, 2)));
    }

    #[test]
    fn clique_reduction_equal_degrees_is_perfect_matching() {
        // K4 block, one attachment each: all vertex-sum targets equal 1.
        let block = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let (g, _) = Graph::clique_gadget(&block, &[1, 1, 1, 1], 4).unwrap();
        let g = Arc::new(g);
        let state = clique_state(&g, &[0, 1, 2, 3], uniform_baseline(&g)).unwrap();
        let by_edge: BTreeMap<(usize, usize), f64> = state
            .corrections()
            .iter()
            .map(|c| (c.edge, c.weight))
            .collect();
        assert_eq!(by_edge[&(0, 1)], 1.0);
        assert_eq!(by_edge[&(2, 3)], 1.0);
        assert_eq!(by_edge[&(0, 2)], 0.0);
        assert_eq!(by_edge[&(0, 3)], 0.0);
        assert_eq!(by_edge[&(1, 2)], 0.0);
        assert_eq!(by_edge[&(1, 3)], 0.0);
        assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
    }

    #[test]
    fn clique_vertex_sums_hold_exactly() {
        let block = [
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 4),
        ];
        let (g, _) = Graph::clique_gadget(&block, &[3, 1, 4, 1, 5], 6).unwrap();
        let g = Arc::new(g);
        let state = clique_state(&g, &[0, 1, 2, 3, 4], uniform_baseline(&g)).unwrap();
        for v in 0..5 {
            let sum: f64 = state
                .corrections()
                .iter()
                .filter(|c| c.edge.0 == v || c.edge.1 == v)
                .map(|c| c.weight)
                .sum();
            let target = (g.degree(v) - 4) as f64;
            assert_eq!(sum, target, "vertex {v}");
        }
        assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
    }

    #[test]
    fn clique_delegates_small_sizes() {
        let g = Arc::new(Graph::torus_grid(5).unwrap());
        let a = uniform_baseline(&g);
        let (i, j) = (grid_vertex(5, 1, 1), grid_vertex(5, 1, 2));
        let via_clique = clique_state(&g, &[i, j], a).unwrap();
        let via_pair = pair_state(&g, i, j, a).unwrap();
        assert_eq!(via_clique.corrections(), via_pair.corrections());
        assert!(matches!(
            clique_state(&g, &[i], a),
            Err(StationaryError::GroupTooSmall)
        ));
    }

    #[test]
    fn partition_state_two_pairs() {
        let g = Arc::new(Graph::torus_grid(50).unwrap());
        let a = uniform_baseline(&g);
        let groups = vec![
            Group::Pair(grid_vertex(50, 0, 0), grid_vertex(50, 0, 1)),
            Group::Pair(grid_vertex(50, 2, 0), grid_vertex(50, 3, 0)),
        ];
        let marked = MarkedConfig::with_partition(&g, groups).unwrap();
        let state = partition_state(&g, &marked, a).unwrap();
        let phi = state.to_walk_state();

        // The four facing arcs carry a - 4a = -3a; everything else is a.
        let expected = [
            arc(&g, 50, 0, 0, grid_port::UP),
            arc(&g, 50, 0, 1, grid_port::DOWN),
            arc(&g, 50, 2, 0, grid_port::RIGHT),
            arc(&g, 50, 3, 0, grid_port::LEFT),
        ];
        for &arc_id in &expected {
            assert_eq!(phi.amplitude(arc_id), -3.0 * a);
        }
        let changed = phi.amplitudes().iter().filter(|&&x| x != a).count();
        assert_eq!(changed, 4);
        assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);

        // The uniform state differs from the stationary state only on
        // those four arcs.
        let psi0 = WalkState::uniform(&g);
        for arc_id in 0..g.arc_count() {
            let diff = psi0.amplitude(arc_id) - phi.amplitude(arc_id);
            if expected.contains(&arc_id) {
                assert_eq!(diff, 4.0 * a);
            } else {
                assert_eq!(diff, 0.0);
            }
        }
    }

    #[test]
    fn partition_state_needs_partition_and_equal_pairs() {
        let g = Arc::new(Graph::torus_grid(5).unwrap());
        let marked = MarkedConfig::new(&g, &[0, 1]).unwrap();
        assert!(matches!(
            partition_state(&g, &marked, 0.1),
            Err(StationaryError::NoPartition)
        ));

        let (g, marked) = Graph::clique_gadget(&[(0, 1)], &[1, 2], 5).unwrap();
        let g = Arc::new(g);
        let err = partition_state(&g, &marked, uniform_baseline(&g)).unwrap_err();
        match err {
            StationaryError::PartitionGroup { index: 0, source } => {
                assert!(matches!(*source, StationaryError::DegreeMismatch { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn general_conditions_on_healthy_and_broken_states() {
        let g = Arc::new(Graph::torus_grid(5).unwrap());
        let a = uniform_baseline(&g);
        let uniform = WalkState::uniform(&g);
        let empty = MarkedConfig::empty();
        assert!(check_general_conditions(&uniform, &empty, 1e-12)
            .unwrap()
            .all_pass());

        // Break partner symmetry only.
        let mut amp = vec![a; g.arc_count()];
        amp[0] += 0.5;
        let bad = WalkState::from_amplitudes(&g, amp).unwrap();
        let report =
            check_general_conditions(&bad, &MarkedConfig::new(&g, &[g.tail(0)]).unwrap(), 1e-12)
                .unwrap();
        assert!(!report.partner_symmetric.pass);
        assert_abs_diff_eq!(report.partner_symmetric.violation, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn partition_search_on_grids() {
        let g = Graph::torus_grid(50).unwrap();
        let pair = [grid_vertex(50, 0, 0), grid_vertex(50, 0, 1)];
        assert_eq!(
            find_exceptional_partition(&g, &pair).unwrap(),
            Some(vec![Group::Pair(pair[0], pair[1])])
        );

        let apart = [grid_vertex(50, 0, 0), grid_vertex(50, 0, 2)];
        assert_eq!(find_exceptional_partition(&g, &apart).unwrap(), None);

        let four = [
            grid_vertex(50, 0, 0),
            grid_vertex(50, 0, 1),
            grid_vertex(50, 2, 0),
            grid_vertex(50, 3, 0),
        ];
        let groups = find_exceptional_partition(&g, &four).unwrap().unwrap();
        assert_eq!(groups.len(), 2);
        let marked = MarkedConfig::with_partition(&g, groups).unwrap();
        let g = Arc::new(g);
        let state = partition_state(&g, &marked, uniform_baseline(&g)).unwrap();
        assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
    }

    #[test]
    fn partition_search_prefers_listed_order_but_backtracks() {
        // K4 fully marked: pairs win before cliques.
        let g = Graph::complete(4).unwrap();
        let groups = find_exceptional_partition(&g, &[0, 1, 2, 3]).unwrap().unwrap();
        assert_eq!(groups, vec![Group::Pair(0, 1), Group::Pair(2, 3)]);

        // Unequal-degree triangle: pair attempts dead-end, clique wins.
        let triangle = [(0, 1), (0, 2), (1, 2)];
        let (g, _) = Graph::clique_gadget(&triangle, &[2, 1, 3], 5).unwrap();
        let groups = find_exceptional_partition(&g, &[0, 1, 2]).unwrap().unwrap();
        assert_eq!(groups, vec![Group::Clique(vec![0, 1, 2])]);

        // Unequal pair with no clique to fall back on: none.
        let (g, _) = Graph::clique_gadget(&[(0, 1)], &[1, 2], 5).unwrap();
        assert_eq!(find_exceptional_partition(&g, &[0, 1]).unwrap(), None);
    }

    #[test]
    fn partition_search_cap() {
        let g = Graph::complete(22).unwrap();
        let all: Vec<usize> = (0..21).collect();
        assert!(matches!(
            find_exceptional_partition(&g, &all),
            Err(StationaryError::TooLarge { size: 21, cap: 20 })
        ));
        assert!(find_exceptional_partition_capped(&g, &all, 21)
            .unwrap()
            .is_some());
    }

    #[test]
    fn solve_matches_triangle_closed_form() {
        let triangle = [(0, 1), (0, 2), (1, 2)];
        let (g, marked) = Graph::clique_gadget(&triangle, &[2, 1, 3], 5).unwrap();
        let g = Arc::new(g);
        let a = uniform_baseline(&g);
        let config = MarkedConfig::new(&g, marked.vertices()).unwrap();
        match solve_correction_weights(&g, &config, a).unwrap() {
            SolveOutcome::Feasible(state) => {
                let closed = triangle_state(&g, 0, 1, 2, a).unwrap();
                for (got, want) in state.weights().iter().zip(closed.weights()) {
                    assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
                }
                assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
            }
            SolveOutcome::Infeasible { residual } => {
                panic!("triangle system should be solvable, residual {residual}")
            }
        }
    }

    #[test]
    fn solve_handles_paths_beyond_partitions() {
        // Marked path 0-1-2 with external degrees (1, 2, 1): consistent,
        // although no pair/clique partition exists.
        let g = Arc::new(
            Graph::from_edge_list(&[(0, 1), (1, 2), (0, 3), (1, 4), (1, 5), (2, 6)]).unwrap(),
        );
        let config = MarkedConfig::new(&g, &[0, 1, 2]).unwrap();
        assert_eq!(find_exceptional_partition(&g, &[0, 1, 2]).unwrap(), None);
        match solve_correction_weights(&g, &config, uniform_baseline(&g)).unwrap() {
            SolveOutcome::Feasible(state) => {
                let weights = state.weights();
                assert_eq!(weights.len(), 2);
                for w in weights {
                    assert_abs_diff_eq!(w, 1.0, epsilon = 1e-10);
                }
                assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
            }
            SolveOutcome::Infeasible { residual } => panic!("expected feasible, got {residual}"),
        }
    }

    #[test]
    fn solve_reports_infeasibility() {
        let g = Arc::new(Graph::torus_grid(5).unwrap());
        let a = uniform_baseline(&g);
        // Non-adjacent marked vertices: no internal edges at all.
        let apart = MarkedConfig::new(&g, &[grid_vertex(5, 0, 0), grid_vertex(5, 0, 2)]).unwrap();
        match solve_correction_weights(&g, &apart, a).unwrap() {
            SolveOutcome::Infeasible { residual } => {
                assert_abs_diff_eq!(residual, 32.0f64.sqrt(), epsilon = 1e-12);
            }
            SolveOutcome::Feasible(_) => panic!("expected infeasible"),
        }

        // Unequal pair: one unknown, two inconsistent equations.
        let (g, marked) = Graph::clique_gadget(&[(0, 1)], &[1, 2], 5).unwrap();
        let g = Arc::new(g);
        let config = MarkedConfig::new(&g, marked.vertices()).unwrap();
        assert!(matches!(
            solve_correction_weights(&g, &config, uniform_baseline(&g)).unwrap(),
            SolveOutcome::Infeasible { .. }
        ));

        // Empty marked set: trivially feasible, uniform baseline state.
        let empty = MarkedConfig::empty();
        match solve_correction_weights(&g, &empty, uniform_baseline(&g)).unwrap() {
            SolveOutcome::Feasible(state) => {
                assert!(state.corrections().is_empty());
                assert!(state.verify(DEFAULT_STATIONARITY_TOL).stationary);
            }
            SolveOutcome::Infeasible { .. } => panic!("empty set is feasible"),
        }
    }

    #[test]
    fn export_lists_corrections_in_edge_order() {
        let triangle = [(0, 1), (0, 2), (1, 2)];
        let (g, _) = Graph::clique_gadget(&triangle, &[2, 1, 3], 5).unwrap();
        let g = Arc::new(g);
        let state = triangle_state(&g, 2, 0, 1, uniform_baseline(&g)).unwrap();
        let edges: Vec<(usize, usize)> = state.corrections().iter().map(|c| c.edge).collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 2)]);

        let doc: serde_json::Value = serde_json::from_str(&state.to_json()).unwrap();
        assert_eq!(doc["corrections"][1]["edge"], serde_json::json!([0, 2]));
        assert_eq!(doc["corrections"][1]["weight"], serde_json::json!(2.0));
        assert!(doc["baseline"].is_f64());
    }
}
