//! Dense-matrix oracle for the walk operators, built straight from their
//! definitions rather than from the CSR kernels. Intended for graphs with
//! at most a few hundred arcs; everything is O(arcs^2) or worse.

use qwalk_core::{Graph, VertexId};

pub type Matrix = Vec<Vec<f64>>;

/// Diagonal sign flip on arcs owned by marked vertices.
pub fn query_matrix(graph: &Graph, marked: &[VertexId]) -> Matrix {
    let n = graph.arc_count();
    let mut m = vec![vec![0.0; n]; n];
    for (arc, row) in m.iter_mut().enumerate() {
        let sign = if marked.contains(&graph.tail(arc)) {
            -1.0
        } else {
            1.0
        };
        row[arc] = sign;
    }
    m
}

/// Block-diagonal Grover diffusion: within the block of a degree-d
/// vertex, entries are 2/d minus the identity.
pub fn coin_matrix(graph: &Graph) -> Matrix {
    let n = graph.arc_count();
    let mut m = vec![vec![0.0; n]; n];
    for v in 0..graph.num_vertices() {
        let d = graph.degree(v) as f64;
        for i in graph.arcs_at(v) {
            for j in graph.arcs_at(v) {
                m[i][j] = 2.0 / d - if i == j { 1.0 } else { 0.0 };
            }
        }
    }
    m
}

/// Permutation sending each arc's amplitude to its partner arc.
pub fn shift_matrix(graph: &Graph) -> Matrix {
    let n = graph.arc_count();
    let mut m = vec![vec![0.0; n]; n];
    for arc in 0..n {
        m[graph.partner(arc)][arc] = 1.0;
    }
    m
}

/// The full step: shift * coin * query.
pub fn step_matrix(graph: &Graph, marked: &[VertexId]) -> Matrix {
    matmul(
        &shift_matrix(graph),
        &matmul(&coin_matrix(graph), &query_matrix(graph, marked)),
    )
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            for (j, &bkj) in b[k].iter().enumerate() {
                out[i][j] += aik * bkj;
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn apply(a: &Matrix, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

/// Largest absolute entry of `a - I`.
pub fn deviation_from_identity(a: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((x - target).abs());
        }
    }
    worst
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
