//! Low-level step kernels over raw amplitude buffers.
//!
//! The sequential `*_seq` kernels are always compiled. With the `parallel`
//! feature, rayon `*_par` variants exist as well, and the un-suffixed
//! dispatchers pick the parallel path for buffers of at least
//! [`PAR_THRESHOLD`] arcs.
//!
//! Both paths are bit-identical, and results do not depend on thread
//! count:
//!
//! * coin and shift are elementwise (per-arc or per-vertex-block) maps, so
//!   parallelizing never reassociates a floating-point operation;
//! * reductions fold fixed-size chunks left to right and then combine the
//!   per-chunk partials left to right, in both paths.
//!
//! The query term only touches arcs at marked vertices — a handful in
//! every workload this crate targets — so it is always sequential.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::graphs::{Graph, VertexId};

/// Minimum arc count for which the dispatchers choose the rayon kernels.
pub const PAR_THRESHOLD: usize = 1 << 15;

/// Reduction chunk size. Partials are taken over consecutive chunks of
/// this length and summed in chunk order, making reductions independent of
/// the execution mode.
pub const REDUCE_CHUNK: usize = 4096;

/// Sign-flip every amplitude at a marked vertex.
pub fn query(graph: &Graph, marked: &[VertexId], amp: &mut [f64]) {
    for &v in marked {
        for x in &mut amp[graph.arcs_at(v)] {
            *x = -*x;
        }
    }
}

fn doubled_mean(block: &[f64]) -> f64 {
    if block.is_empty() {
        0.0
    } else {
        2.0 * (block.iter().sum::<f64>() / block.len() as f64)
    }
}

/// Grover diffusion within each vertex block: `x -> 2*mean(block) - x`.
/// `doubled_means` is caller-provided scratch of length `num_vertices`.
pub fn coin_seq(graph: &Graph, doubled_means: &mut [f64], amp: &mut [f64]) {
    let offsets = graph.offsets();
    for (v, slot) in doubled_means.iter_mut().enumerate() {
        *slot = doubled_mean(&amp[offsets[v]..offsets[v + 1]]);
    }
    for (x, &v) in amp.iter_mut().zip(graph.owners()) {
        *x = doubled_means[v] - *x;
    }
}

#[cfg(feature = "parallel")]
pub fn coin_par(graph: &Graph, doubled_means: &mut [f64], amp: &mut [f64]) {
    let offsets = graph.offsets();
    let amp_ro: &[f64] = amp;
    doubled_means
        .par_iter_mut()
        .enumerate()
        .for_each(|(v, slot)| {
            *slot = doubled_mean(&amp_ro[offsets[v]..offsets[v + 1]]);
        });
    let means_ro: &[f64] = doubled_means;
    amp.par_iter_mut()
        .zip(graph.owners().par_iter())
        .for_each(|(x, &v)| {
            *x = means_ro[v] - *x;
        });
}

/// Flip-flop shift as a gather: `dst[i] = src[partner(i)]`.
pub fn shift_seq(graph: &Graph, src: &[f64], dst: &mut [f64]) {
    for (d, &p) in dst.iter_mut().zip(graph.partners()) {
        *d = src[p];
    }
}

#[cfg(feature = "parallel")]
pub fn shift_par(graph: &Graph, src: &[f64], dst: &mut [f64]) {
    dst.par_iter_mut()
        .zip(graph.partners().par_iter())
        .for_each(|(d, &p)| {
            *d = src[p];
        });
}

fn chunk_sum_sq(chunk: &[f64]) -> f64 {
    chunk.iter().map(|x| x * x).sum()
}

fn chunk_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sum_sq_seq(x: &[f64]) -> f64 {
    x.chunks(REDUCE_CHUNK).map(chunk_sum_sq).sum()
}

#[cfg(feature = "parallel")]
pub fn sum_sq_par(x: &[f64]) -> f64 {
    x.par_chunks(REDUCE_CHUNK)
        .map(chunk_sum_sq)
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

pub fn dot_seq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.chunks(REDUCE_CHUNK)
        .zip(b.chunks(REDUCE_CHUNK))
        .map(|(ca, cb)| chunk_dot(ca, cb))
        .sum()
}

#[cfg(feature = "parallel")]
pub fn dot_par(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.par_chunks(REDUCE_CHUNK)
        .zip(b.par_chunks(REDUCE_CHUNK))
        .map(|(ca, cb)| chunk_dot(ca, cb))
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

/// One full step (`query`, `coin`, `shift`) on an owned buffer, sequential.
/// `scratch` must have the same length as `amp`; the buffers are swapped by
/// the shift gather.
pub fn step_seq(
    graph: &Graph,
    marked: &[VertexId],
    amp: &mut Vec<f64>,
    doubled_means: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    query(graph, marked, amp);
    coin_seq(graph, doubled_means, amp);
    shift_seq(graph, amp, scratch);
    std::mem::swap(amp, scratch);
}

/// Parallel counterpart of [`step_seq`] (the query term stays sequential;
/// see module docs).
#[cfg(feature = "parallel")]
pub fn step_par(
    graph: &Graph,
    marked: &[VertexId],
    amp: &mut Vec<f64>,
    doubled_means: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    query(graph, marked, amp);
    coin_par(graph, doubled_means, amp);
    shift_par(graph, amp, scratch);
    std::mem::swap(amp, scratch);
}

/// True when the dispatchers will use the rayon path for this buffer size.
pub fn parallel_active(len: usize) -> bool {
    cfg!(feature = "parallel") && len >= PAR_THRESHOLD
}

pub fn coin(graph: &Graph, doubled_means: &mut [f64], amp: &mut [f64]) {
    #[cfg(feature = "parallel")]
    if parallel_active(amp.len()) {
        return coin_par(graph, doubled_means, amp);
    }
    coin_seq(graph, doubled_means, amp);
}

pub fn shift(graph: &Graph, src: &[f64], dst: &mut [f64]) {
    #[cfg(feature = "parallel")]
    if parallel_active(src.len()) {
        return shift_par(graph, src, dst);
    }
    shift_seq(graph, src, dst);
}

pub fn sum_sq(x: &[f64]) -> f64 {
    #[cfg(feature = "parallel")]
    if parallel_active(x.len()) {
        return sum_sq_par(x);
    }
    sum_sq_seq(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    #[cfg(feature = "parallel")]
    if parallel_active(a.len()) {
        return dot_par(a, b);
    }
    dot_seq(a, b)
}

pub fn step(
    graph: &Graph,
    marked: &[VertexId],
    amp: &mut Vec<f64>,
    doubled_means: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    #[cfg(feature = "parallel")]
    if parallel_active(amp.len()) {
        return step_par(graph, marked, amp, doubled_means, scratch);
    }
    step_seq(graph, marked, amp, doubled_means, scratch);
}
