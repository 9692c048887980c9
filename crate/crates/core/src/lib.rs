//! Discrete-time coined quantum walk search on arbitrary undirected graphs.
//!
//! The walker lives on directed arcs: vertex `v` with degree `d` owns `d`
//! arcs, addressed `(v, c)` with port `0 <= c < d`. One search step applies
//! three operators in sequence:
//!
//! 1. **query** — flips the sign of every amplitude at a marked vertex,
//! 2. **coin** — Grover diffusion within each vertex block
//!    (`x_c -> 2*mean(block) - x_c`),
//! 3. **shift** — flip-flop: each arc swaps amplitude with its partner arc
//!    (the reverse arc of the same edge).
//!
//! All three operators are real orthogonal, so amplitudes are plain `f64`
//! and no complex arithmetic is needed.
//!
//! Besides the simulator, the crate constructs *stationary states* of the
//! search step for marked sets that decompose into adjacent equal-degree
//! pairs and cliques: a uniform baseline `a` on every arc, with corrections
//! `-a*l_e` on both arcs of each marked-internal edge `e`. Such states pin
//! the success probability at its initial `O(d^2/m)` level no matter how
//! long the walk runs; [`bounds`] quantifies the ceiling and [`harness`]
//! reproduces the trajectories showing it.
//!
//! Module map:
//!
//! * [`graphs`] — arc-indexed graph representation and constructors
//!   (torus grid, hypercube, complete graph, clique gadgets, edge lists).
//! * [`marked`] — validated marked-vertex sets with optional declared
//!   pair/clique partitions.
//! * [`walk`] — walk states, the step operators, trajectories. With the
//!   `parallel` feature (default) large states use rayon kernels that are
//!   bit-identical to the sequential fallback.
//! * [`stationary`] — stationary-state constructors (pair, triangle,
//!   clique, partition), the three-condition stationarity check, partition
//!   search, and a least-squares fallback for arbitrary marked subgraphs.
//! * [`bounds`] — closed-form success-probability ceiling for a marked
//!   pair, a brute-force optimizer that cross-checks it, and empirical
//!   trajectory maxima.
//! * [`harness`] — declarative experiment configs, suite runner, CSV/JSON
//!   emission. Output is deterministic: identical configs give
//!   byte-identical files.

pub mod bounds;
pub mod graphs;
pub mod harness;
pub mod marked;
pub mod stationary;
mod textio;
pub mod walk;

pub use graphs::{ArcId, Graph, GraphError, GraphFamily, VertexId};
pub use marked::{Group, MarkedConfig};
pub use stationary::{StationaryError, StationaryState};
pub use walk::{WalkError, WalkState};
