//! Walk states and the three-operator search step.
//!
//! A [`WalkState`] is a real amplitude vector over the arcs of a shared
//! [`Graph`]. The public operators are value-in/value-out; trajectory
//! loops reuse buffers internally. With the `parallel` feature (default),
//! states with at least [`kernel::PAR_THRESHOLD`] arcs run on rayon
//! kernels; results are bit-identical to the sequential fallback either
//! way (see [`kernel`]).

pub mod kernel;
pub mod snapshot;

use std::sync::Arc;

use thiserror::Error;

use crate::graphs::{ArcId, Graph, VertexId};
use crate::marked::MarkedConfig;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("marked vertex {vertex} out of range (graph has {vertices} vertices)")]
    MarkedOutOfRange { vertex: VertexId, vertices: usize },
    #[error("amplitude vector length {got} does not match arc count {expect}")]
    LengthMismatch { got: usize, expect: usize },
    #[error("states belong to different graphs")]
    GraphMismatch,
}

/// Real amplitude vector over the arcs of a graph, in canonical arc order.
#[derive(Clone, Debug)]
pub struct WalkState {
    graph: Arc<Graph>,
    amp: Vec<f64>,
}

impl WalkState {
    /// Uniform superposition `1/sqrt(2m)` on every arc.
    ///
    /// Panics if the graph has no arcs.
    pub fn uniform(graph: &Arc<Graph>) -> WalkState {
        assert!(graph.arc_count() > 0, "uniform state needs at least one arc");
        let x = 1.0 / (graph.arc_count() as f64).sqrt();
        WalkState {
            graph: Arc::clone(graph),
            amp: vec![x; graph.arc_count()],
        }
    }

    /// Basis state concentrated on a single arc.
    pub fn basis(graph: &Arc<Graph>, arc: ArcId) -> WalkState {
        assert!(arc < graph.arc_count(), "arc {arc} out of range");
        let mut amp = vec![0.0; graph.arc_count()];
        amp[arc] = 1.0;
        WalkState {
            graph: Arc::clone(graph),
            amp,
        }
    }

    pub fn from_amplitudes(graph: &Arc<Graph>, amp: Vec<f64>) -> Result<WalkState, WalkError> {
        if amp.len() != graph.arc_count() {
            return Err(WalkError::LengthMismatch {
                got: amp.len(),
                expect: graph.arc_count(),
            });
        }
        Ok(WalkState {
            graph: Arc::clone(graph),
            amp,
        })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amp
    }

    pub fn amplitude(&self, arc: ArcId) -> f64 {
        self.amp[arc]
    }

    pub fn norm(&self) -> f64 {
        kernel::sum_sq(&self.amp).sqrt()
    }

    /// Sign-flip amplitudes at marked vertices.
    pub fn apply_query(&self, marked: &MarkedConfig) -> Result<WalkState, WalkError> {
        check_marked(&self.graph, marked)?;
        let mut amp = self.amp.clone();
        kernel::query(&self.graph, marked.vertices(), &mut amp);
        Ok(WalkState {
            graph: Arc::clone(&self.graph),
            amp,
        })
    }

    /// Grover diffusion within each vertex block.
    pub fn apply_coin(&self) -> WalkState {
        let mut amp = self.amp.clone();
        let mut means = vec![0.0; self.graph.num_vertices()];
        kernel::coin(&self.graph, &mut means, &mut amp);
        WalkState {
            graph: Arc::clone(&self.graph),
            amp,
        }
    }

    /// Flip-flop shift: each arc swaps amplitude with its partner.
    pub fn apply_shift(&self) -> WalkState {
        let mut amp = vec![0.0; self.amp.len()];
        kernel::shift(&self.graph, &self.amp, &mut amp);
        WalkState {
            graph: Arc::clone(&self.graph),
            amp,
        }
    }

    /// One search step: query, coin, shift.
    pub fn step(&self, marked: &MarkedConfig) -> Result<WalkState, WalkError> {
        self.evolve(marked, 1)
    }

    /// `steps` search steps.
    pub fn evolve(&self, marked: &MarkedConfig, steps: usize) -> Result<WalkState, WalkError> {
        let mut stepper = Stepper::new(self, marked)?;
        for _ in 0..steps {
            stepper.advance();
        }
        Ok(stepper.into_state())
    }

    /// `|<self|other>|`.
    pub fn overlap(&self, other: &WalkState) -> Result<f64, WalkError> {
        if !self.graph.same_structure(&other.graph) {
            return Err(WalkError::GraphMismatch);
        }
        Ok(kernel::dot(&self.amp, &other.amp).abs())
    }

    /// Probability of measuring the walker at a marked vertex: the summed
    /// squared amplitude of all marked arcs. Expects a unit-norm state.
    ///
    /// Panics if the config names a vertex this graph does not have.
    pub fn marked_probability(&self, marked: &MarkedConfig) -> f64 {
        check_marked(&self.graph, marked).expect("marked set out of range for this graph");
        marked_prob(&self.graph, marked.vertices(), &self.amp)
    }

    /// `||self - other||`.
    pub fn distance(&self, other: &WalkState) -> Result<f64, WalkError> {
        if !self.graph.same_structure(&other.graph) {
            return Err(WalkError::GraphMismatch);
        }
        let sq: f64 = self
            .amp
            .chunks(kernel::REDUCE_CHUNK)
            .zip(other.amp.chunks(kernel::REDUCE_CHUNK))
            .map(|(xs, ys)| {
                xs.iter()
                    .zip(ys)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .sum();
        Ok(sq.sqrt())
    }
}

fn check_marked(graph: &Graph, marked: &MarkedConfig) -> Result<(), WalkError> {
    match marked.vertices().iter().find(|&&v| v >= graph.num_vertices()) {
        Some(&vertex) => Err(WalkError::MarkedOutOfRange {
            vertex,
            vertices: graph.num_vertices(),
        }),
        None => Ok(()),
    }
}

pub(crate) fn marked_prob(graph: &Graph, marked: &[VertexId], amp: &[f64]) -> f64 {
    marked
        .iter()
        .map(|&v| amp[graph.arcs_at(v)].iter().map(|x| x * x).sum::<f64>())
        .sum()
}

/// Buffer-reusing trajectory driver shared by `evolve`, the empirical
/// bound scan, and the experiment harness.
pub(crate) struct Stepper {
    graph: Arc<Graph>,
    marked: Vec<VertexId>,
    amp: Vec<f64>,
    means: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    pub fn new(state: &WalkState, marked: &MarkedConfig) -> Result<Stepper, WalkError> {
        check_marked(&state.graph, marked)?;
        Ok(Stepper {
            graph: Arc::clone(&state.graph),
            marked: marked.vertices().to_vec(),
            amp: state.amp.clone(),
            means: vec![0.0; state.graph.num_vertices()],
            scratch: vec![0.0; state.amp.len()],
        })
    }

    pub fn advance(&mut self) {
        kernel::step(
            &self.graph,
            &self.marked,
            &mut self.amp,
            &mut self.means,
            &mut self.scratch,
        );
    }

    pub fn overlap_with(&self, reference: &[f64]) -> f64 {
        kernel::dot(&self.amp, reference).abs()
    }

    pub fn marked_probability(&self) -> f64 {
        marked_prob(&self.graph, &self.marked, &self.amp)
    }

    pub fn norm(&self) -> f64 {
        kernel::sum_sq(&self.amp).sqrt()
    }

    pub fn into_state(self) -> WalkState {
        WalkState {
            graph: self.graph,
            amp: self.amp,
        }
    }
}
