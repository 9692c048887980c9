//! Experiment harness: declarative TOML specs in, time series out.
//!
//! A spec names a graph, a marked set, and a step count. Running it
//! produces one row per time step: the overlap with the initial uniform
//! state and the probability of finding the walker on a marked vertex.
//! Output goes to CSV (with `# key = value` header lines) or JSON.
//!
//! Runs are deterministic: the same spec yields byte-identical output in
//! either execution mode, across runs, and across thread counts. The only
//! nondeterministic field, a timestamp, is off unless explicitly
//! requested and lives in its own header line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{grid_vertex, Graph, GraphError, VertexId};
use crate::marked::{Group, MarkedConfig, MarkedError};
use crate::stationary::{
    find_exceptional_partition, is_stationary, partition_state, solve_correction_weights,
    uniform_baseline, SolveOutcome, StationaryError, StationaryState, DEFAULT_STATIONARITY_TOL,
};
use crate::textio::f64_text;
use crate::walk::{Stepper, WalkError, WalkState};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("parsing {path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("spec '{name}': {msg}")]
    InvalidSpec { name: String, msg: String },
    #[error("no .cfg files in {0}")]
    NoSpecs(PathBuf),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Marked(#[from] MarkedError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Stationary(#[from] StationaryError),
    #[error("norm drifted by {drift:e} at step {step} (tolerance {tol:e})")]
    NormDrift { step: usize, drift: f64, tol: f64 },
}

impl HarnessError {
    /// Process exit code: 2 for spec, graph, or I/O problems; 3 for
    /// numerical violations detected during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::NormDrift { .. } => 3,
            _ => 2,
        }
    }
}

/// On-disk experiment description. See the crate README for the grammar;
/// the short of it: `name` and `steps` at the top, a `[graph]` table
/// tagged by `family`, an optional `[marked]` table (vertex ids, or
/// `[x, y]` coordinates on torus grids, plus an optional partition), an
/// optional `[output]` sink, and an optional `[measure]` table.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub steps: usize,
    pub graph: GraphSpec,
    #[serde(default)]
    pub marked: Option<MarkedSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub measure: MeasureSpec,
    /// Directory the spec was loaded from; relative paths inside the
    /// spec (the edge-list file) resolve against it.
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
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
    EdgeList {
        path: PathBuf,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedSpec {
    pub vertices: Vec<VertexSpec>,
    /// Groups of 2 (pairs) or >= 3 (cliques); must cover `vertices`
    /// exactly.
    #[serde(default)]
    pub partition: Option<Vec<Vec<VertexSpec>>>,
}

/// A vertex id, or `[x, y]` coordinates on a torus grid.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum VertexSpec {
    Id(VertexId),
    Coord([usize; 2]),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    /// Resolved against the process working directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    /// Construct a stationary state for the marked set (declared
    /// partition, then partition search, then least squares) and record
    /// its one-step residual in the output header. `None` in the output
    /// means no construction applied.
    #[serde(default)]
    pub stationarity_residual: bool,
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<ExperimentSpec, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        ExperimentSpec::parse(&text, base).map_err(|err| match err {
            HarnessError::Toml { source, .. } => HarnessError::Toml {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> Result<ExperimentSpec, HarnessError> {
        let mut spec: ExperimentSpec =
            toml::from_str(text).map_err(|source| HarnessError::Toml {
                path: PathBuf::new(),
                source: Box::new(source),
            })?;
        spec.base_dir = base_dir;
        Ok(spec)
    }

    fn invalid(&self, msg: impl Into<String>) -> HarnessError {
        HarnessError::InvalidSpec {
            name: self.name.clone(),
            msg: msg.into(),
        }
    }

    /// Build the graph and marked set this spec describes.
    pub fn resolve(&self) -> Result<Experiment, HarnessError> {
        if self.steps == 0 {
            return Err(self.invalid("steps must be at least 1"));
        }
        let (graph, auto_marked) = self.build_graph()?;
        let graph = Arc::new(graph);
        let marked = match (&self.marked, auto_marked) {
            (Some(spec), _) => self.resolve_marked(spec, &graph)?,
            (None, Some(auto)) => auto,
            (None, None) => {
                return Err(self.invalid("[marked] is required for this graph family"))
            }
        };
        Ok(Experiment {
            name: self.name.clone(),
            steps: self.steps,
            graph,
            marked,
            measure: self.measure,
            output: self.output.clone(),
        })
    }

    fn build_graph(&self) -> Result<(Graph, Option<MarkedConfig>), HarnessError> {
        match &self.graph {
            GraphSpec::TorusGrid { side } => Ok((Graph::torus_grid(*side)?, None)),
            GraphSpec::Hypercube { dim } => Ok((Graph::hypercube(*dim)?, None)),
            GraphSpec::Complete { size } => Ok((Graph::complete(*size)?, None)),
            GraphSpec::CliqueGadget {
                block_edges,
                attachments,
                clique_size,
            } => {
                let (graph, marked) =
                    Graph::clique_gadget(block_edges, attachments, *clique_size)?;
                Ok((graph, Some(marked)))
            }
            GraphSpec::EdgeList { path } => {
                let full = self.base_dir.join(path);
                let text = fs::read_to_string(&full).map_err(|source| HarnessError::Io {
                    path: full.clone(),
                    source,
                })?;
                Ok((Graph::from_edge_list_text(&text)?, None))
            }
        }
    }

    fn resolve_vertex(&self, v: &VertexSpec) -> Result<VertexId, HarnessError> {
        match (v, &self.graph) {
            (VertexSpec::Id(id), _) => Ok(*id),
            (VertexSpec::Coord([x, y]), GraphSpec::TorusGrid { side }) => {
                if x < side && y < side {
                    Ok(grid_vertex(*side, *x, *y))
                } else {
                    Err(self.invalid(format!(
                        "coordinate ({x}, {y}) outside the {side}x{side} grid"
                    )))
                }
            }
            (VertexSpec::Coord(_), _) => {
                Err(self.invalid("coordinates are only valid on torus-grid graphs"))
            }
        }
    }

    fn resolve_marked(
        &self,
        spec: &MarkedSpec,
        graph: &Graph,
    ) -> Result<MarkedConfig, HarnessError> {
        let vertices: Vec<VertexId> = spec
            .vertices
            .iter()
            .map(|v| self.resolve_vertex(v))
            .collect::<Result<_, _>>()?;
        let listed = MarkedConfig::new(graph, &vertices)?;
        let Some(partition) = &spec.partition else {
            return Ok(listed);
        };
        let mut groups = Vec::with_capacity(partition.len());
        for group in partition {
            let vs: Vec<VertexId> = group
                .iter()
                .map(|v| self.resolve_vertex(v))
                .collect::<Result<_, _>>()?;
            groups.push(match vs.len() {
                0 | 1 => return Err(self.invalid("partition groups need at least 2 vertices")),
                2 => Group::Pair(vs[0], vs[1]),
                _ => Group::Clique(vs),
            });
        }
        let config = MarkedConfig::with_partition(graph, groups)?;
        if config.vertices() != listed.vertices() {
            return Err(self.invalid("partition does not cover exactly the marked vertices"));
        }
        Ok(config)
    }
}

/// A resolved spec: concrete graph and marked set, ready to run.
#[derive(Debug)]
pub struct Experiment {
    pub name: String,
    pub steps: usize,
    pub graph: Arc<Graph>,
    pub marked: MarkedConfig,
    pub measure: MeasureSpec,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Row {
    pub t: usize,
    pub overlap: f64,
    pub p_m: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesMeta {
    pub name: String,
    pub graph: String,
    pub vertices: usize,
    pub edges: usize,
    /// Marked vertex ids, ascending, space-separated.
    pub marked: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationarity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeSeries {
    pub meta: SeriesMeta,
    pub rows: Vec<Row>,
}

/// Stationary-state construction cascade for arbitrary marked sets:
/// declared partition, then partition search, then the least-squares
/// solve. `None` means no construction applies (the marked set admits no
/// uniform-plus-corrections stationary state).
pub fn build_stationary(
    graph: &Arc<Graph>,
    marked: &MarkedConfig,
    a: f64,
) -> Result<Option<StationaryState>, HarnessError> {
    if marked.partition().is_some() {
        // A declared partition can still fail construction (unequal-degree
        // pair); fall through to the solver, which decides feasibility.
        if let Ok(state) = partition_state(graph, marked, a) {
            return Ok(Some(state));
        }
    } else if let Ok(Some(groups)) = find_exceptional_partition(graph, marked.vertices()) {
        let config = MarkedConfig::with_partition(graph, groups)?;
        if let Ok(state) = partition_state(graph, &config, a) {
            return Ok(Some(state));
        }
    }
    match solve_correction_weights(graph, marked, a)? {
        SolveOutcome::Feasible(state) => Ok(Some(state)),
        SolveOutcome::Infeasible { .. } => Ok(None),
    }
}

fn measure_residual(
    graph: &Arc<Graph>,
    marked: &MarkedConfig,
) -> Result<Option<f64>, HarnessError> {
    match build_stationary(graph, marked, uniform_baseline(graph))? {
        Some(state) => {
            let report = is_stationary(&state.to_walk_state(), marked, DEFAULT_STATIONARITY_TOL)?;
            Ok(Some(report.residual))
        }
        None => Ok(None),
    }
}

/// Run the walk from the uniform state and record the trajectory.
///
/// Row 0 is the initial state and is exact by definition: overlap 1, and
/// `p_M` the marked share of arcs. The norm is checked every step against
/// a budget that scales with the run length; a violation aborts the run.
pub fn run_experiment(
    exp: &Experiment,
    timestamp: Option<String>,
) -> Result<TimeSeries, HarnessError> {
    let stationarity_residual = if exp.measure.stationarity_residual {
        measure_residual(&exp.graph, &exp.marked)?
    } else {
        None
    };

    let initial = WalkState::uniform(&exp.graph);
    let reference = initial.amplitudes().to_vec();
    let mut rows = Vec::with_capacity(exp.steps + 1);
    rows.push(Row {
        t: 0,
        overlap: 1.0,
        p_m: exp.marked.marked_arc_count(&exp.graph) as f64 / exp.graph.arc_count() as f64,
    });

    let drift_tol = (1e-13 * exp.steps as f64).max(1e-12);
    let mut stepper = Stepper::new(&initial, &exp.marked)?;
    for t in 1..=exp.steps {
        stepper.advance();
        let drift = (stepper.norm() - 1.0).abs();
        if drift > drift_tol {
            return Err(HarnessError::NormDrift {
                step: t,
                drift,
                tol: drift_tol,
            });
        }
        rows.push(Row {
            t,
            overlap: stepper.overlap_with(&reference),
            p_m: stepper.marked_probability(),
        });
    }

    let marked_label = exp
        .marked
        .vertices()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let partition_label = exp.marked.partition().map(|groups| {
        groups
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    });
    Ok(TimeSeries {
        meta: SeriesMeta {
            name: exp.name.clone(),
            graph: exp.graph.family().to_string(),
            vertices: exp.graph.num_vertices(),
            edges: exp.graph.num_edges(),
            marked: marked_label,
            partition: partition_label,
            steps: exp.steps,
            stationarity_residual,
            timestamp,
        },
        rows,
    })
}

/// CSV layout: `# key = value` headers, then `t,overlap,p_m` rows.
/// Floats are printed with 17 significant digits, so the file
/// round-trips to the exact in-memory values.
pub fn write_csv(series: &TimeSeries, w: &mut impl Write) -> io::Result<()> {
    let meta = &series.meta;
    writeln!(w, "# name = {}", meta.name)?;
    writeln!(w, "# graph = {}", meta.graph)?;
    writeln!(w, "# vertices = {}", meta.vertices)?;
    writeln!(w, "# edges = {}", meta.edges)?;
    writeln!(w, "# marked = {}", meta.marked)?;
    if let Some(partition) = &meta.partition {
        writeln!(w, "# partition = {partition}")?;
    }
    writeln!(w, "# steps = {}", meta.steps)?;
    if let Some(residual) = meta.stationarity_residual {
        writeln!(w, "# stationarity_residual = {}", f64_text(residual))?;
    }
    if let Some(timestamp) = &meta.timestamp {
        writeln!(w, "# timestamp = {timestamp}")?;
    }
    writeln!(w, "t,overlap,p_m")?;
    for row in &series.rows {
        writeln!(
            w,
            "{},{},{}",
            row.t,
            f64_text(row.overlap),
            f64_text(row.p_m)
        )?;
    }
    Ok(())
}

pub fn write_json(series: &TimeSeries, w: &mut impl Write) -> io::Result<()> {
    let text = serde_json::to_string_pretty(series).expect("plain data serializes");
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")
}

/// Render to the spec's format and write the file, creating parent
/// directories as needed.
pub fn write_output(series: &TimeSeries, output: &OutputSpec) -> Result<(), HarnessError> {
    let wrap = |source: io::Error| HarnessError::Io {
        path: output.path.clone(),
        source,
    };
    if let Some(parent) = output.path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(wrap)?;
        }
    }
    let mut buf = Vec::new();
    match output.format {
        OutputFormat::Csv => write_csv(series, &mut buf).map_err(wrap)?,
        OutputFormat::Json => write_json(series, &mut buf).map_err(wrap)?,
    }
    fs::write(&output.path, buf).map_err(wrap)
}

/// Resolve, run, and (if the spec asks for it) write one experiment.
pub fn run_spec(
    spec: &ExperimentSpec,
    timestamp: Option<String>,
) -> Result<TimeSeries, HarnessError> {
    let exp = spec.resolve()?;
    let series = run_experiment(&exp, timestamp)?;
    if let Some(output) = &exp.output {
        write_output(&series, output)?;
    }
    Ok(series)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteMode {
    /// Return the first failure (in spec order) as the suite error.
    /// Experiments are still executed in parallel, so outputs of specs
    /// that succeeded are written even when a sibling fails.
    FailFast,
    /// Run everything; per-spec outcomes land in the entries.
    Collect,
}

pub struct SuiteEntry {
    pub name: String,
    pub outcome: Result<TimeSeries, HarnessError>,
}

/// All `.cfg` files in a directory, sorted by file name.
pub fn load_suite_dir(dir: &Path) -> Result<Vec<ExperimentSpec>, HarnessError> {
    let entries = fs::read_dir(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.extension().is_some_and(|ext| ext == "cfg") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::NoSpecs(dir.to_path_buf()));
    }
    paths.iter().map(|p| ExperimentSpec::load(p)).collect()
}

fn run_one(spec: &ExperimentSpec) -> SuiteEntry {
    SuiteEntry {
        name: spec.name.clone(),
        outcome: run_spec(spec, None),
    }
}

fn run_all(specs: &[ExperimentSpec]) -> Vec<SuiteEntry> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        specs.par_iter().map(run_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        specs.iter().map(run_one).collect()
    }
}

/// Run a batch of specs, in parallel when the `parallel` feature is on.
/// Entry order matches spec order either way.
pub fn run_suite(
    specs: &[ExperimentSpec],
    mode: SuiteMode,
) -> Result<Vec<SuiteEntry>, HarnessError> {
    let mut entries = run_all(specs);
    if mode == SuiteMode::FailFast {
        if let Some(idx) = entries.iter().position(|e| e.outcome.is_err()) {
            let entry = entries.swap_remove(idx);
            return Err(entry.outcome.expect_err("position found an error"));
        }
    }
    Ok(entries)
}
