//! `qwalk`: run coined-walk search experiments from TOML specs, verify
//! stationary constructions, and evaluate the pinned-probability bound.
//!
//! Exit codes: 0 success, 2 invalid spec / I/O / parameter problems,
//! 3 numerical violations (norm drift, failed stationarity, bound
//! cross-check mismatch).

use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use qwalk_core::bounds::{maximize_pm_bruteforce, pair_pm_bound};
use qwalk_core::harness::{
    build_stationary, load_suite_dir, run_experiment, run_suite, write_csv, write_json,
    write_output, ExperimentSpec, HarnessError, OutputFormat, OutputSpec, SuiteMode, TimeSeries,
};
use qwalk_core::stationary::{
    check_general_conditions, find_exceptional_partition, is_stationary, uniform_baseline,
    DEFAULT_STATIONARITY_TOL,
};

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Discrete-time coined quantum-walk search on arbitrary graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment spec and write its time series.
    Run {
        /// Path to a TOML spec (.cfg).
        config: PathBuf,
        /// Write here instead of the spec's [output] path. Without either,
        /// the series goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the output format (default: the spec's, then csv).
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Add a wall-clock header (seconds since the Unix epoch). Off by
        /// default so reruns are byte-identical.
        #[arg(long)]
        timestamp: bool,
    },
    /// Run every .cfg spec in a directory (in parallel when built with
    /// the default features), writing each spec's [output].
    Suite {
        dir: PathBuf,
        /// Keep going after a failure and report per-spec outcomes
        /// instead of stopping at the first error.
        #[arg(long)]
        collect_errors: bool,
    },
    /// Construct a stationary state for the spec's marked set (declared
    /// partition, then partition search, then least squares) and verify
    /// it against one walk step. Exits 3 if no construction applies or
    /// the residual exceeds the tolerance.
    VerifyStationary {
        config: PathBuf,
        /// Residual tolerance, relative to the state norm.
        #[arg(long, default_value_t = DEFAULT_STATIONARITY_TOL)]
        tol: f64,
    },
    /// Closed-form ceiling on the success probability when an adjacent
    /// equal-degree pair is marked on a degree-regular graph.
    Bound {
        /// Common degree of the marked pair.
        #[arg(long)]
        degree: usize,
        /// Edge count of the graph.
        #[arg(long)]
        edges: usize,
        /// Cross-check the closed form against a direct maximization
        /// over the admissible deviation states.
        #[arg(long)]
        brute_force: bool,
    },
    /// Search for an equal-degree-pair / clique partition of the spec's
    /// marked set.
    Partition { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            out,
            format,
            timestamp,
        } => cmd_run(&config, out, format, timestamp),
        Command::Suite {
            dir,
            collect_errors,
        } => cmd_suite(&dir, collect_errors),
        Command::VerifyStationary { config, tol } => cmd_verify(&config, tol),
        Command::Bound {
            degree,
            edges,
            brute_force,
        } => cmd_bound(degree, edges, brute_force),
        Command::Partition { config } => cmd_partition(&config),
    };
    std::process::exit(code);
}

fn fail(err: &HarnessError) -> i32 {
    eprintln!("error: {err}");
    err.exit_code()
}

fn cmd_run(
    config: &PathBuf,
    out: Option<PathBuf>,
    format: Option<FormatArg>,
    timestamp: bool,
) -> i32 {
    let run = || -> Result<(TimeSeries, Option<OutputSpec>), HarnessError> {
        let spec = ExperimentSpec::load(config)?;
        let exp = spec.resolve()?;
        let stamp = timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .expect("clock after 1970")
                .as_secs()
                .to_string()
        });
        let series = run_experiment(&exp, stamp)?;
        let target = match (out, &exp.output) {
            (Some(path), existing) => Some(OutputSpec {
                format: format.map(OutputFormat::from).unwrap_or(
                    existing
                        .as_ref()
                        .map(|o| o.format)
                        .unwrap_or(OutputFormat::Csv),
                ),
                path,
            }),
            (None, Some(existing)) => Some(OutputSpec {
                format: format.map(OutputFormat::from).unwrap_or(existing.format),
                path: existing.path.clone(),
            }),
            (None, None) => None,
        };
        if let Some(output) = &target {
            write_output(&series, output)?;
        }
        Ok((series, target))
    };
    match run() {
        Ok((series, Some(output))) => {
            println!(
                "wrote {} ({} rows)",
                output.path.display(),
                series.rows.len()
            );
            0
        }
        Ok((series, None)) => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            let result = match format {
                Some(FormatArg::Json) => write_json(&series, &mut lock),
                _ => write_csv(&series, &mut lock),
            };
            if let Err(err) = result.and_then(|()| lock.flush()) {
                eprintln!("error: writing stdout: {err}");
                return 2;
            }
            0
        }
        Err(err) => fail(&err),
    }
}

fn cmd_suite(dir: &PathBuf, collect_errors: bool) -> i32 {
    let specs = match load_suite_dir(dir) {
        Ok(specs) => specs,
        Err(err) => return fail(&err),
    };
    let mode = if collect_errors {
        SuiteMode::Collect
    } else {
        SuiteMode::FailFast
    };
    match run_suite(&specs, mode) {
        Err(err) => fail(&err),
        Ok(entries) => {
            let mut code = 0;
            for entry in &entries {
                match &entry.outcome {
                    Ok(series) => println!("ok      {} ({} rows)", entry.name, series.rows.len()),
                    Err(err) => {
                        println!("FAILED  {}: {err}", entry.name);
                        code = code.max(err.exit_code());
                    }
                }
            }
            code
        }
    }
}

fn cmd_verify(config: &PathBuf, tol: f64) -> i32 {
    let run = || -> Result<i32, HarnessError> {
        let spec = ExperimentSpec::load(config)?;
        let exp = spec.resolve()?;
        println!(
            "graph: {} ({} vertices, {} edges)",
            exp.graph.family(),
            exp.graph.num_vertices(),
            exp.graph.num_edges()
        );
        println!(
            "marked: {}",
            exp.marked
                .vertices()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        let a = uniform_baseline(&exp.graph);
        let Some(state) = build_stationary(&exp.graph, &exp.marked, a)? else {
            println!("no stationary construction applies to this marked set");
            return Ok(3);
        };
        println!("baseline a = {a:e}");
        for c in state.corrections() {
            println!("  l({},{}) = {}", c.edge.0, c.edge.1, c.weight);
        }
        let phi = state.to_walk_state();
        let report = is_stationary(&phi, &exp.marked, tol)?;
        let conditions = check_general_conditions(&phi, &exp.marked, tol)?;
        println!(
            "conditions: unmarked-spread {:e}, marked-sums {:e}, partner-asymmetry {:e}",
            conditions.unmarked_uniform.violation,
            conditions.marked_sums_zero.violation,
            conditions.partner_symmetric.violation
        );
        println!(
            "one-step residual = {:e} (threshold {:e})",
            report.residual, report.threshold
        );
        println!(
            "stationary: {}",
            if report.stationary { "yes" } else { "NO" }
        );
        Ok(if report.stationary { 0 } else { 3 })
    };
    run().unwrap_or_else(|err| fail(&err))
}

fn cmd_bound(degree: usize, edges: usize, brute_force: bool) -> i32 {
    let closed = match pair_pm_bound(degree, edges) {
        Ok(value) => value,
        Err(err) => {
            eprintln!("error: {err}");
            return 2;
        }
    };
    println!(
        "p_M <= {closed:e} at every step (degree {degree}, {edges} edges, adjacent equal-degree pair)"
    );
    if brute_force {
        let a = 1.0 / ((2 * edges) as f64).sqrt();
        let result = match maximize_pm_bruteforce(degree, a) {
            Ok(result) => result,
            Err(err) => {
                eprintln!("error: {err}");
                return 2;
            }
        };
        println!(
            "direct maximization: {:e} at (x1, x2) = ({:e}, {:e})",
            result.max_probability, result.optimizer.0, result.optimizer.1
        );
        let gap = result.relative_gap();
        println!("relative gap = {gap:e}");
        if gap > 1e-6 {
            eprintln!("error: direct maximization disagrees with the closed form");
            return 3;
        }
    }
    0
}

fn cmd_partition(config: &PathBuf) -> i32 {
    let run = || -> Result<i32, HarnessError> {
        let spec = ExperimentSpec::load(config)?;
        let exp = spec.resolve()?;
        match find_exceptional_partition(&exp.graph, exp.marked.vertices())? {
            Some(groups) => {
                for group in &groups {
                    println!("{group}");
                }
                Ok(0)
            }
            None => {
                println!("none");
                Ok(0)
            }
        }
    };
    run().unwrap_or_else(|err| fail(&err))
}
