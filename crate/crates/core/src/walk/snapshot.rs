//! Text snapshots of walk states.
//!
//! A snapshot is a header of `#`-prefixed `key = value` lines recording
//! the graph family and its parameters, followed by one amplitude per line
//! in canonical arc order, 17 significant digits (lossless round trip):
//!
//! ```text
//! # qwalk-state
//! # family = torus-grid
//! # side = 50
//! # vertices = 2500
//! # edges = 5000
//! # arcs = 10000
//! 1.0000000000000000e-2
//! ...
//! ```

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::graphs::Graph;
use crate::textio::f64_text;
use crate::walk::WalkState;

const MAGIC: &str = "qwalk-state";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a state snapshot (missing `# {MAGIC}` line)")]
    MissingMagic,
    #[error("snapshot header `{key}` is {found:?}, graph has {expected:?}")]
    HeaderMismatch {
        key: String,
        expected: String,
        found: String,
    },
    #[error("snapshot line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("snapshot has {got} amplitudes, graph has {expect} arcs")]
    WrongArcCount { got: usize, expect: usize },
}

fn header_pairs(graph: &Graph) -> Vec<(String, String)> {
    let mut pairs = vec![("family".to_string(), graph.family().name().to_string())];
    for (k, v) in graph.family().params() {
        pairs.push((k.to_string(), v));
    }
    pairs.push(("vertices".to_string(), graph.num_vertices().to_string()));
    pairs.push(("edges".to_string(), graph.num_edges().to_string()));
    pairs.push(("arcs".to_string(), graph.arc_count().to_string()));
    pairs
}

pub fn write_snapshot<W: Write>(state: &WalkState, w: &mut W) -> io::Result<()> {
    writeln!(w, "# {MAGIC}")?;
    for (k, v) in header_pairs(state.graph()) {
        writeln!(w, "# {k} = {v}")?;
    }
    for &x in state.amplitudes() {
        writeln!(w, "{}", f64_text(x))?;
    }
    Ok(())
}

/// Read a snapshot written by [`write_snapshot`], validating that its
/// header describes `graph`.
pub fn read_snapshot<R: BufRead>(graph: &Arc<Graph>, r: &mut R) -> Result<WalkState, SnapshotError> {
    let mut amp = Vec::with_capacity(graph.arc_count());
    let mut headers: Vec<(String, String)> = Vec::new();
    let mut saw_magic = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if comment == MAGIC {
                saw_magic = true;
            } else if let Some((k, v)) = comment.split_once('=') {
                headers.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        let x: f64 = trimmed.parse().map_err(|_| SnapshotError::Parse {
            line: line_no,
            msg: format!("invalid amplitude {trimmed:?}"),
        })?;
        amp.push(x);
    }
    if !saw_magic {
        return Err(SnapshotError::MissingMagic);
    }
    for (key, expected) in header_pairs(graph) {
        if let Some((_, found)) = headers.iter().find(|(k, _)| *k == key) {
            if *found != expected {
                return Err(SnapshotError::HeaderMismatch {
                    key,
                    expected,
                    found: found.clone(),
                });
            }
        }
    }
    if amp.len() != graph.arc_count() {
        return Err(SnapshotError::WrongArcCount {
            got: amp.len(),
            expect: graph.arc_count(),
        });
    }
    Ok(WalkState::from_amplitudes(graph, amp).expect("length checked above"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marked::MarkedConfig;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Arc::new(Graph::torus_grid(5).unwrap());
        let marked = MarkedConfig::new(&g, &[0, 1]).unwrap();
        let psi = WalkState::uniform(&g).evolve(&marked, 17).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&psi, &mut buf).unwrap();
        let back = read_snapshot(&g, &mut buf.as_slice()).unwrap();
        let same = psi
            .amplitudes()
            .iter()
            .zip(back.amplitudes())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same);
    }

    #[test]
    fn header_begins_with_family() {
        let g = Arc::new(Graph::hypercube(3).unwrap());
        let mut buf = Vec::new();
        write_snapshot(&WalkState::uniform(&g), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# qwalk-state"));
        assert_eq!(lines.next(), Some("# family = hypercube"));
        assert_eq!(lines.next(), Some("# dim = 3"));
    }

    #[test]
    fn rejects_wrong_graph() {
        let g = Arc::new(Graph::torus_grid(5).unwrap());
        let mut buf = Vec::new();
        write_snapshot(&WalkState::uniform(&g), &mut buf).unwrap();

        let other = Arc::new(Graph::torus_grid(6).unwrap());
        let err = read_snapshot(&other, &mut buf.as_slice()).unwrap_err();
        assert!(matches!(err, SnapshotError::HeaderMismatch { .. }));

        let err = read_snapshot(&g, &mut b"0.5\n".as_slice()).unwrap_err();
        assert!(matches!(err, SnapshotError::MissingMagic));
    }
}
