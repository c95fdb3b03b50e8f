//! Snapshot sequences of a graph with a fixed node set, and the persistent
//! (forgetting-factor weighted) average of their hyperlink matrices.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{content, label_table, DirectedGraph, NodeId};
use crate::sparse::SparseColumnMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: u64,
    pub graph: DirectedGraph,
}

/// Ordered snapshots over one shared node set.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalGraphSequence {
    snapshots: Vec<Snapshot>,
}

impl TemporalGraphSequence {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self> {
        let first = snapshots.first().ok_or(Error::NoSnapshots)?;
        let labels = first.graph.labels().to_vec();
        for pair in snapshots.windows(2) {
            if pair[1].time <= pair[0].time {
                return Err(Error::DecreasingTime {
                    line: 0,
                    time: pair[1].time,
                    previous: pair[0].time,
                });
            }
        }
        if let Some(bad) = snapshots.iter().find(|s| s.graph.labels() != labels.as_slice()) {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: bad.graph.node_count(),
            });
        }
        Ok(TemporalGraphSequence { snapshots })
    }

    pub fn node_count(&self) -> usize {
        self.snapshots[0].graph.node_count()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn get(&self, index: usize) -> Result<&Snapshot> {
        self.snapshots.get(index).ok_or(Error::SnapshotOutOfRange {
            index,
            len: self.snapshots.len(),
        })
    }

    pub fn map_graphs<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&DirectedGraph) -> Result<DirectedGraph>,
    {
        let snapshots = self
            .snapshots
            .iter()
            .map(|s| {
                Ok(Snapshot {
                    time: s.time,
                    graph: f(&s.graph)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TemporalGraphSequence::new(snapshots)
    }
}

/// Parses `time src dst` lines with nondecreasing times. Each distinct time
/// becomes one snapshot; every snapshot spans the union of all labels.
pub fn parse_temporal_edge_list(text: &str) -> Result<TemporalGraphSequence> {
    let mut seen = HashSet::new();
    let mut rows: Vec<(u64, &str, &str)> = Vec::new();
    let mut previous: Option<u64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = content(raw).split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [t, src, dst] = fields[..] else {
            return Err(Error::Malformed {
                line,
                reason: "expected `time src dst`".into(),
            });
        };
        let time: u64 = t.parse().map_err(|_| Error::Malformed {
            line,
            reason: format!("time `{t}` is not a nonnegative integer"),
        })?;
        if let Some(p) = previous {
            if time < p {
                return Err(Error::DecreasingTime {
                    line,
                    time,
                    previous: p,
                });
            }
        }
        if src == dst {
            return Err(Error::SelfLoop {
                line,
                label: src.to_owned(),
            });
        }
        previous = Some(time);
        seen.insert(src);
        seen.insert(dst);
        rows.push((time, src, dst));
    }
    if rows.is_empty() {
        return Err(Error::NoSnapshots);
    }
    let (labels, index) = label_table(seen);
    let mut snapshots = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let time = rows[start].0;
        let end = rows[start..]
            .iter()
            .position(|r| r.0 != time)
            .map_or(rows.len(), |p| start + p);
        let edges: Vec<(NodeId, NodeId)> = rows[start..end]
            .iter()
            .map(|(_, s, d)| (index[*s], index[*d]))
            .collect();
        snapshots.push(Snapshot {
            time,
            graph: DirectedGraph::with_labels(labels.clone(), &edges)?,
        });
        start = end;
    }
    TemporalGraphSequence::new(snapshots)
}

/// Canonical `time src dst` text. Snapshots without edges cannot be represented.
pub fn serialize_temporal_edge_list(seq: &TemporalGraphSequence) -> String {
    let mut out = String::new();
    for snap in seq.snapshots() {
        for (s, d) in snap.graph.edges() {
            let _ = writeln!(out, "{} {} {}", snap.time, snap.graph.label(s), snap.graph.label(d));
        }
    }
    out
}

/// Running weighted average `W̄(k) = Σ_t ϱ^{k-t} W(t) / Z_k`, with
/// `Z_k = Σ_{j<k} ϱ^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistentAverage {
    wbar: SparseColumnMatrix,
    rows: Vec<Vec<(NodeId, f64)>>,
    z: f64,
    rho: f64,
    k: usize,
}

impl PersistentAverage {
    pub fn new(n: usize, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Parameter {
                name: "rho",
                value: rho,
                range: "(0, 1]",
            });
        }
        Ok(PersistentAverage {
            wbar: SparseColumnMatrix::zeros(n),
            rows: vec![Vec::new(); n],
            z: 0.0,
            rho,
            k: 0,
        })
    }

    /// Folds in the next snapshot matrix:
    /// `Z_k = ϱ Z_{k-1} + 1`, `W̄(k) = W̄(k-1) + (W(k) - W̄(k-1)) / Z_k`.
    pub fn update(&mut self, w_k: &SparseColumnMatrix) -> Result<()> {
        if w_k.dim() != self.wbar.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.wbar.dim(),
                got: w_k.dim(),
            });
        }
        let z = self.rho * self.z + 1.0;
        self.wbar = self.wbar.step_toward(w_k, 1.0 / z)?;
        self.rows = self.wbar.rows();
        self.z = z;
        self.k += 1;
        Ok(())
    }

    pub fn wbar(&self) -> &SparseColumnMatrix {
        &self.wbar
    }

    /// Row `i` of `W̄` as `(column, value)` pairs in column order.
    pub fn row(&self, i: NodeId) -> &[(NodeId, f64)] {
        &self.rows[i]
    }

    pub fn normalizer(&self) -> f64 {
        self.z
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Number of snapshots folded in so far.
    pub fn snapshot_count(&self) -> usize {
        self.k
    }
}

/// Functional form of [`PersistentAverage::update`].
pub fn persistent_update(
    mut state: PersistentAverage,
    w_k: &SparseColumnMatrix,
) -> Result<PersistentAverage> {
    state.update(w_k)?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::build_hyperlink_matrix;

    #[test]
    fn two_snapshots() {
        let seq = parse_temporal_edge_list("0 a b\n1 b a").unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(seq.node_count(), 2);
        assert_eq!(seq.snapshots()[0].graph.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn gaps_in_time_allowed() {
        let seq = parse_temporal_edge_list("0 a b\n0 b c\n5 a c").unwrap();
        let times: Vec<_> = seq.snapshots().iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0, 5]);
        assert_eq!(seq.node_count(), 3);
        assert_eq!(seq.snapshots()[1].graph.node_count(), 3);
    }

    #[test]
    fn errors() {
        assert_eq!(parse_temporal_edge_list("").unwrap_err(), Error::NoSnapshots);
        assert_eq!(parse_temporal_edge_list("# only\n").unwrap_err(), Error::NoSnapshots);
        assert!(matches!(
            parse_temporal_edge_list("3 a b\n2 b a").unwrap_err(),
            Error::DecreasingTime { line: 2, time: 2, previous: 3 }
        ));
        assert!(matches!(
            parse_temporal_edge_list("x a b").unwrap_err(),
            Error::Malformed { line: 1, .. }
        ));
        assert!(matches!(
            parse_temporal_edge_list("1 a").unwrap_err(),
            Error::Malformed { line: 1, .. }
        ));
    }

    #[test]
    fn temporal_round_trip() {
        let seq = parse_temporal_edge_list("0 a b\n0 b c\n5 a c\n7 c a\n").unwrap();
        let text = serialize_temporal_edge_list(&seq);
        assert_eq!(parse_temporal_edge_list(&text).unwrap(), seq);
    }

    #[test]
    fn first_snapshot_is_copied() {
        let w = build_hyperlink_matrix(
            &crate::graph::parse_edge_list("a b\nb c\nc a\na c").unwrap(),
        )
        .unwrap();
        let pa = persistent_update(PersistentAverage::new(3, 0.7).unwrap(), &w).unwrap();
        assert_eq!(pa.wbar(), &w);
        assert_eq!(pa.normalizer(), 1.0);
    }

    #[test]
    fn rejects_bad_rho_and_dimension() {
        assert!(PersistentAverage::new(3, 0.0).is_err());
        assert!(PersistentAverage::new(3, 1.5).is_err());
        let mut pa = PersistentAverage::new(3, 1.0).unwrap();
        assert!(pa.update(&SparseColumnMatrix::zeros(2)).is_err());
    }
}
