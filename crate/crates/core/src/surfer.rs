//! The random surfer that picks which node updates next: a min-equal-neighbor
//! Metropolis-Hastings walk on the symmetrized graph, mixed with uniform jumps.

use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{symmetrize, DirectedGraph, NodeId};
use crate::pagerank::RegressionRow;
use crate::temporal::TemporalGraphSequence;

/// `P = (1-ω) P^W + (ω/N) 11^T`, with `P^W` stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(NodeId, f64)>>,
    cumulative: Vec<Vec<f64>>,
    omega: f64,
}

fn check_omega(omega: f64) -> Result<()> {
    if (0.0..=1.0).contains(&omega) {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: "omega",
            value: omega,
            range: "[0, 1]",
        })
    }
}

impl TransitionMatrix {
    /// Uses the given rows as `P^W` directly. Each row must be sorted by
    /// column, nonnegative and sum to one within 1e-12.
    pub fn from_rows(rows: Vec<Vec<(NodeId, f64)>>, omega: f64) -> Result<Self> {
        check_omega(omega)?;
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().map(|e| e.1).sum();
            let sorted = row.windows(2).all(|w| w[0].0 < w[1].0);
            let valid = row.iter().all(|&(j, p)| j < n && p >= 0.0);
            if !sorted || !valid || (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Consistency(format!(
                    "transition row {i} is not a sorted probability vector"
                )));
            }
        }
        let cumulative = rows
            .iter()
            .map(|row| {
                row.iter()
                    .scan(0.0, |acc, &(_, p)| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        Ok(TransitionMatrix {
            rows,
            cumulative,
            omega,
        })
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Row `i` of `P^W`, diagonal included.
    pub fn chain_row(&self, i: NodeId) -> &[(NodeId, f64)] {
        &self.rows[i]
    }

    pub fn chain_entry(&self, i: NodeId, j: NodeId) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map_or(0.0, |p| self.rows[i][p].1)
    }

    /// Entry of the full mixed matrix `P`.
    pub fn entry(&self, i: NodeId, j: NodeId) -> f64 {
        (1.0 - self.omega) * self.chain_entry(i, j) + self.omega / self.node_count() as f64
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.node_count();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn chain_column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.node_count()];
        for row in &self.rows {
            for &(j, p) in row {
                sums[j] += p;
            }
        }
        sums
    }

    /// Draws the successor of `current`.
    pub fn sample<R: Rng>(&self, current: NodeId, rng: &mut R) -> NodeId {
        let n = self.node_count();
        if self.omega > 0.0 && rng.gen::<f64>() < self.omega {
            return rng.gen_range(0..n);
        }
        let u: f64 = rng.gen();
        let cum = &self.cumulative[current];
        let idx = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
        self.rows[current][idx].0
    }
}

fn min_equal_neighbor(sym: &DirectedGraph, omega: f64) -> Result<TransitionMatrix> {
    let n = sym.node_count();
    let rows = (0..n)
        .map(|i| {
            let di = sym.out_degree(i) as f64;
            let mut row: Vec<(NodeId, f64)> = sym
                .out_neighbors(i)
                .iter()
                .map(|&j| {
                    let dj = sym.out_degree(j) as f64;
                    (j, (1.0 / (di + 1.0)).min(1.0 / (dj + 1.0)))
                })
                .collect();
            let off: f64 = row.iter().map(|e| e.1).sum();
            let pos = row.partition_point(|e| e.0 < i);
            row.insert(pos, (i, 1.0 - off));
            row
        })
        .collect();
    TransitionMatrix::from_rows(rows, omega)
}

/// Surfer matrix for a static graph. With `ω = 0` the symmetrized graph must
/// be connected, otherwise the walk cannot visit every node.
pub fn build_transition_matrix(g: &DirectedGraph, omega: f64) -> Result<TransitionMatrix> {
    check_omega(omega)?;
    let sym = symmetrize(g);
    if omega == 0.0 && !sym.is_strongly_connected() {
        return Err(Error::Assumption1(
            "communication graph is disconnected and omega = 0; use omega > 0 or connect the graph"
                .into(),
        ));
    }
    min_equal_neighbor(&sym, omega)
}

/// Surfer matrix for one snapshot. Connectivity is a property of snapshot
/// windows, see [`check_joint_connectivity`].
pub fn build_transition_matrix_temporal(g_k: &DirectedGraph, omega: f64) -> Result<TransitionMatrix> {
    check_omega(omega)?;
    min_equal_neighbor(&symmetrize(g_k), omega)
}

/// Requires the union of the symmetrized edge sets of every window of `q`
/// consecutive snapshots to be connected. A sequence shorter than `q` is
/// checked as one window.
pub fn check_joint_connectivity(seq: &TemporalGraphSequence, q: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::Parameter {
            name: "joint-window",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let snaps = seq.snapshots();
    let q = q.min(snaps.len());
    for start in 0..=snaps.len() - q {
        let window = &snaps[start..start + q];
        let edges: Vec<(NodeId, NodeId)> = window.iter().flat_map(|s| s.graph.edges()).collect();
        let labels = window[0].graph.labels().to_vec();
        let union = symmetrize(&DirectedGraph::with_labels(labels, &edges)?);
        if !union.is_strongly_connected() {
            return Err(Error::Assumption2(format!(
                "snapshots {}..={} (times {}..={}) do not jointly connect all nodes with window {q}",
                start,
                start + q - 1,
                window[0].time,
                window[q - 1].time
            )));
        }
    }
    Ok(())
}

/// Picks the row updated at each step.
pub trait RowSelector {
    fn current(&self) -> NodeId;
    /// Moves to the next row and returns it.
    fn advance(&mut self) -> NodeId;
}

/// Seeded Markov chain over the nodes, starting at node 0.
#[derive(Debug, Clone)]
pub struct SurferChain {
    matrix: Arc<TransitionMatrix>,
    current: NodeId,
    rng: ChaCha8Rng,
    seed: u64,
    step_count: u64,
}

impl SurferChain {
    pub fn new(matrix: Arc<TransitionMatrix>, seed: u64) -> Self {
        Self::starting_at(matrix, seed, 0)
    }

    pub fn starting_at(matrix: Arc<TransitionMatrix>, seed: u64, start: NodeId) -> Self {
        SurferChain {
            matrix,
            current: start,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            step_count: 0,
        }
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    /// Swaps in the matrix of a new snapshot; the position and generator carry over.
    pub fn set_matrix(&mut self, matrix: Arc<TransitionMatrix>) {
        self.matrix = matrix;
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn sample_next(&mut self) -> NodeId {
        self.current = self.matrix.sample(self.current, &mut self.rng);
        self.step_count += 1;
        self.current
    }
}

impl RowSelector for SurferChain {
    fn current(&self) -> NodeId {
        self.current
    }

    fn advance(&mut self) -> NodeId {
        self.sample_next()
    }
}

/// Visit frequencies of the states occupied at the next `steps` steps,
/// starting from the chain's current state.
pub fn empirical_stationary(chain: &mut SurferChain, steps: u64) -> Vec<f64> {
    let mut counts = vec![0u64; chain.matrix().node_count()];
    for _ in 0..steps {
        counts[chain.current] += 1;
        chain.sample_next();
    }
    counts
        .into_iter()
        .map(|c| c as f64 / steps.max(1) as f64)
        .collect()
}

/// Independent draws with `P{s = i} ∝ ‖H_i‖²`. Only used to compare against
/// the surfer in tests and experiments.
#[derive(Debug, Clone)]
pub struct RowNormSampler {
    dist: WeightedIndex<f64>,
    current: NodeId,
    rng: ChaCha8Rng,
}

impl RowNormSampler {
    pub fn new(rows: &[RegressionRow], seed: u64) -> Result<Self> {
        let weights: Vec<f64> = rows.iter().map(RegressionRow::norm_sq).collect();
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| Error::Consistency(format!("row-norm weights: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let current = dist.sample(&mut rng);
        Ok(RowNormSampler { dist, current, rng })
    }
}

impl RowSelector for RowNormSampler {
    fn current(&self) -> NodeId {
        self.current
    }

    fn advance(&mut self) -> NodeId {
        self.current = self.dist.sample(&mut self.rng);
        self.current
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    const FIXTURE: &str = "1 2\n1 4\n2 1\n2 3\n3 2\n3 4\n3 6\n4 3\n4 6\n5 4\n6 4\n6 5\n";

    #[test]
    fn omega_one_is_uniform() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let p = build_transition_matrix(&g, 1.0).unwrap();
        for row in p.to_dense() {
            for v in row {
                assert!((v - 1.0 / 6.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pair_and_triangle() {
        let g = parse_edge_list("a b").unwrap();
        let p = build_transition_matrix(&g, 0.0).unwrap();
        assert_eq!(p.to_dense(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let k3 = parse_edge_list("a b\nb c\nc a").unwrap();
        let p3 = build_transition_matrix(&k3, 0.0).unwrap();
        for row in p3.to_dense() {
            for v in row {
                assert!((v - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fixture_chain_is_doubly_stochastic() {
        let g = parse_edge_list(FIXTURE).unwrap();
        for omega in [0.0, 0.15, 0.5, 1.0] {
            let p = build_transition_matrix(&g, omega).unwrap();
            for row in p.to_dense() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            for c in p.chain_column_sums() {
                assert!((c - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn disconnected_needs_teleport() {
        let g = parse_edge_list("a b\nc d").unwrap();
        assert!(matches!(
            build_transition_matrix(&g, 0.0).unwrap_err(),
            Error::Assumption1(_)
        ));
        assert!(build_transition_matrix(&g, 0.2).is_ok());
        assert!(build_transition_matrix(&g, 1.5).is_err());
    }

    #[test]
    fn permutation_chain_cycles_exactly() {
        let rows = vec![vec![(1, 1.0)], vec![(2, 1.0)], vec![(0, 1.0)]];
        let p = Arc::new(TransitionMatrix::from_rows(rows, 0.0).unwrap());
        let mut chain = SurferChain::new(p, 9);
        let seq: Vec<_> = (0..6).map(|_| chain.sample_next()).collect();
        assert_eq!(seq, vec![1, 2, 0, 1, 2, 0]);
        assert_eq!(chain.step_count(), 6);
    }

    #[test]
    fn same_seed_same_walk() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let p = Arc::new(build_transition_matrix(&g, 0.15).unwrap());
        let walk = |seed| {
            let mut c = SurferChain::new(p.clone(), seed);
            (0..200).map(|_| c.sample_next()).collect::<Vec<_>>()
        };
        assert_eq!(walk(4), walk(4));
        assert_ne!(walk(4), walk(5));
    }

    #[test]
    fn single_node_is_degenerate() {
        let g = DirectedGraph::from_edges(1, &[]).unwrap();
        let p = Arc::new(build_transition_matrix(&g, 0.0).unwrap());
        let mut c = SurferChain::new(p, 1);
        assert_eq!(empirical_stationary(&mut c, 100), vec![1.0]);
    }

    #[test]
    fn joint_window() {
        let seq = crate::temporal::parse_temporal_edge_list("0 a b\n0 c d\n1 b c\n2 a b\n2 c d\n3 b c")
            .unwrap();
        assert!(check_joint_connectivity(&seq, 2).is_ok());
        assert!(matches!(
            check_joint_connectivity(&seq, 1).unwrap_err(),
            Error::Assumption2(_)
        ));
        assert!(check_joint_connectivity(&seq, 10).is_ok());
        assert!(check_joint_connectivity(&seq, 0).is_err());
    }

    #[test]
    fn row_norm_sampler_prefers_heavy_rows() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let w = crate::sparse::build_hyperlink_matrix(&g).unwrap();
        let rows = crate::pagerank::build_regression_rows(&w, 0.15, Some(6)).unwrap();
        let mut s = RowNormSampler::new(&rows, 3).unwrap();
        let mut counts = [0usize; 6];
        for _ in 0..60_000 {
            counts[s.advance()] += 1;
        }
        let total: f64 = rows.iter().map(|r| r.norm_sq()).sum();
        for (c, r) in counts.iter().zip(&rows) {
            let expected = r.norm_sq() / total;
            assert!((*c as f64 / 60_000.0 - expected).abs() < 0.01);
        }
    }
}
