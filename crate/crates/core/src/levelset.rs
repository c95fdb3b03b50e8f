//! Multi-level neighbor partitioning by synchronous message rounds, and the
//! degree, closeness and tree betweenness centralities read off from it.

use crate::centrality::{CentralityKind, CentralityVector};
use crate::error::{Error, Result};
use crate::graph::{validate_oriented_tree, DirectedGraph, NodeId};

/// `forward[i][t-1]` holds the nodes at hop distance exactly `t` from `i`;
/// `backward[i][t-1]` the nodes at distance `t` to `i`. Every list has
/// length `rounds`, and every set is sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSets {
    forward: Vec<Vec<Vec<NodeId>>>,
    backward: Vec<Vec<Vec<NodeId>>>,
    rounds: usize,
}

impl LevelSets {
    pub fn node_count(&self) -> usize {
        self.forward.len()
    }

    /// Number of levels, equal to the largest finite hop distance.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// `R_i^1, ..., R_i^T`.
    pub fn forward(&self, i: NodeId) -> &[Vec<NodeId>] {
        &self.forward[i]
    }

    /// `L_i^1, ..., L_i^T`.
    pub fn backward(&self, i: NodeId) -> &[Vec<NodeId>] {
        &self.backward[i]
    }

    pub fn forward_level(&self, i: NodeId, t: usize) -> &[NodeId] {
        &self.forward[i][t - 1]
    }

    pub fn backward_level(&self, i: NodeId, t: usize) -> &[NodeId] {
        &self.backward[i][t - 1]
    }

    /// Hop distance from `i` to `j` as recorded in the forward sets.
    pub fn distance(&self, i: NodeId, j: NodeId) -> Option<usize> {
        if i == j {
            return Some(0);
        }
        self.forward[i]
            .iter()
            .position(|set| set.binary_search(&j).is_ok())
            .map(|p| p + 1)
    }

    pub fn reach_count(&self, i: NodeId) -> usize {
        self.forward[i].iter().map(Vec::len).sum()
    }

    pub fn reached_by_count(&self, i: NodeId) -> usize {
        self.backward[i].iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Carries an `R` set; travels against edge direction.
    Forward,
    /// Carries an `L` set; travels along edge direction.
    Backward,
}

/// One delivered message, recorded for audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub round: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub direction: Direction,
    pub size: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundLog {
    pub messages: Vec<Message>,
}

impl RoundLog {
    pub fn messages_in_round(&self, round: usize) -> usize {
        self.messages.iter().filter(|m| m.round == round).count()
    }

    /// Messages whose sender is not a level-1 neighbor of the receiver in
    /// the direction the message claims.
    pub fn non_local<'a>(&'a self, g: &'a DirectedGraph) -> impl Iterator<Item = &'a Message> + 'a {
        self.messages.iter().filter(move |m| match m.direction {
            Direction::Forward => !g.has_edge(m.to, m.from),
            Direction::Backward => !g.has_edge(m.from, m.to),
        })
    }
}

pub fn run_levelset(g: &DirectedGraph) -> LevelSets {
    run(g, None)
}

/// Same as [`run_levelset`], also returning every message exchanged.
pub fn run_levelset_traced(g: &DirectedGraph) -> (LevelSets, RoundLog) {
    let mut log = RoundLog::default();
    let ls = run(g, Some(&mut log));
    (ls, log)
}

fn run(g: &DirectedGraph, mut log: Option<&mut RoundLog>) -> LevelSets {
    let n = g.node_count();
    let mut forward: Vec<Vec<Vec<NodeId>>> =
        (0..n).map(|i| vec![g.out_neighbors(i).to_vec()]).collect();
    let mut backward: Vec<Vec<Vec<NodeId>>> =
        (0..n).map(|i| vec![g.in_neighbors(i).to_vec()]).collect();
    let mut stamp = vec![usize::MAX; n];
    let mut round = 1;

    while forward.iter().any(|l| !l[round - 1].is_empty())
        || backward.iter().any(|l| !l[round - 1].is_empty())
    {
        // Exchange: every node hands its newest sets to its level-1 neighbors.
        let mut inbox_f: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut inbox_b: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for j in 0..n {
            for &i in g.in_neighbors(j) {
                inbox_f[i].push(j);
            }
            for &i in g.out_neighbors(j) {
                inbox_b[i].push(j);
            }
        }
        if let Some(log) = log.as_deref_mut() {
            for i in 0..n {
                for &j in &inbox_f[i] {
                    log.messages.push(Message {
                        round,
                        from: j,
                        to: i,
                        direction: Direction::Forward,
                        size: forward[j][round - 1].len(),
                    });
                }
                for &j in &inbox_b[i] {
                    log.messages.push(Message {
                        round,
                        from: j,
                        to: i,
                        direction: Direction::Backward,
                        size: backward[j][round - 1].len(),
                    });
                }
            }
        }
        // Update: each node merges only what arrived in its inbox.
        let next_f: Vec<Vec<NodeId>> = (0..n)
            .map(|i| merge_level(i, &forward[i], inbox_f[i].iter().map(|&j| &forward[j][round - 1]), &mut stamp))
            .collect();
        let next_b: Vec<Vec<NodeId>> = (0..n)
            .map(|i| merge_level(i, &backward[i], inbox_b[i].iter().map(|&j| &backward[j][round - 1]), &mut stamp))
            .collect();
        for (levels, set) in forward.iter_mut().zip(next_f) {
            levels.push(set);
        }
        for (levels, set) in backward.iter_mut().zip(next_b) {
            levels.push(set);
        }
        round += 1;
    }

    // The last level is empty everywhere; so is the first when there are no edges.
    let rounds = round - 1;
    for levels in forward.iter_mut().chain(backward.iter_mut()) {
        levels.truncate(rounds);
    }
    LevelSets {
        forward,
        backward,
        rounds,
    }
}

fn merge_level<'a>(
    i: NodeId,
    history: &[Vec<NodeId>],
    incoming: impl Iterator<Item = &'a Vec<NodeId>>,
    stamp: &mut [usize],
) -> Vec<NodeId> {
    stamp[i] = i;
    for level in history {
        for &v in level {
            stamp[v] = i;
        }
    }
    let mut out = Vec::new();
    for set in incoming {
        for &v in set {
            if stamp[v] != i {
                stamp[v] = i;
                out.push(v);
            }
        }
    }
    // Clear marks so the next node starts fresh even if it reuses index `i`.
    stamp[i] = usize::MAX;
    for level in history {
        for &v in level {
            stamp[v] = usize::MAX;
        }
    }
    for &v in &out {
        stamp[v] = usize::MAX;
    }
    out.sort_unstable();
    out
}

/// Out-degree, which is also `|R_i^1|`.
pub fn degree_centrality(g: &DirectedGraph) -> CentralityVector {
    CentralityVector::new(
        (0..g.node_count()).map(|i| g.out_degree(i) as f64).collect(),
        CentralityKind::Degree,
    )
}

/// `1 / Σ_t t |R_i^t|` when every node reaches all others; otherwise the
/// harmonic form `Σ_t |R_i^t| / t`, flagged by the returned kind.
pub fn closeness_centrality(ls: &LevelSets, g: &DirectedGraph) -> CentralityVector {
    let n = g.node_count();
    let all_reach = n >= 2 && (0..n).all(|i| ls.reach_count(i) == n - 1);
    if all_reach {
        let values = (0..n)
            .map(|i| {
                let farness: usize = ls
                    .forward(i)
                    .iter()
                    .enumerate()
                    .map(|(t, s)| (t + 1) * s.len())
                    .sum();
                1.0 / farness as f64
            })
            .collect();
        CentralityVector::new(values, CentralityKind::Closeness)
    } else {
        let values = (0..n)
            .map(|i| {
                ls.forward(i)
                    .iter()
                    .enumerate()
                    .map(|(t, s)| s.len() as f64 / (t + 1) as f64)
                    .sum()
            })
            .collect();
        CentralityVector::new(values, CentralityKind::HarmonicCloseness)
    }
}

/// Betweenness on an oriented tree from subtree sizes:
/// `B_i = Σ_{j ∈ R_i^1, k ∈ L_i^1} |R_{i→j}| |L_{k→i}|`, with
/// `|R_{i→j}| = 1 + Σ_t |R_j^t|` and `|L_{k→i}| = 1 + Σ_t |L_k^t|`.
pub fn tree_betweenness(ls: &LevelSets, g: &DirectedGraph) -> Result<CentralityVector> {
    let check = validate_oriented_tree(g);
    if !check.is_tree {
        return Err(Error::NotOrientedTree(check.diagnostic(g)));
    }
    let values = (0..g.node_count())
        .map(|i| {
            let mut b: u64 = 0;
            for &j in ls.forward_level_or_empty(i) {
                let down = 1 + ls.reach_count(j) as u64;
                for &k in ls.backward_level_or_empty(i) {
                    assert_ne!(j, k, "out-neighbor equals in-neighbor in an oriented tree");
                    let up = 1 + ls.reached_by_count(k) as u64;
                    b += down * up;
                }
            }
            b as f64
        })
        .collect();
    Ok(CentralityVector::new(values, CentralityKind::Betweenness))
}

impl LevelSets {
    fn forward_level_or_empty(&self, i: NodeId) -> &[NodeId] {
        self.forward[i].first().map_or(&[], Vec::as_slice)
    }

    fn backward_level_or_empty(&self, i: NodeId) -> &[NodeId] {
        self.backward[i].first().map_or(&[], Vec::as_slice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    const FIXTURE: &str = "1 2\n1 4\n2 1\n2 3\n3 2\n3 4\n3 6\n4 3\n4 6\n5 4\n6 4\n6 5\n";

    fn labels(g: &DirectedGraph, set: &[NodeId]) -> Vec<String> {
        set.iter().map(|&i| g.label(i).to_owned()).collect()
    }

    #[test]
    fn path_levels() {
        let g = parse_edge_list("1 2\n2 3").unwrap();
        let ls = run_levelset(&g);
        assert_eq!(ls.rounds(), 2);
        assert_eq!(ls.forward(0), &[vec![1], vec![2]]);
        assert_eq!(ls.backward(2), &[vec![1], vec![0]]);
        assert_eq!(ls.forward(2), &[vec![], vec![]]);
    }

    #[test]
    fn fixture_node_five() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let ls = run_levelset(&g);
        assert_eq!(ls.rounds(), 4);
        let five = g.find("5").unwrap();
        let got: Vec<Vec<String>> = ls.forward(five).iter().map(|s| labels(&g, s)).collect();
        assert_eq!(got, vec![vec!["4"], vec!["3", "6"], vec!["2"], vec!["1"]]);
    }

    #[test]
    fn single_node_and_empty() {
        let g = DirectedGraph::from_edges(1, &[]).unwrap();
        let ls = run_levelset(&g);
        assert_eq!(ls.rounds(), 0);
        assert!(ls.forward(0).is_empty());
        let e = DirectedGraph::from_edges(3, &[]).unwrap();
        assert_eq!(run_levelset(&e).rounds(), 0);
    }

    #[test]
    fn fixture_degree_and_closeness() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let ls = run_levelset(&g);
        let d = degree_centrality(&g).normalize().unwrap();
        let expect_d = [1.0 / 6.0, 1.0 / 6.0, 0.25, 1.0 / 6.0, 1.0 / 12.0, 1.0 / 6.0];
        for (a, b) in d.values.iter().zip(expect_d) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = closeness_centrality(&ls, &g);
        assert_eq!(c.kind, CentralityKind::Closeness);
        // Farness by hand: 9, 9, 7, 9, 12, 11.
        let farness = [9.0, 9.0, 7.0, 9.0, 12.0, 11.0];
        for (a, f) in c.values.iter().zip(farness) {
            assert!((a - 1.0 / f).abs() < 1e-15);
        }
    }

    #[test]
    fn closeness_cycle_and_harmonic_path() {
        let cyc = parse_edge_list("a b\nb c\nc a").unwrap();
        let c = closeness_centrality(&run_levelset(&cyc), &cyc);
        assert_eq!(c.values, vec![1.0 / 3.0; 3]);
        let path = parse_edge_list("1 2\n2 3").unwrap();
        let h = closeness_centrality(&run_levelset(&path), &path);
        assert_eq!(h.kind, CentralityKind::HarmonicCloseness);
        assert_eq!(h.values, vec![1.5, 1.0, 0.0]);
    }

    #[test]
    fn degree_of_complete_and_empty() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    edges.push((i, j));
                }
            }
        }
        let k4 = DirectedGraph::from_edges(4, &edges).unwrap();
        assert_eq!(degree_centrality(&k4).values, vec![3.0; 4]);
        assert_eq!(degree_centrality(&k4).normalize().unwrap().values, vec![0.25; 4]);
        let e = DirectedGraph::from_edges(3, &[]).unwrap();
        assert_eq!(degree_centrality(&e).normalize().unwrap_err(), Error::ZeroTotal);
    }

    #[test]
    fn tree_betweenness_examples() {
        for (text, expect) in [
            ("a b\nb c", vec![0.0, 1.0, 0.0]),
            ("a b\nb c\nc d", vec![0.0, 2.0, 2.0, 0.0]),
            ("r x\nr y\nr z", vec![0.0; 4]),
        ] {
            let g = parse_edge_list(text).unwrap();
            let b = tree_betweenness(&run_levelset(&g), &g).unwrap();
            assert_eq!(b.values, expect, "{text}");
        }
    }

    #[test]
    fn tree_betweenness_rejects_cycles() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let err = tree_betweenness(&run_levelset(&g), &g).unwrap_err();
        assert!(matches!(err, Error::NotOrientedTree(ref d) if d.contains("cycle")));
    }

    #[test]
    fn messages_are_local_and_bounded() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let (ls, log) = run_levelset_traced(&g);
        assert_eq!(log.non_local(&g).count(), 0);
        let budget: usize = (0..6).map(|i| g.out_degree(i) + g.in_degree(i)).sum();
        for r in 1..=ls.rounds() {
            assert!(log.messages_in_round(r) <= budget);
        }
        assert_eq!(run_levelset(&g), ls);
    }
}
