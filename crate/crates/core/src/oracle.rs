//! Centralized shortest-path oracles: all-pairs BFS and Brandes betweenness.

use std::collections::VecDeque;

use crate::centrality::{CentralityKind, CentralityVector};
use crate::graph::{DirectedGraph, NodeId};

/// Hop distances; `None` means unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    dist: Vec<Vec<Option<usize>>>,
}

impl DistanceTable {
    pub fn get(&self, from: NodeId, to: NodeId) -> Option<usize> {
        self.dist[from][to]
    }

    pub fn row(&self, from: NodeId) -> &[Option<usize>] {
        &self.dist[from]
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> usize {
        self.dist
            .iter()
            .flat_map(|r| r.iter().flatten())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

pub fn bfs_from(g: &DirectedGraph, source: NodeId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in g.out_neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn bfs_all_pairs(g: &DirectedGraph) -> DistanceTable {
    DistanceTable {
        dist: (0..g.node_count()).map(|s| bfs_from(g, s)).collect(),
    }
}

/// Closeness from BFS distances, with the same harmonic fallback as the
/// level-set version when some node cannot reach every other node.
pub fn bfs_closeness(d: &DistanceTable) -> CentralityVector {
    let n = d.dist.len();
    let all_reach = n >= 2 && d.dist.iter().all(|r| r.iter().all(Option::is_some));
    if all_reach {
        let values = d
            .dist
            .iter()
            .map(|r| 1.0 / r.iter().flatten().sum::<usize>() as f64)
            .collect();
        CentralityVector::new(values, CentralityKind::Closeness)
    } else {
        let values = d
            .dist
            .iter()
            .map(|r| {
                r.iter()
                    .flatten()
                    .filter(|&&t| t > 0)
                    .map(|&t| 1.0 / t as f64)
                    .sum()
            })
            .collect();
        CentralityVector::new(values, CentralityKind::HarmonicCloseness)
    }
}

/// Exact betweenness over ordered pairs, unnormalized.
pub fn brandes_betweenness(g: &DirectedGraph) -> CentralityVector {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for s in 0..n {
        sigma.iter_mut().for_each(|v| *v = 0.0);
        dist.iter_mut().for_each(|v| *v = -1);
        delta.iter_mut().for_each(|v| *v = 0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.out_neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    CentralityVector::new(bc, CentralityKind::Betweenness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    const FIXTURE: &str = "1 2\n1 4\n2 1\n2 3\n3 2\n3 4\n3 6\n4 3\n4 6\n5 4\n6 4\n6 5\n";

    #[test]
    fn fixture_distances() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let d = bfs_all_pairs(&g);
        assert_eq!(d.get(4, 0), Some(4));
        assert_eq!(d.get(0, 4), Some(3));
        for i in 0..6 {
            assert_eq!(d.get(i, i), Some(0));
        }
        assert_eq!(d.diameter(), 4);
    }

    #[test]
    fn closeness_from_distances() {
        let g = parse_edge_list(FIXTURE).unwrap();
        let c = bfs_closeness(&bfs_all_pairs(&g));
        assert_eq!(c.kind, CentralityKind::Closeness);
        assert_eq!(c.values[2], 1.0 / 7.0);
        let path = parse_edge_list("1 2\n2 3").unwrap();
        let h = bfs_closeness(&bfs_all_pairs(&path));
        assert_eq!(h.values, vec![1.5, 1.0, 0.0]);
    }

    #[test]
    fn unreachable_is_none() {
        let g = parse_edge_list("a b\nc d").unwrap();
        assert_eq!(bfs_all_pairs(&g).get(0, 2), None);
    }

    #[test]
    fn path_and_cycle() {
        let g = parse_edge_list("a b\nb c").unwrap();
        assert_eq!(brandes_betweenness(&g).values, vec![0.0, 1.0, 0.0]);
        let c = parse_edge_list("a b\nb c\nc d\nd a").unwrap();
        let b = brandes_betweenness(&c).normalize().unwrap();
        for v in b.values {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn fixture_raw_betweenness() {
        // Independently enumerated pair by pair; see the integration tests for
        // the brute-force path enumerator cross-check.
        let g = parse_edge_list(FIXTURE).unwrap();
        assert_eq!(
            brandes_betweenness(&g).values,
            vec![0.5, 4.5, 8.5, 9.5, 0.0, 4.0]
        );
    }
}
