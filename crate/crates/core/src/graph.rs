//! Directed graphs, edge-list parsing and the small set of structural
//! transformations the centrality and PageRank code relies on.
//!
//! Nodes carry dense indices in `[0, N)`. The external string labels map to
//! indices in natural label order (numeric labels compare numerically and
//! sort before non-numeric ones), so the mapping is canonical and an edge
//! list survives a serialize/parse round trip with identical indices.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Dense node index in `[0, N)`.
pub type NodeId = usize;

/// Natural ordering of node labels.
pub fn compare_labels(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    labels: Vec<String>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    // Dangling nodes repaired with the uniform-column policy.
    uniform_out: Vec<bool>,
}

impl DirectedGraph {
    /// Builds a graph on `n` nodes labelled `"0"`, `"1"`, ... from `(src, dst)` pairs.
    /// Duplicate edges collapse; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<String>, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let n = labels.len();
        let mut out_sets = vec![BTreeSet::new(); n];
        for &(s, d) in edges {
            if s >= n || d >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: s.max(d) + 1,
                });
            }
            if s == d {
                return Err(Error::SelfLoop {
                    line: 0,
                    label: labels[s].clone(),
                });
            }
            out_sets[s].insert(d);
        }
        Ok(Self::from_out_sets(labels, out_sets, vec![false; n]))
    }

    fn from_out_sets(
        labels: Vec<String>,
        out_sets: Vec<BTreeSet<NodeId>>,
        uniform_out: Vec<bool>,
    ) -> Self {
        let n = labels.len();
        let mut in_adj = vec![Vec::new(); n];
        let out_adj: Vec<Vec<NodeId>> = out_sets
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        for (s, outs) in out_adj.iter().enumerate() {
            for &d in outs {
                in_adj[d].push(s);
            }
        }
        DirectedGraph {
            labels,
            out_adj,
            in_adj,
            uniform_out,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn label(&self, i: NodeId) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.labels
            .binary_search_by(|l| compare_labels(l, label))
            .ok()
    }

    /// Out-neighbors in increasing index order (`R_i^1`).
    pub fn out_neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.out_adj[i]
    }

    /// In-neighbors in increasing index order (`L_i^1`).
    pub fn in_neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.in_adj[i]
    }

    pub fn out_degree(&self, i: NodeId) -> usize {
        self.out_adj[i].len()
    }

    pub fn in_degree(&self, i: NodeId) -> usize {
        self.in_adj[i].len()
    }

    /// Whether dangling repair turned node `i`'s hyperlink column uniform.
    pub fn is_uniform_column(&self, i: NodeId) -> bool {
        self.uniform_out[i]
    }

    /// Out-degree as seen by the hyperlink matrix: `N - 1` for uniform columns.
    pub fn effective_out_degree(&self, i: NodeId) -> usize {
        if self.uniform_out[i] {
            self.node_count() - 1
        } else {
            self.out_degree(i)
        }
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.out_adj[src].binary_search(&dst).is_ok()
    }

    /// All edges, sorted by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(s, outs)| outs.iter().map(move |&d| (s, d)))
    }

    pub fn dangling_nodes(&self) -> Vec<NodeId> {
        (0..self.node_count())
            .filter(|&i| self.effective_out_degree(i) == 0)
            .collect()
    }

    /// Nodes reachable from `start` by forward paths, including `start`.
    pub fn reachable_from(&self, start: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.out_adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        if !self.reachable_from(0).iter().all(|&b| b) {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.in_adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.iter().all(|&b| b)
    }
}

pub(crate) fn content(raw: &str) -> &str {
    match raw.find('#') {
        Some(pos) => &raw[..pos],
        None => raw,
    }
}

/// Sorted label table plus index lookup built from every label seen in a file.
pub(crate) fn label_table(seen: HashSet<&str>) -> (Vec<String>, HashMap<String, NodeId>) {
    let mut labels: Vec<String> = seen.into_iter().map(str::to_owned).collect();
    labels.sort_by(|a, b| compare_labels(a, b));
    let index = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    (labels, index)
}

/// Parses `src dst` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_edge_list(text: &str) -> Result<DirectedGraph> {
    let mut seen = HashSet::new();
    let mut raw_edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut fields = content(raw).split_whitespace();
        let Some(src) = fields.next() else { continue };
        let dst = fields.next().ok_or_else(|| Error::Malformed {
            line,
            reason: "expected `src dst`".into(),
        })?;
        if fields.next().is_some() {
            return Err(Error::Malformed {
                line,
                reason: "more than two fields".into(),
            });
        }
        if src == dst {
            return Err(Error::SelfLoop {
                line,
                label: src.to_owned(),
            });
        }
        seen.insert(src);
        seen.insert(dst);
        raw_edges.push((src, dst));
    }
    let (labels, index) = label_table(seen);
    let edges: Vec<_> = raw_edges
        .iter()
        .map(|(s, d)| (index[*s], index[*d]))
        .collect();
    DirectedGraph::with_labels(labels, &edges)
}

/// Canonical edge-list text: one `src dst` line per edge in index order.
pub fn serialize_edge_list(g: &DirectedGraph) -> String {
    let mut out = String::new();
    for (s, d) in g.edges() {
        let _ = writeln!(out, "{} {}", g.label(s), g.label(d));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DanglingPolicy {
    /// Add `d -> u` for every in-neighbor `u` of a dangling node `d`.
    #[default]
    Backlink,
    /// Give the dangling node a uniform `1/(N-1)` hyperlink column.
    UniformColumn,
}

impl std::str::FromStr for DanglingPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "backlink" => Ok(DanglingPolicy::Backlink),
            "uniform-column" => Ok(DanglingPolicy::UniformColumn),
            other => Err(format!(
                "unknown dangling policy `{other}` (expected backlink or uniform-column)"
            )),
        }
    }
}

/// Returns a graph in which every node has at least one (effective) out-link.
pub fn repair_dangling(g: &DirectedGraph, policy: DanglingPolicy) -> Result<DirectedGraph> {
    let dangling = g.dangling_nodes();
    if dangling.is_empty() {
        return Ok(g.clone());
    }
    let n = g.node_count();
    let mut out_sets: Vec<BTreeSet<NodeId>> = g
        .out_adj
        .iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    let mut uniform = g.uniform_out.clone();
    for d in dangling {
        match policy {
            DanglingPolicy::Backlink => {
                if g.in_degree(d) == 0 {
                    return Err(Error::Unrepairable {
                        label: g.label(d).to_owned(),
                    });
                }
                out_sets[d].extend(g.in_neighbors(d).iter().copied());
            }
            DanglingPolicy::UniformColumn => {
                if n < 2 {
                    return Err(Error::Unrepairable {
                        label: g.label(d).to_owned(),
                    });
                }
                uniform[d] = true;
            }
        }
    }
    Ok(DirectedGraph::from_out_sets(g.labels.clone(), out_sets, uniform))
}

/// Closes the edge set under reversal.
pub fn symmetrize(g: &DirectedGraph) -> DirectedGraph {
    let mut out_sets: Vec<BTreeSet<NodeId>> = g
        .out_adj
        .iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    for (s, d) in g.edges() {
        out_sets[d].insert(s);
    }
    DirectedGraph::from_out_sets(g.labels.clone(), out_sets, g.uniform_out.clone())
}

/// Outcome of [`validate_oriented_tree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCheck {
    pub is_tree: bool,
    /// Node sequence of an undirected cycle when `is_tree` is false.
    pub cycle: Option<Vec<NodeId>>,
}

impl TreeCheck {
    pub fn diagnostic(&self, g: &DirectedGraph) -> String {
        match &self.cycle {
            None => "underlying undirected graph is acyclic".into(),
            Some(c) => {
                let names: Vec<&str> = c.iter().map(|&i| g.label(i)).collect();
                format!("undirected cycle {}", names.join(" - "))
            }
        }
    }
}

/// Checks that the underlying undirected multigraph (one undirected edge per
/// directed edge) is a forest.
pub fn validate_oriented_tree(g: &DirectedGraph) -> TreeCheck {
    let n = g.node_count();
    // (neighbor, edge id)
    let mut adj: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n];
    for (e, (s, d)) in g.edges().enumerate() {
        adj[s].push((d, e));
        adj[d].push((s, e));
    }
    let mut parent: Vec<Option<(NodeId, usize)>> = vec![None; n];
    let mut visited = vec![false; n];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            let via = parent[u].map(|(_, e)| e);
            for &(v, e) in &adj[u] {
                if Some(e) == via {
                    continue;
                }
                if visited[v] {
                    // Only report each non-tree edge from one side.
                    if parent[v].map(|(_, pe)| pe) == Some(e) {
                        continue;
                    }
                    return TreeCheck {
                        is_tree: false,
                        cycle: Some(cycle_through(u, v, &parent)),
                    };
                }
                visited[v] = true;
                parent[v] = Some((u, e));
                stack.push(v);
            }
        }
    }
    TreeCheck {
        is_tree: true,
        cycle: None,
    }
}

fn cycle_through(u: NodeId, v: NodeId, parent: &[Option<(NodeId, usize)>]) -> Vec<NodeId> {
    let path_to_root = |mut x: NodeId| {
        let mut p = vec![x];
        while let Some((q, _)) = parent[x] {
            p.push(q);
            x = q;
        }
        p
    };
    let pu = path_to_root(u);
    let pv = path_to_root(v);
    let on_v: HashSet<_> = pv.iter().copied().collect();
    let meet_idx = pu.iter().position(|x| on_v.contains(x)).unwrap_or(pu.len() - 1);
    let meet = pu[meet_idx];
    let mut cycle: Vec<NodeId> = pu[..=meet_idx].to_vec();
    let v_idx = pv.iter().position(|&x| x == meet).unwrap_or(pv.len() - 1);
    cycle.extend(pv[..v_idx].iter().rev());
    cycle
}
