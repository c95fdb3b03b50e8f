//! Seeded synthetic graph families used by tests, experiments and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::graph::{repair_dangling, DanglingPolicy, DirectedGraph, NodeId};

/// Each ordered pair `(i, j)`, `i != j`, is an edge with probability `p`.
pub fn random_digraph<R: Rng>(n: usize, p: f64, rng: &mut R) -> DirectedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    DirectedGraph::from_edges(n, &edges).expect("generated edges are valid")
}

fn symmetric(n: usize, undirected: &[(NodeId, NodeId)]) -> DirectedGraph {
    let edges: Vec<_> = undirected
        .iter()
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .collect();
    DirectedGraph::from_edges(n, &edges).expect("generated edges are valid")
}

/// Undirected `G(n, p)` as a symmetric digraph, redrawn until connected.
pub fn connected_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> DirectedGraph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        let g = symmetric(n, &edges);
        if g.is_strongly_connected() {
            return g;
        }
    }
}

/// Uniform random recursive tree with every edge given a random direction
/// and node ids shuffled.
pub fn random_oriented_tree<R: Rng>(n: usize, rng: &mut R) -> DirectedGraph {
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<_> = (1..n)
        .map(|i| {
            let parent = rng.gen_range(0..i);
            let (a, b) = (perm[parent], perm[i]);
            if rng.gen_bool(0.5) {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    DirectedGraph::from_edges(n, &edges).expect("generated edges are valid")
}

/// Preferential attachment: starts from a clique on `attach + 1` nodes, then
/// each new node links to `attach` distinct existing nodes chosen with
/// probability proportional to degree. Returned as a symmetric digraph.
pub fn scale_free<R: Rng>(n: usize, attach: usize, rng: &mut R) -> DirectedGraph {
    let core = (attach + 1).min(n);
    let mut edges = Vec::new();
    // Each endpoint appears once per incident edge.
    let mut ends: Vec<NodeId> = Vec::new();
    for i in 0..core {
        for j in i + 1..core {
            edges.push((i, j));
            ends.extend([i, j]);
        }
    }
    for v in core..n {
        let mut chosen: Vec<NodeId> = Vec::with_capacity(attach);
        while chosen.len() < attach {
            let u = ends[rng.gen_range(0..ends.len())];
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for u in chosen {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    symmetric(n, &edges)
}

/// Directed web-like graph: pages grouped into sites of random size, each
/// with a home page linking to all its pages, random internal links, and
/// cross-site links whose targets are picked by preferential attachment on
/// in-degree. Some pages get no out-links and are repaired with back-links.
pub fn web_like<R: Rng>(n: usize, rng: &mut R) -> Result<DirectedGraph> {
    let mut edges = Vec::new();
    let mut site_start = 0;
    let mut sites = Vec::new();
    while site_start < n {
        let size = rng.gen_range(5..=40).min(n - site_start);
        sites.push(site_start..site_start + size);
        site_start += size;
    }
    // Targets weighted by (in-degree + 1).
    let mut targets: Vec<NodeId> = (0..n).collect();
    for site in &sites {
        let home = site.start;
        for page in site.clone() {
            if page != home {
                edges.push((home, page));
                targets.push(page);
                if rng.gen_bool(0.05) {
                    continue; // left dangling
                }
                edges.push((page, home));
                targets.push(home);
            }
            let local = rng.gen_range(1..=4);
            for _ in 0..local {
                let q = rng.gen_range(site.clone());
                if q != page {
                    edges.push((page, q));
                    targets.push(q);
                }
            }
            let external = rng.gen_range(1..=6);
            for _ in 0..external {
                let q = targets[rng.gen_range(0..targets.len())];
                if q != page {
                    edges.push((page, q));
                    targets.push(q);
                }
            }
        }
    }
    let g = DirectedGraph::from_edges(n, &edges).expect("generated edges are valid");
    repair_dangling(&g, DanglingPolicy::Backlink)
}
