use distcent::generate::{random_digraph, random_oriented_tree};
use distcent::graph::{validate_oriented_tree, DirectedGraph, NodeId};
use distcent::levelset::{closeness_centrality, degree_centrality, run_levelset, run_levelset_traced, tree_betweenness};
use distcent::oracle::{bfs_all_pairs, bfs_closeness, brandes_betweenness};
use distcent::CentralityKind;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn digraph(n: usize, p: f64, seed: u64) -> DirectedGraph {
    random_digraph(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Betweenness by enumerating every simple path. Only for tiny graphs.
fn path_enumeration_betweenness(g: &DirectedGraph) -> Vec<f64> {
    fn walk(g: &DirectedGraph, path: &mut Vec<NodeId>, on: &mut [bool], out: &mut Vec<Vec<NodeId>>) {
        out.push(path.clone());
        let u = *path.last().unwrap();
        for &v in g.out_neighbors(u) {
            if !on[v] {
                on[v] = true;
                path.push(v);
                walk(g, path, on, out);
                path.pop();
                on[v] = false;
            }
        }
    }
    let n = g.node_count();
    let mut b = vec![0.0; n];
    for s in 0..n {
        let mut paths = Vec::new();
        let mut on = vec![false; n];
        on[s] = true;
        walk(g, &mut vec![s], &mut on, &mut paths);
        for t in (0..n).filter(|&t| t != s) {
            let to_t: Vec<&Vec<NodeId>> = paths.iter().filter(|p| *p.last().unwrap() == t).collect();
            let Some(best) = to_t.iter().map(|p| p.len()).min() else {
                continue;
            };
            let shortest: Vec<_> = to_t.into_iter().filter(|p| p.len() == best).collect();
            let count = shortest.len() as f64;
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    b[v] += 1.0 / count;
                }
            }
        }
    }
    b
}

fn union_find_is_forest(g: &DirectedGraph) -> bool {
    let mut parent: Vec<usize> = (0..g.node_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in g.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

#[test]
fn fixture_brandes_matches_enumeration() {
    let g = distcent::graph::parse_edge_list("1 2\n1 4\n2 1\n2 3\n3 2\n3 4\n3 6\n4 3\n4 6\n5 4\n6 4\n6 5\n").unwrap();
    let b = path_enumeration_betweenness(&g);
    assert_eq!(b, vec![0.5, 4.5, 8.5, 9.5, 0.0, 4.0]);
    let brandes = brandes_betweenness(&g);
    for (x, y) in brandes.values.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn level_messages_stay_on_edges() {
    for seed in 0..20 {
        let g = digraph(30, 0.1, seed);
        let (ls, log) = run_levelset_traced(&g);
        assert_eq!(log.non_local(&g).count(), 0);
        assert_eq!(ls.rounds(), bfs_all_pairs(&g).diameter());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_sets_are_bfs_distances(n in 1usize..40, p in 0.0f64..0.3, seed in any::<u64>()) {
        let g = digraph(n, p, seed);
        let ls = run_levelset(&g);
        let d = bfs_all_pairs(&g);
        for i in 0..n {
            let mut seen = vec![false; n];
            for (t, level) in ls.forward(i).iter().enumerate() {
                for &j in level {
                    prop_assert!(!seen[j], "node {} in two forward levels of {}", j, i);
                    seen[j] = true;
                    prop_assert_eq!(d.get(i, j), Some(t + 1));
                }
            }
            for (t, level) in ls.backward(i).iter().enumerate() {
                for &j in level {
                    prop_assert_eq!(d.get(j, i), Some(t + 1));
                }
            }
            for j in 0..n {
                prop_assert_eq!(ls.distance(i, j), d.get(i, j));
            }
            let reached = (0..n).filter(|&j| j != i && d.get(i, j).is_some()).count();
            prop_assert_eq!(ls.reach_count(i), reached);
        }
    }

    #[test]
    fn closeness_matches_bfs(n in 2usize..30, p in 0.05f64..0.5, seed in any::<u64>()) {
        let g = digraph(n, p, seed);
        let ls = run_levelset(&g);
        let a = closeness_centrality(&ls, &g);
        let b = bfs_closeness(&bfs_all_pairs(&g));
        prop_assert_eq!(a.kind, b.kind);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        if g.is_strongly_connected() {
            prop_assert_eq!(a.kind, CentralityKind::Closeness);
        }
    }

    #[test]
    fn degree_is_out_degree(n in 1usize..30, p in 0.0f64..0.5, seed in any::<u64>()) {
        let g = digraph(n, p, seed);
        let d = degree_centrality(&g);
        for i in 0..n {
            prop_assert_eq!(d.values[i], g.out_degree(i) as f64);
        }
    }

    #[test]
    fn brandes_matches_enumeration(n in 1usize..7, p in 0.0f64..0.7, seed in any::<u64>()) {
        let g = digraph(n, p, seed);
        let a = brandes_betweenness(&g);
        let b = path_enumeration_betweenness(&g);
        for (x, y) in a.values.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9, "{:?} vs {:?}", a.values, b);
        }
    }

    #[test]
    fn tree_betweenness_is_exact(n in 1usize..120, seed in any::<u64>()) {
        let g = random_oriented_tree(n, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(validate_oriented_tree(&g).is_tree);
        let ls = run_levelset(&g);
        let tree = tree_betweenness(&ls, &g).unwrap();
        let brandes = brandes_betweenness(&g);
        prop_assert_eq!(&tree.values, &brandes.values);
        prop_assert!(tree.values.iter().all(|v| v.fract() == 0.0));
    }

    #[test]
    fn tree_check_matches_union_find(n in 1usize..25, p in 0.0f64..0.2, seed in any::<u64>()) {
        let g = digraph(n, p, seed);
        let check = validate_oriented_tree(&g);
        prop_assert_eq!(check.is_tree, union_find_is_forest(&g));
        prop_assert_eq!(check.cycle.is_some(), !check.is_tree);
        if !check.is_tree {
            prop_assert!(tree_betweenness(&run_levelset(&g), &g).is_err());
        }
    }
}
