use distcent::generate::random_digraph;
use distcent::graph::{parse_edge_list, repair_dangling, serialize_edge_list, DanglingPolicy, DirectedGraph};
use distcent::sparse::build_hyperlink_matrix;
use distcent::temporal::{
    parse_temporal_edge_list, serialize_temporal_edge_list, PersistentAverage, Snapshot, TemporalGraphSequence,
};
use distcent::trace::{parse_trace, trace_to_text, TraceRow};
use distcent::{CentralityKind, CentralityTable, CentralityVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, p: f64, seed: u64) -> DirectedGraph {
    random_digraph(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn kind() -> impl Strategy<Value = CentralityKind> {
    prop_oneof![
        Just(CentralityKind::Degree),
        Just(CentralityKind::Closeness),
        Just(CentralityKind::HarmonicCloseness),
        Just(CentralityKind::Betweenness),
        Just(CentralityKind::PageRank),
    ]
}

proptest! {
    #[test]
    fn table_round_trip(
        values in prop::collection::vec(-1e6f64..1e6, 1..30),
        kind in kind(),
        normalized in any::<bool>(),
        notes in prop::collection::vec(("[a-z_]{1,8}", "[a-z0-9.]{0,8}"), 0..4),
    ) {
        let labels: Vec<String> = (0..values.len()).map(|i| format!("n{i}")).collect();
        let mut v = CentralityVector::new(values, kind);
        v.normalized = normalized;
        let mut t = CentralityTable::new(labels, v);
        for (k, val) in notes {
            t = t.note(k, val);
        }
        let back = CentralityTable::parse(&t.to_text()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn trace_round_trip(rows in prop::collection::vec((any::<u32>(), 0.0f64..10.0, 0.0f64..1.0, 1.0f64..1e4, 0usize..100), 0..40)) {
        let rows: Vec<TraceRow> = rows
            .into_iter()
            .map(|(k, error, residual, alpha_inv, active_node)| TraceRow { k: k as u64, error, residual, alpha_inv, active_node })
            .collect();
        let text = trace_to_text(&rows);
        let back = parse_trace(&text).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        prop_assert_eq!(trace_to_text(&back), text);
        for (a, b) in back.iter().zip(&rows) {
            prop_assert_eq!(a.k, b.k);
            prop_assert_eq!(a.active_node, b.active_node);
            prop_assert!((a.error - b.error).abs() <= 1e-11 * b.error.abs().max(1e-300));
        }
    }

    #[test]
    fn edge_list_round_trip(n in 2usize..40, p in 0.02f64..0.3, seed in any::<u64>()) {
        let g = graph(n, p, seed);
        prop_assume!(g.edge_count() > 0);
        let back = parse_edge_list(&serialize_edge_list(&g)).unwrap();
        let used: Vec<usize> = (0..n).filter(|&i| g.out_degree(i) + g.in_degree(i) > 0).collect();
        prop_assert_eq!(back.node_count(), used.len());
        let mut a: Vec<(String, String)> = g.edges().map(|(s, d)| (g.label(s).to_owned(), g.label(d).to_owned())).collect();
        let mut b: Vec<(String, String)> = back.edges().map(|(s, d)| (back.label(s).to_owned(), back.label(d).to_owned())).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn temporal_round_trip(k in 1usize..6, seed in any::<u64>()) {
        let snaps: Vec<Snapshot> = (0..k)
            .map(|t| Snapshot { time: 3 * t as u64 + 1, graph: graph(8, 0.3, seed.wrapping_add(t as u64)) })
            .collect();
        let seq = TemporalGraphSequence::new(snaps).unwrap();
        let back = parse_temporal_edge_list(&serialize_temporal_edge_list(&seq)).unwrap();
        prop_assert_eq!(back.len(), seq.len());
        for (a, b) in back.snapshots().iter().zip(seq.snapshots()) {
            prop_assert_eq!(a.time, b.time);
            let ea: Vec<_> = a.graph.edges().map(|(s, d)| (a.graph.label(s).to_owned(), a.graph.label(d).to_owned())).collect();
            let eb: Vec<_> = b.graph.edges().map(|(s, d)| (b.graph.label(s).to_owned(), b.graph.label(d).to_owned())).collect();
            prop_assert_eq!(ea, eb);
        }
    }

    #[test]
    fn persistent_average_weights(rho in 0.1f64..=1.0, seed in any::<u64>(), k in 1usize..8) {
        let n = 10;
        let mats: Vec<_> = (0..k)
            .filter_map(|t| repair_dangling(&graph(n, 0.3, seed.wrapping_add(t as u64)), DanglingPolicy::UniformColumn).ok())
            .map(|g| build_hyperlink_matrix(&g).unwrap())
            .collect();
        prop_assume!(!mats.is_empty());
        let mut pa = PersistentAverage::new(n, rho).unwrap();
        for w in &mats {
            pa.update(w).unwrap();
        }
        // Explicit weighted mean: weight of snapshot t is rho^(K-1-t).
        let kk = mats.len();
        let weights: Vec<f64> = (0..kk).map(|t| rho.powi((kk - 1 - t) as i32)).collect();
        let z: f64 = weights.iter().sum();
        prop_assert!((pa.normalizer() - z).abs() < 1e-12 * z);
        for i in 0..n {
            for j in 0..n {
                let want: f64 = mats.iter().zip(&weights).map(|(w, c)| c * w.get(i, j)).sum::<f64>() / z;
                prop_assert!((pa.wbar().get(i, j) - want).abs() < 1e-12);
            }
        }
        prop_assert!(pa.wbar().is_column_stochastic(1e-12));
    }
}

#[test]
fn identical_snapshots_leave_average_unchanged() {
    let g = repair_dangling(&graph(12, 0.3, 4), DanglingPolicy::Backlink).unwrap();
    let w = build_hyperlink_matrix(&g).unwrap();
    let mut pa = PersistentAverage::new(12, 0.7).unwrap();
    for _ in 0..50 {
        pa.update(&w).unwrap();
        assert_eq!(pa.wbar(), &w);
    }
}
