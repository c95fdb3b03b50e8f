use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use distcent::centrality::{CentralityKind, CentralityTable, CentralityVector};
use distcent::distributed::{run_simulation, run_simulation_temporal, size_estimates_to_text};
use distcent::graph::{parse_edge_list, repair_dangling, validate_oriented_tree, DirectedGraph};
use distcent::kaczmarz::{
    inf_distance, run_static, run_temporal, Diagnostics, KaczmarzState, Mode, RunConfig as EngineConfig,
    SnapshotSchedule, TargetMode, TemporalConfig, TemporalInput,
};
use distcent::levelset::{closeness_centrality, degree_centrality, run_levelset, tree_betweenness};
use distcent::oracle::{bfs_all_pairs, bfs_closeness, brandes_betweenness};
use distcent::pagerank::{build_regression_rows, direct_ls_solve, power_method, DENSE_LIMIT};
use distcent::sparse::build_hyperlink_matrix;
use distcent::surfer::{build_transition_matrix, SurferChain};
use distcent::temporal::{parse_temporal_edge_list, PersistentAverage};
use distcent::trace::trace_to_text;

use crate::config::{EngineMode, RunConfig};
use crate::CliError;

const MAX_POWER_ITER: usize = 100_000;
/// Largest allowed gap between the two exact PageRank solvers.
pub const ORACLE_AGREEMENT: f64 = 1e-8;

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

struct Output<'a> {
    dir: &'a Path,
}

impl<'a> Output<'a> {
    fn new(dir: &'a Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output { dir })
    }

    fn write(&self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn table(&self, name: &str, table: &CentralityTable) -> Result<(), CliError> {
        self.write(name, &table.to_text())
    }
}

fn table(g: &DirectedGraph, v: CentralityVector, notes: &[(String, String)]) -> CentralityTable {
    let mut t = CentralityTable::new(g.labels().to_vec(), v);
    t.notes.extend_from_slice(notes);
    t
}

fn labels_of(g: &DirectedGraph) -> Vec<String> {
    g.labels().to_vec()
}

pub fn cmd_centrality(input: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let g = parse_edge_list(&read_input(input)?)?;
    let ls = run_levelset(&g);
    let degree = degree_centrality(&g).normalize()?;
    let closeness = closeness_centrality(&ls, &g).normalize()?;
    let (between, source) = if validate_oriented_tree(&g).is_tree {
        (tree_betweenness(&ls, &g)?, "distributed")
    } else {
        (brandes_betweenness(&g), "oracle")
    };
    let between = between.normalize()?;
    let repaired = repair_dangling(&g, cfg.dangling)?;
    let w = build_hyperlink_matrix(&repaired)?;
    let pr = power_method(&w, cfg.damping, cfg.power_tol, MAX_POWER_ITER)?;

    let out = Output::new(&cfg.output_dir)?;
    let levelset = [("source".to_owned(), "level-sets".to_owned()), ("rounds".to_owned(), ls.rounds().to_string())];
    out.table("degree.csv", &table(&g, degree, &levelset))?;
    out.table("closeness.csv", &table(&g, closeness, &levelset))?;
    out.table(
        "betweenness.csv",
        &table(&g, between, &[("source".into(), source.into())]),
    )?;
    out.table(
        "pagerank.csv",
        &table(
            &g,
            CentralityVector::new(pr.x, CentralityKind::PageRank),
            &[
                ("source".into(), "oracle".into()),
                ("method".into(), "power".into()),
                ("damping".into(), cfg.damping.to_string()),
                ("tolerance".into(), format!("{:e}", cfg.power_tol)),
                ("power_iterations".into(), pr.iterations.to_string()),
            ],
        ),
    )?;
    Ok(())
}

struct Reference {
    oracle: Option<Vec<f64>>,
    rows: Option<Vec<distcent::pagerank::RegressionRow>>,
}

impl Reference {
    fn diagnostics(&self) -> Diagnostics<'_> {
        Diagnostics {
            oracle: self.oracle.as_deref(),
            rows: self.rows.as_deref(),
        }
    }
}

fn reference(w: &distcent::SparseColumnMatrix, cfg: &RunConfig) -> Result<Reference, CliError> {
    let n = w.dim();
    if n > DENSE_LIMIT {
        return Ok(Reference {
            oracle: None,
            rows: Some(build_regression_rows(w, cfg.damping, Some(n))?),
        });
    }
    Ok(Reference {
        oracle: Some(power_method(w, cfg.damping, cfg.power_tol, MAX_POWER_ITER)?.x),
        rows: Some(build_regression_rows(w, cfg.damping, Some(n))?),
    })
}

fn result_notes(cfg: &RunConfig, mode: &str, x: &[f64], reference: &Reference) -> Vec<(String, String)> {
    let mut notes = vec![("mode".to_owned(), mode.to_owned())];
    notes.extend(cfg.notes());
    notes.push(("sum".into(), x.iter().sum::<f64>().to_string()));
    if let Some(o) = &reference.oracle {
        notes.push(("oracle".into(), "power".into()));
        notes.push(("oracle_tolerance".into(), format!("{:e}", cfg.power_tol)));
        notes.push(("oracle_inf_error".into(), format!("{:e}", inf_distance(x, o))));
    }
    notes
}

fn engine_config(cfg: &RunConfig) -> EngineConfig {
    EngineConfig {
        m: cfg.damping,
        iterations: cfg.iterations,
        trace_stride: cfg.trace_stride,
    }
}

fn mode_name(mode: EngineMode) -> &'static str {
    match mode {
        EngineMode::KnownN => "known-n",
        EngineMode::UnknownN => "unknown-n",
        EngineMode::Dist => "dist",
    }
}

pub fn cmd_pagerank(input: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let g = repair_dangling(&parse_edge_list(&read_input(input)?)?, cfg.dangling)?;
    let n = g.node_count();
    let w = build_hyperlink_matrix(&g)?;
    let chain = Arc::new(build_transition_matrix(&g, cfg.omega)?);
    let reference = reference(&w, cfg)?;
    let diag = reference.diagnostics();
    let ecfg = engine_config(cfg);
    let mut selector = SurferChain::new(chain, cfg.seed);

    let (x, trace, sizes) = match cfg.mode {
        EngineMode::KnownN => {
            let rows = build_regression_rows(&w, cfg.damping, Some(n))?;
            let st = run_static(KaczmarzState::new(n, Mode::KnownN), &rows, &mut selector, &ecfg, &diag)?;
            (st.x, st.trace, None)
        }
        EngineMode::UnknownN => {
            let rows = build_regression_rows(&w, cfg.damping, None)?;
            let st = run_static(KaczmarzState::new(n, Mode::UnknownN), &rows, &mut selector, &ecfg, &diag)?;
            (st.x, st.trace, None)
        }
        EngineMode::Dist => {
            let sim = run_simulation(&g, &mut selector, &ecfg, &diag)?;
            (sim.x(), sim.trace.clone(), Some(sim.size_estimates()))
        }
    };

    let out = Output::new(&cfg.output_dir)?;
    let notes = result_notes(cfg, mode_name(cfg.mode), &x, &reference);
    out.table(
        "pagerank.csv",
        &table(&g, CentralityVector::new(x, CentralityKind::PageRank), &notes),
    )?;
    out.write("trace.csv", &trace_to_text(&trace))?;
    if let Some(o) = &reference.oracle {
        out.table(
            "oracle.csv",
            &table(
                &g,
                CentralityVector::new(o.clone(), CentralityKind::PageRank),
                &[("method".into(), "power".into()), ("tolerance".into(), format!("{:e}", cfg.power_tol))],
            ),
        )?;
    }
    if let Some(est) = sizes {
        out.write("size_estimates.csv", &size_estimates_to_text(&labels_of(&g), &est))?;
    }
    Ok(())
}

pub fn cmd_pagerank_temporal(input: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let seq = parse_temporal_edge_list(&read_input(input)?)?;
    let seq = seq.map_graphs(|g| repair_dangling(g, cfg.dangling))?;
    let n = seq.node_count();
    let tin = TemporalInput::prepare(&seq, cfg.omega, cfg.joint_window)?;
    let schedule = SnapshotSchedule::new(cfg.snapshot_stride)?;
    let target = match cfg.mode {
        EngineMode::KnownN => TargetMode::KnownN(n),
        EngineMode::UnknownN | EngineMode::Dist => TargetMode::UnknownN,
    };

    // Persistent average at the end of the run, for reference values only.
    let mut pa = PersistentAverage::new(n, cfg.rho)?;
    if cfg.iterations > 0 {
        let last = schedule.index_at(cfg.iterations - 1, tin.len());
        for w in &tin.matrices[..=last] {
            pa.update(w)?;
        }
    }
    let reference = if pa.snapshot_count() > 0 {
        reference(pa.wbar(), cfg)?
    } else {
        Reference { oracle: None, rows: None }
    };
    let diag = reference.diagnostics();
    let ecfg = engine_config(cfg);
    let tcfg = TemporalConfig {
        rho: cfg.rho,
        schedule,
        target,
        seed: cfg.seed,
    };

    let (x, trace, sizes) = if cfg.mode == EngineMode::Dist {
        let graphs: Vec<DirectedGraph> = seq.snapshots().iter().map(|s| s.graph.clone()).collect();
        let sim = run_simulation_temporal(&graphs, &tin, &ecfg, &tcfg, &diag)?;
        (sim.x(), sim.trace.clone(), Some(sim.size_estimates()))
    } else {
        let (st, _) = run_temporal(&tin, &ecfg, &tcfg, &diag)?;
        (st.x, st.trace, None)
    };

    let g0 = &seq.snapshots()[0].graph;
    let out = Output::new(&cfg.output_dir)?;
    let mut notes = result_notes(cfg, mode_name(cfg.mode), &x, &reference);
    notes.push(("rho".into(), cfg.rho.to_string()));
    notes.push(("snapshot_stride".into(), cfg.snapshot_stride.to_string()));
    notes.push(("snapshots_absorbed".into(), pa.snapshot_count().to_string()));
    out.table(
        "pagerank.csv",
        &table(g0, CentralityVector::new(x, CentralityKind::PageRank), &notes),
    )?;
    out.write("trace.csv", &trace_to_text(&trace))?;

    let mut sums = String::new();
    let _ = writeln!(sums, "# rho={}", cfg.rho);
    let _ = writeln!(sums, "# snapshots_absorbed={}", pa.snapshot_count());
    let _ = writeln!(sums, "# normalizer={}", pa.normalizer());
    sums.push_str("node,column_sum\n");
    for (label, s) in g0.labels().iter().zip(pa.wbar().column_sums()) {
        let _ = writeln!(sums, "{label},{s}");
    }
    out.write("wbar_column_sums.csv", &sums)?;
    if let Some(o) = &reference.oracle {
        out.table(
            "oracle.csv",
            &table(
                g0,
                CentralityVector::new(o.clone(), CentralityKind::PageRank),
                &[
                    ("method".into(), "power".into()),
                    ("matrix".into(), "persistent-average".into()),
                    ("tolerance".into(), format!("{:e}", cfg.power_tol)),
                ],
            ),
        )?;
    }
    if let Some(est) = sizes {
        out.write("size_estimates.csv", &size_estimates_to_text(g0.labels(), &est))?;
    }
    Ok(())
}

pub fn cmd_oracle(input: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let g = parse_edge_list(&read_input(input)?)?;
    let repaired = repair_dangling(&g, cfg.dangling)?;
    let w = build_hyperlink_matrix(&repaired)?;
    let n = g.node_count();
    let power = power_method(&w, cfg.damping, cfg.power_tol, MAX_POWER_ITER)?;
    let ls = direct_ls_solve(&build_regression_rows(&w, cfg.damping, Some(n))?)?;
    let gap = inf_distance(&power.x, &ls.x);
    if !(gap <= ORACLE_AGREEMENT) {
        return Err(distcent::Error::Consistency(format!(
            "power method and least-squares solve differ by {gap:e} (limit {ORACLE_AGREEMENT:e})"
        ))
        .into());
    }
    let between = brandes_betweenness(&g);
    let closeness = bfs_closeness(&bfs_all_pairs(&g));
    let degree = degree_centrality(&g);

    let out = Output::new(&cfg.output_dir)?;
    let cross = [
        ("damping".to_owned(), cfg.damping.to_string()),
        ("cross_check_inf_diff".to_owned(), format!("{gap:e}")),
        ("cross_check_limit".to_owned(), format!("{ORACLE_AGREEMENT:e}")),
    ];
    let mut pn = cross.to_vec();
    pn.push(("method".into(), "power".into()));
    pn.push(("tolerance".into(), format!("{:e}", cfg.power_tol)));
    pn.push(("power_iterations".into(), power.iterations.to_string()));
    out.table("pagerank_power.csv", &table(&g, CentralityVector::new(power.x, CentralityKind::PageRank), &pn))?;
    let mut ln = cross.to_vec();
    ln.push(("method".into(), "least-squares".into()));
    ln.push(("objective".into(), format!("{:e}", ls.residual)));
    out.table("pagerank_ls.csv", &table(&g, CentralityVector::new(ls.x, CentralityKind::PageRank), &ln))?;

    let src = [("source".to_owned(), "oracle".to_owned())];
    out.table("betweenness_raw.csv", &table(&g, between.clone(), &src))?;
    if between.total() > 0.0 {
        out.table("betweenness.csv", &table(&g, between.normalize()?, &src))?;
    }
    if closeness.total() > 0.0 {
        out.table("closeness.csv", &table(&g, closeness.normalize()?, &src))?;
    }
    if degree.total() > 0.0 {
        out.table("degree.csv", &table(&g, degree.normalize()?, &src))?;
    }
    Ok(())
}
