//! Node-actor simulation of the unknown-size PageRank protocol. Each actor
//! keeps its own value, a cache of its in-neighbors' values, a visit counter
//! and its own regression row. On activation it pulls neighbor values,
//! updates the condensed vector locally and pushes the results back.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::kaczmarz::{condensed_update, should_trace, Diagnostics, RunConfig, TargetMode, TemporalInput, TemporalConfig};
use crate::pagerank::{build_regression_rows, RegressionRow};
use crate::sparse::{blend, build_hyperlink_matrix};
use crate::surfer::{RowSelector, SurferChain};
use crate::trace::TraceRow;

/// `H_i` restricted to its support, in increasing column order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocalRow {
    pub cols: Vec<NodeId>,
    pub coefs: Vec<f64>,
}

impl LocalRow {
    fn from_regression_row(row: &RegressionRow) -> Self {
        LocalRow {
            cols: row.entries.iter().map(|e| e.0).collect(),
            coefs: row.entries.iter().map(|e| e.1).collect(),
        }
    }
}

/// An actor's own slice of the persistent average: its row of `W̄`.
#[derive(Debug, Clone, PartialEq)]
struct PersistentRow {
    wbar: Vec<(NodeId, f64)>,
    z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeActor {
    pub id: NodeId,
    pub own_value: f64,
    /// Last value seen from each in-neighbor, sorted by neighbor id.
    pub neighbor_values: Vec<(NodeId, f64)>,
    pub visit_count: u64,
    pub local_row: LocalRow,
    /// Token value at this actor's most recent activation.
    pub last_token_k: Option<u64>,
    persistent: Option<PersistentRow>,
}

impl NodeActor {
    pub fn neighbor_value(&self, j: NodeId) -> Option<f64> {
        self.neighbor_values
            .binary_search_by_key(&j, |e| e.0)
            .ok()
            .map(|p| self.neighbor_values[p].1)
    }

    fn from_row(row: &RegressionRow) -> Self {
        let local_row = LocalRow::from_regression_row(row);
        let neighbor_values = local_row
            .cols
            .iter()
            .filter(|&&j| j != row.owner)
            .map(|&j| (j, 0.0))
            .collect();
        NodeActor {
            id: row.owner,
            own_value: 0.0,
            neighbor_values,
            visit_count: 0,
            local_row,
            last_token_k: None,
            persistent: None,
        }
    }

    /// Folds this actor's row of a new snapshot into its persistent row and
    /// rebuilds `H̄_i` from it.
    fn absorb_snapshot(&mut self, w_row: &[(NodeId, f64)], rho: f64, m: f64) {
        let state = self.persistent.get_or_insert(PersistentRow {
            wbar: Vec::new(),
            z: 0.0,
        });
        let z = rho * state.z + 1.0;
        let t = 1.0 / z;
        let mut merged = Vec::with_capacity(state.wbar.len().max(w_row.len()));
        let (mut a, mut b) = (state.wbar.iter().peekable(), w_row.iter().peekable());
        loop {
            let (c, cur, target) = match (a.peek().copied(), b.peek().copied()) {
                (None, None) => break,
                (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                    a.next();
                    b.next();
                    (ca, va, vb)
                }
                (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                    a.next();
                    (ca, va, 0.0)
                }
                (Some(&(ca, va)), None) => {
                    a.next();
                    (ca, va, 0.0)
                }
                (_, Some(&(cb, vb))) => {
                    b.next();
                    (cb, 0.0, vb)
                }
            };
            let v = blend(cur, target, t);
            if v > 0.0 {
                merged.push((c, v));
            }
        }
        state.wbar = merged;
        state.z = z;
        let row = RegressionRow::from_matrix_row(self.id, &state.wbar, m);
        self.local_row = LocalRow::from_regression_row(&row);
        let old = std::mem::take(&mut self.neighbor_values);
        self.neighbor_values = self
            .local_row
            .cols
            .iter()
            .filter(|&&j| j != self.id)
            .map(|&j| {
                let seen = old.binary_search_by_key(&j, |e| e.0).map_or(0.0, |p| old[p].1);
                (j, seen)
            })
            .collect();
    }
}

/// Global activation counter carried along with each activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ActivationToken {
    pub k: u64,
}

/// Actors for a repaired graph: zero values, zero visits, and each local row
/// built from the actor's own in-links.
pub fn init_nodes(g: &DirectedGraph, m: f64) -> Result<Vec<NodeActor>> {
    let w = build_hyperlink_matrix(g)?;
    Ok(build_regression_rows(&w, m, None)?
        .iter()
        .map(NodeActor::from_row)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Pull,
    Push,
}

/// Audit of every value exchanged between actors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocalityAudit {
    allowed: Vec<BTreeSet<NodeId>>,
    pub pulls: u64,
    pub pushes: u64,
    pub violations: Vec<String>,
}

impl LocalityAudit {
    /// Permits exchanges between `i` and each node with a link into `i`,
    /// counting uniform repaired columns as links to every node.
    pub fn for_graph(g: &DirectedGraph) -> Self {
        let mut audit = LocalityAudit {
            allowed: vec![BTreeSet::new(); g.node_count()],
            ..Default::default()
        };
        audit.allow_graph(g);
        audit
    }

    fn allow_graph(&mut self, g: &DirectedGraph) {
        let n = g.node_count();
        let uniform: Vec<NodeId> = (0..n).filter(|&j| g.is_uniform_column(j)).collect();
        for i in 0..n {
            self.allowed[i].extend(g.in_neighbors(i).iter().copied());
            self.allowed[i].extend(uniform.iter().copied().filter(|&j| j != i));
        }
    }

    fn check(&mut self, actor: NodeId, other: NodeId, kind: MessageKind) -> Result<()> {
        match kind {
            MessageKind::Pull => self.pulls += 1,
            MessageKind::Push => self.pushes += 1,
        }
        if self.allowed[actor].contains(&other) {
            Ok(())
        } else {
            let msg = format!("{kind:?} between actor {actor} and non-neighbor {other}");
            self.violations.push(msg.clone());
            Err(Error::Protocol(msg))
        }
    }
}

/// Activates actor `s`: pull, local update, push, advance the token.
/// Returns the `α^{-1}` used.
pub fn activate(
    actors: &mut [NodeActor],
    token: &mut ActivationToken,
    s: NodeId,
    m: f64,
    target: TargetMode,
    audit: &mut LocalityAudit,
) -> Result<f64> {
    let row = std::mem::take(&mut actors[s].local_row);
    let out = activate_with(actors, token, s, &row, m, target, audit);
    actors[s].local_row = row;
    out
}

fn activate_with(
    actors: &mut [NodeActor],
    token: &mut ActivationToken,
    s: NodeId,
    row: &LocalRow,
    m: f64,
    target: TargetMode,
    audit: &mut LocalityAudit,
) -> Result<f64> {
    let mut slot = 0;
    for &j in &row.cols {
        if j != s {
            audit.check(s, j, MessageKind::Pull)?;
            let v = actors[j].own_value;
            actors[s].neighbor_values[slot].1 = v;
            slot += 1;
        }
    }
    let actor = &mut actors[s];
    actor.visit_count += 1;
    let (alpha, y, alpha_inv) = match target {
        TargetMode::UnknownN => {
            let alpha = actor.visit_count as f64 / (token.k + 1) as f64;
            (alpha, m * alpha, (token.k + 1) as f64 / actor.visit_count as f64)
        }
        TargetMode::KnownN(n) => (1.0 / n as f64, m / n as f64, n as f64),
    };
    let mut cached = actor.neighbor_values.iter();
    let mut stacked: Vec<f64> = row
        .cols
        .iter()
        .map(|&j| {
            if j == s {
                actor.own_value
            } else {
                cached.next().map_or(0.0, |e| e.1)
            }
        })
        .collect();
    condensed_update(&mut stacked, &row.coefs, alpha, y);
    actor.last_token_k = Some(token.k);
    let mut slot = 0;
    for (&j, &v) in row.cols.iter().zip(&stacked) {
        if j == s {
            actors[s].own_value = v;
        } else {
            audit.check(s, j, MessageKind::Push)?;
            actors[s].neighbor_values[slot].1 = v;
            slot += 1;
            actors[j].own_value = v;
        }
    }
    token.k += 1;
    Ok(alpha_inv)
}

/// `(k+1) / visits` as of the actor's last activation; `None` before any.
pub fn estimate_network_size(actor: &NodeActor) -> Option<f64> {
    actor
        .last_token_k
        .map(|k| (k + 1) as f64 / actor.visit_count as f64)
}

/// Reporting only: the global vector assembled from the actors' own values.
pub fn assemble(actors: &[NodeActor]) -> Vec<f64> {
    actors.iter().map(|a| a.own_value).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub actors: Vec<NodeActor>,
    pub token: ActivationToken,
    pub trace: Vec<TraceRow>,
    pub audit: LocalityAudit,
}

impl SimulationResult {
    pub fn x(&self) -> Vec<f64> {
        assemble(&self.actors)
    }

    pub fn size_estimates(&self) -> Vec<Option<f64>> {
        self.actors.iter().map(estimate_network_size).collect()
    }
}

/// `node,size_estimate` table; never-activated actors show `NA`.
pub fn size_estimates_to_text(labels: &[String], estimates: &[Option<f64>]) -> String {
    let mut out = String::from("node,size_estimate\n");
    for (l, e) in labels.iter().zip(estimates) {
        match e {
            Some(v) => {
                let _ = writeln!(out, "{l},{v}");
            }
            None => {
                let _ = writeln!(out, "{l},NA");
            }
        }
    }
    out
}

/// Unknown-size run on a static repaired graph.
pub fn run_simulation<S: RowSelector>(
    g: &DirectedGraph,
    selector: &mut S,
    cfg: &RunConfig,
    diag: &Diagnostics,
) -> Result<SimulationResult> {
    cfg.validate()?;
    let mut actors = init_nodes(g, cfg.m)?;
    let mut audit = LocalityAudit::for_graph(g);
    let mut token = ActivationToken::default();
    let mut trace = Vec::new();
    for _ in 0..cfg.iterations {
        let s = selector.current();
        let alpha_inv = activate(&mut actors, &mut token, s, cfg.m, TargetMode::UnknownN, &mut audit)?;
        if should_trace(token.k, cfg) {
            trace.push(diag.row(token.k, &assemble(&actors), alpha_inv, s));
        }
        selector.advance();
    }
    Ok(SimulationResult {
        actors,
        token,
        trace,
        audit,
    })
}

/// Temporal run: each actor keeps its own persistent row and absorbs its row
/// of every new snapshot when the schedule reaches it.
pub fn run_simulation_temporal(
    graphs: &[DirectedGraph],
    input: &TemporalInput,
    cfg: &RunConfig,
    tcfg: &TemporalConfig,
    diag: &Diagnostics,
) -> Result<SimulationResult> {
    cfg.validate()?;
    if graphs.len() != input.len() {
        return Err(Error::DimensionMismatch {
            expected: input.len(),
            got: graphs.len(),
        });
    }
    let n = input.node_count();
    let mut actors: Vec<NodeActor> = (0..n)
        .map(|i| NodeActor::from_row(&RegressionRow::from_matrix_row(i, &[], cfg.m)))
        .collect();
    let mut audit = LocalityAudit {
        allowed: vec![BTreeSet::new(); n],
        ..Default::default()
    };
    let mut token = ActivationToken::default();
    let mut trace = Vec::new();
    let mut chain = SurferChain::new(input.chains[0].clone(), tcfg.seed);
    let mut current: Option<usize> = None;
    for k in 0..cfg.iterations {
        let idx = tcfg.schedule.index_at(k, input.len());
        if current != Some(idx) {
            audit.allow_graph(&graphs[idx]);
            for (actor, row) in actors.iter_mut().zip(input.matrices[idx].rows()) {
                actor.absorb_snapshot(&row, tcfg.rho, cfg.m);
            }
            chain.set_matrix(input.chains[idx].clone());
            current = Some(idx);
        }
        let s = chain.current();
        let alpha_inv = activate(&mut actors, &mut token, s, cfg.m, tcfg.target, &mut audit)?;
        if should_trace(token.k, cfg) {
            trace.push(diag.row(token.k, &assemble(&actors), alpha_inv, s));
        }
        chain.advance();
    }
    Ok(SimulationResult {
        actors,
        token,
        trace,
        audit,
    })
}
