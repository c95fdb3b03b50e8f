//! Randomized incremental PageRank: one regression row is applied per step,
//! the row being chosen by the surfer.
//!
//! Known size: `x += (1/N) H_s^T (m/N - H_s x)`.
//! Unknown size: `x += α H_s^T (m α - H_s x)` with `α = visits[s] / (k+1)`.
//! Temporal: as either of the above with `H_s` rebuilt from the persistent
//! average `W̄` of the snapshots seen so far.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::pagerank::{check_damping, ls_objective, RegressionRow};
use crate::sparse::{build_hyperlink_matrix, SparseColumnMatrix};
use crate::surfer::{
    build_transition_matrix_temporal, check_joint_connectivity, RowSelector, SurferChain,
    TransitionMatrix,
};
use crate::temporal::{PersistentAverage, TemporalGraphSequence};
use crate::trace::TraceRow;

/// Where the engine gets regression rows from.
pub trait RowSource {
    fn row(&self, i: NodeId) -> &RegressionRow;
    /// Only the known-size step reads this.
    fn node_count(&self) -> usize;
}

impl RowSource for [RegressionRow] {
    fn row(&self, i: NodeId) -> &RegressionRow {
        &self[i]
    }

    fn node_count(&self) -> usize {
        self.len()
    }
}

impl RowSource for Vec<RegressionRow> {
    fn row(&self, i: NodeId) -> &RegressionRow {
        &self[i]
    }

    fn node_count(&self) -> usize {
        self.len()
    }
}

/// The update on a condensed vector holding only the coordinates a row
/// touches: `r = target - Σ h_t v_t`, then `v_t += α h_t r`.
pub fn condensed_update(values: &mut [f64], coefs: &[f64], alpha: f64, target: f64) {
    let dot: f64 = coefs.iter().zip(values.iter()).map(|(h, v)| h * v).sum();
    let r = target - dot;
    for (v, h) in values.iter_mut().zip(coefs) {
        *v += alpha * h * r;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    KnownN,
    UnknownN,
    Temporal,
}

/// Target used by the temporal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetMode {
    /// Stepsize `1/N`, target `m/N`.
    KnownN(usize),
    /// Stepsize `α(k)`, target `m α(k)`.
    #[default]
    UnknownN,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KaczmarzState {
    pub x: Vec<f64>,
    /// Completed steps.
    pub k: u64,
    pub visits: Vec<u64>,
    pub mode: Mode,
    pub trace: Vec<TraceRow>,
    /// Every activated node in order, when recording is enabled.
    pub activations: Option<Vec<NodeId>>,
    last_alpha_inv: f64,
    values: Vec<f64>,
    coefs: Vec<f64>,
}

impl KaczmarzState {
    /// `x(0) = 0`, no visits.
    pub fn new(n: usize, mode: Mode) -> Self {
        KaczmarzState {
            x: vec![0.0; n],
            k: 0,
            visits: vec![0; n],
            mode,
            trace: Vec::new(),
            activations: None,
            last_alpha_inv: f64::NAN,
            values: Vec::new(),
            coefs: Vec::new(),
        }
    }

    pub fn recording_activations(mut self) -> Self {
        self.activations = Some(Vec::new());
        self
    }

    /// `α^{-1}` used by the most recent step.
    pub fn last_alpha_inv(&self) -> f64 {
        self.last_alpha_inv
    }

    fn apply(&mut self, s: NodeId, entries: &[(NodeId, f64)], alpha: f64, target: f64) {
        self.values.clear();
        self.coefs.clear();
        for &(j, h) in entries {
            self.values.push(self.x[j]);
            self.coefs.push(h);
        }
        condensed_update(&mut self.values, &self.coefs, alpha, target);
        for (&(j, _), &v) in entries.iter().zip(&self.values) {
            self.x[j] = v;
        }
        if let Some(a) = self.activations.as_mut() {
            a.push(s);
        }
        self.k += 1;
    }
}

/// Counts a visit to `s` and returns `α(k) = visits[s] / (k+1)`.
pub fn alpha_update(state: &mut KaczmarzState, s: NodeId) -> f64 {
    state.visits[s] += 1;
    state.visits[s] as f64 / (state.k + 1) as f64
}

pub fn step_known_n<R: RowSource + ?Sized>(
    state: &mut KaczmarzState,
    s: NodeId,
    rows: &R,
) -> Result<()> {
    let n = rows.node_count();
    let row = rows.row(s);
    let target = row.target.ok_or(Error::MissingTarget(s))?;
    state.visits[s] += 1;
    state.last_alpha_inv = n as f64;
    state.apply(s, &row.entries, 1.0 / n as f64, target);
    Ok(())
}

pub fn step_unknown_n<R: RowSource + ?Sized>(
    state: &mut KaczmarzState,
    s: NodeId,
    rows: &R,
    m: f64,
) {
    let row = rows.row(s);
    let alpha = alpha_update(state, s);
    state.last_alpha_inv = (state.k + 1) as f64 / state.visits[s] as f64;
    state.apply(s, &row.entries, alpha, m * alpha);
}

/// Step with `H̄_s = e_s - (1-m) W̄_s` taken from the persistent average.
pub fn step_temporal(
    state: &mut KaczmarzState,
    s: NodeId,
    pa: &PersistentAverage,
    m: f64,
    target: TargetMode,
) -> Result<()> {
    if pa.snapshot_count() == 0 {
        return Err(Error::NoSnapshots);
    }
    let row = RegressionRow::from_matrix_row(s, pa.row(s), m);
    match target {
        TargetMode::KnownN(n) => {
            state.visits[s] += 1;
            state.last_alpha_inv = n as f64;
            state.apply(s, &row.entries, 1.0 / n as f64, m / n as f64);
        }
        TargetMode::UnknownN => {
            let alpha = alpha_update(state, s);
            state.last_alpha_inv = (state.k + 1) as f64 / state.visits[s] as f64;
            state.apply(s, &row.entries, alpha, m * alpha);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub m: f64,
    pub iterations: u64,
    pub trace_stride: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        check_damping(self.m)?;
        if self.trace_stride == 0 {
            return Err(Error::Parameter {
                name: "trace-stride",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        Ok(())
    }
}

/// Reference data for trace rows. Never read by the update itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct Diagnostics<'a> {
    pub oracle: Option<&'a [f64]>,
    /// Rows with targets, for the least-squares residual.
    pub rows: Option<&'a [RegressionRow]>,
}

pub fn inf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

impl Diagnostics<'_> {
    pub fn row(&self, k: u64, x: &[f64], alpha_inv: f64, active_node: NodeId) -> TraceRow {
        TraceRow {
            k,
            error: self.oracle.map_or(f64::NAN, |o| inf_distance(x, o)),
            residual: self
                .rows
                .and_then(|r| ls_objective(x, r).ok())
                .unwrap_or(f64::NAN),
            alpha_inv,
            active_node,
        }
    }
}

pub(crate) fn should_trace(k_done: u64, cfg: &RunConfig) -> bool {
    k_done.is_multiple_of(cfg.trace_stride) || k_done == cfg.iterations
}

/// Runs `cfg.iterations` known-size or unknown-size steps from `state`,
/// taking each active row from `selector`.
pub fn run_static<R: RowSource + ?Sized, S: RowSelector>(
    mut state: KaczmarzState,
    rows: &R,
    selector: &mut S,
    cfg: &RunConfig,
    diag: &Diagnostics,
) -> Result<KaczmarzState> {
    cfg.validate()?;
    for _ in 0..cfg.iterations {
        let s = selector.current();
        match state.mode {
            Mode::KnownN => step_known_n(&mut state, s, rows)?,
            Mode::UnknownN => step_unknown_n(&mut state, s, rows, cfg.m),
            Mode::Temporal => {
                return Err(Error::Consistency(
                    "temporal mode needs run_temporal".into(),
                ))
            }
        }
        if should_trace(state.k, cfg) {
            let row = diag.row(state.k, &state.x, state.last_alpha_inv, s);
            state.trace.push(row);
        }
        selector.advance();
    }
    Ok(state)
}

/// Maps global steps to snapshots: one snapshot every `stride` steps, the
/// last one held once the sequence runs out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapshotSchedule {
    pub stride: u64,
}

impl SnapshotSchedule {
    pub fn new(stride: u64) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Parameter {
                name: "snapshot-stride",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        Ok(SnapshotSchedule { stride })
    }

    pub fn index_at(&self, k: u64, len: usize) -> usize {
        ((k / self.stride) as usize).min(len - 1)
    }
}

/// Per-snapshot hyperlink and surfer matrices.
#[derive(Debug, Clone)]
pub struct TemporalInput {
    pub matrices: Vec<SparseColumnMatrix>,
    pub chains: Vec<Arc<TransitionMatrix>>,
}

impl TemporalInput {
    /// Expects dangling nodes already repaired in every snapshot. With
    /// `omega = 0` every window of `joint_window` snapshots must connect all nodes.
    pub fn prepare(seq: &TemporalGraphSequence, omega: f64, joint_window: usize) -> Result<Self> {
        if omega == 0.0 {
            check_joint_connectivity(seq, joint_window)?;
        }
        let mut matrices = Vec::with_capacity(seq.len());
        let mut chains = Vec::with_capacity(seq.len());
        for snap in seq.snapshots() {
            matrices.push(build_hyperlink_matrix(&snap.graph)?);
            chains.push(Arc::new(build_transition_matrix_temporal(&snap.graph, omega)?));
        }
        Ok(TemporalInput { matrices, chains })
    }

    pub fn node_count(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalConfig {
    pub rho: f64,
    pub schedule: SnapshotSchedule,
    pub target: TargetMode,
    pub seed: u64,
}

/// Temporal run. The persistent average absorbs snapshot `i` and the surfer
/// switches to its matrix right before the first step scheduled in it.
pub fn run_temporal(
    input: &TemporalInput,
    cfg: &RunConfig,
    tcfg: &TemporalConfig,
    diag: &Diagnostics,
) -> Result<(KaczmarzState, PersistentAverage)> {
    cfg.validate()?;
    let n = input.node_count();
    let mut state = KaczmarzState::new(n, Mode::Temporal);
    let mut pa = PersistentAverage::new(n, tcfg.rho)?;
    let mut chain = SurferChain::new(input.chains[0].clone(), tcfg.seed);
    let mut current: Option<usize> = None;
    for k in 0..cfg.iterations {
        let idx = tcfg.schedule.index_at(k, input.len());
        if current != Some(idx) {
            pa.update(&input.matrices[idx])?;
            chain.set_matrix(input.chains[idx].clone());
            current = Some(idx);
        }
        let s = chain.current();
        step_temporal(&mut state, s, &pa, cfg.m, tcfg.target)?;
        if should_trace(state.k, cfg) {
            let row = diag.row(state.k, &state.x, state.last_alpha_inv, s);
            state.trace.push(row);
        }
        chain.advance();
    }
    Ok((state, pa))
}
