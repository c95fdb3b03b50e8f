//! Solver traces and their fixed-precision text form.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::NodeId;

pub const TRACE_HEADER: &str = "k,error,residual,alpha_inv,active_node";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Steps completed when the row was recorded.
    pub k: u64,
    /// `‖x - x*‖∞` against the oracle, NaN without one.
    pub error: f64,
    /// Least-squares objective, NaN without diagnostic rows.
    pub residual: f64,
    /// Inverse stepsize used by the last step.
    pub alpha_inv: f64,
    pub active_node: NodeId,
}

pub fn trace_to_text(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.11e},{:.11e},{:.11e},{}",
            r.k, r.error, r.residual, r.alpha_inv, r.active_node
        );
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRACE_HEADER => {}
        _ => {
            return Err(Error::Malformed {
                line: 1,
                reason: format!("expected header `{TRACE_HEADER}`"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, line)| {
            let bad = || Error::Malformed {
                line: idx + 1,
                reason: format!("bad trace row `{line}`"),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(TraceRow {
                k: f[0].parse().map_err(|_| bad())?,
                error: f[1].parse().map_err(|_| bad())?,
                residual: f[2].parse().map_err(|_| bad())?,
                alpha_inv: f[3].parse().map_err(|_| bad())?,
                active_node: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Least-squares slope of `ln(error)` against `k`, over rows with a finite
/// positive error. `None` with fewer than two usable rows.
pub fn log_linear_slope(rows: &[TraceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error.is_finite() && r.error > 0.0)
        .map(|r| (r.k as f64, r.error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
