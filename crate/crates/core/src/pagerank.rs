//! PageRank as a least-squares problem, plus the two centralized solvers
//! used as oracles: the dense normal-equation solve and power iteration.
//!
//! With `H_i = e_i - (1-m) W_i` and `y_i = m/N`, the PageRank vector is the
//! unique minimizer of `Σ_i (y_i - H_i x)^2`. It already sums to one, so no
//! solver here renormalizes when `m > 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::sparse::{apply_google_matrix, SparseColumnMatrix};

/// Largest network the dense oracle accepts.
pub const DENSE_LIMIT: usize = 10_000;

pub(crate) fn check_damping(m: f64) -> Result<()> {
    if m > 0.0 && m < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: "damping",
            value: m,
            range: "(0, 1)",
        })
    }
}

/// One equation `H_i x = y_i` of the least-squares system.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub owner: NodeId,
    /// Nonzero coefficients of `H_i` in increasing column order. The diagonal
    /// is always present; the other columns are the in-neighbors of `owner`.
    pub entries: Vec<(NodeId, f64)>,
    /// `m/N` when the network size is known, otherwise supplied per step.
    pub target: Option<f64>,
}

impl RegressionRow {
    /// `H_i` from row `i` of a hyperlink-like matrix.
    pub fn from_matrix_row(owner: NodeId, w_row: &[(NodeId, f64)], m: f64) -> Self {
        let scale = 1.0 - m;
        let mut entries = Vec::with_capacity(w_row.len() + 1);
        let mut diag_done = false;
        for &(j, w) in w_row {
            if !diag_done && j > owner {
                entries.push((owner, 1.0));
                diag_done = true;
            }
            if j == owner {
                entries.push((owner, 1.0 - scale * w));
                diag_done = true;
            } else {
                entries.push((j, -scale * w));
            }
        }
        if !diag_done {
            entries.push((owner, 1.0));
        }
        RegressionRow {
            owner,
            entries,
            target: None,
        }
    }

    pub fn with_target(mut self, y: f64) -> Self {
        self.target = Some(y);
        self
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.entries.iter().map(|&(j, h)| h * x[j]).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, h)| h * h).sum()
    }

    pub fn coefficient(&self, col: NodeId) -> f64 {
        self.entries
            .binary_search_by_key(&col, |&(j, _)| j)
            .map_or(0.0, |p| self.entries[p].1)
    }
}

/// Builds `H_i = e_i - (1-m) W_i` for every node; targets are `m/N` only
/// when `n_known` is given.
pub fn build_regression_rows(
    w: &SparseColumnMatrix,
    m: f64,
    n_known: Option<usize>,
) -> Result<Vec<RegressionRow>> {
    check_damping(m)?;
    let target = n_known.map(|n| m / n as f64);
    Ok(w.rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let r = RegressionRow::from_matrix_row(i, row, m);
            match target {
                Some(y) => r.with_target(y),
                None => r,
            }
        })
        .collect())
}

/// `Σ_i (y_i - H_i x)^2`.
pub fn ls_objective(x: &[f64], rows: &[RegressionRow]) -> Result<f64> {
    if x.len() != rows.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: x.len(),
        });
    }
    rows.iter()
        .map(|r| {
            let y = r.target.ok_or(Error::MissingTarget(r.owner))?;
            let e = y - r.dot(x);
            Ok(e * e)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution {
    pub x: Vec<f64>,
    /// LS objective at `x` for the direct solve; last L1 step for power iteration.
    pub residual: f64,
    pub iterations: usize,
}

/// Dense normal-equation solve `(Σ H_i^T H_i)^{-1} Σ H_i^T y_i` via Cholesky.
pub fn direct_ls_solve(rows: &[RegressionRow]) -> Result<LsSolution> {
    let n = rows.len();
    if n > DENSE_LIMIT {
        return Err(Error::ScaleLimit {
            n,
            limit: DENSE_LIMIT,
        });
    }
    let mut gram = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for r in rows {
        let y = r.target.ok_or(Error::MissingTarget(r.owner))?;
        for &(a, ha) in &r.entries {
            if a >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a + 1,
                });
            }
            rhs[a] += ha * y;
            for &(b, hb) in &r.entries {
                gram[(a, b)] += ha * hb;
            }
        }
    }
    let chol = gram.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let x: Vec<f64> = chol.solve(&rhs).iter().copied().collect();
    let residual = ls_objective(&x, rows)?;
    Ok(LsSolution {
        x,
        residual,
        iterations: 0,
    })
}

/// Power iteration `x <- M x` from the uniform vector until the L1 change
/// drops below `tol`. With `m = 0` this is plain eigenvector iteration on
/// `W` and the iterate is renormalized each step.
pub fn power_method(
    w: &SparseColumnMatrix,
    m: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LsSolution> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Parameter {
            name: "damping",
            value: m,
            range: "[0, 1)",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    let n = w.dim();
    let mut x = vec![1.0 / n as f64; n];
    let mut change = f64::INFINITY;
    for iter in 1..=max_iter {
        let mut next = apply_google_matrix(w, m, &x)?;
        if m == 0.0 {
            let total: f64 = next.iter().sum();
            if total > 0.0 {
                next.iter_mut().for_each(|v| *v /= total);
            }
        }
        change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < tol {
            return Ok(LsSolution {
                x,
                residual: change,
                iterations: iter,
            });
        }
    }
    Err(Error::NoConvergence {
        max_iter,
        last_change: change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;
    use crate::sparse::build_hyperlink_matrix;

    const FIXTURE: &str = "1 2\n1 4\n2 1\n2 3\n3 2\n3 4\n3 6\n4 3\n4 6\n5 4\n6 4\n6 5\n";
    const TABLE_PAGERANK: [f64; 6] = [0.0727, 0.1122, 0.1986, 0.2963, 0.1131, 0.2072];

    fn fixture_w() -> SparseColumnMatrix {
        build_hyperlink_matrix(&parse_edge_list(FIXTURE).unwrap()).unwrap()
    }

    #[test]
    fn fixture_row_five() {
        let rows = build_regression_rows(&fixture_w(), 0.15, Some(6)).unwrap();
        let r = &rows[4];
        assert_eq!(r.entries, vec![(4, 1.0), (5, -0.85 * 0.5)]);
        assert!((r.target.unwrap() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn two_cycle_row() {
        let w = build_hyperlink_matrix(&parse_edge_list("a b\nb a").unwrap()).unwrap();
        let rows = build_regression_rows(&w, 0.15, Some(2)).unwrap();
        assert_eq!(rows[0].entries, vec![(0, 1.0), (1, -0.85)]);
        assert_eq!(rows[0].target, Some(0.075));
    }

    #[test]
    fn damping_bounds() {
        let w = fixture_w();
        assert!(build_regression_rows(&w, 1.0, Some(6)).is_err());
        assert!(build_regression_rows(&w, 0.0, Some(6)).is_err());
    }

    #[test]
    fn objective_at_origin_and_solution() {
        let w = fixture_w();
        let rows = build_regression_rows(&w, 0.15, Some(6)).unwrap();
        let at_zero = ls_objective(&[0.0; 6], &rows).unwrap();
        assert!((at_zero - 0.15f64.powi(2) / 6.0).abs() < 1e-15);
        let sol = direct_ls_solve(&rows).unwrap();
        assert!(ls_objective(&sol.x, &rows).unwrap() < 1e-12);
        assert!(ls_objective(&[0.0; 5], &rows).is_err());
        let untargeted = build_regression_rows(&w, 0.15, None).unwrap();
        assert_eq!(ls_objective(&sol.x, &untargeted), Err(Error::MissingTarget(0)));
    }

    #[test]
    fn uniform_vector_is_optimal_on_regular_symmetric_graph() {
        // 4-cycle in both directions: 2-regular.
        let g = parse_edge_list("a b\nb a\nb c\nc b\nc d\nd c\nd a\na d").unwrap();
        let w = build_hyperlink_matrix(&g).unwrap();
        let rows = build_regression_rows(&w, 0.15, Some(4)).unwrap();
        assert!(ls_objective(&[0.25; 4], &rows).unwrap() < 1e-30);
    }

    #[test]
    fn direct_solve_reproduces_table_pagerank() {
        let rows = build_regression_rows(&fixture_w(), 0.15, Some(6)).unwrap();
        let sol = direct_ls_solve(&rows).unwrap();
        for (a, b) in sol.x.iter().zip(TABLE_PAGERANK) {
            assert!((a - b).abs() < 5e-4, "{a} vs {b}");
        }
        assert!((sol.x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn direct_solve_symmetric_cases() {
        for (text, n) in [("a b\nb a", 2), ("a b\nb c\nc a", 3)] {
            let w = build_hyperlink_matrix(&parse_edge_list(text).unwrap()).unwrap();
            for m in [0.05, 0.15, 0.6] {
                let rows = build_regression_rows(&w, m, Some(n)).unwrap();
                let sol = direct_ls_solve(&rows).unwrap();
                for v in sol.x {
                    assert!((v - 1.0 / n as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn power_method_agrees_with_direct_solve() {
        let w = fixture_w();
        let rows = build_regression_rows(&w, 0.15, Some(6)).unwrap();
        let direct = direct_ls_solve(&rows).unwrap();
        let power = power_method(&w, 0.15, 1e-12, 10_000).unwrap();
        for (a, b) in direct.x.iter().zip(&power.x) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn power_method_doubly_stochastic_converges_in_one_step() {
        let w = build_hyperlink_matrix(&parse_edge_list("a b\nb c\nc a").unwrap()).unwrap();
        let sol = power_method(&w, 0.15, 1e-12, 10).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.x, vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn power_method_reports_non_convergence() {
        // Periodic W with m = 0 oscillates forever from a non-uniform start;
        // from the uniform start it is a fixed point, so use a 2-cycle plus a tail.
        let g = parse_edge_list("a b\nb a\nc a").unwrap();
        let w = build_hyperlink_matrix(&g).unwrap();
        let err = power_method(&w, 0.0, 1e-14, 50).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { max_iter: 50, .. }));
    }

    #[test]
    fn row_norm_bound() {
        let rows = build_regression_rows(&fixture_w(), 0.15, Some(6)).unwrap();
        for r in &rows {
            assert!(r.norm_sq() < 6.0);
            assert!(r.coefficient(r.owner) >= 1.0 - 0.85);
        }
    }
}
