//! Column-major sparse matrices and the hyperlink matrix built from a graph.

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Square sparse matrix in compressed-column form. Stored values are
/// strictly positive; anything absent is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumnMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<NodeId>,
    values: Vec<f64>,
}

impl SparseColumnMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseColumnMatrix {
            n,
            col_ptr: vec![0; n + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from per-column `(row, value)` lists. Zero entries are dropped;
    /// duplicate rows within a column are summed.
    pub fn from_columns(n: usize, columns: Vec<Vec<(NodeId, f64)>>) -> Result<Self> {
        if columns.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: columns.len(),
            });
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for mut col in columns {
            col.sort_by_key(|&(r, _)| r);
            let mut last: Option<NodeId> = None;
            for (r, v) in col {
                if r >= n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: r + 1,
                    });
                }
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Parameter {
                        name: "matrix entry",
                        value: v,
                        range: "[0, inf)",
                    });
                }
                if last == Some(r) {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
                if v == 0.0 {
                    continue;
                }
                row_idx.push(r);
                values.push(v);
                last = Some(r);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SparseColumnMatrix {
            n,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, j: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[span.clone()].binary_search(&i) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.column(j).map(|(_, v)| v).sum()).collect()
    }

    pub fn is_column_stochastic(&self, tol: f64) -> bool {
        self.column_sums().iter().all(|s| (s - 1.0).abs() <= tol)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (i, w) in self.column(j) {
                y[i] += w * xj;
            }
        }
        Ok(y)
    }

    /// Row-major view: for each row, `(column, value)` in increasing column order.
    pub fn rows(&self) -> Vec<Vec<(NodeId, f64)>> {
        let mut rows = vec![Vec::new(); self.n];
        for j in 0..self.n {
            for (i, v) in self.column(j) {
                rows[i].push((j, v));
            }
        }
        rows
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for j in 0..self.n {
            for (i, v) in self.column(j) {
                d[i][j] = v;
            }
        }
        d
    }

    /// Entrywise `self + t * (other - self)` over the union of both supports.
    pub fn step_toward(&self, other: &SparseColumnMatrix, t: f64) -> Result<SparseColumnMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut col_ptr = Vec::with_capacity(self.n + 1);
        let mut row_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(row_idx.capacity());
        col_ptr.push(0);
        for j in 0..self.n {
            let mut a = self.column(j).peekable();
            let mut b = other.column(j).peekable();
            loop {
                let (r, cur, target) = match (a.peek().copied(), b.peek().copied()) {
                    (None, None) => break,
                    (Some((ra, va)), Some((rb, vb))) if ra == rb => {
                        a.next();
                        b.next();
                        (ra, va, vb)
                    }
                    (Some((ra, va)), Some((rb, _))) if ra < rb => {
                        a.next();
                        (ra, va, 0.0)
                    }
                    (Some((ra, va)), None) => {
                        a.next();
                        (ra, va, 0.0)
                    }
                    (_, Some((rb, vb))) => {
                        b.next();
                        (rb, 0.0, vb)
                    }
                };
                let v = blend(cur, target, t);
                if v > 0.0 {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SparseColumnMatrix {
            n: self.n,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &SparseColumnMatrix) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            for (i, v) in self.column(j) {
                worst = worst.max((v - other.get(i, j)).abs());
            }
            for (i, v) in other.column(j) {
                worst = worst.max((v - self.get(i, j)).abs());
            }
        }
        worst
    }
}

/// `cur + t * (target - cur)`. Exact when `cur == target`.
pub(crate) fn blend(cur: f64, target: f64, t: f64) -> f64 {
    cur + t * (target - cur)
}

/// `w_ij = 1/D_j` when `j -> i` is an edge; uniform `1/(N-1)` off-diagonal
/// columns for nodes repaired with the uniform-column policy.
pub fn build_hyperlink_matrix(g: &DirectedGraph) -> Result<SparseColumnMatrix> {
    let n = g.node_count();
    let mut columns = Vec::with_capacity(n);
    for j in 0..n {
        let deg = g.effective_out_degree(j);
        if deg == 0 {
            return Err(Error::ZeroOutDegree {
                label: g.label(j).to_owned(),
            });
        }
        let w = 1.0 / deg as f64;
        let col: Vec<(NodeId, f64)> = if g.is_uniform_column(j) {
            (0..n).filter(|&i| i != j).map(|i| (i, w)).collect()
        } else {
            g.out_neighbors(j).iter().map(|&i| (i, w)).collect()
        };
        columns.push(col);
    }
    SparseColumnMatrix::from_columns(n, columns)
}

/// `M x = (1-m) W x + (m/N)(1^T x) 1` without forming `M`.
pub fn apply_google_matrix(w: &SparseColumnMatrix, m: f64, x: &[f64]) -> Result<Vec<f64>> {
    let n = w.dim();
    let mut y = w.mul_vec(x)?;
    let mass: f64 = x.iter().sum();
    let teleport = m / n as f64 * mass;
    for yi in &mut y {
        *yi = (1.0 - m) * *yi + teleport;
    }
    Ok(y)
}
