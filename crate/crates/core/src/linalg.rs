//! Compressed sparse row matrices and Jacobi-preconditioned conjugate
//! gradients.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Square `dim x dim` matrix from `(row, col, value)` triplets; duplicates
    /// are summed. Column indices come out sorted within each row.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; dim + 1];
        for &(r, c, _) in triplets {
            for index in [r, c] {
                if index >= dim {
                    return Err(Error::IndexOutOfRange { index, len: dim });
                }
            }
            counts[r + 1] += 1;
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let mut cursor = counts.clone();
        let mut raw = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            raw[cursor[r]] = (c, v);
            cursor[r] += 1;
        }

        let mut row_offsets = Vec::with_capacity(dim + 1);
        let mut columns = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        for r in 0..dim {
            let row = &mut raw[counts[r]..counts[r + 1]];
            row.sort_unstable_by_key(|&(c, _)| c);
            let start = columns.len();
            for &(c, v) in row.iter() {
                if columns.len() > start && *columns.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    columns.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(columns.len());
        }
        Ok(SparseMatrix {
            dim,
            row_offsets,
            columns,
            values,
        })
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            row_offsets: (0..=dim).collect(),
            columns: (0..dim).collect(),
            values: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(column, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        self.columns[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        match self.columns[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// Largest `|a_ij - a_ji|` relative to the largest `|a_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut defect: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                defect = defect.max((v - self.get(c, r)).abs());
            }
        }
        defect / scale
    }

    /// Principal submatrix on the rows/columns `keep`, and `A[keep, fixed] g`
    /// where `fixed_values[i] = Some(g_i)` marks index `i` as fixed.
    pub fn eliminate(&self, keep: &[usize], fixed_values: &[Option<f64>]) -> (SparseMatrix, Vec<f64>) {
        let mut position = vec![usize::MAX; self.dim];
        for (k, &i) in keep.iter().enumerate() {
            position[i] = k;
        }
        let mut triplets = Vec::with_capacity(self.nnz());
        let mut coupling = vec![0.0; keep.len()];
        for (k, &r) in keep.iter().enumerate() {
            for (c, v) in self.row(r) {
                if position[c] != usize::MAX {
                    triplets.push((k, position[c], v));
                } else if let Some(g) = fixed_values[c] {
                    coupling[k] += v * g;
                }
            }
        }
        let reduced = SparseMatrix::from_triplets(keep.len(), &triplets).expect("indices in range");
        (reduced, coupling)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct CgOptions {
    pub tolerance: f64,
    /// `None` means `10 * dim`.
    pub max_iterations: Option<usize>,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tolerance: 1e-12,
            max_iterations: None,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive definite `A`; convergence is
/// `||b - A x|| <= tol ||b||`.
pub fn cg_solve(matrix: &SparseMatrix, rhs: &[f64], options: &CgOptions) -> Result<SolveReport> {
    let dim = matrix.dim();
    if rhs.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {}, matrix dimension {dim}",
            rhs.len()
        )));
    }
    let diag = matrix.diagonal();
    if let Some(i) = diag.iter().position(|&d| d == 0.0 || !d.is_finite()) {
        return Err(Error::ZeroDiagonal(i));
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let max_iter = options.max_iterations.unwrap_or(10 * dim.max(1));

    let rhs_norm = dot(rhs, rhs).sqrt();
    let mut x = vec![0.0; dim];
    if rhs_norm == 0.0 {
        return Ok(SolveReport {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; dim];
    let mut rz = dot(&r, &z);
    let mut residual = 1.0;

    for iteration in 1..=max_iter {
        matrix.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..dim {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = dot(&r, &r).sqrt() / rhs_norm;
        if residual <= options.tolerance {
            // recompute against the true residual to guard against drift
            let ax = matrix.matvec(&x);
            let true_residual = rhs
                .iter()
                .zip(&ax)
                .map(|(b, y)| (b - y) * (b - y))
                .sum::<f64>()
                .sqrt()
                / rhs_norm;
            if true_residual <= options.tolerance {
                return Ok(SolveReport {
                    solution: x,
                    iterations: iteration,
                    relative_residual: true_residual,
                });
            }
            residual = true_residual;
            for i in 0..dim {
                r[i] = rhs[i] - ax[i];
            }
        }
        for i in 0..dim {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..dim {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged(Box::new(SolveReport {
        solution: x,
        iterations: max_iter,
        relative_residual: residual,
    })))
}
