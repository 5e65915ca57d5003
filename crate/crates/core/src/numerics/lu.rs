use super::{norm_1, Matrix};
use crate::error::{Error, Result};

/// Condition estimates above this are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Surrogate condition number reported for exactly singular input.
const INFINITE_CONDITION: f64 = 1e308;

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    // L below the diagonal (unit diagonal implied), U on and above.
    packed: Matrix,
    perm: Vec<usize>,
    swaps: usize,
    norm1: f64,
    zero_pivot: bool,
}

impl Lu {
    pub fn new(a: &Matrix) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut zero_pivot = false;

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= f64::MIN_POSITIVE {
                zero_pivot = true;
                continue;
            }
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }

        Self {
            packed: lu,
            perm,
            swaps,
            norm1: norm_1(a),
            zero_pivot,
        }
    }

    pub fn dim(&self) -> usize {
        self.packed.nrows()
    }

    pub fn is_singular(&self) -> bool {
        self.zero_pivot
    }

    pub fn determinant(&self) -> f64 {
        if self.zero_pivot {
            return 0.0;
        }
        let d: f64 = (0..self.dim()).map(|i| self.packed[(i, i)]).product();
        if self.swaps % 2 == 0 {
            d
        } else {
            -d
        }
    }

    /// Solve `A·x = b` in place for one column.
    fn solve_vec(&self, b: &mut [f64]) {
        let n = self.dim();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.packed[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.packed[(i, j)] * y[j];
            }
            y[i] = s / self.packed[(i, i)];
        }
        b.copy_from_slice(&y);
    }

    /// Solve `A'·x = b` in place for one column.
    fn solve_transpose_vec(&self, b: &mut [f64]) {
        let n = self.dim();
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.packed[(j, i)] * w[j];
            }
            w[i] = s / self.packed[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.packed[(j, i)] * w[j];
            }
            w[i] = s;
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = w[i];
        }
    }

    /// Solve for every column of `b`. Callers must check `is_singular` first.
    pub fn solve(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.nrows(), self.dim(), "right-hand side row count");
        let mut x = b.clone();
        let mut col = vec![0.0; self.dim()];
        for j in 0..b.ncols() {
            col.copy_from_slice(b.column(j).as_slice());
            self.solve_vec(&mut col);
            x.column_mut(j).copy_from_slice(&col);
        }
        x
    }

    /// Hager's 1-norm condition estimate, `‖A‖₁ · est(‖A⁻¹‖₁)`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if self.zero_pivot {
            return INFINITE_CONDITION;
        }
        if self.norm1 == 0.0 {
            return INFINITE_CONDITION;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve_vec(&mut y);
            est = y.iter().map(|v| v.abs()).sum::<f64>();
            let mut z: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            self.solve_transpose_vec(&mut z);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
            last_j = j;
        }
        let cond = self.norm1 * est;
        if cond.is_finite() {
            cond.max(1.0)
        } else {
            INFINITE_CONDITION
        }
    }
}

/// Solve `A·X = B`, refusing near-singular `A`.
pub fn mat_solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "mat_solve needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, matrix has {}",
            b.nrows(),
            a.nrows()
        )));
    }
    let lu = Lu::new(a);
    let cond = lu.condition_estimate();
    if lu.is_singular() || cond > SINGULAR_CONDITION {
        return Err(Error::singular("linear solve", cond));
    }
    Ok(lu.solve(b))
}

pub fn condition_estimate(a: &Matrix) -> f64 {
    Lu::new(a).condition_estimate()
}

pub fn determinant(a: &Matrix) -> f64 {
    Lu::new(a).determinant()
}

/// Numerical rank by Gaussian elimination with complete pivoting.
///
/// Pivots at or below `rel_tol · ‖A‖_F` count as zero.
pub fn rank(a: &Matrix, rel_tol: f64) -> usize {
    let mut m = a.clone();
    let (rows, cols) = m.shape();
    let tol = rel_tol * m.norm();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best = (r, r, 0.0);
        for i in r..rows {
            for j in r..cols {
                if m[(i, j)].abs() > best.2 {
                    best = (i, j, m[(i, j)].abs());
                }
            }
        }
        if best.2 <= tol || best.2 == 0.0 {
            break;
        }
        m.swap_rows(r, best.0);
        m.swap_columns(r, best.1);
        let pivot = m[(r, r)];
        for i in r + 1..rows {
            let f = m[(i, r)] / pivot;
            for j in r..cols {
                m[(i, j)] -= f * m[(r, j)];
            }
        }
        r += 1;
    }
    r
}
