//! Banded storage and LU with partial pivoting.

use crate::error::{Error, Result};

/// Pivot ratio beyond which the factorization is reported singular.
const PIVOT_RATIO_LIMIT: f64 = 1e14;

/// Square matrix with `kl` sub- and `ku` superdiagonals. Each row keeps
/// room for `kl` extra superdiagonals to absorb pivoting fill.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    dim: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    /// Assemble from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(dim: usize, entries: &[(usize, usize, f64)]) -> Self {
        let (mut kl, mut ku) = (0, 0);
        for &(i, j, _) in entries {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside {dim}×{dim}");
            if i > j {
                kl = kl.max(i - j);
            } else {
                ku = ku.max(j - i);
            }
        }
        let width = 2 * kl + ku + 1;
        let mut a = Self {
            dim,
            kl,
            ku,
            width,
            data: vec![0.0; dim * width],
        };
        for &(i, j, v) in entries {
            let idx = a.index(i, j);
            a.data[idx] += v;
        }
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn cols(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + self.kl + 1).min(self.dim)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.index(i, j)]
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.cols(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    perm: Vec<usize>,
}

impl BandLu {
    pub fn new(a: &BandMatrix) -> Result<Self> {
        let mut lu = a.clone();
        let (n, kl, ku) = (lu.dim, lu.kl, lu.ku);
        let mut perm = vec![0; n];
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);

        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let p = (j..=last)
                .max_by(|&r, &s| lu.get(r, j).abs().total_cmp(&lu.get(s, j).abs()))
                .expect("non-empty pivot range");
            perm[j] = p;
            let right = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=right {
                    let (a, b) = (lu.index(j, c), lu.index(p, c));
                    lu.data.swap(a, b);
                }
            }
            let piv = lu.get(j, j);
            pmin = pmin.min(piv.abs());
            pmax = pmax.max(piv.abs());
            if piv == 0.0 {
                return Err(Error::singular(format!("banded LU: zero pivot in column {j}"), 1e308));
            }
            for r in j + 1..=last {
                let idx = lu.index(r, j);
                let l = lu.data[idx] / piv;
                lu.data[idx] = l;
                if l != 0.0 {
                    for c in j + 1..=right {
                        let (rc, jc) = (lu.index(r, c), lu.index(j, c));
                        lu.data[rc] -= l * lu.data[jc];
                    }
                }
            }
        }
        if pmax / pmin > PIVOT_RATIO_LIMIT {
            return Err(Error::singular("banded LU: pivots span more than 14 decades", pmax / pmin));
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let lu = &self.lu;
        let (n, kl, ku) = (lu.dim, lu.kl, lu.ku);
        assert_eq!(b.len(), n, "right-hand side length");
        let mut y = b.to_vec();
        for j in 0..n {
            y.swap(j, self.perm[j]);
            for r in j + 1..=(j + kl).min(n.saturating_sub(1)) {
                y[r] -= lu.get(r, j) * y[j];
            }
        }
        for j in (0..n).rev() {
            let right = (j + kl + ku).min(n - 1);
            let s: f64 = (j + 1..=right).map(|c| lu.get(j, c) * y[c]).sum();
            y[j] = (y[j] - s) / lu.get(j, j);
        }
        y
    }
}
