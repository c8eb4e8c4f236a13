//! Sparse square systems solved by banded LU with partial pivoting.
//!
//! Entries are collected as triplets in the caller's natural ordering. An
//! optional symmetric-in-spirit reordering of rows and columns brings the
//! non-zeros close to the diagonal before factorisation; the solution is
//! returned in the original column ordering.

use crate::error::{FlowError, Result};

const PIVOT_TOLERANCE: f64 = 1e-14;
#[cfg(debug_assertions)]
const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SparseSystem {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
    row_order: Option<Vec<usize>>,
    col_order: Option<Vec<usize>>,
}

impl SparseSystem {
    /// Empty `dim x dim` system with zero right-hand side.
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
            rhs: vec![0.0; dim],
            row_order: None,
            col_order: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `value` at `(row, col)`; repeated positions accumulate.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.dim && col < self.dim, "entry ({row}, {col}) outside {0}x{0}", self.dim);
        self.entries.push((row, col, value));
    }

    pub fn set_rhs(&mut self, row: usize, value: f64) {
        self.rhs[row] = value;
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Elimination order: position `i` of the factorised matrix holds original
    /// row `rows[i]` and original column `cols[i]`. Both must be permutations.
    pub fn with_ordering(mut self, rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        for (name, perm) in [("row", &rows), ("column", &cols)] {
            if !is_permutation(perm, self.dim) {
                return Err(FlowError::Domain(format!(
                    "{name} ordering is not a permutation of 0..{}",
                    self.dim
                )));
            }
        }
        self.row_order = Some(rows);
        self.col_order = Some(cols);
        Ok(self)
    }

    /// Dense copy in the original ordering.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.dim]; self.dim];
        for &(i, j, v) in &self.entries {
            a[i][j] += v;
        }
        a
    }

    /// `M x` in the original ordering.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    /// Max-norm residual `|M x - b|` relative to `|b|` (or to `|M| |x|` when
    /// `b = 0`).
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let mx = self.apply(x);
        let res = mx
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let bnorm = max_abs(&self.rhs);
        let scale = if bnorm > 0.0 {
            bnorm
        } else {
            let mnorm = self.entries.iter().map(|e| e.2.abs()).fold(0.0, f64::max);
            (mnorm * max_abs(x)).max(f64::MIN_POSITIVE)
        };
        res / scale
    }

    /// Lower and upper bandwidth after applying the elimination order.
    pub fn bandwidth(&self) -> (usize, usize) {
        let (row_pos, col_pos) = self.positions();
        self.entries.iter().fold((0, 0), |(kl, ku), &(i, j, _)| {
            let (pi, pj) = (row_pos[i], col_pos[j]);
            if pi > pj {
                (kl.max(pi - pj), ku)
            } else {
                (kl, ku.max(pj - pi))
            }
        })
    }

    /// Solves `M x = b` by banded Gaussian elimination with partial pivoting.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        if n == 0 {
            return Ok(Vec::new());
        }
        let (row_pos, col_pos) = self.positions();
        let (kl, ku) = self.bandwidth();
        let mut band = Band::new(n, kl, ku);
        let mut scale: f64 = 0.0;
        for &(i, j, v) in &self.entries {
            band.add(row_pos[i], col_pos[j], v);
            scale = scale.max(v.abs());
        }
        let mut b = vec![0.0; n];
        for (orig, &v) in self.rhs.iter().enumerate() {
            b[row_pos[orig]] = v;
        }
        let threshold = PIVOT_TOLERANCE * scale;

        let reach = kl + ku;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let (mut p, mut best) = (k, band.get(k, k).abs());
            for i in k + 1..=last_row {
                let v = band.get(i, k).abs();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if !(best > threshold) {
                return Err(FlowError::Singular {
                    column: k,
                    pivot: best,
                    scale,
                });
            }
            if p != k {
                for j in k..=last_col {
                    band.swap(k, p, j);
                }
                b.swap(k, p);
            }
            let pivot = band.get(k, k);
            for i in k + 1..=last_row {
                let l = band.get(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                band.set(i, k, 0.0);
                for j in k + 1..=last_col {
                    let u = band.get(k, j);
                    if u != 0.0 {
                        band.sub(i, j, l * u);
                    }
                }
                b[i] -= l * b[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + reach).min(n - 1);
            let mut acc = b[k];
            for j in k + 1..=last_col {
                acc -= band.get(k, j) * b[j];
            }
            b[k] = acc / band.get(k, k);
        }

        let mut x = vec![0.0; n];
        for (orig, &pos) in col_pos.iter().enumerate() {
            x[orig] = b[pos];
        }

        #[cfg(debug_assertions)]
        {
            let r = self.relative_residual(&x);
            debug_assert!(
                !(r > RESIDUAL_TOLERANCE),
                "banded solve residual {r:e} exceeds {RESIDUAL_TOLERANCE:e}"
            );
        }
        Ok(x)
    }

    fn positions(&self) -> (Vec<usize>, Vec<usize>) {
        let inverse = |order: &Option<Vec<usize>>| match order {
            Some(perm) => {
                let mut pos = vec![0; self.dim];
                for (i, &orig) in perm.iter().enumerate() {
                    pos[orig] = i;
                }
                pos
            }
            None => (0..self.dim).collect(),
        };
        (inverse(&self.row_order), inverse(&self.col_order))
    }
}

/// Row-major band storage holding columns `i - kl ..= i + ku + kl` of row `i`
/// (the extra `kl` superdiagonals absorb pivoting fill-in).
struct Band {
    kl: usize,
    width: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            kl,
            width,
            data: vec![0.0; n * width],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let off = j + self.kl - i;
        debug_assert!(off < self.width);
        i * self.width + off
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    #[inline]
    fn sub(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] -= v;
    }

    #[inline]
    fn swap(&mut self, a: usize, b: usize, j: usize) {
        let (ia, ib) = (self.idx(a, j), self.idx(b, j));
        self.data.swap(ia, ib);
    }
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    perm.iter()
        .all(|&p| p < n && !std::mem::replace(&mut seen[p], true))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
