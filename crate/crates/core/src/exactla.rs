//! Dense exact linear algebra: reduced row echelon form, rank, kernels and
//! span membership over any [`Scalar`] field.
//!
//! Pivots are chosen deterministically (leftmost column first, topmost
//! nonzero row within it), so the outputs are reproducible byte for byte.

use rayon::prelude::*;
use thiserror::Error;

use crate::scalars::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Row count above which elimination updates run on the rayon pool.
const PARALLEL_ROWS: usize = 256;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<S: Scalar> {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            spec,
            rows,
            cols,
            data: vec![S::zero(&spec); rows * cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, S::one(&spec));
        }
        m
    }

    /// Builds from rows; all rows must have length `cols`.
    pub fn from_rows(spec: FieldSpec, cols: usize, rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix {
            spec,
            rows: n,
            cols,
            data,
        }
    }

    /// Builds from column vectors of length `rows`.
    pub fn from_columns(spec: FieldSpec, rows: usize, columns: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(spec, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, v.clone());
                }
            }
        }
        m
    }

    pub fn from_i64(spec: FieldSpec, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            spec,
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(&spec, v)).collect())
                .collect(),
        )
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.spec, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = S::zero(&self.spec);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add_ref(&a.mul_ref(b));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if other.rows != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let cols: Vec<Vec<S>> = (0..other.cols)
            .map(|j| self.mul_vec(&other.column(j)))
            .collect::<Result<_, _>>()?;
        Ok(Self::from_columns(self.spec, self.rows, &cols))
    }

    fn into_rows(self) -> Vec<Vec<S>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        let cols = self.cols;
        let mut it = self.data.into_iter();
        (0..self.rows)
            .map(|_| it.by_ref().take(cols).collect())
            .collect()
    }
}

/// Result of [`rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref<S: Scalar> {
    pub matrix: Matrix<S>,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

/// Reduced row echelon form.
pub fn rref<S: Scalar>(m: &Matrix<S>) -> Rref<S> {
    let spec = m.spec;
    let cols = m.cols;
    let mut rows = m.clone().into_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        // entries left of c in the pivot row are already zero
        let support: Vec<usize> = (c..cols).filter(|&j| !rows[r][j].is_zero()).collect();
        for &j in &support {
            rows[r][j] = rows[r][j].mul_ref(&inv);
        }
        let pivot_row = std::mem::take(&mut rows[r]);
        let eliminate = |row: &mut Vec<S>| {
            if row.is_empty() || row[c].is_zero() {
                return;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j].sub_mul_assign(&factor, &pivot_row[j]);
            }
        };
        if rows.len() >= PARALLEL_ROWS {
            rows.par_iter_mut().for_each(eliminate);
        } else {
            rows.iter_mut().for_each(eliminate);
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    Rref {
        matrix: Matrix::from_rows(spec, cols, rows),
        pivot_cols: pivots,
        rank,
    }
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
    rref(m).rank
}

/// Basis of the right kernel `{v : m v = 0}`, one vector per free column with
/// that coordinate set to 1 and the other free coordinates 0.
pub fn kernel_basis<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<S>> {
    let spec = m.spec;
    let red = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &c in &red.pivot_cols {
        is_pivot[c] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![S::zero(&spec); m.cols];
            v[f] = S::one(&spec);
            for (k, &pc) in red.pivot_cols.iter().enumerate() {
                let a = red.matrix.get(k, f);
                if !a.is_zero() {
                    v[pc] = -a.clone();
                }
            }
            v
        })
        .collect()
}

/// Whether `v` lies in the column space of `m`.
pub fn in_span<S: Scalar>(m: &Matrix<S>, v: &[S]) -> Result<bool, LinalgError> {
    if v.len() != m.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows,
            got: v.len(),
        });
    }
    let mut basis = EchelonBasis::new(m.spec, m.rows);
    for c in m.columns() {
        basis.insert(c);
    }
    Ok(basis.contains(v))
}

/// Incrementally built echelon basis of a subspace of `K^dim`.
///
/// Rows are stored sparsely with a unit pivot. A vector is reduced by
/// visiting rows in insertion order; every row has zeros at the pivots of
/// the rows inserted before it, so one pass suffices.
#[derive(Debug, Clone)]
pub struct EchelonBasis<S: Scalar> {
    spec: FieldSpec,
    dim: usize,
    rows: Vec<(usize, Vec<(usize, S)>)>,
    pivot_of: Vec<Option<usize>>,
}

impl<S: Scalar> EchelonBasis<S> {
    pub fn new(spec: FieldSpec, dim: usize) -> Self {
        EchelonBasis {
            spec,
            dim,
            rows: Vec::new(),
            pivot_of: vec![None; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [S]) {
        assert_eq!(v.len(), self.dim);
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].clone();
            for (j, a) in row {
                v[*j].sub_mul_assign(&factor, a);
            }
        }
    }

    pub fn contains(&self, v: &[S]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Scalar::is_zero)
    }

    /// Adds `v`; returns `true` when it was independent of the basis.
    pub fn insert(&mut self, mut v: Vec<S>) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|a| !a.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero");
        let row: Vec<(usize, S)> = v
            .into_iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| (j, a.mul_ref(&inv)))
            .collect();
        self.pivot_of[p] = Some(self.rows.len());
        self.rows.push((p, row));
        true
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }
}
