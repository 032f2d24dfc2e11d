//! Dense linear algebra over GF(q).

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

/// Dense row-major matrix over one field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over {:?}",
            self.rows, self.cols, self.field
        )?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| e.0.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<Fe>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        debug_assert!(data.iter().all(|&e| field.contains(e)));
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    /// Stacks equal-length row vectors. `cols` fixes the width when `rows` is empty.
    pub fn from_rows<V: AsRef<[Fe]>>(field: &Field, cols: usize, rows: &[V]) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Matrix::new(field, rows.len(), cols, data)
    }

    /// Convenience constructor from raw integer encodings.
    pub fn from_u32(field: &Field, rows: &[&[u32]]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Fe>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.elem(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Matrix::from_rows(field, cols, &rows)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> impl Iterator<Item = &[Fe]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                axpy(f, dst, a, orow);
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[Fe]) -> Result<Vec<Fe>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = vec![Fe::ZERO; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if !a.is_zero() {
                axpy(&self.field, &mut out, a, self.row(r));
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Matrix::new(&self.field, self.rows, self.cols, data)
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix::new(&self.field, self.rows + other.rows, self.cols, data)
    }

    pub fn push_row(&mut self, row: &[Fe]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: row.len(),
            });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// Reduced row echelon form with zero rows dropped, plus pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..cols {
                let v = self.get(r, j);
                self.set(r, j, f.mul(v, inv));
            }
            let pivot_row: Vec<Fe> = self.row(r)[c..].to_vec();
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                let neg = f.neg(factor);
                let dst = &mut self.data[i * cols + c..(i + 1) * cols];
                axpy(&f, dst, neg, &pivot_row);
            }
            pivots.push(c);
            r += 1;
        }
        self.data.truncate(r * cols);
        self.rows = r;
        pivots
    }

    pub fn rank(&self) -> usize {
        // forward elimination only; cheaper than a full reduction
        let f = &self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
                continue;
            };
            if pr != r {
                for j in c..cols {
                    m.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(m[r * cols + c]).expect("pivot is nonzero");
            let pivot_row: Vec<Fe> = m[r * cols + c..(r + 1) * cols].to_vec();
            for i in r + 1..rows {
                let v = m[i * cols + c];
                if v.is_zero() {
                    continue;
                }
                let factor = f.neg(f.mul(v, inv));
                axpy(f, &mut m[i * cols + c..(i + 1) * cols], factor, &pivot_row);
            }
            r += 1;
        }
        r
    }

    /// Basis of `{x : self * x^T = 0}`, one row per free column.
    pub fn right_kernel(&self) -> Matrix {
        let f = &self.field;
        let (e, pivots) = self.rref();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Matrix::zeros(f, 0, n);
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Fe::ZERO; n];
            v[free] = Fe::ONE;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(e.get(i, free));
            }
            out.push_row(&v).expect("width matches");
        }
        out
    }

    /// Solves `self * x = b` for a column vector `x`; free variables set to zero.
    pub fn solve(&self, b: &[Fe]) -> Result<Vec<Fe>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: b.len(),
            });
        }
        let n = self.cols;
        let mut aug = Matrix::zeros(&self.field, self.rows, n + 1);
        for (r, &br) in b.iter().enumerate() {
            aug.data[r * (n + 1)..r * (n + 1) + n].copy_from_slice(self.row(r));
            aug.set(r, n, br);
        }
        let (e, pivots) = aug.rref();
        if pivots.last() == Some(&n) {
            return Err(Error::NoSolution);
        }
        let mut x = vec![Fe::ZERO; n];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = e.get(i, n);
        }
        Ok(x)
    }

    /// Some `u` with `u * self = c`.
    pub fn solve_left(&self, c: &[Fe]) -> Result<Vec<Fe>> {
        if c.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: c.len(),
            });
        }
        self.transpose().solve(c)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.set(r, n + r, Fe::ONE);
        }
        let (e, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NoSolution);
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&e.row(r)[n..]);
        }
        Ok(inv)
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Matrix::new(field, rows, cols, data).expect("sized")
    }

    /// Uniform invertible `k x k` matrix by rejection sampling.
    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, k: usize, rng: &mut R) -> Matrix {
        loop {
            let m = Matrix::random(field, k, k, rng);
            if m.rank() == k {
                return m;
            }
        }
    }

    /// Permutation matrix with a one at `(i, perm[i])`.
    pub fn permutation(field: &Field, perm: &[usize]) -> Matrix {
        let n = perm.len();
        let mut m = Matrix::zeros(field, n, n);
        for (i, &j) in perm.iter().enumerate() {
            m.set(i, j, Fe::ONE);
        }
        m
    }

    pub fn random_permutation<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
        Matrix::permutation(field, &random_perm(n, rng))
    }
}

/// Fisher-Yates shuffle of `0..n`.
pub fn random_perm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Generator of `rowspace(a) ∩ rowspace(b)`, as the dual of the sum of duals.
pub fn intersect_rowspaces(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.cols {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            got: b.cols,
        });
    }
    let sum_of_duals = a.right_kernel().vstack(&b.right_kernel())?;
    Ok(sum_of_duals.right_kernel())
}

// vector helpers

/// `dst += a * src`
#[inline]
pub fn axpy(f: &Field, dst: &mut [Fe], a: Fe, src: &[Fe]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = f.add(*d, f.mul(a, s));
        }
    }
}

pub fn dot(f: &Field, a: &[Fe], b: &[Fe]) -> Fe {
    a.iter()
        .zip(b)
        .fold(Fe::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Componentwise product.
pub fn star(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    a.iter().zip(b).map(|(&x, &y)| f.mul(x, y)).collect()
}

pub fn scale(f: &Field, a: Fe, v: &[Fe]) -> Vec<Fe> {
    v.iter().map(|&x| f.mul(a, x)).collect()
}

pub fn add_vec(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn sub_vec(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

/// Hamming weight.
pub fn weight(v: &[Fe]) -> usize {
    v.iter().filter(|e| !e.is_zero()).count()
}

pub fn random_vec<R: Rng + ?Sized>(f: &Field, n: usize, rng: &mut R) -> Vec<Fe> {
    (0..n).map(|_| f.random(rng)).collect()
}
