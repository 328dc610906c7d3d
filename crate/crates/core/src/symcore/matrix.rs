//! Dense matrices over the field of rational functions.

use std::fmt;
use std::sync::Arc;

use super::error::SymError;
use super::expr::Expr;
use super::symbols::SymbolTable;

#[derive(Clone, PartialEq, Eq)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl ExprMatrix {
    pub fn zeros(table: &Arc<SymbolTable>, rows: usize, cols: usize) -> Self {
        ExprMatrix {
            rows,
            cols,
            data: vec![Expr::zero(table); rows * cols],
        }
    }

    pub fn identity(table: &Arc<SymbolTable>, n: usize) -> Self {
        let mut m = Self::zeros(table, n, n);
        for i in 0..n {
            m.set(i, i, Expr::one(table));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExprMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Expr) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Expr> {
        self.data.iter()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&Expr) -> Result<Expr, SymError>) -> Result<Self, SymError> {
        Ok(ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    pub fn mul(&self, rhs: &ExprMatrix) -> Result<ExprMatrix, SymError> {
        if self.cols != rhs.rows {
            return Err(SymError::DimensionMismatch);
        }
        let table = self.table_of().or_else(|| rhs.table_of());
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Expr::zero(table.as_ref().expect("nonempty matrix"));
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Result<Vec<Expr>, SymError> {
        if self.cols != v.len() {
            return Err(SymError::DimensionMismatch);
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Expr::zero(v[0].table());
                for (k, vk) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !vk.is_zero() {
                        acc = &acc + &(a * vk);
                    }
                }
                acc
            })
            .collect())
    }

    fn table_of(&self) -> Option<Arc<SymbolTable>> {
        self.data.first().map(|e| Arc::clone(e.table()))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (ExprMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip().expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{ n : self * n = 0 }`.
    pub fn null_space(&self) -> Vec<Vec<Expr>> {
        let Some(table) = self.table_of() else {
            return Vec::new();
        };
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Expr::zero(&table); self.cols];
                v[f] = Expr::one(&table);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    /// Basis of `{ w : wᵀ self = 0 }`.
    pub fn left_null_space(&self) -> Vec<Vec<Expr>> {
        self.transpose().null_space()
    }

    pub fn determinant(&self) -> Result<Expr, SymError> {
        if !self.is_square() {
            return Err(SymError::DimensionMismatch);
        }
        let Some(table) = self.table_of() else {
            return Err(SymError::DimensionMismatch);
        };
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Expr::one(&table);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(Expr::zero(&table));
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &pivot;
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<ExprMatrix, SymError> {
        if !self.is_square() {
            return Err(SymError::DimensionMismatch);
        }
        let n = self.rows;
        let table = self.table_of().ok_or(SymError::DimensionMismatch)?;
        let id = ExprMatrix::identity(&table, n);
        let aug = ExprMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                id.get(i, j - n).clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(SymError::SingularMatrix);
        }
        Ok(ExprMatrix::from_fn(n, n, |i, j| r.get(i, j + n).clone()))
    }

    /// A matrix `G` with `self * G * self = self`, built from the inverse of a
    /// maximal nonsingular principal-pivot block. For symmetric input `G` is
    /// symmetric; for full-rank input it is the inverse.
    pub fn generalized_inverse(&self) -> Result<ExprMatrix, SymError> {
        let table = self.table_of().ok_or(SymError::DimensionMismatch)?;
        let (_, rows) = self.transpose().rref();
        let (_, cols) = self.rref();
        let mut g = ExprMatrix::zeros(&table, self.cols, self.rows);
        if rows.is_empty() {
            return Ok(g);
        }
        let block = ExprMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        });
        let inv = block.inverse()?;
        for (a, &cj) in cols.iter().enumerate() {
            for (b, &ri) in rows.iter().enumerate() {
                g.set(cj, ri, inv.get(a, b).clone());
            }
        }
        Ok(g)
    }
}

impl fmt::Debug for ExprMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
