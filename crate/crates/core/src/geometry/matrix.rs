use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::expr::{EvalError, Expr, Point, Tape};

/// Square matrix of expressions, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprMatrix {
    n: usize,
    data: Vec<Expr>,
}

impl ExprMatrix {
    pub fn new(n: usize, data: Vec<Expr>) -> ExprMatrix {
        assert_eq!(data.len(), n * n, "matrix data must have n*n entries");
        ExprMatrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Expr) -> ExprMatrix {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        ExprMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Option<ExprMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(ExprMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> ExprMatrix {
        ExprMatrix::from_fn(n, |i, j| if i == j { Expr::one() } else { Expr::zero() })
    }

    pub fn diagonal(entries: Vec<Expr>) -> ExprMatrix {
        let n = entries.len();
        ExprMatrix::from_fn(n, |i, j| if i == j { entries[i].clone() } else { Expr::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[Expr] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Expr> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> ExprMatrix {
        ExprMatrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl FnMut(&Expr) -> Expr) -> ExprMatrix {
        ExprMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!(self.n, other.n);
        ExprMatrix::from_fn(self.n, |i, j| {
            Expr::sum((0..self.n).map(|k| self.get(i, k).clone() * other.get(k, j).clone()))
        })
    }

    /// Structural symmetry: `m[i][j] == m[j][i]` as trees.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_literal_zero()))
    }

    /// Determinant by Laplace expansion with memoized minors.
    pub fn determinant(&self) -> Expr {
        let mut memo = HashMap::new();
        let rows: Vec<usize> = (0..self.n).collect();
        let cols: Vec<usize> = (0..self.n).collect();
        det_rec(self, &rows, &cols, 0, &mut memo)
    }

    /// Inverse via the adjugate, with the determinant it divides by.
    pub fn inverse(&self) -> (ExprMatrix, Expr) {
        let n = self.n;
        if self.is_diagonal() {
            let det = Expr::product((0..n).map(|i| self.get(i, i).clone()));
            let inv = ExprMatrix::from_fn(n, |i, j| {
                if i == j {
                    Expr::one() / self.get(i, i).clone()
                } else {
                    Expr::zero()
                }
            });
            return (inv, det);
        }
        let det = self.determinant();
        let mut data = vec![Expr::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let minor = det_rec(self, &rows, &cols, 0, &mut HashMap::new());
                let cofactor = if (i + j) % 2 == 0 { minor } else { Expr::neg(minor) };
                // inverse[j][i] = C_ij / det
                data[j * n + i] = cofactor / det.clone();
            }
        }
        (ExprMatrix { n, data }, det)
    }

    pub fn eval(&self, point: &Point) -> Result<DMatrix<f64>, EvalError> {
        let values = Tape::compile(&self.data).eval(point)?;
        Ok(DMatrix::from_row_slice(self.n, self.n, &values))
    }
}

// Expands along rows[depth] over the columns not yet used; `used` is a bitmask
// into `cols`.
fn det_rec(m: &ExprMatrix, rows: &[usize], cols: &[usize], used: u64, memo: &mut HashMap<u64, Expr>) -> Expr {
    let depth = used.count_ones() as usize;
    if depth == rows.len() {
        return Expr::one();
    }
    if let Some(e) = memo.get(&used) {
        return e.clone();
    }
    let row = rows[depth];
    let mut total = Expr::zero();
    let mut free_before = 0;
    for (k, &col) in cols.iter().enumerate() {
        if used & (1 << k) != 0 {
            continue;
        }
        let entry = m.get(row, col);
        if !entry.is_literal_zero() {
            let sub = det_rec(m, rows, cols, used | (1 << k), memo);
            let term = entry.clone() * sub;
            total = if free_before % 2 == 0 {
                total + term
            } else {
                total - term
            };
        }
        free_before += 1;
    }
    memo.insert(used, total.clone());
    total
}
