use crate::expr::{EvalError, Expr, Point, Tape};

/// Components of a rank-`R` array of expressions over an `n`-dimensional
/// chart, stored with the last index varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<const R: usize> {
    n: usize,
    data: Vec<Expr>,
}

impl<const R: usize> Tensor<R> {
    pub fn from_fn(n: usize, mut f: impl FnMut([usize; R]) -> Expr) -> Tensor<R> {
        let len = n.pow(R as u32);
        let data = (0..len).map(|flat| f(Self::unflatten(n, flat))).collect();
        Tensor { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<Expr>) -> Option<Tensor<R>> {
        (data.len() == n.pow(R as u32)).then_some(Tensor { n, data })
    }

    pub fn zeros(n: usize) -> Tensor<R> {
        Tensor::from_fn(n, |_| Expr::zero())
    }

    fn unflatten(n: usize, mut flat: usize) -> [usize; R] {
        let mut idx = [0; R];
        for slot in idx.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }

    fn flatten(&self, idx: [usize; R]) -> usize {
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.n);
            acc * self.n + i
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, idx: [usize; R]) -> &Expr {
        &self.data[self.flatten(idx)]
    }

    pub fn entries(&self) -> &[Expr] {
        &self.data
    }

    /// `(index, component)` pairs in storage order.
    pub fn indexed(&self) -> impl Iterator<Item = ([usize; R], &Expr)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(move |(k, e)| (Self::unflatten(self.n, k), e))
    }

    pub fn map(&self, f: impl FnMut(&Expr) -> Expr) -> Tensor<R> {
        Tensor {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor<R>) -> Tensor<R> {
        assert_eq!(self.n, other.n);
        Tensor {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn eval(&self, point: &Point) -> Result<Vec<f64>, EvalError> {
        Tape::compile(&self.data).eval(point)
    }

    /// True when every component is the literal `0`.
    pub fn is_structurally_zero(&self) -> bool {
        self.data.iter().all(Expr::is_literal_zero)
    }
}
