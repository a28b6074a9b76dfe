//! Flattened evaluation of many expressions at many points.
//!
//! Compiling hash-conses structurally equal subtrees into one instruction, so
//! the large, repetitive trees produced by differentiating matrix inverses are
//! evaluated once per distinct node instead of once per occurrence.

use std::collections::HashMap;
use std::sync::Arc;

use super::eval::{binary, constant_value, powi, unary};
use super::{BinOp, EvalError, Expr, Func, Number, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Num(u64),
    Var(usize),
    Const(usize),
    Unary(Func, usize),
    Binary(BinOp, usize, usize),
    PowI(usize, i64),
}

/// A straight-line program computing the values of a list of expressions.
#[derive(Clone, Debug, Default)]
pub struct Tape {
    ops: Vec<Op>,
    roots: Vec<usize>,
    vars: Vec<Arc<str>>,
    consts: Vec<Arc<str>>,
}

#[derive(Default)]
struct Builder {
    tape: Tape,
    interned: HashMap<Op, usize>,
    by_address: HashMap<usize, usize>,
}

impl Builder {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&slot) = self.interned.get(&op) {
            return slot;
        }
        let slot = self.tape.ops.len();
        self.tape.ops.push(op);
        self.interned.insert(op, slot);
        slot
    }

    fn name_slot(names: &mut Vec<Arc<str>>, name: &Arc<str>) -> usize {
        match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                names.push(name.clone());
                names.len() - 1
            }
        }
    }

    fn child(&mut self, e: &Arc<Expr>) -> usize {
        let key = Arc::as_ptr(e) as usize;
        if let Some(&slot) = self.by_address.get(&key) {
            return slot;
        }
        let slot = self.node(e);
        self.by_address.insert(key, slot);
        slot
    }

    fn node(&mut self, e: &Expr) -> usize {
        let op = match e {
            Expr::Num(n) => Op::Num(n.to_f64().to_bits()),
            Expr::Var(name) => Op::Var(Self::name_slot(&mut self.tape.vars, name)),
            Expr::Const(name) => Op::Const(Self::name_slot(&mut self.tape.consts, name)),
            Expr::Unary(f, a) => Op::Unary(*f, self.child(a)),
            Expr::Binary(BinOp::Pow, a, b) => match b.as_number().and_then(Number::as_integer) {
                Some(k) => Op::PowI(self.child(a), k),
                None => Op::Binary(BinOp::Pow, self.child(a), self.child(b)),
            },
            Expr::Binary(op, a, b) => Op::Binary(*op, self.child(a), self.child(b)),
        };
        self.push(op)
    }
}

impl Tape {
    pub fn compile<'a, I>(exprs: I) -> Tape
    where
        I: IntoIterator<Item = &'a Expr>,
    {
        let mut b = Builder::default();
        for e in exprs {
            let root = b.node(e);
            b.tape.roots.push(root);
        }
        b.tape
    }

    /// Number of distinct instructions.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Values of the compiled expressions, in compile order.
    pub fn eval(&self, point: &Point) -> Result<Vec<f64>, EvalError> {
        let mut scratch = Vec::new();
        self.eval_with(point, &mut scratch)?;
        Ok(self.roots.iter().map(|&r| scratch[r]).collect())
    }

    /// Evaluates every instruction into `scratch`; root `i` is then at
    /// `scratch[self.root(i)]`.
    pub(crate) fn eval_with(&self, point: &Point, scratch: &mut Vec<f64>) -> Result<(), EvalError> {
        let vars = self
            .vars
            .iter()
            .map(|n| point.get(n).ok_or_else(|| EvalError::Unbound(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let consts = self
            .consts
            .iter()
            .map(|n| constant_value(n, point))
            .collect::<Result<Vec<_>, _>>()?;
        scratch.clear();
        scratch.reserve(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Num(bits) => f64::from_bits(bits),
                Op::Var(i) => vars[i],
                Op::Const(i) => consts[i],
                Op::Unary(f, a) => unary(f, scratch[a])?,
                Op::Binary(op, a, b) => binary(op, scratch[a], scratch[b])?,
                Op::PowI(a, k) => powi(scratch[a], k)?,
            };
            scratch.push(v);
        }
        Ok(())
    }

    pub(crate) fn root(&self, i: usize) -> usize {
        self.roots[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Chart};

    #[test]
    fn shares_equal_subtrees_and_matches_tree_eval() {
        let c = Chart::new(&["x", "y"], &[(0.0, 1.0); 2]).unwrap();
        let a = parse("sin(x*y) + sin(x*y)^2", &c).unwrap();
        let b = parse("exp(sin(x*y)) / (1 + pi*y)", &c).unwrap();
        let tape = Tape::compile([&a, &b]);
        // x, y, x*y, sin, sin^2, +, exp, pi, 1, pi*y, 1+pi*y, /
        assert_eq!(tape.len(), 12);
        let p = c.point(&[0.3, 0.7]);
        let values = tape.eval(&p).unwrap();
        assert_eq!(values, vec![a.eval(&p).unwrap(), b.eval(&p).unwrap()]);
    }

    #[test]
    fn reports_domain_and_unbound_errors() {
        let c = Chart::new(&["x"], &[(0.0, 1.0)]).unwrap();
        let tape = Tape::compile([&parse("log(x - 2)", &c).unwrap()]);
        assert!(matches!(tape.eval(&c.point(&[0.5])), Err(EvalError::Domain(_))));
        assert_eq!(tape.eval(&Point::new()), Err(EvalError::Unbound("x".into())));
    }
}
