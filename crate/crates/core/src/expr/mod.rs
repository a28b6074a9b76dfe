//! Symbolic scalar expressions over the coordinates of a chart.
//!
//! Every [`Expr`] is built through the simplifying constructors below
//! (`add`, `mul`, `pow`, ...), so the tree is always in the same
//! conservative normal form: rational constants are folded and the
//! `±0`, `×1`, `×0`, `÷1` and integer `pow` identities are applied. The
//! parser uses the same constructors, which is what makes printing and
//! re-parsing reproduce a tree exactly.
//!
//! No trigonometric or other rewriting is attempted; equality of two
//! expressions is decided numerically by [`ZeroTest`].

mod chart;
mod diff;
mod eval;
mod number;
mod parse;
mod print;
mod tape;
mod zero;

use std::sync::Arc;

pub use chart::{Chart, ChartError, Interval, Point};
pub use eval::EvalError;
pub use number::Number;
pub use parse::{parse, ParseError};
pub use tape::Tape;
pub use zero::{is_zero, Residual, ZeroTest, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL};

/// Elementary unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Neg,
}

impl Func {
    pub const NAMED: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Neg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Neg => "neg",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::NAMED.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Immutable expression tree. Children are reference counted so clones
/// are cheap and trees can be shared across threads.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Number),
    /// Named constant: `pi`, `e`, or a parameter declared on the chart.
    Const(Arc<str>),
    Var(Arc<str>),
    Unary(Func, Arc<Expr>),
    Binary(BinOp, Arc<Expr>, Arc<Expr>),
}

// Smart constructors fold literals; the operator traits delegate to them.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Number::int(0))
    }

    pub fn one() -> Expr {
        Expr::Num(Number::int(1))
    }

    pub fn int(v: i64) -> Expr {
        Expr::Num(Number::int(v))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Num(Number::ratio(num, den))
    }

    /// A float constant, stored exactly when it is a short decimal.
    pub fn real(v: f64) -> Expr {
        match Number::from_literal(&format!("{v:e}")) {
            Some(n) => Expr::Num(n),
            None => Expr::Num(Number::Real(v)),
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Arc::from(name))
    }

    pub fn constant(name: &str) -> Expr {
        Expr::Const(Arc::from(name))
    }

    pub fn as_number(&self) -> Option<Number> {
        match self {
            Expr::Num(n) => Some(*n),
            _ => None,
        }
    }

    /// Structural zero: the literal `0`.
    pub fn is_literal_zero(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_zero())
    }

    pub fn is_literal_one(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_one())
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Unary(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// True if `name` occurs as a variable anywhere in the tree.
    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => &**v == name,
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Unary(_, a) => a.depends_on(name),
            Expr::Binary(_, a, b) => a.depends_on(name) || b.depends_on(name),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
            if let Some(n) = x.checked_add(y) {
                return Expr::Num(n);
            }
        }
        if a.is_literal_zero() {
            return b;
        }
        if b.is_literal_zero() {
            return a;
        }
        Expr::Binary(BinOp::Add, Arc::new(a), Arc::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
            if let Some(n) = x.checked_sub(y) {
                return Expr::Num(n);
            }
        }
        if b.is_literal_zero() {
            return a;
        }
        if a.is_literal_zero() {
            return Expr::neg(b);
        }
        Expr::Binary(BinOp::Sub, Arc::new(a), Arc::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
            if let Some(n) = x.checked_mul(y) {
                return Expr::Num(n);
            }
        }
        if a.is_literal_zero() || b.is_literal_zero() {
            return Expr::zero();
        }
        if a.is_literal_one() {
            return b;
        }
        if b.is_literal_one() {
            return a;
        }
        if matches!(a.as_number(), Some(n) if n.is_minus_one()) {
            return Expr::neg(b);
        }
        if matches!(b.as_number(), Some(n) if n.is_minus_one()) {
            return Expr::neg(a);
        }
        Expr::Binary(BinOp::Mul, Arc::new(a), Arc::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
            if let Some(n) = x.checked_div(y) {
                return Expr::Num(n);
            }
        }
        if b.is_literal_one() {
            return a;
        }
        if matches!(b.as_number(), Some(n) if n.is_minus_one()) {
            return Expr::neg(a);
        }
        if a.is_literal_zero() && !b.is_literal_zero() {
            return Expr::zero();
        }
        Expr::Binary(BinOp::Div, Arc::new(a), Arc::new(b))
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if let (Some(x), Some(k)) = (base.as_number(), exponent.as_number().and_then(Number::as_integer)) {
            if let Some(n) = x.checked_powi(k) {
                return Expr::Num(n);
            }
        }
        if exponent.is_literal_zero() {
            return Expr::one();
        }
        if exponent.is_literal_one() || base.is_literal_one() {
            return base;
        }
        if base.is_literal_zero() && matches!(exponent.as_number(), Some(n) if !n.is_negative()) {
            return Expr::zero();
        }
        // (x^m)^k -> x^(m k) for integer m, k
        if let (Expr::Binary(BinOp::Pow, inner_base, inner_exp), Some(k)) =
            (&base, exponent.as_number().and_then(Number::as_integer))
        {
            if let Some(m) = inner_exp.as_number().and_then(Number::as_integer) {
                if let Some(mk) = m.checked_mul(k) {
                    return Expr::pow((**inner_base).clone(), Expr::int(mk));
                }
            }
        }
        Expr::Binary(BinOp::Pow, Arc::new(base), Arc::new(exponent))
    }

    pub fn powi(base: Expr, k: i64) -> Expr {
        Expr::pow(base, Expr::int(k))
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Num(n) => match n.checked_neg() {
                Some(m) => Expr::Num(m),
                None => Expr::Unary(Func::Neg, Arc::new(a)),
            },
            Expr::Unary(Func::Neg, inner) => (*inner).clone(),
            other => Expr::Unary(Func::Neg, Arc::new(other)),
        }
    }

    /// Applies a unary function, folding the handful of exact values at 0 and 1.
    pub fn apply(f: Func, a: Expr) -> Expr {
        if f == Func::Neg {
            return Expr::neg(a);
        }
        if let Some(n) = a.as_number() {
            let folded = match f {
                Func::Sin | Func::Tan | Func::Sqrt if n.is_zero() => Some(Expr::zero()),
                Func::Cos | Func::Exp if n.is_zero() => Some(Expr::one()),
                Func::Log if n.is_one() => Some(Expr::zero()),
                Func::Sqrt if n.is_one() => Some(Expr::one()),
                _ => None,
            };
            if let Some(e) = folded {
                return e;
            }
        }
        Expr::Unary(f, Arc::new(a))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::apply(Func::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::apply(Func::Cos, a)
    }

    pub fn tan(a: Expr) -> Expr {
        Expr::apply(Func::Tan, a)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::apply(Func::Exp, a)
    }

    pub fn log(a: Expr) -> Expr {
        Expr::apply(Func::Log, a)
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::apply(Func::Sqrt, a)
    }

    /// Sum of an iterator of terms; the empty sum is `0`.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), Expr::add)
    }

    /// Product of an iterator of factors; the empty product is `1`.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        factors.into_iter().fold(Expr::one(), Expr::mul)
    }

    /// Rebuilds the tree through the simplifying constructors.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(f, a) => Expr::apply(*f, a.simplify()),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.simplify(), b.simplify()),
        }
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        match op {
            BinOp::Add => Expr::add(a, b),
            BinOp::Sub => Expr::sub(a, b),
            BinOp::Mul => Expr::mul(a, b),
            BinOp::Div => Expr::div(a, b),
            BinOp::Pow => Expr::pow(a, b),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
