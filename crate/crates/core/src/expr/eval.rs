use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::chart::BUILTIN_CONSTANTS;
use super::{BinOp, Expr, Func, Number, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no value bound for `{0}`")]
    Unbound(String),
}

fn domain(msg: impl Into<String>) -> EvalError {
    EvalError::Domain(msg.into())
}

fn finite(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("{what} is not finite")))
    }
}

impl Expr {
    /// Evaluates the expression at `point`.
    ///
    /// Fails with [`EvalError::Domain`] for log of a non-positive number,
    /// square roots of negatives, division by zero, non-integer powers of
    /// negatives and any overflow to a non-finite value.
    pub fn eval(&self, point: &Point) -> Result<f64, EvalError> {
        self.eval_shared(point, &mut HashMap::new())
    }

    // Subtrees reachable through more than one `Arc` are evaluated once.
    fn eval_shared(&self, point: &Point, seen: &mut HashMap<usize, f64>) -> Result<f64, EvalError> {
        match self {
            Expr::Num(n) => Ok(n.to_f64()),
            Expr::Var(name) => point.get(name).ok_or_else(|| EvalError::Unbound(name.to_string())),
            Expr::Const(name) => constant_value(name, point),
            Expr::Unary(f, a) => unary(*f, child(a, point, seen)?),
            Expr::Binary(BinOp::Pow, a, b) => {
                let x = child(a, point, seen)?;
                match b.as_number().and_then(Number::as_integer) {
                    Some(k) => powi(x, k),
                    None => powf(x, child(b, point, seen)?),
                }
            }
            Expr::Binary(op, a, b) => binary(*op, child(a, point, seen)?, child(b, point, seen)?),
        }
    }
}

fn child(e: &Arc<Expr>, point: &Point, seen: &mut HashMap<usize, f64>) -> Result<f64, EvalError> {
    if Arc::strong_count(e) == 1 {
        return e.eval_shared(point, seen);
    }
    let key = Arc::as_ptr(e) as usize;
    if let Some(&v) = seen.get(&key) {
        return Ok(v);
    }
    let v = e.eval_shared(point, seen)?;
    seen.insert(key, v);
    Ok(v)
}

/// Chart parameters shadow the built-in constants.
pub(super) fn constant_value(name: &str, point: &Point) -> Result<f64, EvalError> {
    point
        .get(name)
        .or_else(|| BUILTIN_CONSTANTS.iter().find(|(c, _)| *c == name).map(|(_, v)| *v))
        .ok_or_else(|| EvalError::Unbound(name.to_string()))
}

pub(super) fn unary(f: Func, x: f64) -> Result<f64, EvalError> {
    match f {
        Func::Neg => Ok(-x),
        Func::Sin => Ok(x.sin()),
        Func::Cos => Ok(x.cos()),
        Func::Tan => {
            if x.cos() == 0.0 {
                return Err(domain(format!("tan({x}) at a pole")));
            }
            finite(x.tan(), "tan")
        }
        Func::Exp => finite(x.exp(), "exp"),
        Func::Log => {
            if x <= 0.0 {
                return Err(domain(format!("log of non-positive value {x}")));
            }
            Ok(x.ln())
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(domain(format!("sqrt of negative value {x}")));
            }
            Ok(x.sqrt())
        }
    }
}

pub(super) fn binary(op: BinOp, x: f64, y: f64) -> Result<f64, EvalError> {
    match op {
        BinOp::Add => finite(x + y, "sum"),
        BinOp::Sub => finite(x - y, "difference"),
        BinOp::Mul => finite(x * y, "product"),
        BinOp::Div => {
            if y == 0.0 {
                return Err(domain("division by zero"));
            }
            finite(x / y, "quotient")
        }
        BinOp::Pow => powf(x, y),
    }
}

pub(super) fn powi(x: f64, k: i64) -> Result<f64, EvalError> {
    if x == 0.0 && k < 0 {
        return Err(domain("zero raised to a negative power"));
    }
    match i32::try_from(k) {
        Ok(k) => finite(x.powi(k), "power"),
        Err(_) => finite(x.powf(k as f64), "power"),
    }
}

pub(super) fn powf(x: f64, y: f64) -> Result<f64, EvalError> {
    if x < 0.0 && y.fract() != 0.0 {
        return Err(domain(format!("{x} raised to non-integer power {y}")));
    }
    if x == 0.0 && y < 0.0 {
        return Err(domain("zero raised to a negative power"));
    }
    finite(x.powf(y), "power")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Chart};
    use std::f64::consts::PI;

    fn chart() -> Chart {
        Chart::new(&["r", "phi", "theta"], &[(0.0, 1.0); 3]).unwrap()
    }

    fn eval(src: &str, point: &Point) -> Result<f64, EvalError> {
        parse(src, &chart()).unwrap().eval(point)
    }

    #[test]
    fn elementary_values() {
        let p = Point::new().with("theta", PI / 2.0);
        assert!((eval("sin(theta)", &p).unwrap() - 1.0).abs() < 1e-15);
        let p = Point::new().with("r", 2.0).with("phi", 0.0);
        assert_eq!(eval("r*cos(phi)", &p).unwrap(), 2.0);
        assert_eq!(eval("r^-2", &p).unwrap(), 0.25);
        assert!((eval("pi", &p).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = Point::new().with("r", 0.0);
        assert!(matches!(eval("1/r", &p), Err(EvalError::Domain(_))));
        assert!(matches!(eval("log(r)", &p), Err(EvalError::Domain(_))));
        assert!(matches!(eval("r^-1", &p), Err(EvalError::Domain(_))));
        let p = Point::new().with("r", -1.0);
        assert!(matches!(eval("sqrt(r)", &p), Err(EvalError::Domain(_))));
        assert!(matches!(eval("r^(1/2)", &p), Err(EvalError::Domain(_))));
        assert_eq!(eval("r^3", &p).unwrap(), -1.0);
        assert!(matches!(eval("exp(1000)", &p), Err(EvalError::Domain(_))));
    }

    #[test]
    fn unbound_variable() {
        assert_eq!(
            eval("r + phi", &Point::new().with("r", 1.0)),
            Err(EvalError::Unbound("phi".into()))
        );
    }
}
