use std::collections::HashMap;
use std::sync::Arc;

use super::{BinOp, Expr, Func};

impl Expr {
    /// Partial derivative with respect to the variable `v`. Total: every
    /// expression has one, and constants differentiate to `0`.
    pub fn differentiate(&self, v: &str) -> Expr {
        self.diff_shared(v, &mut HashMap::new())
    }

    fn diff_shared(&self, v: &str, seen: &mut HashMap<usize, Expr>) -> Expr {
        match self {
            Expr::Num(_) | Expr::Const(_) => Expr::zero(),
            Expr::Var(name) => {
                if &**name == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Unary(f, a) => {
                let da = child(a, v, seen);
                if da.is_literal_zero() {
                    return Expr::zero();
                }
                let u = (**a).clone();
                match f {
                    Func::Neg => Expr::neg(da),
                    Func::Sin => Expr::cos(u) * da,
                    Func::Cos => Expr::neg(Expr::sin(u)) * da,
                    Func::Tan => da / Expr::powi(Expr::cos(u), 2),
                    Func::Exp => self.clone() * da,
                    Func::Log => da / u,
                    Func::Sqrt => da / (Expr::int(2) * self.clone()),
                }
            }
            Expr::Binary(op, a, b) => {
                let da = child(a, v, seen);
                let db = child(b, v, seen);
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => da + db,
                    BinOp::Sub => da - db,
                    BinOp::Mul => da * b.clone() + a * db,
                    BinOp::Div => {
                        if db.is_literal_zero() {
                            da / b
                        } else {
                            (da * b.clone() - a * db) / Expr::powi(b, 2)
                        }
                    }
                    BinOp::Pow => {
                        if db.is_literal_zero() {
                            // b * a^(b-1) * a'
                            if da.is_literal_zero() {
                                return Expr::zero();
                            }
                            let lowered = Expr::pow(a, b.clone() - Expr::one());
                            b * lowered * da
                        } else {
                            // a^b * (b' ln a + b a'/a)
                            let log_term = db * Expr::log(a.clone());
                            let base_term = if da.is_literal_zero() { Expr::zero() } else { b * da / a };
                            self.clone() * (log_term + base_term)
                        }
                    }
                }
            }
        }
    }
}

// Derivatives of subtrees shared between several `Arc`s are computed once
// and shared in turn.
fn child(e: &Arc<Expr>, v: &str, seen: &mut HashMap<usize, Expr>) -> Expr {
    if Arc::strong_count(e) == 1 {
        return e.diff_shared(v, seen);
    }
    let key = Arc::as_ptr(e) as usize;
    if let Some(d) = seen.get(&key) {
        return d.clone();
    }
    let d = e.diff_shared(v, seen);
    seen.insert(key, d.clone());
    d
}
