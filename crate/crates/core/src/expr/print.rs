use std::fmt;

use super::{BinOp, Expr, Func, Number};

// Binding strength, loosest first.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const PREFIX: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn number_precedence(n: Number) -> u8 {
    if n.is_negative() {
        PREFIX
    } else if n.is_atomic() {
        ATOM
    } else {
        PRODUCT
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Num(n) => number_precedence(*n),
        Expr::Const(_) | Expr::Var(_) => ATOM,
        Expr::Unary(Func::Neg, _) => PREFIX,
        Expr::Unary(_, _) => ATOM,
        Expr::Binary(BinOp::Add | BinOp::Sub, _, _) => SUM,
        Expr::Binary(BinOp::Mul | BinOp::Div, _, _) => PRODUCT,
        Expr::Binary(BinOp::Pow, _, _) => POWER,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    // Signed operands are always wrapped so `a - -b` never appears.
    if precedence(e) < min || precedence(e) == PREFIX {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(Func::Neg, a) => {
                f.write_str("-")?;
                if precedence(a) < POWER {
                    write!(f, "({a})")
                } else {
                    write!(f, "{a}")
                }
            }
            Expr::Unary(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(op, a, b) => {
                let (lhs_min, rhs_min, symbol) = match op {
                    BinOp::Add => (SUM, SUM + 1, " + "),
                    BinOp::Sub => (SUM, SUM + 1, " - "),
                    BinOp::Mul => (PRODUCT, PRODUCT + 1, "*"),
                    BinOp::Div => (PRODUCT, PRODUCT + 1, "/"),
                    BinOp::Pow => (ATOM, POWER, "^"),
                };
                write_child(f, a, lhs_min)?;
                f.write_str(symbol)?;
                write_child(f, b, rhs_min)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Chart};

    fn chart() -> Chart {
        Chart::new(&["x", "y"], &[(0.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn prints_minimal_parentheses() {
        let c = chart();
        for (src, printed) in [
            ("x + y*2", "x + y*2"),
            ("(x + y)*2", "(x + y)*2"),
            ("x - (y - 1)", "x - (y - 1)"),
            ("-x^2", "-x^2"),
            ("(-x)^2", "(-x)^2"),
            ("x^(y^2)", "x^y^2"),
            ("(x^y)^2", "(x^y)^2"),
            ("x*(1/3)", "x*(1/3)"),
            ("x - -y", "x - (-y)"),
            ("sin(x)/cos(y)", "sin(x)/cos(y)"),
            ("2^(-3)*x", "1/8*x"),
        ] {
            let e = parse(src, &c).unwrap();
            assert_eq!(e.to_string(), printed, "{src}");
            assert_eq!(parse(&e.to_string(), &c).unwrap(), e, "{src}");
        }
    }
}
