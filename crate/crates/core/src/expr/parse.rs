//! Recursive-descent parser for the infix expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-x^2` is `-(x^2)` and `2^-x` is `2^(-x)`.

use thiserror::Error;

use super::{Chart, Expr, Func, Number};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownSymbol { offset, .. } => *offset,
        }
    }
}

/// Parses `source` against the coordinates and constants of `chart`.
pub fn parse(source: &str, chart: &Chart) -> Result<Expr, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        chart,
        end: source.len(),
    };
    let e = parser.expr()?;
    match parser.peek() {
        None => Ok(e),
        Some(tok) => Err(syntax(tok.offset, format!("unexpected {}", tok.kind.describe()))),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Number(Number),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number(n) => format!("number `{n}`"),
            Kind::Ident(s) => format!("identifier `{s}`"),
            Kind::Op(c) => format!("`{c}`"),
            Kind::LParen => "`(`".to_string(),
            Kind::RParen => "`)`".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when followed by digits, so `2e` stays `2` `e`
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &source[start..i];
                let text = text.replacen("e+", "e", 1).replacen("E+", "e", 1);
                match Number::from_literal(&text) {
                    Some(n) => Kind::Number(n),
                    None => return Err(syntax(start, format!("malformed number `{text}`"))),
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Kind::Ident(source[start..i].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                Kind::Op(c as char)
            }
            b'(' => {
                i += 1;
                Kind::LParen
            }
            b')' => {
                i += 1;
                Kind::RParen
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        tokens.push(Token { kind, offset: start });
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    chart: &'a Chart,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: Kind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::add(lhs, rhs)
            } else {
                Expr::sub(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::mul(lhs, rhs)
            } else {
                Expr::div(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::neg(self.unary()?))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let offset = self.offset();
        match self.next() {
            Some(Token { kind: Kind::RParen, .. }) => Ok(()),
            Some(t) => Err(syntax(offset, format!("expected `)`, found {}", t.kind.describe()))),
            None => Err(syntax(offset, "expected `)`, found end of input")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let Some(tok) = self.next() else {
            return Err(syntax(offset, "unexpected end of input"));
        };
        match tok.kind {
            Kind::Number(n) => Ok(Expr::Num(n)),
            Kind::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Kind::Ident(name) => {
                let is_call = matches!(self.peek(), Some(Token { kind: Kind::LParen, .. }));
                if is_call {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(ParseError::UnknownSymbol { name, offset });
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::apply(f, arg));
                }
                if self.chart.coord_index(&name).is_some() {
                    Ok(Expr::var(&name))
                } else if self.chart.is_constant(&name) {
                    Ok(Expr::constant(&name))
                } else {
                    Err(ParseError::UnknownSymbol { name, offset })
                }
            }
            other => Err(syntax(offset, format!("unexpected {}", other.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinOp;

    fn chart() -> Chart {
        Chart::new(&["x", "y", "r", "theta"], &[(0.0, 1.0); 4]).unwrap()
    }

    fn p(s: &str) -> Expr {
        parse(s, &chart()).unwrap()
    }

    #[test]
    fn atoms_and_structure() {
        assert_eq!(p("x"), Expr::var("x"));
        assert_eq!(
            p("sin(theta)*r"),
            Expr::mul(Expr::sin(Expr::var("theta")), Expr::var("r"))
        );
        assert_eq!(p("pi"), Expr::constant("pi"));
        assert_eq!(p("2*e"), Expr::mul(Expr::int(2), Expr::constant("e")));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-x^2"), Expr::neg(Expr::powi(Expr::var("x"), 2)));
        assert_eq!(p("x^y^2"), Expr::pow(Expr::var("x"), Expr::powi(Expr::var("y"), 2)));
        assert_eq!(
            p("x - y - 1"),
            Expr::sub(Expr::sub(Expr::var("x"), Expr::var("y")), Expr::one())
        );
        assert_eq!(p("2^-x"), Expr::pow(Expr::int(2), Expr::neg(Expr::var("x"))));
        assert_eq!(p(" 1 / 3 "), Expr::ratio(1, 3));
        assert_eq!(p("1.5e1"), Expr::int(15));
        assert!(matches!(p("x/y/2"), Expr::Binary(BinOp::Div, _, _)));
    }

    #[test]
    fn malformed_input_reports_offset() {
        let err = parse("sin(", &chart()).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err:?}");
        assert_eq!(parse("x +* y", &chart()).unwrap_err().offset(), 3);
        assert_eq!(parse("(x", &chart()).unwrap_err().offset(), 2);
        assert_eq!(parse("x y", &chart()).unwrap_err().offset(), 2);
        assert_eq!(parse("x § y", &chart()).unwrap_err().offset(), 2);
        assert_eq!(parse("", &chart()).unwrap_err().offset(), 0);
    }

    #[test]
    fn unknown_symbols() {
        assert_eq!(
            parse("z + 1", &chart()),
            Err(ParseError::UnknownSymbol {
                name: "z".into(),
                offset: 0
            })
        );
        assert_eq!(
            parse("cosh(x)", &chart()),
            Err(ParseError::UnknownSymbol {
                name: "cosh".into(),
                offset: 0
            })
        );
    }
}
