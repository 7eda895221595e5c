//! Expression grammar for coefficient strings: integers, `l1..l<n>`, `+ - * /`,
//! unary minus and parentheses. Columns in errors are 1-based character positions.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{Expr, Rational};

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    nvars: Option<usize>,
    text: &'a str,
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { column, message: message.into() }
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { Expr::add(acc, rhs) } else { Expr::sub(acc, rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { Expr::mul(acc, rhs) } else { Expr::div(acc, rhs) };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::neg(self.unary()?))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = {
            self.skip_ws();
            self.column()
        };
        match self.peek() {
            None => Err(syntax(col, "unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(syntax(self.column(), "expected `)`")),
                }
            }
            Some('l') => {
                self.pos += 1;
                let idx = self.digits();
                let n: usize = idx.parse().map_err(|_| syntax(col, "expected a coordinate index after `l`"))?;
                if n == 0 || self.nvars.is_some_and(|k| n > k) {
                    return Err(syntax(col, format!("unknown coordinate `l{n}`")));
                }
                Ok(Expr::var(n - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits();
                let n: BigInt = d.parse().map_err(|_| syntax(col, "invalid integer"))?;
                Ok(Expr::constant(Rational::from_integer(n)))
            }
            Some(c) => Err(syntax(col, format!("unexpected `{c}`"))),
        }
    }
}

/// Parses a coefficient expression; `nvars` bounds the coordinate indices when given.
pub fn parse_expr(text: &str, nvars: Option<usize>) -> Result<Expr> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, nvars, text };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(syntax(p.column(), format!("unexpected `{c}` after expression in `{}`", p.text)));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{is_zero, rat, ZeroTest};

    #[test]
    fn examples() {
        let e = parse_expr("-1/l1", Some(1)).unwrap();
        assert_eq!(e.eval(&[rat(2, 1)]).unwrap(), rat(-1, 2));
        let e = parse_expr("(l1+l2)/(l1*l2)", Some(2)).unwrap();
        assert_eq!(e.eval(&[rat(1, 1), rat(2, 1)]).unwrap(), rat(3, 2));
        assert_eq!(parse_expr("1//l1", Some(1)).unwrap_err(), Error::Syntax { column: 3, message: "unexpected `/`".into() });
    }

    #[test]
    fn errors_are_located() {
        assert!(matches!(parse_expr("l3", Some(2)), Err(Error::Syntax { column: 1, .. })));
        assert!(matches!(parse_expr("(l1 + 2", None), Err(Error::Syntax { column: 8, .. })));
        assert!(matches!(parse_expr("2 l1", None), Err(Error::Syntax { column: 3, .. })));
        assert!(matches!(parse_expr("", None), Err(Error::Syntax { column: 1, .. })));
        assert!(matches!(parse_expr("l1^2", None), Err(Error::Syntax { column: 3, .. })));
    }

    #[test]
    fn precedence_and_round_trip() {
        let e = parse_expr("1 - 2*l1/3 + -l2", None).unwrap();
        assert_eq!(e.eval(&[rat(3, 1), rat(5, 1)]).unwrap(), rat(-6, 1));
        for text in ["-1/l1", "(l1+l2)/(l1*l2)", "3/4 - l1*(l2 - 1/2)/(l1 + 7)", "-(l1 - l2)"] {
            let e = parse_expr(text, None).unwrap();
            let back = parse_expr(&e.to_string(), None).unwrap();
            let diff = Expr::sub(e, back);
            assert!(is_zero(&diff, ZeroTest::exact()).unwrap().zero, "{text}");
        }
    }
}
