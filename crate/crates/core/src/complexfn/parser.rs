use num_complex::Complex64;

use super::branch::Branch;
use super::expr::{negate, Builtin, Expr};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit())) {
            let bytes = rest.as_bytes();
            let mut i = 0;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
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
            let value: f64 = rest[..i].parse().map_err(|_| Error::Syntax {
                position: start,
                message: format!("malformed number `{}`", &rest[..i]),
            })?;
            let imag = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
            self.pos = start + i + usize::from(imag);
            return Ok((Tok::Num(value, imag), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|d: char| !(d.is_ascii_alphanumeric() || d == '_'))
                .unwrap_or(rest.len());
            self.pos = start + len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if "+-*/^(),".contains(c) {
            self.pos = start + 1;
            return Ok((Tok::Op(c), start));
        }
        Err(Error::Syntax { position: start, message: format!("unexpected character `{c}`") })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<()> {
        let (t, at) = self.lexer.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.at, message: message.into() })
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.tok == Tok::Op(op) {
            self.bump()
        } else {
            self.error(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Op(c @ ('+' | '-')) => c,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = fold_literal(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Op(c @ ('*' | '/')) => c,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = if op == '*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(match self.unary()? {
                Expr::Const(c) => Expr::Const(negate(c)),
                e => Expr::Neg(e.into()),
            });
        }
        if self.tok == Tok::Op('+') {
            self.bump()?;
            return self.unary();
        }
        let base = self.atom()?;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(Expr::Pow(base.into(), exponent.into(), Branch::Principal));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tok.clone() {
            Tok::Num(v, imag) => {
                self.bump()?;
                Ok(Expr::Const(if imag { Complex64::new(0.0, v) } else { Complex64::new(v, 0.0) }))
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                match name.as_str() {
                    "p" => return Ok(Expr::Var),
                    "pi" => return Ok(Expr::Pi),
                    "i" => return Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                    _ => {}
                }
                let (base, br) = match name.strip_suffix("_slit") {
                    Some(b) => (b, Branch::Slit),
                    None => (name.as_str(), Branch::Principal),
                };
                let builtin = Builtin::from_name(&name);
                let known = matches!(base, "ln" | "sqrt" | "pow") || (base == "exp" && br == Branch::Principal);
                if !known && builtin.is_none() {
                    return Err(Error::UnknownIdentifier { name, position: at });
                }
                self.expect('(')?;
                let a = self.expr()?;
                let e = if base == "pow" && builtin.is_none() {
                    self.expect(',')?;
                    let b = self.expr()?;
                    Expr::Pow(a.into(), b.into(), br)
                } else if let Some(b) = builtin {
                    Expr::Call(b, a.into())
                } else {
                    match base {
                        "ln" => Expr::Ln(a.into(), br),
                        "sqrt" => Expr::Sqrt(a.into(), br),
                        _ => Expr::Exp(a.into()),
                    }
                };
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => self.error("unexpected end of input"),
            Tok::Op(c) => self.error(format!("unexpected `{c}`")),
        }
    }
}

/// `a+bi` written as a literal becomes a single complex constant.
fn fold_literal(op: char, lhs: Expr, rhs: Expr) -> Expr {
    if let (Expr::Const(a), Expr::Const(b)) = (&lhs, &rhs) {
        if a.im == 0.0 && b.re == 0.0 && b.im != 0.0 {
            let im = if op == '+' { b.im } else { -b.im };
            return Expr::Const(Complex64::new(a.re, im));
        }
    }
    if op == '+' {
        Expr::Add(lhs.into(), rhs.into())
    } else {
        Expr::Sub(lhs.into(), rhs.into())
    }
}

/// Parses an expression in the variable `p`.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut parser = Parser { lexer: Lexer { src, pos: 0 }, tok: Tok::End, at: 0 };
    parser.bump()?;
    if parser.tok == Tok::End {
        return parser.error("empty expression");
    }
    let e = parser.expr()?;
    if parser.tok != Tok::End {
        return parser.error("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_operator_position() {
        match parse_expr("1+") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        assert!(matches!(
            parse_expr("2*foo(p)"),
            Err(Error::UnknownIdentifier { position: 2, .. })
        ));
        assert!(matches!(parse_expr("q"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn complex_literal() {
        assert_eq!(parse_expr("1+2i").unwrap(), Expr::Const(Complex64::new(1.0, 2.0)));
        assert_eq!(parse_expr("-3-0.5i").unwrap(), Expr::Const(Complex64::new(-3.0, -0.5)));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("-p^2*3").unwrap();
        assert!(matches!(e, Expr::Mul(ref a, _) if matches!(**a, Expr::Neg(_))));
    }
}
