use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use thiserror::Error;

use super::{Expr, Func, Node, MAX_EXPONENT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            let start = lx.pos;
            let Some(&c) = lx.src.get(lx.pos) else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            let tok = match c {
                b'+' => lx.single(Tok::Plus),
                b'-' => lx.single(Tok::Minus),
                b'*' => lx.single(Tok::Star),
                b'/' => lx.single(Tok::Slash),
                b'^' => lx.single(Tok::Caret),
                b'(' => lx.single(Tok::LParen),
                b')' => lx.single(Tok::RParen),
                b'0'..=b'9' | b'.' => lx.number()?,
                c if c.is_ascii_alphabetic() => lx.ident(),
                _ => {
                    return Err(ParseError {
                        offset: start,
                        expected: vec!["number".into(), "identifier".into(), "operator".into()],
                    })
                }
            };
            out.push((tok, start));
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn single(&mut self, t: Tok) -> Tok {
        self.pos += 1;
        t
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let int_part = self.digits();
        if self.src.get(self.pos) != Some(&b'.') {
            return Ok(Tok::Int(int_part.parse().unwrap()));
        }
        self.pos += 1;
        let frac = self.digits();
        if int_part.is_empty() && frac.is_empty() {
            return Err(ParseError { offset: start, expected: vec!["digit".into()] });
        }
        let mantissa: BigInt = format!("{int_part}{frac}").parse().unwrap();
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        Ok(Tok::Num(BigRational::new(mantissa, scale)))
    }

    fn ident(&mut self) -> Tok {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(String::from_utf8(self.src[start..self.pos].to_vec()).unwrap())
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

/// Parses an expression. Decimal literals become exact rationals.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: Lexer::tokens(text)?, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(p.error(&["operator", "end of input"])),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::node(Node::Add(lhs, self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::node(Node::Sub(lhs, self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::node(Node::Mul(lhs, self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::node(Node::Div(lhs, self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::node(Node::Neg(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let k = self.exponent()?;
        let k = k
            .to_i32()
            .filter(|k| k.abs() <= MAX_EXPONENT)
            .ok_or_else(|| ParseError {
                offset: at,
                expected: vec![format!("integer exponent with magnitude <= {MAX_EXPONENT}")],
            })?;
        Ok(Expr::node(Node::Pow(base, k)))
    }

    /// Signed integer literal, optionally parenthesized, with right-associative `^`.
    fn exponent(&mut self) -> Result<BigInt, ParseError> {
        let value = match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let v = self.exponent()?;
                self.expect_rparen()?;
                v
            }
            Tok::Minus => {
                self.bump();
                return Ok(-self.exponent()?);
            }
            Tok::Int(i) => {
                self.bump();
                i
            }
            _ => return Err(self.error(&["integer exponent"])),
        };
        if *self.peek() == Tok::Caret {
            self.bump();
            let at = self.offset();
            let rhs = self.exponent()?;
            let rhs = rhs.to_u32().filter(|r| *r <= 64).ok_or(ParseError {
                offset: at,
                expected: vec!["small nonnegative exponent".into()],
            })?;
            return Ok(value.pow(rhs));
        }
        Ok(value)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::constant(BigRational::from_integer(i)))
            }
            Tok::Num(q) => {
                self.bump();
                Ok(Expr::constant(q))
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or_else(|| ParseError {
                        offset: at,
                        expected: vec!["one of sin, cos, tan, exp, log, sqrt".into()],
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::node(Node::Call(func, arg)))
                } else if Func::from_name(&name).is_some() {
                    Err(self.error(&["("]))
                } else {
                    Ok(Expr::node(Node::Var(Arc::from(name.as_str()))))
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            _ => Err(self.error(&["number", "identifier", "("])),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&[")", "operator"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_call() {
        let e = parse("x*y + sin(z)").unwrap();
        match e.kind() {
            Node::Add(a, b) => {
                assert!(matches!(a.kind(), Node::Mul(_, _)));
                assert!(matches!(b.kind(), Node::Call(Func::Sin, _)));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(e.free_vars().len(), 3);
    }

    #[test]
    fn integer_power() {
        let e = parse("x^2").unwrap();
        assert_eq!(*e.kind(), Node::Pow(Expr::var("x"), 2));
        assert_eq!(*parse("x^-2").unwrap().kind(), Node::Pow(Expr::var("x"), -2));
        assert_eq!(*parse("x^2^3").unwrap().kind(), Node::Pow(Expr::var("x"), 8));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse("-x^2").unwrap();
        assert!(matches!(e.kind(), Node::Neg(inner) if matches!(inner.kind(), Node::Pow(_, 2))));
    }

    #[test]
    fn unclosed_paren_reports_offset() {
        let err = parse("2*(x").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.expected.contains(&")".to_string()));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.5").unwrap(), Expr::ratio(1, 2));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("x^y").is_err());
        assert!(parse("foo(x)").is_err());
        assert!(parse("x^100").is_err());
        assert!(parse("sin").is_err());
        assert!(parse("x $ y").is_err());
        assert!(parse("").is_err());
    }
}
