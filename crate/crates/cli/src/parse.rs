//! Expression parser for the computation language.
//!
//! Grammar:
//!   expr   := term (('+'|'-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ('^' integer)?
//!   atom   := 'f' '(' index ',' level ')' | 'dp' '(' atom ',' nat ')'
//!          | 'q' ('^' '{' halfint '}')? | integer | '(' expr ')'
//!
//! `halfint` is an optionally negative integer or half-integer written with
//! denominator 2, e.g. `1/2`, `-3/2`, `2`.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    /// Generator written f(index, level); the index is 1-based in the source.
    Gen { index: i64, level: i64 },
    /// dp(atom, n): divided power.
    DividedPower(Box<Expr>, u64),
    /// q^{k/2}; plain `q` is QHalfPow(2).
    QHalfPow(i64),
    Int(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: {}", self.offset, self.message)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn integer(&mut self) -> Result<i64, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        let neg = self.eat(b'-');
        self.skip_ws();
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start.max(digits_start);
            return self.err("expected integer");
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let mut value: i64 = text
            .parse()
            .map_err(|_| SyntaxError { offset: start, message: "integer too large".into() })?;
        if neg {
            value = -value;
        }
        Ok(value)
    }

    /// Integer or a fraction with denominator 2, returned as twice the value.
    fn halfint_times_two(&mut self) -> Result<i64, SyntaxError> {
        let n = self.integer()?;
        if self.eat(b'/') {
            let d = self.integer()?;
            if d != 2 {
                return self.err("half-integers must have denominator 2");
            }
            Ok(n)
        } else {
            Ok(2 * n)
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(b'f') => {
                self.pos += 1;
                self.expect(b'(')?;
                let index = self.integer()?;
                self.expect(b',')?;
                let level = self.integer()?;
                self.expect(b')')?;
                Ok(Expr::Gen { index, level })
            }
            Some(b'd') => {
                if self.src[self.pos..].starts_with(b"dp") {
                    self.pos += 2;
                } else {
                    return self.err("expected 'dp'");
                }
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b',')?;
                let n = self.integer()?;
                if n < 0 {
                    return self.err("divided power must be nonnegative");
                }
                self.expect(b')')?;
                Ok(Expr::DividedPower(Box::new(inner), n as u64))
            }
            Some(b'q') => {
                self.pos += 1;
                let save = self.pos;
                if self.eat(b'^') {
                    if self.eat(b'{') {
                        let h = self.halfint_times_two()?;
                        self.expect(b'}')?;
                        Ok(Expr::QHalfPow(h))
                    } else {
                        // a bare '^ integer' belongs to the factor rule
                        self.pos = save;
                        Ok(Expr::QHalfPow(2))
                    }
                } else {
                    Ok(Expr::QHalfPow(2))
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => Ok(Expr::Int(self.integer()?)),
            _ => self.err("expected an atom"),
        }
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            let save = self.pos;
            self.pos += 1;
            if self.peek() == Some(b'{') {
                // braced exponents belong to the q atom only
                self.pos = save;
                return Ok(base);
            }
            let e = self.integer()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.src.get(self.pos) {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::Add(Box::new(acc), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }
}

pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => {
                let rhs = format!("{b}");
                if matches!(**b, Expr::Add(..) | Expr::Sub(..)) {
                    write!(f, "{a} - ({rhs})")
                } else {
                    write!(f, "{a} - {rhs}")
                }
            }
            Expr::Mul(a, b) => {
                let wrap = |e: &Expr| -> String {
                    if matches!(e, Expr::Add(..) | Expr::Sub(..)) {
                        format!("({e})")
                    } else {
                        format!("{e}")
                    }
                };
                write!(f, "{}*{}", wrap(a), wrap(b))
            }
            Expr::Pow(a, e) => {
                if matches!(**a, Expr::Gen { .. } | Expr::Int(_) | Expr::QHalfPow(2)) {
                    write!(f, "{a}^{e}")
                } else {
                    write!(f, "({a})^{e}")
                }
            }
            Expr::Gen { index, level } => write!(f, "f({index},{level})"),
            Expr::DividedPower(a, n) => write!(f, "dp({a},{n})"),
            Expr::QHalfPow(2) => write!(f, "q"),
            Expr::QHalfPow(h) => {
                if h % 2 == 0 {
                    write!(f, "q^{{{}}}", h / 2)
                } else {
                    write!(f, "q^{{{h}/2}}")
                }
            }
            Expr::Int(n) => write!(f, "{n}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_generators() {
        let e = parse("f(1,0)*f(1,1)").unwrap();
        assert_eq!(
            e,
            Expr::Mul(
                Box::new(Expr::Gen { index: 1, level: 0 }),
                Box::new(Expr::Gen { index: 1, level: 1 })
            )
        );
    }

    #[test]
    fn sum_with_divided_power_and_half_power() {
        let e = parse("dp(f(1,0),2) + q^{1/2}*f(2,0)").unwrap();
        match e {
            Expr::Add(a, b) => {
                assert_eq!(*a, Expr::DividedPower(Box::new(Expr::Gen { index: 1, level: 0 }), 2));
                assert_eq!(
                    *b,
                    Expr::Mul(
                        Box::new(Expr::QHalfPow(1)),
                        Box::new(Expr::Gen { index: 2, level: 0 })
                    )
                );
            }
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn error_position() {
        let err = parse("f(1,").unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn negative_levels_and_powers() {
        assert!(parse("f(1,-2)").is_ok());
        assert!(parse("q^{-3/2}").is_ok());
        assert!(parse("q^2").is_ok());
        assert!(parse("(f(1,0) + f(2,0))^2").is_ok());
        assert!(parse("f(1,0) +").is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        for src in [
            "f(1,0)*f(1,1)",
            "dp(f(1,0),2) + q^{1/2}*f(2,0)",
            "q^{-3/2}",
            "3*q^2 - f(2,-1)^3",
            "(f(1,0) + f(2,1))*f(1,0) - 7",
        ] {
            let e = parse(src).unwrap();
            let printed = format!("{e}");
            let reparsed = parse(&printed).unwrap();
            assert_eq!(e, reparsed, "roundtrip failed for {src} -> {printed}");
        }
    }
}
