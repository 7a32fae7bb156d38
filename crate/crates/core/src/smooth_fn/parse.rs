//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' integer)? | '-' factor
//! atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func   := exp | log | sin | cos | sinh | cosh
//! ```
//!
//! The exponent may carry a sign, written `x^-2` or `x^(-2)`.

use super::{ExprError, Func, SmoothExpr};

const EXPR_START: &[&str] = &["number", "'x'", "function", "'('", "'-'"];

pub fn parse_expression(text: &str) -> Result<SmoothExpr, ExprError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    if p.pos == text.len() {
        return Err(ExprError::Empty);
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&'static str]) -> ExprError {
        let found = match self.src[self.pos..].chars().next() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        };
        ExprError::Syntax {
            offset: self.pos,
            expected: expected.to_vec(),
            found,
        }
    }

    fn expect(&mut self, c: u8, name: &'static str) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> Result<SmoothExpr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs.add_expr(&self.term()?);
            } else if self.eat(b'-') {
                lhs = lhs.sub_expr(&self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<SmoothExpr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs.mul_expr(&self.factor()?);
            } else if self.eat(b'/') {
                lhs = lhs.div_expr(&self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<SmoothExpr, ExprError> {
        if self.eat(b'-') {
            return Ok(self.factor()?.neg_expr());
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            return Ok(base.powi(k));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let parenthesized = self.eat(b'(');
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected(&["integer"]));
        }
        let magnitude: i32 = self.src[start..self.pos].parse().map_err(|_| ExprError::Syntax {
            offset: start,
            expected: vec!["integer in range"],
            found: self.src[start..self.pos].to_string(),
        })?;
        if parenthesized {
            self.expect(b')', "')'")?;
        }
        Ok(if negative { -magnitude } else { magnitude })
    }

    fn atom(&mut self) -> Result<SmoothExpr, ExprError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')', "')'")?;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() => self.identifier(),
            _ => Err(self.unexpected(EXPR_START)),
        }
    }

    fn number(&mut self) -> Result<SmoothExpr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - s
        };
        let mut p = self.pos;
        let mut n = digits(&mut p);
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            n += digits(&mut p);
        }
        if n == 0 {
            self.pos = p;
            return Err(self.unexpected(&["digit"]));
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) == 0 {
                self.pos = q;
                return Err(self.unexpected(&["exponent digits"]));
            }
            p = q;
        }
        self.pos = p;
        let value: f64 = self.src[start..p].parse().map_err(|_| ExprError::Syntax {
            offset: start,
            expected: vec!["number"],
            found: self.src[start..p].to_string(),
        })?;
        Ok(SmoothExpr::constant(value))
    }

    fn identifier(&mut self) -> Result<SmoothExpr, ExprError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if name == "x" {
            return Ok(SmoothExpr::var());
        }
        let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
        })?;
        self.expect(b'(', "'('")?;
        let arg = self.expr()?;
        self.expect(b')', "')'")?;
        Ok(arg.apply(func))
    }
}
