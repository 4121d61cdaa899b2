use super::{ChartRef, ScalarExpr, VarKind};
use crate::error::{Error, Result};
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
    _src: &'a str,
}

fn lex(src: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>> {
    let mut lx = Lexer { chars: src.chars().collect(), pos: 0, line, col0, _src: src };
    let mut out = Vec::new();
    while lx.pos < lx.chars.len() {
        let c = lx.chars[lx.pos];
        let col = lx.col0 + lx.pos;
        if c.is_whitespace() {
            lx.pos += 1;
        } else if c.is_ascii_digit() {
            let start = lx.pos;
            while lx.pos < lx.chars.len() && lx.chars[lx.pos].is_ascii_digit() {
                lx.pos += 1;
            }
            let s: String = lx.chars[start..lx.pos].iter().collect();
            out.push((Tok::Num(s.parse().unwrap()), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = lx.pos;
            while lx.pos < lx.chars.len() && (lx.chars[lx.pos].is_alphanumeric() || lx.chars[lx.pos] == '_') {
                lx.pos += 1;
            }
            out.push((Tok::Ident(lx.chars[start..lx.pos].iter().collect()), col));
        } else if "+-*/^".contains(c) {
            out.push((Tok::Op(c), col));
            lx.pos += 1;
        } else if c == '(' {
            out.push((Tok::LParen, col));
            lx.pos += 1;
        } else if c == ')' {
            out.push((Tok::RParen, col));
            lx.pos += 1;
        } else {
            return Err(Error::Parse { line: lx.line, col, msg: format!("unexpected character `{}`", c) });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    chart: &'a ChartRef,
    line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let col = self.toks.get(self.i).map(|t| t.1).unwrap_or(self.end_col);
        Err(Error::Parse { line: self.line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.0.clone());
        self.i += 1;
        t
    }

    fn expr(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.i += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.i += 1;
            let rhs = self.unary()?;
            acc = if c == '*' {
                &acc * &rhs
            } else {
                if rhs.is_zero() {
                    return self.err("division by zero");
                }
                acc.checked_div(&rhs)?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ScalarExpr> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn exponent(&mut self) -> Result<i32> {
        let mut sign = 1;
        if let Some(Tok::Op('-')) = self.peek() {
            self.i += 1;
            sign = -1;
        }
        match self.next() {
            Some(Tok::Num(n)) => {
                let v: i32 = n.try_into().map_err(|_| ()).or_else(|_| {
                    self.i -= 1;
                    self.err::<i32>("exponent too large")
                })?;
                Ok(sign * v)
            }
            Some(Tok::LParen) => {
                let e = self.exponent()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(sign * e),
                    _ => {
                        self.i -= 1;
                        self.err("expected `)`")
                    }
                }
            }
            _ => {
                self.i -= 1;
                self.err("exponent must be an integer literal")
            }
        }
    }

    fn power(&mut self) -> Result<ScalarExpr> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.i += 1;
            let e = self.exponent()?;
            if e < 0 && base.is_zero() {
                return self.err("division by zero");
            }
            return base.powi(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ScalarExpr> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(ScalarExpr::constant(self.chart, super::Q::from_integer(n))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.i -= 1;
                        self.err("expected `)`")
                    }
                }
            }
            Some(Tok::Ident(name)) if name == "cos" || name == "sin" => {
                if self.next() != Some(Tok::LParen) {
                    self.i -= 1;
                    return self.err(format!("expected `(` after {}", name));
                }
                let arg = match self.next() {
                    Some(Tok::Ident(a)) => a,
                    _ => {
                        self.i -= 1;
                        return self.err(format!("{} takes a periodic variable", name));
                    }
                };
                let idx = match self.chart.index_of(&arg) {
                    Some(i) if self.chart.var(i).kind == VarKind::Periodic => i,
                    Some(_) => {
                        self.i -= 1;
                        return self.err(format!("`{}` is not periodic", arg));
                    }
                    None => {
                        self.i -= 1;
                        return self.err(format!("unknown variable `{}`", arg));
                    }
                };
                if self.next() != Some(Tok::RParen) {
                    self.i -= 1;
                    return self.err("expected `)`");
                }
                if name == "cos" {
                    ScalarExpr::cos(self.chart, idx)
                } else {
                    ScalarExpr::sin(self.chart, idx)
                }
            }
            Some(Tok::Ident(name)) => match self.chart.index_of(&name) {
                Some(i) if self.chart.var(i).kind == VarKind::Periodic => {
                    self.i -= 1;
                    self.err(format!("periodic variable `{}` may only appear inside cos/sin", name))
                }
                Some(i) => ScalarExpr::var(self.chart, i),
                None => {
                    self.i -= 1;
                    self.err(format!("unknown variable `{}`", name))
                }
            },
            Some(_) => {
                self.i -= 1;
                self.err("unexpected token")
            }
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parse an expression over `chart`. `line`/`col` locate the text inside a
/// larger document for error messages.
pub fn parse_expr_at(src: &str, chart: &ChartRef, line: usize, col: usize) -> Result<ScalarExpr> {
    let toks = lex(src, line, col)?;
    let end_col = col + src.chars().count();
    let mut p = Parser { toks, i: 0, chart, line, end_col };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.i < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_expr(src: &str, chart: &ChartRef) -> Result<ScalarExpr> {
    parse_expr_at(src, chart, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Chart, VarSpec};

    fn chart() -> ChartRef {
        Chart::new(vec![VarSpec::base("x1"), VarSpec::base("x2"), VarSpec::periodic_base("phi")]).unwrap()
    }

    #[test]
    fn precedence_and_powers() {
        let ch = chart();
        let a = parse_expr("1 + 2*x1^2 - x2/3", &ch).unwrap();
        let b = parse_expr("(6*x1*x1 + 3 - x2)/3", &ch).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_expr("x1^-1*x1", &ch).unwrap(), ScalarExpr::one(&ch));
    }

    #[test]
    fn trig_atoms() {
        let ch = chart();
        let e = parse_expr("sin(phi)^2 + cos(phi)^2", &ch).unwrap();
        assert_eq!(e, ScalarExpr::one(&ch));
        assert!(parse_expr("cos(x1)", &ch).is_err());
        assert!(parse_expr("phi", &ch).is_err());
    }

    #[test]
    fn errors_carry_position() {
        let ch = chart();
        match parse_expr("x1 + y", &ch) {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 6),
            other => panic!("unexpected {:?}", other),
        }
        assert!(matches!(parse_expr("x1/0", &ch), Err(Error::Parse { .. })));
    }

    #[test]
    fn display_roundtrip() {
        let ch = chart();
        for s in ["x1^2*cos(phi) - 3/2*x2", "(x1 + 1)/(x2^2 - 2)", "-sin(phi)/5"] {
            let e = parse_expr(s, &ch).unwrap();
            let again = parse_expr(&e.to_string(), &ch).unwrap();
            assert_eq!(e, again);
        }
    }
}
