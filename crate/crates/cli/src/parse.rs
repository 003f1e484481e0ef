//! Symbol expressions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | number 'i' | 'i' | 'sigma' | 'xi' | builtin '(' expr ')' | '(' expr ')'
//! ```
//! Builtins are `abs2pow`, `chiplus` and `chiminus`; their arguments must be constant.

use mutrans_core::symcore::{check_homogeneity, BoundarySymbol, Expr};
use mutrans_core::C64;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    /// Byte offset into the expression.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.position + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn err(position: usize, message: impl Into<String>) -> ParseError {
    ParseError { position, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| err(start, format!("malformed number `{text}`")))?;
            // an `i` suffix not followed by another identifier character makes it imaginary
            if i < b.len() && b[i] == b'i' && !(i + 1 < b.len() && (b[i + 1] as char).is_ascii_alphanumeric()) {
                i += 1;
                out.push((Tok::Imag(v), start));
            } else {
                out.push((Tok::Num(v), start));
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let t = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(err(start, format!("unexpected character `{c}`"))),
        };
        out.push((t, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            lhs = if c == '+' { Expr::Add(Box::new(lhs), Box::new(rhs)) } else { Expr::Sub(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            lhs = if c == '*' { Expr::Mul(Box::new(lhs), Box::new(rhs)) } else { Expr::Div(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let e = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(err(self.at(), format!("expected `)` to close `(` at column {}", open + 1)))
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.at();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(C64::new(v, 0.0))),
            Tok::Imag(v) => Ok(Expr::Const(C64::new(0.0, v))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen(start)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "sigma" => Ok(Expr::Sigma),
                "xi" => Ok(Expr::Xi),
                "i" => Ok(Expr::Const(C64::new(0.0, 1.0))),
                "abs2pow" | "chiplus" | "chiminus" => {
                    let open = self.at();
                    if self.bump() != Tok::LParen {
                        return Err(err(open, format!("expected `(` after `{name}`")));
                    }
                    let arg_at = self.at();
                    let arg = self.expr()?;
                    self.expect_rparen(open)?;
                    let v = constant(&arg).ok_or_else(|| err(arg_at, format!("argument of `{name}` must be constant")))?;
                    Ok(match name.as_str() {
                        "abs2pow" => Expr::Abs2Pow(v),
                        "chiplus" => Expr::ChiPlus(v),
                        _ => Expr::ChiMinus(v),
                    })
                }
                _ => Err(err(start, format!("unknown identifier `{name}`"))),
            },
            Tok::End => Err(err(start, "unexpected end of expression")),
            t => Err(err(start, format!("unexpected token {t:?}"))),
        }
    }
}

fn constant(e: &Expr) -> Option<C64> {
    fn has_var(e: &Expr) -> bool {
        match e {
            Expr::Sigma | Expr::Xi => true,
            Expr::Const(_) => false,
            Expr::Neg(a) => has_var(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                has_var(a) || has_var(b)
            }
            Expr::Abs2Pow(_) | Expr::ChiPlus(_) | Expr::ChiMinus(_) => true,
        }
    }
    if has_var(e) {
        None
    } else {
        Some(e.eval(1.0, 0.0))
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(err(p.at(), "unexpected trailing input"));
    }
    Ok(e)
}

#[derive(Debug)]
pub enum SymbolError {
    Parse(ParseError),
    Core(mutrans_core::Error),
    NotHomogeneous { defect: f64 },
}

impl fmt::Display for SymbolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolError::Parse(e) => e.fmt(f),
            SymbolError::Core(e) => e.fmt(f),
            SymbolError::NotHomogeneous { defect } => write!(f, "expression is not homogeneous (defect {defect:.3e})"),
        }
    }
}

pub const HOMOGENEITY_TOL: f64 = 1e-10;

/// Parses `src` into a symbol. The order is inferred unless given; with `require_homogeneous`
/// the dilation defect must be below 1e−10.
pub fn parse_symbol(src: &str, order: Option<C64>, require_homogeneous: bool) -> Result<BoundarySymbol, SymbolError> {
    let e = parse_expr(src).map_err(SymbolError::Parse)?;
    let p = BoundarySymbol::from_expr(e, order).map_err(SymbolError::Core)?;
    if require_homogeneous {
        let d = check_homogeneity(&p, 16).map_err(SymbolError::Core)?;
        if d > HOMOGENEITY_TOL {
            return Err(SymbolError::NotHomogeneous { defect: d });
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mutrans_core::symcore::check_mu_transmission;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn builtins_and_order() {
        let p = parse_symbol("abs2pow(0.5)", None, true).unwrap();
        assert_eq!(p.order_m, c(1.0));
        assert!((p.eval(2.0, 1.5) - c(2.5)).norm() < 1e-14);
        let q = parse_symbol("chiplus(0.3)*chiminus(0.3)", None, true).unwrap();
        assert!((q.order_m - c(0.6)).norm() < 1e-15);
        for &(s, x) in &[(1.0, 0.0), (0.3, -2.0), (2.0, 7.0)] {
            let want = c(s * s + x * x).powf(0.3);
            assert!((q.eval(s, x) - want).norm() < 1e-13 * want.norm());
        }
    }

    #[test]
    fn linear_symbol_transmission() {
        let p = parse_symbol("sigma + xi", None, true).unwrap();
        assert_eq!(p.order_m, c(1.0));
        assert_eq!(p.eval(0.0, -1.0), c(-1.0));
        // with σ held at 1 the relation p(−1) = e^{iπ}p(1) fails: 0 against −2
        assert!((p.eval(1.0, -1.0) + p.eval(1.0, 1.0)).norm() > 1.0);
        // at the boundary point σ = 0 only ξ remains, an odd polynomial of type 0
        let r = check_mu_transmission(&p, c(0.0), 1, Default::default()).unwrap();
        assert!(r.passed);
        let r = check_mu_transmission(&p, c(0.5), 1, Default::default()).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn complex_literals_and_precedence() {
        let e = parse_expr("1+2i").unwrap();
        assert_eq!(e.eval(0.0, 0.0), C64::new(1.0, 2.0));
        let e = parse_expr("-2^2").unwrap();
        assert_eq!(e.eval(0.0, 0.0), c(-4.0));
        let e = parse_expr("2^-1*xi").unwrap();
        assert_eq!(e.eval(0.0, 3.0), c(1.5));
        let e = parse_expr("(sigma + i*xi)^2").unwrap();
        assert_eq!(e.eval(1.0, 1.0), C64::new(0.0, 2.0));
        let e = parse_expr("1e-3*sigma").unwrap();
        assert_eq!(e.eval(2.0, 0.0), c(2e-3));
        let p = parse_symbol("chiplus(0.5+0.25i)", None, false).unwrap();
        assert_eq!(p.order_m, C64::new(0.5, 0.25));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_expr("sigma + * xi").unwrap_err();
        assert_eq!(e.position, 8);
        let e = parse_expr("abs2pow(xi)").unwrap_err();
        assert_eq!(e.position, 8);
        assert!(e.message.contains("constant"));
        let e = parse_expr("(sigma").unwrap_err();
        assert_eq!(e.position, 6);
        let e = parse_expr("foo(1)").unwrap_err();
        assert_eq!(e.position, 0);
        let e = parse_expr("sigma $ xi").unwrap_err();
        assert_eq!(e.position, 6);
        assert!(e.to_string().contains("column 7"));
    }

    #[test]
    fn homogeneity_is_enforced_on_request() {
        assert!(matches!(parse_symbol("sigma + xi^2", Some(c(1.0)), true), Err(SymbolError::NotHomogeneous { .. })));
        assert!(parse_symbol("sigma + xi^2", Some(c(1.0)), false).is_ok());
        assert!(matches!(parse_symbol("sigma + xi^2", None, false), Err(SymbolError::Core(_))));
    }
}
