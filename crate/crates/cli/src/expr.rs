//! A small arithmetic-expression language for maps `ℝᵈ → ℝ`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' ['-'] integer)*
//! primary := number | 'x' index | func '(' expr ')' | '(' expr ')'
//! func    := 'abs' | 'sin' | 'cos' | 'sqrt'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x1^2` is `-(x1^2)`. Errors carry
//! the byte offset at which they were detected.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 4] = [Func::Abs, Func::Sin, Func::Cos, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// `x1`, `x2`, … stored 1-based.
    Var(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected `{0}`")]
    Unexpected(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown variable `{name}` (dimension is {dim})")]
    UnknownVariable { name: String, dim: usize },
    #[error("`{func}` takes 1 argument, got {found}")]
    Arity { func: &'static str, found: usize },
    #[error("exponent must be an integer, got `{0}`")]
    NonIntegerExponent(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
    #[error("non-finite intermediate value")]
    NonFinite,
    #[error("variable x{index} not supplied (point has {len} coordinates)")]
    MissingVariable { index: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    Comma,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) | Tok::Ident(s) => f.write_str(s),
            Tok::Sym(c) => write!(f, "{c}"),
            Tok::Comma => f.write_str(","),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
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
                out.push((Tok::Num(text[start..i].to_string()), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Sym(c as char), start));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, start));
                i += 1;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    kind: ParseErrorKind::Unexpected(ch.to_string()),
                    offset: start,
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
    dim: Option<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            offset: self.offset(),
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.error(ParseErrorKind::Unexpected(t.to_string())),
            None => self.error(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym('+')) => BinOp::Add,
                Some(Tok::Sym('-')) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym('*')) => BinOp::Mul,
                Some(Tok::Sym('/')) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Sym('-')) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.peek() == Some(&Tok::Sym('^')) {
            self.pos += 1;
            let negative = self.peek() == Some(&Tok::Sym('-'));
            if negative {
                self.pos += 1;
            }
            let Some(Tok::Num(text)) = self.peek().cloned() else {
                return Err(self.unexpected());
            };
            let n: i32 = match text.parse() {
                Ok(n) if text.bytes().all(|b| b.is_ascii_digit()) => n,
                _ => return Err(self.error(ParseErrorKind::NonIntegerExponent(text))),
            };
            self.pos += 1;
            base = Expr::Pow(Box::new(base), if negative { -n } else { n });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(text)) => {
                let value: f64 = text
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| ParseError {
                        kind: ParseErrorKind::InvalidNumber(text.clone()),
                        offset,
                    })?;
                self.pos += 1;
                Ok(Expr::Num(value))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(func) = Func::from_name(&name) {
                    return self.call(func, offset);
                }
                let index = variable_index(&name).ok_or_else(|| ParseError {
                    kind: ParseErrorKind::UnknownIdentifier(name.clone()),
                    offset,
                })?;
                if let Some(dim) = self.dim {
                    if index > dim {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnknownVariable { name, dim },
                            offset,
                        });
                    }
                }
                Ok(Expr::Var(index))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call(&mut self, func: Func, offset: usize) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            args.push(self.expr()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                args.push(self.expr()?);
            }
        }
        self.expect(Tok::RParen)?;
        if args.len() != 1 {
            return Err(ParseError {
                kind: ParseErrorKind::Arity {
                    func: func.name(),
                    found: args.len(),
                },
                offset,
            });
        }
        Ok(Expr::Call(func, Box::new(args.remove(0))))
    }
}

/// `x<k>` with `k ≥ 1` and no leading zero.
fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses `text` with no bound on the variable indices.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    parse(text, None)
}

/// Parses `text`, rejecting variables beyond `x<dim>`.
pub fn parse_with_dimension(text: &str, dim: usize) -> Result<Expr, ParseError> {
    parse(text, Some(dim))
}

fn parse(text: &str, dim: Option<usize>) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
        dim,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}

impl Expr {
    /// The largest variable index used, at least 1.
    pub fn dimension(&self) -> usize {
        match self {
            Expr::Num(_) => 1,
            Expr::Var(i) => *i,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.dimension(),
            Expr::Binary(_, a, b) => a.dimension().max(b.dimension()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => *x.get(i - 1).ok_or(EvalError::MissingVariable {
                index: *i,
                len: x.len(),
            })?,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Call(f, e) => {
                let a = e.eval(x)?;
                match f {
                    Func::Abs => a.abs(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sqrt if a < 0.0 => return Err(EvalError::NegativeSqrt(a)),
                    Func::Sqrt => a.sqrt(),
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(x)?, b.eval(x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(EvalError::DivisionByZero),
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(e, n) => {
                let a = e.eval(x)?;
                if a == 0.0 && *n < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.powi(*n)
            }
        };
        if v.is_finite() {
            Ok(v + 0.0)
        } else {
            Err(EvalError::NonFinite)
        }
    }
}

/// Fully parenthesized; parsing the output gives back an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "(-{})", -v),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(e, n) => write!(f, "({e}^{n})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Box<Expr> {
        Box::new(Expr::Num(v))
    }

    fn var(i: usize) -> Box<Expr> {
        Box::new(Expr::Var(i))
    }

    #[test]
    fn spec_like_expression() {
        let e = parse_expression("x1^2 + 0.1*sin(3*x1)").unwrap();
        assert_eq!(e.dimension(), 1);
        let expected = Expr::Binary(
            BinOp::Add,
            Box::new(Expr::Pow(var(1), 2)),
            Box::new(Expr::Binary(
                BinOp::Mul,
                num(0.1),
                Box::new(Expr::Call(
                    Func::Sin,
                    Box::new(Expr::Binary(BinOp::Mul, num(3.0), var(1))),
                )),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse_expression("x1 + * 2").unwrap_err();
        assert_eq!(err.offset, 5);
        assert_eq!(err.kind, ParseErrorKind::Unexpected("*".into()));
        assert_eq!(
            parse_expression("x1 +").unwrap_err().kind,
            ParseErrorKind::UnexpectedEnd
        );
        assert_eq!(parse_expression("(x1").unwrap_err().offset, 3);
        assert_eq!(parse_expression("x1 $ 2").unwrap_err().offset, 3);
    }

    #[test]
    fn variables_respect_dimension() {
        let err = parse_with_dimension("x1 + x3", 2).unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(matches!(
            err.kind,
            ParseErrorKind::UnknownVariable { dim: 2, .. }
        ));
        assert!(parse_with_dimension("x2", 2).is_ok());
        assert!(matches!(
            parse_expression("y + 1").unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
        assert!(parse_expression("x0").is_err());
        assert!(parse_expression("x01").is_err());
    }

    #[test]
    fn arity_and_exponents() {
        let err = parse_expression("1 + sin(x1, x2)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Arity {
                func: "sin",
                found: 2
            }
        ));
        assert!(matches!(
            parse_expression("cos()").unwrap_err().kind,
            ParseErrorKind::Arity { found: 0, .. }
        ));
        assert!(matches!(
            parse_expression("x1^2.5").unwrap_err().kind,
            ParseErrorKind::NonIntegerExponent(_)
        ));
        assert_eq!(parse_expression("x1^-2").unwrap(), Expr::Pow(var(1), -2));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_expression("-x1^2").unwrap(),
            Expr::Neg(Box::new(Expr::Pow(var(1), 2)))
        );
        assert_eq!(
            parse_expression("8 - 3 - 1").unwrap().eval(&[]).unwrap(),
            4.0
        );
        assert_eq!(
            parse_expression("8 / 4 / 2").unwrap().eval(&[]).unwrap(),
            1.0
        );
        assert_eq!(
            parse_expression("2 + 3 * 4").unwrap().eval(&[]).unwrap(),
            14.0
        );
        assert_eq!(
            parse_expression("x1^2^3").unwrap().eval(&[2.0]).unwrap(),
            64.0
        );
        assert_eq!(parse_expression("-2^2").unwrap().eval(&[]).unwrap(), -4.0);
        assert_eq!(parse_expression("(-2)^2").unwrap().eval(&[]).unwrap(), 4.0);
    }

    #[test]
    fn evaluation_errors() {
        let e = parse_expression("1 / (x1 - 1)").unwrap();
        assert_eq!(e.eval(&[1.0]), Err(EvalError::DivisionByZero));
        assert_eq!(e.eval(&[2.0]), Ok(1.0));
        let e = parse_expression("sqrt(x1)").unwrap();
        assert_eq!(e.eval(&[-1.0]), Err(EvalError::NegativeSqrt(-1.0)));
        assert_eq!(e.eval(&[9.0]), Ok(3.0));
        assert_eq!(
            parse_expression("x1^-1").unwrap().eval(&[0.0]),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(
            parse_expression("1e300 * 1e300").unwrap().eval(&[]),
            Err(EvalError::NonFinite)
        );
        assert!(matches!(
            parse_expression("x2").unwrap().eval(&[1.0]),
            Err(EvalError::MissingVariable { index: 2, len: 1 })
        ));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_expression("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse_expression(".5").unwrap(), Expr::Num(0.5));
        assert!(matches!(
            parse_expression("1.2.3").unwrap_err().kind,
            ParseErrorKind::InvalidNumber(_)
        ));
        assert!(matches!(
            parse_expression("1e999").unwrap_err().kind,
            ParseErrorKind::InvalidNumber(_)
        ));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "x1^2 + 0.1*sin(3*x1)",
            "-x2^-3 / abs(x1 - 2.5e-7)",
            "cos(-(x1)) * sqrt(4)",
        ] {
            let e = parse_expression(text).unwrap();
            assert_eq!(parse_expression(&e.to_string()).unwrap(), e, "{e}");
        }
        assert_eq!(
            parse_expression("x1^2+1").unwrap().to_string(),
            "((x1^2) + 1)"
        );
    }
}
