//! Arithmetic expressions over `x` and `y`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := exp | sin | cos | sqrt | abs
//! ```
//!
//! Positions in errors are zero-based character offsets into the input.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Why an evaluation produced no value.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalFailure {
    SqrtOfNegative,
    YInOneDimension,
    NonFinite,
}

impl EvalFailure {
    pub fn message(&self) -> &'static str {
        match self {
            EvalFailure::SqrtOfNegative => "sqrt of a negative number",
            EvalFailure::YInOneDimension => "variable y used on a 1D grid",
            EvalFailure::NonFinite => "non-finite value",
        }
    }
}

impl Expr {
    pub fn eval(&self, x: f64, y: Option<f64>) -> core::result::Result<f64, EvalFailure> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y.ok_or(EvalFailure::YInOneDimension)?,
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval(x, y)?;
                let b = b.eval(x, y)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => powf(a, b),
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(x, y)?;
                match f {
                    Func::Exp => math::exp(a),
                    Func::Sin => math::sin(a),
                    Func::Cos => math::cos(a),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalFailure::SqrtOfNegative);
                        }
                        math::sqrt(a)
                    }
                    Func::Abs => a.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalFailure::NonFinite)
        }
    }

    /// True when the expression references `y`.
    pub fn uses_y(&self) -> bool {
        match self {
            Expr::Var(v) => *v == Var::Y,
            Expr::Num(_) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses_y(),
            Expr::Bin(_, a, b) => a.uses_y() || b.uses_y(),
        }
    }
}

// Small integer exponents are multiplied out so that polynomials evaluate
// exactly like their hand-written expansions.
fn powf(a: f64, b: f64) -> f64 {
    if b == libm::trunc(b) && b.abs() <= 64.0 {
        let mut k = b.abs() as u32;
        let mut base = a;
        let mut acc = 1.0;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        if b < 0.0 {
            1.0 / acc
        } else {
            acc
        }
    } else {
        math::pow(a, b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                position: start,
                expected: vec!["number".to_string()],
            })?;
            out.push(Token {
                tok: Tok::Num(v),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos: start,
            });
        } else if "+-*/^(),=".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                pos: start,
            });
            i += 1;
        } else {
            return Err(Error::Parse {
                position: start,
                expected: vec!["operand".to_string(), "operator".to_string()],
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len(),
    });
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    at: usize,
}

fn expected(pos: usize, what: &[&str]) -> Error {
    Error::Parse {
        position: pos,
        expected: what.iter().map(|s| (*s).to_owned()).collect(),
    }
}

impl Parser {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Self { toks, at: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let mut buf = [0u8; 4];
            Err(expected(self.peek().pos, &[c.encode_utf8(&mut buf)]))
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        match self.peek().tok {
            Tok::End => Ok(()),
            Tok::Sym(')') => Err(expected(self.peek().pos, &["end of input"])),
            _ => Err(expected(self.peek().pos, &["operator", "end of input"])),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let tok = self.bump();
        match tok.tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "y" => Ok(Expr::Var(Var::Y)),
                "pi" => Ok(Expr::Num(core::f64::consts::PI)),
                _ => match Func::from_name(&name) {
                    Some(f) => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    None => Err(Error::UnknownIdentifier {
                        name,
                        position: tok.pos,
                    }),
                },
            },
            _ => Err(expected(tok.pos, &["number", "variable", "function", "("])),
        }
    }
}

/// Parses a complete expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(tokenize(text)?);
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses and evaluates an expression without variables (used for domain bounds).
pub fn eval_constant(text: &str) -> Result<f64> {
    let e = parse_expr(text)?;
    e.eval(f64::NAN, None).map_err(|f| Error::Eval {
        node: 0,
        message: f.message().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Box<Expr> {
        Box::new(Expr::Var(Var::X))
    }

    #[test]
    fn power_ast() {
        assert_eq!(
            parse_expr("x^2").unwrap(),
            Expr::Bin(BinOp::Pow, x(), Box::new(Expr::Num(2.0)))
        );
    }

    #[test]
    fn double_well_expression() {
        let e = parse_expr("5*(x^2-1)^2").unwrap();
        assert_eq!(e.eval(0.0, None).unwrap(), 5.0);
        assert_eq!(e.eval(1.0, None).unwrap(), 0.0);
    }

    #[test]
    fn unbalanced_paren() {
        match parse_expr("(x") {
            Err(Error::Parse { position, expected }) => {
                assert_eq!(position, 2);
                assert_eq!(expected, vec![")".to_string()]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let ev = |s: &str| parse_expr(s).unwrap().eval(2.0, Some(3.0)).unwrap();
        assert_eq!(ev("1+2*3"), 7.0);
        assert_eq!(ev("2^3^2"), 512.0);
        assert_eq!(ev("-x^2"), -4.0);
        assert_eq!(ev("2^-1"), 0.5);
        assert_eq!(ev("(1+2)*3"), 9.0);
        assert_eq!(ev("8/2/2"), 2.0);
        assert_eq!(ev("1-2-3"), -4.0);
        assert_eq!(ev("x*y"), 6.0);
        assert_eq!(ev("1.5e1 + 2E-1"), 15.2);
        assert_eq!(ev("abs(-x) + sqrt(4)"), 4.0);
        assert!((ev("cos(pi)") + 1.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_identifier_position() {
        assert_eq!(
            parse_expr("1 + foo(x)"),
            Err(Error::UnknownIdentifier {
                name: "foo".to_string(),
                position: 4
            })
        );
    }

    #[test]
    fn trailing_garbage() {
        assert!(matches!(
            parse_expr("x)"),
            Err(Error::Parse { position: 1, .. })
        ));
        assert!(matches!(parse_expr("x x"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_expr(""), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse_expr("2 $ 3"), Err(Error::Parse { position: 2, .. })));
    }

    #[test]
    fn eval_failures() {
        let e = parse_expr("sqrt(x)").unwrap();
        assert_eq!(e.eval(-1.0, None), Err(EvalFailure::SqrtOfNegative));
        let e = parse_expr("y").unwrap();
        assert_eq!(e.eval(0.0, None), Err(EvalFailure::YInOneDimension));
        assert_eq!(
            parse_expr("1/x").unwrap().eval(0.0, None),
            Err(EvalFailure::NonFinite)
        );
    }

    #[test]
    fn constants() {
        assert!((eval_constant("pi/2").unwrap() - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    proptest::proptest! {
        // parse → eval agrees with a hand-coded evaluation of the same polynomial
        #[test]
        fn polynomial_matches_reference(xv in -10.0f64..10.0, yv in -10.0f64..10.0,
                                        a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let text = alloc::format!("{a}*x^3 - {b}*x*y + 2*(y^2 - 1)^2 - x/4");
            let got = parse_expr(&text).unwrap().eval(xv, Some(yv)).unwrap();
            let want = a * xv * xv * xv - b * xv * yv + 2.0 * (yv * yv - 1.0) * (yv * yv - 1.0) - xv / 4.0;
            proptest::prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }
}
