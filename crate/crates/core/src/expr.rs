//! Expressions in one real variable `x`, as typed on the command line.
//!
//! Grammar:
//!
//! ```text
//! expr    = term   { ("+" | "-") term } ;
//! term    = unary  { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | "x" | "pi" | "e" | func "(" expr ")" | "(" expr ")" ;
//! func    = "exp" | "ln" | "sqrt" | "sin" | "cos" | "abs" ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-1` is `0.5`. There is no implicit multiplication.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Abs,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "abs" => UnaryOp::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Parsed expression tree.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ExprAst {
    Const(f64),
    /// Named constant (`pi` or `e`), kept by name so unparsing is exact.
    Named(NamedConst),
    Var,
    Unary(UnaryOp, Box<ExprAst>),
    Binary(BinaryOp, Box<ExprAst>, Box<ExprAst>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => core::f64::consts::PI,
            NamedConst::E => core::f64::consts::E,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: expected {}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(offset: usize, expected: &[&str]) -> Self {
        ParseError {
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{op} undefined at {input} (x = {x})")]
    Domain { op: String, input: f64, x: f64 },
    #[error("{op} overflowed (x = {x})")]
    Overflow { op: String, x: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(usize, usize),
    Op(u8),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the next token and its starting offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => self.number(start)?,
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(start, self.pos)
            }
            _ => return Err(ParseError::new(start, &["number", "x", "function", "(", "operator"])),
        };
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let s = self.src;
        let digits = |p: &mut usize| {
            let from = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - from
        };
        let mut p = start;
        let mut n = digits(&mut p);
        if p < s.len() && s[p] == b'.' {
            p += 1;
            n += digits(&mut p);
        }
        if n == 0 {
            return Err(ParseError::new(start, &["digit"]));
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            // exponent only if digits follow; otherwise `e` is left for the
            // next token (and rejected there as implicit multiplication)
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) > 0 {
                p = q;
            }
        }
        self.pos = p;
        let text = core::str::from_utf8(&s[start..p]).map_err(|_| ParseError::new(start, &["number"]))?;
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| ParseError::new(start, &["number"]))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn ident(&self, a: usize, b: usize) -> &'a str {
        core::str::from_utf8(&self.lex.src[a..b]).unwrap_or("")
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ (b'+' | b'-')) = self.tok {
            self.bump()?;
            let rhs = self.term()?;
            let op = if c == b'+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ (b'*' | b'/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            let op = if c == b'*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if self.tok == Tok::Op(b'-') {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(ExprAst::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Op(b'^') {
            self.bump()?;
            let exp = self.unary()?;
            return Ok(ExprAst::Binary(BinaryOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExprAst, ParseError> {
        const START: &[&str] = &["number", "x", "pi", "e", "function", "(", "-"];
        let node = match self.tok {
            Tok::Num(v) => {
                self.bump()?;
                ExprAst::Const(v)
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect_rparen()?;
                inner
            }
            Tok::Ident(a, b) => {
                let name = self.ident(a, b);
                let at = self.at;
                match name {
                    "x" => {
                        self.bump()?;
                        ExprAst::Var
                    }
                    "pi" => {
                        self.bump()?;
                        ExprAst::Named(NamedConst::Pi)
                    }
                    "e" => {
                        self.bump()?;
                        ExprAst::Named(NamedConst::E)
                    }
                    _ => {
                        let op = UnaryOp::from_name(name).ok_or_else(|| ParseError::new(at, START))?;
                        self.bump()?;
                        if self.tok != Tok::LParen {
                            return Err(ParseError::new(self.at, &["("]));
                        }
                        self.bump()?;
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        ExprAst::Unary(op, Box::new(arg))
                    }
                }
            }
            _ => return Err(ParseError::new(self.at, START)),
        };
        Ok(node)
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(ParseError::new(self.at, &[")", "operator"]));
        }
        self.bump()
    }
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<ExprAst, ParseError> {
    if !text.is_ascii() {
        let offset = text.char_indices().find(|(_, c)| !c.is_ascii()).map_or(0, |(i, _)| i);
        return Err(ParseError::new(offset, &["ASCII input"]));
    }
    let mut p = Parser {
        lex: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::End,
        at: 0,
    };
    p.bump()?;
    if p.tok == Tok::End {
        return Err(ParseError::new(p.at, &["expression"]));
    }
    let ast = p.expr()?;
    if p.tok != Tok::End {
        return Err(ParseError::new(p.at, &["operator", "end of input"]));
    }
    Ok(ast)
}

impl core::str::FromStr for ExprAst {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

fn check(op: &str, v: f64, x: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Overflow { op: op.into(), x })
    }
}

impl ExprAst {
    /// Evaluates at `x`. Domain violations and overflow are errors, never NaN.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        match self {
            ExprAst::Const(v) => Ok(*v),
            ExprAst::Named(c) => Ok(c.value()),
            ExprAst::Var => Ok(x),
            ExprAst::Unary(op, a) => {
                let v = a.eval(x)?;
                let domain = |input| EvalError::Domain {
                    op: op.name().into(),
                    input,
                    x,
                };
                let r = match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Exp => v.exp(),
                    UnaryOp::Ln => {
                        if v <= 0.0 {
                            return Err(domain(v));
                        }
                        v.ln()
                    }
                    UnaryOp::Sqrt => {
                        if v < 0.0 {
                            return Err(domain(v));
                        }
                        v.sqrt()
                    }
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                    UnaryOp::Abs => v.abs(),
                };
                check(op.name(), r, x)
            }
            ExprAst::Binary(op, a, b) => {
                let (u, v) = (a.eval(x)?, b.eval(x)?);
                let r = match op {
                    BinaryOp::Add => u + v,
                    BinaryOp::Sub => u - v,
                    BinaryOp::Mul => u * v,
                    BinaryOp::Div => {
                        if v == 0.0 {
                            return Err(EvalError::Domain { op: "/".into(), input: v, x });
                        }
                        u / v
                    }
                    BinaryOp::Pow => {
                        if u < 0.0 && v.fract() != 0.0 {
                            return Err(EvalError::Domain { op: "^".into(), input: u, x });
                        }
                        if u == 0.0 && v < 0.0 {
                            return Err(EvalError::Domain { op: "^".into(), input: u, x });
                        }
                        u.powf(v)
                    }
                };
                check(&format!("{}", op.symbol()), r, x)
            }
        }
    }

    /// Canonical text with minimal parentheses; reparses to the same tree.
    pub fn unparse(&self) -> String {
        self.to_string()
    }

    fn prec(&self) -> u8 {
        match self {
            ExprAst::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            ExprAst::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            ExprAst::Unary(UnaryOp::Neg, _) => 3,
            ExprAst::Binary(BinaryOp::Pow, ..) => 4,
            ExprAst::Const(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => 3,
            _ => 5,
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    // `{:?}` is the shortest round-tripping form; it may use exponent
    // notation, which the lexer accepts.
    if v.is_finite() {
        write!(f, "{v:?}")
    } else {
        // only reachable for hand-built trees; render an expression that
        // evaluates to the same value
        if v.is_nan() {
            f.write_str("(0/0)")
        } else if v > 0.0 {
            f.write_str("(1/0)")
        } else {
            f.write_str("(-1/0)")
        }
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &ExprAst, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Const(v) => write_num(f, *v),
            ExprAst::Named(NamedConst::Pi) => f.write_str("pi"),
            ExprAst::Named(NamedConst::E) => f.write_str("e"),
            ExprAst::Var => f.write_str("x"),
            ExprAst::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                wrap(f, a, a.prec() < 3)
            }
            ExprAst::Unary(op, a) => write!(f, "{}({a})", op.name()),
            ExprAst::Binary(op, a, b) => {
                let p = self.prec();
                let (lp, rp) = match op {
                    // right-associative; the exponent may be a bare unary
                    BinaryOp::Pow => (a.prec() <= p, b.prec() < 3),
                    BinaryOp::Add | BinaryOp::Mul => (a.prec() < p, b.prec() <= p),
                    BinaryOp::Sub | BinaryOp::Div => (a.prec() < p, b.prec() <= p),
                };
                wrap(f, a, lp)?;
                write!(f, "{}", op.symbol())?;
                wrap(f, b, rp)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn ev(s: &str, x: f64) -> f64 {
        parse(s).unwrap().eval(x).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(
            parse("1-x").unwrap(),
            ExprAst::Binary(BinaryOp::Sub, Box::new(ExprAst::Const(1.0)), Box::new(ExprAst::Var))
        );
        assert_eq!(ev("1-x", 0.25), 0.75);
        assert!((ev("exp(-x/2)*x^1.5", 1.0) - (-0.5f64).exp()).abs() < 1e-16);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("x*(1-x)", 0.5), 0.25);
        assert!(matches!(parse("ln(x)").unwrap().eval(-1.0), Err(EvalError::Domain { .. })));
        assert!((ev("sqrt((1-x^2))", 0.6) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn precedence_rules() {
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("(-2)^2", 0.0), 4.0);
        assert_eq!(ev("8/4/2", 0.0), 1.0);
        assert_eq!(ev("8-4-2", 0.0), 2.0);
        assert_eq!(ev("2*-x", 3.0), -6.0);
        assert_eq!(ev("  1 +\t2 * 3 ", 0.0), 7.0);
        assert_eq!(ev("1e-3", 0.0), 0.001);
        assert_eq!(ev("--x", 2.0), 2.0);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = parse("2x").unwrap_err();
        assert_eq!(e.offset, 1);
        let e = parse("1 + ").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.expected.iter().any(|t| t == "number"));
        assert_eq!(parse("(x").unwrap_err().offset, 2);
        assert_eq!(parse("foo(x)").unwrap_err().offset, 0);
        assert_eq!(parse("sin x").unwrap_err().offset, 4);
        assert!(parse("").is_err());
        assert!(parse("x )").is_err());
        assert!(parse("x # 1").is_err());
        assert!(parse("2e").is_err());
        assert!(parse("é").is_err());
    }

    #[test]
    fn eval_domain_errors() {
        assert!(parse("sqrt(x)").unwrap().eval(-1e-300).is_err());
        assert!(parse("x^0.5").unwrap().eval(-1.0).is_err());
        assert_eq!(ev("x^3", -2.0), -8.0);
        assert!(parse("1/x").unwrap().eval(0.0).is_err());
        assert!(matches!(parse("exp(x)").unwrap().eval(1000.0), Err(EvalError::Overflow { .. })));
    }

    #[test]
    fn hand_checked_table() {
        let pi = core::f64::consts::PI;
        let e = core::f64::consts::E;
        let table: [(&str, f64, f64); 20] = [
            ("x", 2.5, 2.5),
            ("x+1", 2.0, 3.0),
            ("2*x-3", 4.0, 5.0),
            ("x/4", 1.0, 0.25),
            ("x^2", 1.5, 2.25),
            ("x^0.5", 2.25, 1.5),
            ("-x^2+1", 0.5, 0.75),
            ("exp(0)", 9.0, 1.0),
            ("ln(e)", 0.0, 1.0),
            ("ln(x)", e * e, 2.0),
            ("sqrt(x)", 0.0625, 0.25),
            ("sin(pi/2)", 0.0, 1.0),
            ("cos(0)", 3.0, 1.0),
            ("cos(x)", pi, -1.0),
            ("abs(x-3)", 1.0, 2.0),
            ("(x+1)*(x-1)", 3.0, 8.0),
            ("1/(1+x)", 3.0, 0.25),
            ("2^x", 10.0, 1024.0),
            ("x*(1-x)", 0.25, 0.1875),
            ("3-2-1", 0.0, 0.0),
        ];
        for (s, x, want) in table {
            let got = ev(s, x);
            assert!((got - want).abs() <= 1e-15 * want.abs().max(1.0), "{s} at {x}: {got}");
        }
    }

    #[test]
    fn unparse_corpus_is_idempotent() {
        let corpus = [
            "1-x", "x", "-x", "--x", "-(x+1)", "2^3^2", "(2^3)^2", "-2^2", "(-2)^2", "2^-1",
            "2^-x^2", "x^(1/2)", "exp(-x/2)*x^1.5", "sqrt((1-x^2))", "1/(1+x)", "1/(1/x)",
            "a", "x-(1-x)", "x-1-x", "x/(2*x)", "x/2*x", "(x+1)*(x-1)", "x*(1-x)", "pi*x",
            "e^x", "sin(pi*x)+cos(pi*x)", "abs(x-0.5)", "ln(1+x)", "1e-300*x", "1.5e10+x",
            "x^2^0.5", "-(x^2)", "(-x)^2", "2*-x", "2/-x", "-x*3", "-(x*3)", "x--1",
            "x+-1", "((x))", "0.1+0.2", "exp(exp(x))", "x^-1^2", "(x^-1)^2", "-x-x",
            "-(x-x)", "3-(2-1)", "(3-2)-1", "cos(x)^2+sin(x)^2", "x*x*x*x",
        ];
        let mut n = 0;
        for s in corpus {
            let Ok(t) = parse(s) else {
                assert_eq!(s, "a");
                continue;
            };
            let u = t.unparse();
            let t2 = parse(&u).unwrap_or_else(|e| panic!("{s} -> {u}: {e}"));
            assert_eq!(t, t2, "{s} -> {u}");
            assert_eq!(t2.unparse(), u);
            n += 1;
        }
        assert_eq!(n, 49);
    }

    fn arb_ast() -> impl Strategy<Value = ExprAst> {
        let leaf = prop_oneof![
            (0.0..100.0f64).prop_map(ExprAst::Const),
            Just(ExprAst::Var),
            Just(ExprAst::Named(NamedConst::Pi)),
            Just(ExprAst::Named(NamedConst::E)),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            let un = prop_oneof![
                Just(UnaryOp::Neg),
                Just(UnaryOp::Exp),
                Just(UnaryOp::Ln),
                Just(UnaryOp::Sqrt),
                Just(UnaryOp::Sin),
                Just(UnaryOp::Cos),
                Just(UnaryOp::Abs),
            ];
            let bin = prop_oneof![
                Just(BinaryOp::Add),
                Just(BinaryOp::Sub),
                Just(BinaryOp::Mul),
                Just(BinaryOp::Div),
                Just(BinaryOp::Pow),
            ];
            prop_oneof![
                (un, inner.clone()).prop_map(|(o, a)| ExprAst::Unary(o, Box::new(a))),
                (bin, inner.clone(), inner).prop_map(|(o, a, b)| ExprAst::Binary(o, Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn unparse_round_trips(t in arb_ast()) {
            let u = t.unparse();
            let back = parse(&u).unwrap();
            prop_assert_eq!(back, t);
        }
    }

    #[test]
    fn expected_sets_are_nonempty() {
        for bad in ["", "+", "x+", "(", "x*", "ln", "ln(", "x^", "1.", ".", "x)"] {
            match parse(bad) {
                Err(e) => assert!(!e.expected.is_empty(), "{bad}"),
                Ok(t) => assert_eq!(vec![bad], vec!["1."], "{t:?}"),
            }
        }
    }
}
