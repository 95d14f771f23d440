//! Expression syntax for weights, Chern polynomials and residue data.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := atom ('^' uint)?
//! atom     := rational | 'i' | ident | '(' expr ')' | '-' atom
//! rational := int ('/' uint)?
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`. An identifier
//! may start with `λ`, which is read as `l` (`λ0` and `l0` are the same weight).

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{RatFn, Rational, SparsePoly, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Nonnegative rational literal.
    Num(Rational),
    /// The imaginary unit.
    I,
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Which identifiers an expression may mention.
#[derive(Clone, Debug)]
pub struct SymbolContext {
    allowed: Option<BTreeSet<String>>,
    imaginary: bool,
}

impl SymbolContext {
    /// Any identifier is accepted; `i` is the imaginary unit and is rejected.
    pub fn any() -> Self {
        SymbolContext {
            allowed: None,
            imaginary: false,
        }
    }

    pub fn only<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SymbolContext {
            allowed: Some(names.into_iter().map(Into::into).collect()),
            imaginary: false,
        }
    }

    /// `prefix1 … prefixN`, e.g. `c1..c3` or `z1..z2`.
    pub fn indexed(prefix: &str, n: usize) -> Self {
        Self::only((1..=n).map(|k| format!("{prefix}{k}")))
    }

    pub fn with_imaginary(mut self) -> Self {
        self.imaginary = true;
        self
    }

    fn check(&self, name: &str, column: usize) -> Result<()> {
        match &self.allowed {
            Some(set) if !set.contains(name) => Err(Error::UnknownSymbol {
                name: name.to_owned(),
                column,
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
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

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[start..k].iter().collect();
            out.push((Tok::Int(digits.parse().expect("ascii digits")), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = k;
            k += 1;
            while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            let mut name: String = chars[start..k].iter().collect();
            if let Some(rest) = name.strip_prefix('λ') {
                name = format!("l{rest}");
            }
            out.push((Tok::Ident(name), col));
        } else {
            return Err(Error::Syntax {
                column: col,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'a SymbolContext,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self) -> Result<T> {
        Err(Error::Syntax {
            column: self.column(),
            message: format!("unexpected {}", self.peek().describe()),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let col = self.column();
            match self.bump() {
                Tok::Int(n) => {
                    let e = u32::try_from(&n).map_err(|_| Error::Syntax {
                        column: col,
                        message: "exponent too large".into(),
                    })?;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                other => {
                    return Err(Error::Syntax {
                        column: col,
                        message: format!("expected unsigned integer exponent, found {}", other.describe()),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.column();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    if let Tok::Int(d) = self.peek_at(1).clone() {
                        self.bump();
                        let dcol = self.column();
                        self.bump();
                        if d.is_zero() {
                            return Err(Error::Syntax {
                                column: dcol,
                                message: "zero denominator in rational literal".into(),
                            });
                        }
                        return Ok(Expr::Num(Rational::new(n, d)));
                    }
                }
                Ok(Expr::Num(Rational::from_integer(n)))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "i" {
                    if !self.ctx.imaginary {
                        return Err(Error::UnknownSymbol { name, column: col });
                    }
                    return Ok(Expr::I);
                }
                self.ctx.check(&name, col)?;
                Ok(Expr::Sym(name))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(Error::Syntax {
                        column: self.column(),
                        message: format!("expected ')', found {}", self.peek().describe()),
                    });
                }
                self.bump();
                Ok(e)
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.atom()?)))
            }
            _ => self.unexpected(),
        }
    }
}

pub fn parse_expr(text: &str, ctx: &SymbolContext) -> Result<Expr> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, ctx };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.unexpected();
    }
    Ok(e)
}

impl Expr {
    /// Evaluates to a rational function; `i` becomes the variable `i`.
    pub fn to_ratfn(&self) -> Result<RatFn> {
        Ok(match self {
            Expr::Num(r) => RatFn::constant(r.clone()),
            Expr::I => RatFn::var(Var::new("i")),
            Expr::Sym(s) => RatFn::var(Var::new(s.as_str())),
            Expr::Neg(a) => -a.to_ratfn()?,
            Expr::Add(a, b) => &a.to_ratfn()? + &b.to_ratfn()?,
            Expr::Sub(a, b) => &a.to_ratfn()? - &b.to_ratfn()?,
            Expr::Mul(a, b) => &a.to_ratfn()? * &b.to_ratfn()?,
            Expr::Div(a, b) => a.to_ratfn()?.checked_div(&b.to_ratfn()?)?,
            Expr::Pow(a, e) => a.to_ratfn()?.pow(*e),
        })
    }

    pub fn to_poly(&self) -> Result<SparsePoly> {
        let r = self.to_ratfn()?;
        match r.as_poly() {
            Some(p) => Ok(p.clone()),
            None => Err(Error::NotPolynomial(self.to_string())),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(self, Expr::Num(_) | Expr::I | Expr::Sym(_) | Expr::Neg(_))
    }

    fn is_fraction_literal(&self) -> bool {
        matches!(self, Expr::Num(r) if !r.is_integer())
    }
}

pub fn parse_ratfn(text: &str, ctx: &SymbolContext) -> Result<RatFn> {
    parse_expr(text, ctx)?.to_ratfn()
}

pub fn parse_poly(text: &str, ctx: &SymbolContext) -> Result<SparsePoly> {
    parse_expr(text, ctx)?.to_poly()
}

struct AtomLevel<'a>(&'a Expr);

impl fmt::Display for AtomLevel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atom() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

/// True when the printed form ends in a bare integer literal.
fn ends_with_integer(e: &Expr) -> bool {
    match e {
        Expr::Num(r) => r.is_integer(),
        Expr::Neg(a) => a.is_atom() && ends_with_integer(a),
        Expr::Mul(_, b) | Expr::Div(_, b) => {
            !matches!(**b, Expr::Add(..) | Expr::Sub(..) | Expr::Mul(..) | Expr::Div(..))
                && !b.is_fraction_literal()
                && ends_with_integer(b)
        }
        _ => false,
    }
}

/// Operand of `*` or `/`: products on the right need parentheses (left
/// associativity), and so do fraction literals, which would otherwise merge
/// with the following `/`.
fn fmt_product_operand(f: &mut fmt::Formatter<'_>, e: &Expr, right: bool) -> fmt::Result {
    let wrap = match e {
        Expr::Add(..) | Expr::Sub(..) => true,
        Expr::Mul(..) | Expr::Div(..) => right,
        _ => right && e.is_fraction_literal(),
    };
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Expr::I => f.write_str("i"),
            Expr::Sym(s) => f.write_str(s),
            Expr::Neg(a) => write!(f, "-{}", AtomLevel(a)),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(self, Expr::Add(..)) { "+" } else { "-" };
                write!(f, "{a} {op} ")?;
                match **b {
                    Expr::Add(..) | Expr::Sub(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let div = matches!(self, Expr::Div(..));
                if div && ends_with_integer(a) {
                    // `2/3` would read back as a single literal.
                    write!(f, "({a})")?;
                } else {
                    fmt_product_operand(f, a, false)?;
                }
                f.write_str(if div { "/" } else { "*" })?;
                fmt_product_operand(f, b, true)
            }
            Expr::Pow(a, e) => write!(f, "{}^{e}", AtomLevel(a)),
        }
    }
}
