//! Expression grammar shared by system files, catalog fixtures and Urabe closed forms.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | symbol | symbol '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Numbers may be integers or decimals with an optional exponent; decimals are read exactly.

use std::fmt::{self, Display};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::lienard::{PlanarPoly, PlanarSystem};
use crate::poly::{ParamPoly, Vars};
use crate::scalar::{Rat, Scalar};
use crate::series::{lambert_w, Coeff, XSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError { line, col, msg: msg.into() }
    }
}

impl Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Op(char),
    Newline,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn parse_number(s: &str) -> Option<Rat> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let digits = format!("{}{}", int, frac);
    if digits.is_empty() {
        return None;
    }
    let n: BigInt = digits.parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rat::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rat::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

fn lex(src: &str, line0: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, line0, col0);
    while i < chars.len() {
        let c = chars[i];
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '\n' || c == ';' {
            out.push(Token { tok: Tok::Newline, line, col });
            i += 1;
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() || (c == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit()) {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let text: String = chars[i..j].iter().collect();
            let r = parse_number(&text).ok_or_else(|| ParseError::new(start.0, start.1, format!("bad number '{}'", text)))?;
            out.push(Token { tok: Tok::Num(r), line: start.0, col: start.1 });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            out.push(Token { tok: Tok::Ident(text), line: start.0, col: start.1 });
            col += j - i;
            i = j;
            continue;
        }
        if "+-*/^(),=:".contains(c) {
            out.push(Token { tok: Tok::Op(c), line, col });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError::new(line, col, format!("unexpected character '{}'", c)));
    }
    Ok(out)
}

/// Parsed expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rat),
    Sym { name: String, line: usize, col: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call { name: String, args: Vec<Expr>, line: usize, col: usize },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
    end: (usize, usize),
}

impl Parser {
    fn skip_soft_newlines(&mut self) {
        while self.depth > 0 && matches!(self.toks.get(self.pos).map(|t| &t.tok), Some(Tok::Newline)) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<&Tok> {
        self.skip_soft_newlines();
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(ParseError::new(l, c, msg))
    }

    fn next(&mut self) -> Option<Token> {
        self.skip_soft_newlines();
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    /// Newlines directly after a binary operator continue the expression.
    fn after_operator(&mut self) {
        while matches!(self.toks.get(self.pos).map(|t| &t.tok), Some(Tok::Newline)) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Op(o)) if *o == c => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected '{}'", c)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    self.after_operator();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    self.after_operator();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    self.after_operator();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    self.after_operator();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (l, c) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Num(r), .. }) => Ok(Expr::Num(r)),
            Some(Token { tok: Tok::Ident(name), line, col }) => {
                if let Some(Tok::Op('(')) = self.peek() {
                    self.pos += 1;
                    self.depth += 1;
                    let mut args = vec![self.expr()?];
                    while let Some(Tok::Op(',')) = self.peek() {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    self.depth -= 1;
                    Ok(Expr::Call { name, args, line, col })
                } else {
                    Ok(Expr::Sym { name, line, col })
                }
            }
            Some(Token { tok: Tok::Op('('), .. }) => {
                self.depth += 1;
                let e = self.expr()?;
                self.expect(')')?;
                self.depth -= 1;
                Ok(e)
            }
            Some(Token { tok: Tok::Newline, .. }) | None => Err(ParseError::new(l, c, "unexpected end of expression")),
            Some(Token { tok: Tok::Op(o), .. }) => Err(ParseError::new(l, c, format!("unexpected '{}'", o))),
        }
    }
}

/// Parses one expression starting at the given line and column, for error messages.
pub fn parse_expr_at(src: &str, line0: usize, col0: usize) -> Result<Expr, ParseError> {
    let toks = lex(src, line0, col0)?;
    let end = toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((line0, 1));
    let mut p = Parser { toks, pos: 0, depth: 0, end };
    p.after_operator();
    let e = p.expr()?;
    p.after_operator();
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_expr_at(src, 1, 1)
}

fn pos_of(e: &Expr) -> (usize, usize) {
    match e {
        Expr::Sym { line, col, .. } | Expr::Call { line, col, .. } => (*line, *col),
        Expr::Neg(a) | Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) | Expr::Div(a, _) | Expr::Pow(a, _) => {
            pos_of(a)
        }
        Expr::Num(_) => (0, 0),
    }
}

fn fail<T>(e: &Expr, msg: impl Into<String>) -> Result<T, ParseError> {
    let (l, c) = pos_of(e);
    Err(ParseError::new(l, c, msg))
}

/// Rational value of a constant subexpression (exponents and sqrt arguments).
pub fn eval_rat(e: &Expr) -> Result<Rat, ParseError> {
    match e {
        Expr::Num(r) => Ok(r.clone()),
        Expr::Neg(a) => Ok(-eval_rat(a)?),
        Expr::Add(a, b) => Ok(eval_rat(a)? + eval_rat(b)?),
        Expr::Sub(a, b) => Ok(eval_rat(a)? - eval_rat(b)?),
        Expr::Mul(a, b) => Ok(eval_rat(a)? * eval_rat(b)?),
        Expr::Div(a, b) => {
            let d = eval_rat(b)?;
            if d.is_zero() {
                return fail(e, "division by zero");
            }
            Ok(eval_rat(a)? / d)
        }
        Expr::Pow(a, b) => {
            let base = eval_rat(a)?;
            let k = int_exponent(b)?;
            if k < 0 && base.is_zero() {
                return fail(e, "division by zero");
            }
            Ok(num_traits::pow::Pow::pow(&base, k as i32))
        }
        _ => fail(e, "expected a rational constant"),
    }
}

fn int_exponent(e: &Expr) -> Result<i64, ParseError> {
    let r = eval_rat(e)?;
    if !r.is_integer() || r.abs() > Rat::from_integer(BigInt::from(64)) {
        return fail(e, "exponent must be an integer of modest size");
    }
    Ok(r.to_integer().to_i64().unwrap())
}

/// Evaluates to a polynomial in x, y over the declared parameters.
pub fn eval_planar<K: Scalar>(e: &Expr, vars: &Arc<Vars>) -> Result<PlanarPoly<K>, ParseError> {
    let cst = |k: K| PlanarPoly::constant(ParamPoly::constant(vars, k));
    match e {
        Expr::Num(r) => Ok(cst(K::from_rat(r))),
        Expr::Sym { name, .. } => match name.as_str() {
            "x" => Ok(PlanarPoly::x(vars)),
            "y" => Ok(PlanarPoly::y(vars)),
            n => match vars.index(n) {
                Some(i) => Ok(PlanarPoly::constant(ParamPoly::var(vars, i))),
                None => fail(e, format!("undeclared symbol '{}'", n)),
            },
        },
        Expr::Neg(a) => Ok(eval_planar::<K>(a, vars)?.neg()),
        Expr::Add(a, b) => Ok(eval_planar::<K>(a, vars)?.add(&eval_planar(b, vars)?)),
        Expr::Sub(a, b) => Ok(eval_planar::<K>(a, vars)?.sub(&eval_planar(b, vars)?)),
        Expr::Mul(a, b) => Ok(eval_planar::<K>(a, vars)?.mul(&eval_planar(b, vars)?)),
        Expr::Div(a, b) => {
            let d = eval_planar::<K>(b, vars)?;
            let k = match d.as_param().and_then(|p| p.as_constant()) {
                Some(k) if !k.is_zero() => k,
                Some(_) => return fail(b, "division by zero"),
                None => return fail(b, "divisor must be a nonzero numeric constant"),
            };
            let inv = ParamPoly::constant(vars, K::one() / k);
            Ok(eval_planar::<K>(a, vars)?.scale(&inv))
        }
        Expr::Pow(a, b) => {
            let k = int_exponent(b)?;
            if k < 0 {
                return fail(b, "negative exponent in a polynomial");
            }
            Ok(eval_planar::<K>(a, vars)?.pow(k as u32))
        }
        Expr::Call { name, args, .. } => match (name.as_str(), args.len()) {
            ("sqrt", 1) => {
                let r = eval_rat(&args[0])?;
                match K::from_rat(&r).sqrt_checked() {
                    Some(k) => Ok(cst(k)),
                    None => fail(e, format!("sqrt({}) is not in the coefficient field", r)),
                }
            }
            _ => fail(e, format!("unknown function '{}' with {} argument(s)", name, args.len())),
        },
    }
}

/// Polynomial in the registered symbols only; `x` and `y` are ordinary symbols here.
pub fn eval_param<K: Scalar>(e: &Expr, vars: &Arc<Vars>) -> Result<ParamPoly<K>, ParseError> {
    match e {
        Expr::Num(r) => Ok(ParamPoly::constant(vars, K::from_rat(r))),
        Expr::Sym { name, .. } => match vars.index(name) {
            Some(i) => Ok(ParamPoly::var(vars, i)),
            None => fail(e, format!("undeclared symbol '{}'", name)),
        },
        Expr::Neg(a) => Ok(-eval_param::<K>(a, vars)?),
        Expr::Add(a, b) => Ok(eval_param::<K>(a, vars)? + eval_param(b, vars)?),
        Expr::Sub(a, b) => Ok(eval_param::<K>(a, vars)? - eval_param(b, vars)?),
        Expr::Mul(a, b) => Ok(eval_param::<K>(a, vars)? * eval_param(b, vars)?),
        Expr::Div(a, b) => match eval_param::<K>(b, vars)?.as_constant() {
            Some(k) if !k.is_zero() => Ok(eval_param::<K>(a, vars)?.scale(&(K::one() / k))),
            Some(_) => fail(b, "division by zero"),
            None => fail(b, "divisor must be a nonzero numeric constant"),
        },
        Expr::Pow(a, b) => {
            let k = int_exponent(b)?;
            if k < 0 {
                return fail(b, "negative exponent in a polynomial");
            }
            Ok(eval_param::<K>(a, vars)?.pow(k as u32))
        }
        Expr::Call { name, args, .. } => match (name.as_str(), args.len()) {
            ("sqrt", 1) => {
                let r = eval_rat(&args[0])?;
                match K::from_rat(&r).sqrt_checked() {
                    Some(k) => Ok(ParamPoly::constant(vars, k)),
                    None => fail(e, format!("sqrt({}) is not in the coefficient field", r)),
                }
            }
            _ => fail(e, format!("unknown function '{}' with {} argument(s)", name, args.len())),
        },
    }
}

pub fn parse_poly<K: Scalar>(src: &str, vars: &Arc<Vars>) -> Result<ParamPoly<K>, ParseError> {
    eval_param(&parse_expr(src)?, vars)
}

type PS<K> = XSeries<ParamPoly<K>>;

fn series_err<T>(e: &Expr, err: impl Display) -> Result<T, ParseError> {
    fail(e, format!("{}", err))
}

/// √s allowing an even power of the variable in front of a unit.
fn series_sqrt<K: Scalar>(s: &PS<K>) -> Result<PS<K>, crate::series::SeriesError> {
    match s.valuation() {
        Some(v) if v > 0 => {
            if v % 2 == 1 {
                return Err(crate::series::SeriesError::NoRoot);
            }
            Ok(s.shift_down(v)?.sqrt()?.shift_up(v / 2))
        }
        _ => s.sqrt(),
    }
}

fn eval_series_inner<K: Scalar>(e: &Expr, var: &str, vars: &Arc<Vars>, order: usize) -> Result<PS<K>, ParseError> {
    let proto = ParamPoly::<K>::zero(vars);
    let rec = |a: &Expr| eval_series_inner::<K>(a, var, vars, order);
    match e {
        Expr::Num(r) => Ok(XSeries::constant(proto.lift(K::from_rat(r)), order)),
        Expr::Sym { name, .. } => {
            if name == var {
                Ok(XSeries::var(&proto, order))
            } else {
                match vars.index(name) {
                    Some(i) => Ok(XSeries::constant(ParamPoly::var(vars, i), order)),
                    None => fail(e, format!("undeclared symbol '{}'", name)),
                }
            }
        }
        Expr::Neg(a) => Ok(rec(a)?.neg()),
        Expr::Add(a, b) => Ok(rec(a)?.add(&rec(b)?)),
        Expr::Sub(a, b) => Ok(rec(a)?.sub(&rec(b)?)),
        Expr::Mul(a, b) => Ok(rec(a)?.mul(&rec(b)?)),
        Expr::Div(a, b) => rec(a)?.div(&rec(b)?).or_else(|err| series_err(e, err)),
        Expr::Pow(a, b) => {
            let r = eval_rat(b)?;
            let base = rec(a)?;
            if r.is_integer() {
                return base.powi(int_exponent(b)?).or_else(|err| series_err(e, err));
            }
            let two = BigInt::from(2);
            if *r.denom() == two {
                let root = series_sqrt(&base).or_else(|err| series_err(e, err))?;
                let k = r.numer().to_i64().unwrap_or(0);
                return root.powi(k).or_else(|err| series_err(e, err));
            }
            base.pow_unit(&r).or_else(|err| series_err(e, err))
        }
        Expr::Call { name, args, .. } => {
            if args.len() != 1 {
                return fail(e, format!("'{}' takes one argument", name));
            }
            let s = rec(&args[0])?;
            let r = match name.as_str() {
                "sqrt" => series_sqrt(&s),
                "exp" => s.exp(),
                "log" => s.log(),
                "lambertw" | "LambertW" => lambert_w(&s),
                _ => return fail(e, format!("unknown function '{}'", name)),
            };
            r.or_else(|err| series_err(e, err))
        }
    }
}

/// Extra working order absorbed by divisions that cancel powers of the variable.
pub const SERIES_SLACK: usize = 12;

/// Expands an expression as a power series in `var` to `order`.
pub fn eval_series<K: Scalar>(e: &Expr, var: &str, vars: &Arc<Vars>, order: usize) -> Result<PS<K>, ParseError> {
    let s = eval_series_inner::<K>(e, var, vars, order + SERIES_SLACK)?;
    if s.order() < order {
        return fail(e, format!("expression only determines the series to order {}", s.order()));
    }
    Ok(s.truncate(order))
}

/// Coefficient field declared in a system file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldDecl {
    Rational,
    Quadratic(u64),
    Float,
}

impl Display for FieldDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDecl::Rational => write!(f, "rational"),
            FieldDecl::Quadratic(d) => write!(f, "sqrt({})", d),
            FieldDecl::Float => write!(f, "float"),
        }
    }
}

/// Parsed system file before evaluation in a coefficient field.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub params: Vec<String>,
    pub field: FieldDecl,
    pub xdot: Expr,
    pub ydot: Expr,
}

fn parse_field(rest: &str, line: usize) -> Result<FieldDecl, ParseError> {
    let t = rest.trim();
    match t {
        "rational" | "Q" => Ok(FieldDecl::Rational),
        "float" => Ok(FieldDecl::Float),
        _ => {
            let e = parse_expr_at(t, line, 1)?;
            if let Expr::Call { name, args, .. } = &e {
                if name == "sqrt" && args.len() == 1 {
                    let r = eval_rat(&args[0])?;
                    if r.is_integer() && r.is_positive() {
                        let n = r.to_integer().to_u64().unwrap_or(0);
                        let (_, core) = crate::scalar::squarefree_split(n);
                        return Ok(if core == 1 { FieldDecl::Rational } else { FieldDecl::Quadratic(core) });
                    }
                }
            }
            Err(ParseError::new(line, 1, format!("unknown field '{}'", t)))
        }
    }
}

fn valid_ident(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some(c) if c.is_alphabetic() || c == '_') && ch.all(|c| c.is_alphanumeric() || c == '_')
}

/// Splits a document into statements at newlines and ';', keeping parenthesized spans together.
/// Each statement carries the line and column of its first character.
fn statements(src: &str) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let (mut start, mut start_col) = (1, 1);
    let (mut line, mut col) = (1, 0);
    let mut depth = 0i32;
    let mut in_comment = false;
    for c in src.chars() {
        col += 1;
        if in_comment {
            if c == '\n' {
                in_comment = false;
            } else {
                continue;
            }
        }
        match c {
            '#' => {
                in_comment = true;
                continue;
            }
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let ends_op = cur.trim_end().ends_with(['+', '-', '*', '/', '^', '=']);
        if (c == '\n' || c == ';') && depth <= 0 && !ends_op {
            if !cur.trim().is_empty() {
                out.push((start, start_col, cur.trim_end().to_string()));
            }
            cur.clear();
            if c == '\n' {
                line += 1;
                col = 0;
            }
            continue;
        }
        if c == '\n' {
            line += 1;
            col = 0;
            cur.push(' ');
            continue;
        }
        if cur.trim().is_empty() {
            if c.is_whitespace() {
                continue;
            }
            cur.clear();
            start = line;
            start_col = col;
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push((start, start_col, cur.trim_end().to_string()));
    }
    out
}

/// Parses the text of a system file.
pub fn parse_system_text(src: &str) -> Result<SystemFile, ParseError> {
    let mut params: Vec<String> = Vec::new();
    let mut field = FieldDecl::Rational;
    let mut field_set = false;
    let mut xdot = None;
    let mut ydot = None;
    for (line, col0, st) in statements(src) {
        let (head, rest) = match st.find(|c: char| c.is_whitespace() || c == '=' || c == ':') {
            Some(i) => (&st[..i], st[i..].trim_start()),
            None => (st.as_str(), ""),
        };
        match head {
            "param" | "params" => {
                let rest = rest.trim_start_matches(':');
                for name in rest.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty()) {
                    if !valid_ident(name) || name == "x" || name == "y" {
                        return Err(ParseError::new(line, 1, format!("invalid parameter name '{}'", name)));
                    }
                    if params.iter().any(|p| p == name) {
                        return Err(ParseError::new(line, 1, format!("parameter '{}' declared twice", name)));
                    }
                    params.push(name.to_string());
                }
            }
            "field" => {
                if field_set {
                    return Err(ParseError::new(line, 1, "field declared twice"));
                }
                field = parse_field(rest.trim_start_matches(':'), line)?;
                field_set = true;
            }
            "xdot" | "ydot" => {
                let body = rest.strip_prefix('=').ok_or_else(|| ParseError::new(line, col0, format!("expected '=' after {}", head)))?;
                let e = parse_expr_at(body, line, col0 + st.len() - body.len())?;
                let slot = if head == "xdot" { &mut xdot } else { &mut ydot };
                if slot.is_some() {
                    return Err(ParseError::new(line, 1, format!("{} defined twice", head)));
                }
                *slot = Some(e);
            }
            _ => return Err(ParseError::new(line, 1, format!("unknown statement '{}'", head))),
        }
    }
    let last = src.lines().count().max(1);
    let xdot = xdot.ok_or_else(|| ParseError::new(last, 1, "missing 'xdot = ...'"))?;
    let ydot = ydot.ok_or_else(|| ParseError::new(last, 1, "missing 'ydot = ...'"))?;
    Ok(SystemFile { params, field, xdot, ydot })
}

impl SystemFile {
    pub fn vars(&self) -> Arc<Vars> {
        Vars::new(&self.params)
    }

    /// Evaluates both right-hand sides and checks degree and linear part.
    pub fn system<K: Scalar>(&self) -> Result<PlanarSystem<K>, ParseError> {
        let vars = self.vars();
        let xd = eval_planar::<K>(&self.xdot, &vars)?;
        let yd = eval_planar::<K>(&self.ydot, &vars)?;
        let sys = PlanarSystem::new(xd, yd);
        if let Err(e) = sys.validate() {
            let (l, c) = pos_of(&self.xdot);
            return Err(ParseError::new(l.max(1), c.max(1), e.to_string()));
        }
        Ok(sys)
    }
}

/// Prints a system in the file grammar; the output parses back to the same structure.
pub fn format_system<K: Scalar>(sys: &PlanarSystem<K>, field: FieldDecl) -> String {
    let mut s = String::new();
    if !sys.params.is_empty() {
        s.push_str(&format!("params {}\n", sys.params.names().join(", ")));
    }
    if field != FieldDecl::Rational {
        s.push_str(&format!("field {}\n", field));
    }
    s.push_str(&format!("xdot = {}\n", sys.xdot));
    s.push_str(&format!("ydot = {}\n", sys.ydot));
    s
}

/// Polynomial list for Gröbner computations.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealFile {
    /// Declared variables, or symbols in order of first appearance.
    pub vars: Vec<String>,
    pub field: FieldDecl,
    pub polys: Vec<Expr>,
}

impl Expr {
    /// Symbols in order of first appearance, function names excluded.
    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym { name, .. } => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            Expr::Neg(a) => a.symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.symbols(out)),
        }
    }
}

/// Parses `vars a, b` and `field ...` headers followed by one polynomial per statement.
pub fn parse_ideal_text(src: &str) -> Result<IdealFile, ParseError> {
    let mut vars: Option<Vec<String>> = None;
    let mut field = FieldDecl::Rational;
    let mut polys = Vec::new();
    for (line, col0, st) in statements(src) {
        let (head, rest) = match st.find(char::is_whitespace) {
            Some(i) => (&st[..i], st[i..].trim()),
            None => (st.as_str(), ""),
        };
        match head {
            "vars" if vars.is_none() => {
                let names: Vec<String> = rest.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
                if let Some(bad) = names.iter().find(|n| !valid_ident(n)) {
                    return Err(ParseError::new(line, 1, format!("invalid variable name '{}'", bad)));
                }
                vars = Some(names);
            }
            "field" => field = parse_field(rest, line)?,
            _ => polys.push(parse_expr_at(&st, line, col0)?),
        }
    }
    if polys.is_empty() {
        return Err(ParseError::new(src.lines().count().max(1), 1, "no polynomials"));
    }
    let vars = match vars {
        Some(v) => v,
        None => {
            let mut v = Vec::new();
            polys.iter().for_each(|p| p.symbols(&mut v));
            v
        }
    };
    Ok(IdealFile { vars, field, polys })
}

impl IdealFile {
    pub fn generators<K: Scalar>(&self) -> Result<Vec<ParamPoly<K>>, ParseError> {
        let vars = Vars::new(&self.vars);
        self.polys.iter().map(|p| eval_param::<K>(p, &vars)).collect()
    }
}
