//! Cherkas-form systems, the Choudhury–Guha reduction and Liénard data.

use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::sync::Arc;

use crate::order::MonomialOrder;
use crate::poly::{template_weights, ParamPoly, Vars};
use crate::scalar::Scalar;
use crate::series::{SeriesError, XSeries};

/// Univariate polynomial in x with parameter-polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct XPoly<K: Scalar> {
    vars: Arc<Vars>,
    c: Vec<ParamPoly<K>>,
}

impl<K: Scalar> XPoly<K> {
    pub fn zero(vars: &Arc<Vars>) -> Self {
        XPoly { vars: vars.clone(), c: Vec::new() }
    }

    pub fn from_coeffs(vars: &Arc<Vars>, c: Vec<ParamPoly<K>>) -> Self {
        let mut p = XPoly { vars: vars.clone(), c };
        p.trim();
        p
    }

    pub fn constant(k: ParamPoly<K>) -> Self {
        let vars = k.vars().clone();
        Self::from_coeffs(&vars, vec![k])
    }

    /// c·x^k.
    pub fn monomial(k: usize, c: ParamPoly<K>) -> Self {
        let vars = c.vars().clone();
        let mut v = vec![ParamPoly::zero(&vars); k];
        v.push(c);
        Self::from_coeffs(&vars, v)
    }

    pub fn x(vars: &Arc<Vars>) -> Self {
        Self::monomial(1, ParamPoly::one(vars))
    }

    fn trim(&mut self) {
        while self.c.last().map(|p| p.is_zero()).unwrap_or(false) {
            self.c.pop();
        }
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn coeffs(&self) -> &[ParamPoly<K>] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> ParamPoly<K> {
        self.c.get(k).cloned().unwrap_or_else(|| ParamPoly::zero(&self.vars))
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn negligible(&self, tol: f64) -> bool {
        self.c.iter().all(|p| p.negligible(tol))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs(&self.vars, (0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs(&self.vars, (0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(&self.vars, self.c.iter().map(|p| -p).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.vars);
        }
        let mut out = vec![ParamPoly::zero(&self.vars); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(&self.vars, out)
    }

    pub fn scale(&self, k: &ParamPoly<K>) -> Self {
        Self::from_coeffs(&self.vars, self.c.iter().map(|p| p * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            &self.vars,
            self.c.iter().enumerate().skip(1).map(|(k, p)| p.scale(&K::from_int(k as i64))).collect(),
        )
    }

    /// Horner evaluation at a parameter polynomial.
    pub fn eval(&self, x: &ParamPoly<K>) -> ParamPoly<K> {
        let mut acc = ParamPoly::zero(&self.vars);
        for p in self.c.iter().rev() {
            acc = &(&acc * x) + p;
        }
        acc
    }

    /// Coefficients as floats after substituting parameter values.
    pub fn to_f64(&self, params: &[f64]) -> Vec<f64> {
        self.c.iter().map(|p| p.map_coeffs(|k| k.to_f64()).eval(params)).collect()
    }

    pub fn map_params(&self, f: impl Fn(&ParamPoly<K>) -> ParamPoly<K>) -> Self {
        let c: Vec<ParamPoly<K>> = self.c.iter().map(f).collect();
        let vars = c.first().map(|p| p.vars().clone()).unwrap_or_else(|| self.vars.clone());
        Self::from_coeffs(&vars, c)
    }

    pub fn to_series(&self, order: usize) -> XSeries<ParamPoly<K>> {
        let mut s = XSeries::zero(&ParamPoly::zero(&self.vars), order).into_coeffs();
        for (k, p) in self.c.iter().enumerate().take(order + 1) {
            s[k] = p.clone();
        }
        XSeries::new(s)
    }
}

/// Horner evaluation of float coefficients.
pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

impl<K: Scalar> Display for XPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (k, p) in self.c.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            parts.push(term_string(p, &mono_string(k as u16, 0)));
        }
        write!(f, "{}", join_signed(&parts))
    }
}

/// Ratio of x-polynomials; kept unreduced.
#[derive(Clone, Debug, PartialEq)]
pub struct XRatFunc<K: Scalar> {
    pub num: XPoly<K>,
    pub den: XPoly<K>,
}

impl<K: Scalar> XRatFunc<K> {
    pub fn new(num: XPoly<K>, den: XPoly<K>) -> Self {
        XRatFunc { num, den }
    }

    pub fn from_poly(p: XPoly<K>) -> Self {
        let one = XPoly::constant(ParamPoly::one(p.vars()));
        XRatFunc { num: p, den: one }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return XRatFunc::new(self.num.add(&o.num), self.den.clone());
        }
        XRatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        XRatFunc::new(self.num.neg(), self.den.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        XRatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn derivative(&self) -> Self {
        XRatFunc::new(
            self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Taylor expansion at 0; the denominator's constant term must be an invertible scalar.
    pub fn to_series(&self, order: usize) -> Result<XSeries<ParamPoly<K>>, SeriesError> {
        let n = self.num.to_series(order);
        let d = self.den.to_series(order);
        Ok(n.mul(&d.inverse()?))
    }

    pub fn eval_f64(&self, params: &[f64], x: f64) -> f64 {
        horner(&self.num.to_f64(params), x) / horner(&self.den.to_f64(params), x)
    }
}

impl<K: Scalar> Display for XRatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

fn mono_string(i: u16, j: u16) -> String {
    let mut v = Vec::new();
    match i {
        0 => {}
        1 => v.push("x".to_string()),
        _ => v.push(format!("x^{}", i)),
    }
    match j {
        0 => {}
        1 => v.push("y".to_string()),
        _ => v.push(format!("y^{}", j)),
    }
    v.join("*")
}

/// Signed term text, e.g. "-3/2*x^2" or "(a11 + 1)*x*y".
fn term_string<K: Scalar>(p: &ParamPoly<K>, mono: &str) -> String {
    if let Some(k) = p.as_constant() {
        let neg = k.signum_i() < 0 && !k.to_expr().starts_with('(');
        let mag = if neg { -k } else { k };
        let body = if mono.is_empty() {
            mag.to_expr()
        } else if mag.is_one() {
            mono.to_string()
        } else {
            format!("{}*{}", mag.to_expr(), mono)
        };
        return if neg { format!("-{}", body) } else { body };
    }
    let s = p.to_expr();
    let single = p.nterms() == 1;
    let coef = if single { s } else { format!("({})", s) };
    if mono.is_empty() {
        coef
    } else {
        format!("{}*{}", coef, mono)
    }
}

fn join_signed(parts: &[String]) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

/// Polynomial in x, y with parameter-polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarPoly<K: Scalar> {
    vars: Arc<Vars>,
    terms: BTreeMap<(u16, u16), ParamPoly<K>>,
}

impl<K: Scalar> PlanarPoly<K> {
    pub fn zero(vars: &Arc<Vars>) -> Self {
        PlanarPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn term(i: u16, j: u16, c: ParamPoly<K>) -> Self {
        let mut p = Self::zero(c.vars());
        p.add_term(i, j, c);
        p
    }

    pub fn constant(c: ParamPoly<K>) -> Self {
        Self::term(0, 0, c)
    }

    pub fn x(vars: &Arc<Vars>) -> Self {
        Self::term(1, 0, ParamPoly::one(vars))
    }

    pub fn y(vars: &Arc<Vars>) -> Self {
        Self::term(0, 1, ParamPoly::one(vars))
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<(u16, u16), ParamPoly<K>> {
        &self.terms
    }

    pub fn coeff(&self, i: u16, j: u16) -> ParamPoly<K> {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(|| ParamPoly::zero(&self.vars))
    }

    pub fn add_term(&mut self, i: u16, j: u16, c: ParamPoly<K>) {
        if c.is_zero() {
            return;
        }
        let s = &self.coeff(i, j) + &c;
        if s.is_zero() {
            self.terms.remove(&(i, j));
        } else {
            self.terms.insert((i, j), s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&(i, j), c) in &o.terms {
            r.add_term(i, j, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        PlanarPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(&self.vars);
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                r.add_term(i + k, j + l, a * b);
            }
        }
        r
    }

    pub fn scale(&self, k: &ParamPoly<K>) -> Self {
        let mut r = Self::zero(&self.vars);
        for (&(i, j), a) in &self.terms {
            r.add_term(i, j, a * k);
        }
        r
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::constant(ParamPoly::one(&self.vars));
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// The constant value when the polynomial is free of x and y.
    pub fn as_param(&self) -> Option<ParamPoly<K>> {
        match self.terms.len() {
            0 => Some(ParamPoly::zero(&self.vars)),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u16> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn degree_y(&self) -> u16 {
        self.terms.keys().map(|(_, j)| *j).max().unwrap_or(0)
    }

    /// Coefficient of y^j as a polynomial in x.
    pub fn y_coeff(&self, j: u16) -> XPoly<K> {
        let n = self.terms.keys().map(|(i, _)| *i as usize).max().unwrap_or(0);
        let mut c = vec![ParamPoly::zero(&self.vars); n + 1];
        for (&(i, jj), a) in &self.terms {
            if jj == j {
                c[i as usize] = a.clone();
            }
        }
        XPoly::from_coeffs(&self.vars, c)
    }

    pub fn map_params(&self, f: impl Fn(&ParamPoly<K>) -> ParamPoly<K>) -> Self {
        let mut vars = self.vars.clone();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = f(c);
            vars = v.vars().clone();
            if !v.is_zero() {
                terms.insert(*m, v);
            }
        }
        PlanarPoly { vars, terms }
    }

    /// p(x, −y).
    pub fn flip_y(&self) -> Self {
        PlanarPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(&(i, j), c)| ((i, j), if j % 2 == 1 { -c } else { c.clone() })).collect(),
        }
    }

    pub fn negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.negligible(tol))
    }
}

impl<K: Scalar> Display for PlanarPoly<K> {
    /// Ascending total degree, then ascending power of x.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<(u16, u16)> = self.terms.keys().cloned().collect();
        keys.sort_by(|a, b| (a.0 + a.1).cmp(&(b.0 + b.1)).then(a.0.cmp(&b.0)));
        let parts: Vec<String> = keys.iter().map(|&(i, j)| term_string(&self.terms[&(i, j)], &mono_string(i, j))).collect();
        write!(f, "{}", join_signed(&parts))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemError {
    /// ẋ must be at most linear in y and ẏ at most quadratic.
    NotCherkas { equation: &'static str, y_degree: u16 },
    DegreeTooHigh(u16),
    WrongLinearPart,
    /// The origin is not a singular point.
    NotSingular,
    /// p1(0) vanishes or is not a scalar.
    DegenerateP1,
    ResidualNonzero,
    GNotNormalized,
    Series(SeriesError),
}

impl Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::NotCherkas { equation, y_degree } => write!(
                f,
                "{} has degree {} in y; Cherkas form needs xdot linear and ydot quadratic in y",
                equation, y_degree
            ),
            SystemError::DegreeTooHigh(d) => write!(f, "total degree {} exceeds 4", d),
            SystemError::WrongLinearPart => write!(f, "linear part must be exactly (-y, x)"),
            SystemError::NotSingular => write!(f, "origin is not a singular point"),
            SystemError::DegenerateP1 => write!(f, "p1(0) must be a nonzero scalar"),
            SystemError::ResidualNonzero => write!(f, "reducibility residual is not identically zero"),
            SystemError::GNotNormalized => write!(f, "g(0) = 0 and g'(0) = 1 required"),
            SystemError::Series(e) => write!(f, "series: {}", e),
        }
    }
}

impl std::error::Error for SystemError {}

impl From<SeriesError> for SystemError {
    fn from(e: SeriesError) -> Self {
        SystemError::Series(e)
    }
}

/// ẋ = P(x, y), ẏ = Q(x, y) with parameter-polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSystem<K: Scalar> {
    pub params: Arc<Vars>,
    pub xdot: PlanarPoly<K>,
    pub ydot: PlanarPoly<K>,
}

impl<K: Scalar> PlanarSystem<K> {
    pub fn new(xdot: PlanarPoly<K>, ydot: PlanarPoly<K>) -> Self {
        PlanarSystem { params: xdot.vars().clone(), xdot, ydot }
    }

    /// Checks total degree ≤ 4 and linear part (−y, x).
    pub fn validate(&self) -> Result<(), SystemError> {
        for p in [&self.xdot, &self.ydot] {
            if let Some(d) = p.total_degree() {
                if d > 4 {
                    return Err(SystemError::DegreeTooHigh(d));
                }
            }
        }
        let vars = &self.params;
        let one = ParamPoly::<K>::one(vars);
        let zero = ParamPoly::<K>::zero(vars);
        let ok = self.xdot.coeff(0, 0).is_zero()
            && self.ydot.coeff(0, 0).is_zero()
            && self.xdot.coeff(1, 0) == zero
            && self.xdot.coeff(0, 1) == -&one
            && self.ydot.coeff(1, 0) == one
            && self.ydot.coeff(0, 1) == zero;
        if ok {
            Ok(())
        } else {
            Err(SystemError::WrongLinearPart)
        }
    }

    pub fn map_params(&self, f: impl Fn(&ParamPoly<K>) -> ParamPoly<K>) -> Self {
        PlanarSystem::new(self.xdot.map_params(&f), self.ydot.map_params(&f))
    }

    /// Substitutes scalar values for named parameters, keeping the registry.
    pub fn instantiate(&self, values: &[(&str, K)]) -> Self {
        let a: Vec<(usize, K)> =
            values.iter().filter_map(|(n, k)| self.params.index(n).map(|i| (i, k.clone()))).collect();
        self.map_params(|p| p.subs_scalar(&a))
    }

    pub fn to_cherkas(&self) -> Result<CherkasSystem<K>, SystemError> {
        CherkasSystem::from_planar(self)
    }
}

/// ẋ = p0 + p1·y, ẏ = q0 + q1·y + q2·y².
#[derive(Clone, Debug, PartialEq)]
pub struct CherkasSystem<K: Scalar> {
    pub params: Arc<Vars>,
    pub p0: XPoly<K>,
    pub p1: XPoly<K>,
    pub q0: XPoly<K>,
    pub q1: XPoly<K>,
    pub q2: XPoly<K>,
    /// Time rescaling applied so that p1(0) = −1.
    pub time_scale: K,
}

impl<K: Scalar> CherkasSystem<K> {
    pub fn from_planar(sys: &PlanarSystem<K>) -> Result<Self, SystemError> {
        let dx = sys.xdot.degree_y();
        if dx > 1 {
            return Err(SystemError::NotCherkas { equation: "xdot", y_degree: dx });
        }
        let dy = sys.ydot.degree_y();
        if dy > 2 {
            return Err(SystemError::NotCherkas { equation: "ydot", y_degree: dy });
        }
        Self::new(
            sys.xdot.y_coeff(0),
            sys.xdot.y_coeff(1),
            sys.ydot.y_coeff(0),
            sys.ydot.y_coeff(1),
            sys.ydot.y_coeff(2),
        )
    }

    pub fn new(p0: XPoly<K>, p1: XPoly<K>, q0: XPoly<K>, q1: XPoly<K>, q2: XPoly<K>) -> Result<Self, SystemError> {
        if !p0.coeff(0).is_zero() || !q0.coeff(0).is_zero() {
            return Err(SystemError::NotSingular);
        }
        let c = p1.coeff(0).as_constant().ok_or(SystemError::DegenerateP1)?;
        if c.is_zero() {
            return Err(SystemError::DegenerateP1);
        }
        let params = p0.vars().clone();
        let mut s = CherkasSystem { params, p0, p1, q0, q1, q2, time_scale: K::one() };
        let minus_one = -K::one();
        if c != minus_one {
            let t = -(K::one() / c);
            let tp = ParamPoly::constant(&s.params, t.clone());
            for p in [&mut s.p0, &mut s.p1, &mut s.q0, &mut s.q1, &mut s.q2] {
                *p = p.scale(&tp);
            }
            s.time_scale = t;
        }
        Ok(s)
    }

    /// Numerator −p1′p0 + (q1 + p0′)p1 − 2q2p0 of the reducibility residual.
    pub fn reducibility_residual(&self) -> XPoly<K> {
        let a = self.p1.derivative().mul(&self.p0).neg();
        let b = self.q1.add(&self.p0.derivative()).mul(&self.p1);
        let two = ParamPoly::constant(&self.params, K::from_int(2));
        let c = self.q2.mul(&self.p0).scale(&two);
        a.add(&b).sub(&c)
    }

    /// Nonzero x-coefficients of the residual, content-free with positive weighted-grevlex lead.
    pub fn reducibility_conditions(&self) -> Vec<ParamPoly<K>> {
        let order = MonomialOrder::WeightedGrevlex(template_weights(&self.params));
        self.reducibility_residual().coeffs().iter().filter(|p| !p.is_zero()).map(|p| p.primitive(&order)).collect()
    }

    pub fn is_reducible(&self, tol: f64) -> bool {
        self.reducibility_residual().negligible(tol)
    }

    /// f = −(q2 + p1′)/p1 and g = −q2p0²/p1 + q1p0 − p1q0.
    pub fn to_lienard_unchecked(&self) -> LienardPair<K> {
        let f = XRatFunc::new(self.q2.add(&self.p1.derivative()).neg(), self.p1.clone());
        let gnum = self
            .q2
            .mul(&self.p0)
            .mul(&self.p0)
            .neg()
            .add(&self.q1.mul(&self.p0).sub(&self.p1.mul(&self.q0)).mul(&self.p1));
        let g = XRatFunc::new(gnum, self.p1.clone());
        LienardPair { params: self.params.clone(), f, g }
    }

    pub fn to_lienard(&self, tol: f64) -> Result<LienardPair<K>, SystemError> {
        if !self.is_reducible(tol) {
            return Err(SystemError::ResidualNonzero);
        }
        let lp = self.to_lienard_unchecked();
        if !lp.center_check(tol) {
            return Err(SystemError::GNotNormalized);
        }
        Ok(lp)
    }

    /// z = p0(x) + p1(x)·y as a planar polynomial.
    pub fn z_poly(&self) -> PlanarPoly<K> {
        let mut z = PlanarPoly::zero(&self.params);
        for (i, c) in self.p0.coeffs().iter().enumerate() {
            z.add_term(i as u16, 0, c.clone());
        }
        for (i, c) in self.p1.coeffs().iter().enumerate() {
            z.add_term(i as u16, 1, c.clone());
        }
        z
    }

    pub fn numeric(&self, params: &[f64]) -> NumericCherkas {
        NumericCherkas {
            p0: self.p0.to_f64(params),
            p1: self.p1.to_f64(params),
            q0: self.q0.to_f64(params),
            q1: self.q1.to_f64(params),
            q2: self.q2.to_f64(params),
        }
    }
}

/// Cherkas system with float coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericCherkas {
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub q0: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularChart {
    pub x: f64,
}

impl Display for SingularChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p1 vanishes at x = {:e}", self.x)
    }
}

impl std::error::Error for SingularChart {}

impl NumericCherkas {
    /// (x, y) ↦ (x, z).
    pub fn forward(&self, x: f64, y: f64) -> Result<(f64, f64), SingularChart> {
        let p1 = horner(&self.p1, x);
        if p1.abs() < 1e-14 {
            return Err(SingularChart { x });
        }
        Ok((x, horner(&self.p0, x) + p1 * y))
    }

    /// (x, z) ↦ (x, y).
    pub fn inverse(&self, x: f64, z: f64) -> Result<(f64, f64), SingularChart> {
        let p1 = horner(&self.p1, x);
        if p1.abs() < 1e-14 {
            return Err(SingularChart { x });
        }
        Ok((x, (z - horner(&self.p0, x)) / p1))
    }
}

/// ẍ + f(x)ẋ² + g(x) = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LienardPair<K: Scalar> {
    pub params: Arc<Vars>,
    pub f: XRatFunc<K>,
    pub g: XRatFunc<K>,
}

/// I(x, v) = ½(v·e^{F})² + W(x).
#[derive(Clone, Debug, PartialEq)]
pub struct FirstIntegral<K: Scalar> {
    pub exp_f: XSeries<ParamPoly<K>>,
    pub w: XSeries<ParamPoly<K>>,
}

impl<K: Scalar> LienardPair<K> {
    pub fn new(f: XRatFunc<K>, g: XRatFunc<K>) -> Self {
        LienardPair { params: f.num.vars().clone(), f, g }
    }

    pub fn f_series(&self, order: usize) -> Result<XSeries<ParamPoly<K>>, SeriesError> {
        self.f.to_series(order)
    }

    pub fn g_series(&self, order: usize) -> Result<XSeries<ParamPoly<K>>, SeriesError> {
        self.g.to_series(order)
    }

    /// F = ∫₀ˣ f.
    pub fn big_f(&self, order: usize) -> Result<XSeries<ParamPoly<K>>, SeriesError> {
        Ok(self.f.to_series(order.max(1) - 1)?.integral())
    }

    pub fn exp_f(&self, order: usize) -> Result<XSeries<ParamPoly<K>>, SeriesError> {
        self.big_f(order)?.exp()
    }

    /// φ = ∫₀ˣ e^{F}.
    pub fn phi(&self, order: usize) -> Result<XSeries<ParamPoly<K>>, SeriesError> {
        Ok(self.exp_f(order.max(1) - 1)?.integral())
    }

    /// W = ∫₀ˣ g·e^{2F}.
    pub fn w_series(&self, order: usize) -> Result<XSeries<ParamPoly<K>>, SeriesError> {
        let n = order.max(1) - 1;
        let two_f = self.big_f(n)?.scale(&K::from_int(2));
        Ok(self.g_series(n)?.mul(&two_f.exp()?).integral())
    }

    pub fn first_integral_series(&self, order: usize) -> Result<FirstIntegral<K>, SeriesError> {
        Ok(FirstIntegral { exp_f: self.exp_f(order)?, w: self.w_series(order)? })
    }

    /// g(0) = 0 and g′(0) = 1.
    pub fn center_check(&self, tol: f64) -> bool {
        match self.g_series(1) {
            Ok(s) => {
                let one = ParamPoly::one(&self.params);
                s.coeff(0).negligible(tol) && (s.coeff(1) - &one).negligible(tol)
            }
            Err(_) => false,
        }
    }

    /// Numerator of g′ + f·g − 1 over the common denominator.
    pub fn zero_urabe_numerator(&self) -> XPoly<K> {
        let (nf, df) = (&self.f.num, &self.f.den);
        let (ng, dg) = (&self.g.num, &self.g.den);
        ng.derivative()
            .mul(dg)
            .sub(&ng.mul(&dg.derivative()))
            .mul(df)
            .add(&nf.mul(ng).mul(dg))
            .sub(&dg.mul(dg).mul(df))
    }

    /// Exact identity g′ + f·g = 1; float coefficients are compared against `tol`.
    pub fn zero_urabe_check(&self, tol: f64) -> bool {
        self.zero_urabe_numerator().negligible(tol)
    }

    pub fn map_params(&self, f: impl Fn(&ParamPoly<K>) -> ParamPoly<K>) -> Self {
        LienardPair::new(
            XRatFunc::new(self.f.num.map_params(&f), self.f.den.map_params(&f)),
            XRatFunc::new(self.g.num.map_params(&f), self.g.den.map_params(&f)),
        )
    }
}
