//! Sparse multivariate polynomials in named parameters.

use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::order::{weighted_deg, MonomialOrder};
use crate::scalar::{rat_content, Rat, Scalar};

/// Exponent vector, one entry per registered variable.
pub type Mono = SmallVec<[u16; 16]>;

/// Ordered list of parameter symbols shared by every polynomial of a computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vars {
    names: Vec<String>,
}

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Arc<Vars> {
        Arc::new(Vars { names: names.iter().map(|s| s.as_ref().to_string()).collect() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Registry with one more symbol appended.
    pub fn with(&self, name: &str) -> Arc<Vars> {
        let mut names = self.names.clone();
        names.push(name.to_string());
        Arc::new(Vars { names })
    }
}

/// Error for operations on polynomials with different variable registries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistryMismatch;

impl Display for RegistryMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "variable registry mismatch")
    }
}

impl std::error::Error for RegistryMismatch {}

/// Failure modes of [`ParamPoly::weighted_degree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightedDegreeError {
    ZeroPolynomial,
    NotHomogeneous { low: u64, high: u64 },
    BadWeights,
}

/// Polynomial in the registered parameters with coefficients in `K`.
#[derive(Clone, Debug)]
pub struct ParamPoly<K> {
    vars: Arc<Vars>,
    terms: BTreeMap<Mono, K>,
}

impl<K: Scalar> PartialEq for ParamPoly<K> {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.vars, &o.vars) || self.vars == o.vars) && self.terms == o.terms
    }
}

fn zero_mono(n: usize) -> Mono {
    SmallVec::from_elem(0, n)
}

impl<K: Scalar> ParamPoly<K> {
    pub fn zero(vars: &Arc<Vars>) -> Self {
        ParamPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Arc<Vars>) -> Self {
        Self::constant(vars, K::one())
    }

    pub fn constant(vars: &Arc<Vars>, k: K) -> Self {
        let mut p = Self::zero(vars);
        if !k.is_zero() {
            p.terms.insert(zero_mono(vars.len()), k);
        }
        p
    }

    pub fn var(vars: &Arc<Vars>, i: usize) -> Self {
        let mut m = zero_mono(vars.len());
        m[i] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(m, K::one());
        p
    }

    pub fn var_named(vars: &Arc<Vars>, name: &str) -> Option<Self> {
        vars.index(name).map(|i| Self::var(vars, i))
    }

    pub fn monomial(vars: &Arc<Vars>, exps: &[u16], k: K) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !k.is_zero() {
            p.terms.insert(exps.iter().copied().collect(), k);
        }
        p
    }

    pub fn from_terms(vars: &Arc<Vars>, terms: impl IntoIterator<Item = (Mono, K)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, k) in terms {
            assert_eq!(m.len(), vars.len());
            p.add_term(m, k);
        }
        p
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Mono, K> {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|k| k.is_one()).unwrap_or(false)
    }

    pub fn same_registry(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.vars, &o.vars) || self.vars == o.vars
    }

    /// Coefficient of the monomial 1.
    pub fn constant_term(&self) -> K {
        self.terms.get(&zero_mono(self.nvars())).cloned().unwrap_or_else(K::zero)
    }

    /// The scalar value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<K> {
        match self.terms.len() {
            0 => Some(K::zero()),
            1 => {
                let (m, k) = self.terms.iter().next().unwrap();
                if m.iter().all(|&e| e == 0) {
                    Some(k.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn coeff(&self, m: &[u16]) -> K {
        self.terms.get(m).cloned().unwrap_or_else(K::zero)
    }

    fn add_term(&mut self, m: Mono, k: K) {
        if k.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                let s = c.clone() + k;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(m, k);
            }
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, RegistryMismatch> {
        if !self.same_registry(o) {
            return Err(RegistryMismatch);
        }
        let (mut big, small) = if self.terms.len() >= o.terms.len() { (self.clone(), o) } else { (o.clone(), self) };
        for (m, k) in &small.terms {
            big.add_term(m.clone(), k.clone());
        }
        Ok(big)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, RegistryMismatch> {
        if !self.same_registry(o) {
            return Err(RegistryMismatch);
        }
        let mut r = self.clone();
        for (m, k) in &o.terms {
            r.add_term(m.clone(), -k.clone());
        }
        Ok(r)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, RegistryMismatch> {
        if !self.same_registry(o) {
            return Err(RegistryMismatch);
        }
        let mut r = Self::zero(&self.vars);
        if self.is_zero() || o.is_zero() {
            return Ok(r);
        }
        for (ma, ka) in &self.terms {
            for (mb, kb) in &o.terms {
                let m: Mono = ma.iter().zip(mb.iter()).map(|(a, b)| a + b).collect();
                r.add_term(m, ka.clone() * kb);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, k: &K) -> Self {
        if k.is_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * k)).filter(|(_, c)| !c.is_zero()).collect();
        ParamPoly { vars: self.vars.clone(), terms }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.mul_rat(r))).collect();
        ParamPoly { vars: self.vars.clone(), terms }
    }

    /// Exact division by a nonzero scalar.
    pub fn div_scalar(&self, k: &K) -> Option<Self> {
        let inv = k.inv()?;
        Some(self.scale(&inv))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u64).sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    /// Common weighted degree of every term.
    pub fn weighted_degree(&self, w: &[u32]) -> Result<u64, WeightedDegreeError> {
        if w.len() != self.nvars() || w.contains(&0) {
            return Err(WeightedDegreeError::BadWeights);
        }
        let mut it = self.terms.keys().map(|m| weighted_deg(m, w));
        let first = it.next().ok_or(WeightedDegreeError::ZeroPolynomial)?;
        let (mut lo, mut hi) = (first, first);
        for d in it {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo == hi {
            Ok(lo)
        } else {
            Err(WeightedDegreeError::NotHomogeneous { low: lo, high: hi })
        }
    }

    /// Terms sorted from the largest monomial down.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(&Mono, &K)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Mono, &K)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn leading_coeff(&self, order: &MonomialOrder) -> Option<K> {
        self.leading_term(order).map(|(_, k)| k.clone())
    }

    pub fn monic(&self, order: &MonomialOrder) -> Self {
        match self.leading_coeff(order) {
            Some(lc) => self.div_scalar(&lc).expect("nonzero leading coefficient"),
            None => self.clone(),
        }
    }

    /// Content-free form with a positive leading coefficient under `order`.
    /// Floats and irrational contents only get the sign fixed.
    pub fn primitive(&self, order: &MonomialOrder) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut parts = Vec::new();
        let mut exact = K::EXACT;
        for k in self.terms.values() {
            let p = k.rational_parts();
            if p.is_empty() {
                exact = false;
            }
            parts.extend(p);
        }
        let mut r = if exact {
            let c = rat_content(&parts);
            self.scale_rat(&(Rat::one() / c))
        } else {
            self.clone()
        };
        if r.leading_coeff(order).map(|k| k.signum_i() < 0).unwrap_or(false) {
            r = -r;
        }
        r
    }

    pub fn eval(&self, vals: &[K]) -> K {
        assert_eq!(vals.len(), self.nvars());
        let mut acc = K::zero();
        for (m, k) in &self.terms {
            let mut t = k.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t * &vals[i];
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes polynomial values for the listed variables.
    pub fn subs(&self, assignments: &[(usize, Self)]) -> Self {
        let mut r = Self::zero(&self.vars);
        let mut powcache: Vec<Vec<Self>> = assignments.iter().map(|(_, v)| vec![Self::one(&self.vars), v.clone()]).collect();
        for (m, k) in &self.terms {
            let mut mono = m.clone();
            let mut t = Self::zero(&self.vars);
            for (i, _) in assignments {
                mono[*i] = 0;
            }
            t.terms.insert(mono, k.clone());
            for (j, (i, _)) in assignments.iter().enumerate() {
                let e = m[*i] as usize;
                while powcache[j].len() <= e {
                    let next = powcache[j].last().unwrap() * &assignments[j].1;
                    powcache[j].push(next);
                }
                if e > 0 {
                    t = &t * &powcache[j][e];
                }
            }
            r = &r + &t;
        }
        r
    }

    /// Substitutes scalar values for the listed variables.
    pub fn subs_scalar(&self, assignments: &[(usize, K)]) -> Self {
        let a: Vec<(usize, Self)> = assignments.iter().map(|(i, k)| (*i, Self::constant(&self.vars, k.clone()))).collect();
        self.subs(&a)
    }

    /// Rewrites into a different registry by symbol name; unknown symbols must have zero exponent.
    pub fn to_registry(&self, target: &Arc<Vars>) -> Option<Self> {
        let map: Vec<Option<usize>> = self.vars.names().iter().map(|n| target.index(n)).collect();
        let mut r = Self::zero(target);
        for (m, k) in &self.terms {
            let mut nm = zero_mono(target.len());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                nm[map[i]?] = e;
            }
            r.add_term(nm, k.clone());
        }
        Some(r)
    }

    pub fn map_coeffs<L: Scalar>(&self, f: impl Fn(&K) -> L) -> ParamPoly<L> {
        let mut r = ParamPoly::<L>::zero(&self.vars);
        for (m, k) in &self.terms {
            r.add_term(m.clone(), f(k));
        }
        r
    }

    /// Partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars);
        for (m, k) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm[i] -= 1;
            r.add_term(nm, k.clone() * K::from_int(m[i] as i64));
        }
        r
    }

    /// Prints the polynomial in the expression grammar, largest grevlex term first.
    pub fn to_expr(&self) -> String {
        format!("{}", self)
    }

    /// Like `to_expr`, with terms listed in decreasing `order`.
    pub fn to_expr_in(&self, order: &MonomialOrder) -> String {
        struct Sorted<'a, K: Scalar>(&'a ParamPoly<K>, &'a MonomialOrder);
        impl<K: Scalar> Display for Sorted<'_, K> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let names = self.0.vars.names();
                let terms: Vec<(String, K)> =
                    self.0.sorted_terms(self.1).into_iter().map(|(m, k)| (fmt_mono(names, m), k.clone())).collect();
                fmt_sum(f, &terms)
            }
        }
        Sorted(self, order).to_string()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|k| k.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|k| k.negligible(tol))
    }
}

pub(crate) fn fmt_mono(names: &[String], m: &[u16]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Writes `terms` (already sorted) as a signed sum.
pub(crate) fn fmt_sum<K: Scalar>(f: &mut fmt::Formatter<'_>, terms: &[(String, K)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (idx, (mono, k)) in terms.iter().enumerate() {
        let neg = k.signum_i() < 0 && !k.to_expr().starts_with('(');
        let mag = if neg { -k.clone() } else { k.clone() };
        let body = if mono.is_empty() {
            mag.to_expr()
        } else if mag.is_one() {
            mono.clone()
        } else {
            format!("{}*{}", mag.to_expr(), mono)
        };
        if idx == 0 {
            if neg {
                write!(f, "-{}", body)?;
            } else {
                write!(f, "{}", body)?;
            }
        } else if neg {
            write!(f, " - {}", body)?;
        } else {
            write!(f, " + {}", body)?;
        }
    }
    Ok(())
}

impl<K: Scalar> Display for ParamPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, K)> = self
            .sorted_terms(&MonomialOrder::Grevlex)
            .into_iter()
            .map(|(m, k)| (fmt_mono(self.vars.names(), m), k.clone()))
            .collect();
        fmt_sum(f, &terms)
    }
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a, 'b, K: Scalar> $tr<&'b ParamPoly<K>> for &'a ParamPoly<K> {
            type Output = ParamPoly<K>;
            fn $m(self, o: &'b ParamPoly<K>) -> ParamPoly<K> {
                self.$checked(o).expect("variable registry mismatch")
            }
        }
        impl<K: Scalar> $tr for ParamPoly<K> {
            type Output = ParamPoly<K>;
            fn $m(self, o: ParamPoly<K>) -> ParamPoly<K> {
                self.$checked(&o).expect("variable registry mismatch")
            }
        }
        impl<'b, K: Scalar> $tr<&'b ParamPoly<K>> for ParamPoly<K> {
            type Output = ParamPoly<K>;
            fn $m(self, o: &'b ParamPoly<K>) -> ParamPoly<K> {
                self.$checked(o).expect("variable registry mismatch")
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl<K: Scalar> Neg for ParamPoly<K> {
    type Output = ParamPoly<K>;
    fn neg(mut self) -> ParamPoly<K> {
        for k in self.terms.values_mut() {
            *k = -k.clone();
        }
        self
    }
}

impl<K: Scalar> Neg for &ParamPoly<K> {
    type Output = ParamPoly<K>;
    fn neg(self) -> ParamPoly<K> {
        -self.clone()
    }
}

/// Weight i+j−1 for symbols named `a<i><j>` / `b<i><j>` (also `a_{i,j}` style), 1 otherwise.
pub fn template_weight(name: &str) -> u32 {
    let digits: Vec<u32> = name.chars().filter_map(|c| c.to_digit(10)).collect();
    let starts = name.starts_with('a') || name.starts_with('b');
    if starts && digits.len() == 2 {
        let w = digits[0] as i64 + digits[1] as i64 - 1;
        if w >= 1 {
            return w as u32;
        }
    }
    1
}

pub fn template_weights(vars: &Vars) -> Vec<u32> {
    vars.names().iter().map(|n| template_weight(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    type P = ParamPoly<Rat>;

    #[test]
    fn difference_of_squares() {
        let v = Vars::new(&["x", "y"]);
        let x = P::var(&v, 0);
        let y = P::var(&v, 1);
        let lhs = &(&x + &y) * &(&x - &y);
        let rhs = &(&x * &x) - &(&y * &y);
        assert_eq!(lhs, rhs);
        assert!((&lhs * &P::zero(&v)).is_zero());
    }

    #[test]
    fn registry_mismatch_detected() {
        let v = Vars::new(&["x"]);
        let w = Vars::new(&["y"]);
        assert_eq!(P::var(&v, 0).checked_add(&P::var(&w, 0)), Err(RegistryMismatch));
    }

    #[test]
    fn weighted_degree_rule() {
        let v = Vars::new(&["a20", "b11"]);
        let w = template_weights(&v);
        assert_eq!(w, vec![1, 1]);
        let a = P::var(&v, 0);
        let b = P::var(&v, 1);
        assert_eq!((&a * &b).weighted_degree(&w), Ok(2));
        assert_eq!(P::one(&v).weighted_degree(&w), Ok(0));
        assert!(matches!((&a + &(&b * &b)).weighted_degree(&w), Err(WeightedDegreeError::NotHomogeneous { .. })));
        assert_eq!(P::zero(&v).weighted_degree(&w), Err(WeightedDegreeError::ZeroPolynomial));
    }

    #[test]
    fn display_is_grevlex_sorted() {
        let v = Vars::new(&["x", "y"]);
        let x = P::var(&v, 0);
        let y = P::var(&v, 1);
        let p = &(&(&x * &x) - &y) + &P::constant(&v, rat(-3, 2));
        assert_eq!(p.to_string(), "x^2 - y - 3/2");
    }

    #[test]
    fn substitution() {
        let v = Vars::new(&["x", "y"]);
        let x = P::var(&v, 0);
        let y = P::var(&v, 1);
        let p = &(&x * &x) + &y;
        let q = p.subs(&[(0, &y + &P::one(&v))]);
        let expect = &(&(&y * &y) + &y.scale(&rat(3, 1))) + &P::one(&v);
        assert_eq!(q, expect);
    }

    #[test]
    fn primitive_form() {
        let v = Vars::new(&["x"]);
        let x = P::var(&v, 0);
        let p = &x.scale(&rat(-4, 3)) + &P::constant(&v, rat(2, 9));
        let q = p.primitive(&MonomialOrder::Grevlex);
        assert_eq!(q.to_string(), "6*x - 1");
    }
}
