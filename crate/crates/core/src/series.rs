//! Dense truncated power series in one formal variable.

use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::ParamPoly;
use crate::scalar::{QuadNum, Rat, Scalar};

/// Ring of series coefficients: a scalar field or parameter polynomials over one.
pub trait Coeff: Clone + PartialEq + Debug + Display + Send + Sync {
    type Field: Scalar;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn lift(&self, k: Self::Field) -> Self;
    fn is_zero_c(&self) -> bool;
    fn add_c(&self, o: &Self) -> Self;
    fn sub_c(&self, o: &Self) -> Self;
    fn mul_c(&self, o: &Self) -> Self;
    fn neg_c(&self) -> Self;
    fn scale_c(&self, k: &Self::Field) -> Self;
    /// Scalar value of a constant coefficient.
    fn as_field(&self) -> Option<Self::Field>;
    fn negligible_c(&self, tol: f64) -> bool;
    /// Largest absolute coefficient as a float.
    fn magnitude(&self) -> f64;
}

macro_rules! scalar_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            type Field = $t;
            fn zero_like(&self) -> Self {
                <$t>::zero()
            }
            fn one_like(&self) -> Self {
                <$t>::one()
            }
            fn lift(&self, k: $t) -> Self {
                k
            }
            fn is_zero_c(&self) -> bool {
                self.is_zero()
            }
            fn add_c(&self, o: &Self) -> Self {
                self.clone() + o
            }
            fn sub_c(&self, o: &Self) -> Self {
                self.clone() - o
            }
            fn mul_c(&self, o: &Self) -> Self {
                self.clone() * o
            }
            fn neg_c(&self) -> Self {
                -self.clone()
            }
            fn scale_c(&self, k: &$t) -> Self {
                self.clone() * k
            }
            fn as_field(&self) -> Option<$t> {
                Some(self.clone())
            }
            fn negligible_c(&self, tol: f64) -> bool {
                self.negligible(tol)
            }
            fn magnitude(&self) -> f64 {
                self.to_f64().abs()
            }
        }
    };
}

scalar_coeff!(Rat);
scalar_coeff!(QuadNum);
scalar_coeff!(f64);
scalar_coeff!(f32);

impl<K: Scalar> Coeff for ParamPoly<K> {
    type Field = K;
    fn zero_like(&self) -> Self {
        ParamPoly::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        ParamPoly::one(self.vars())
    }
    fn lift(&self, k: K) -> Self {
        ParamPoly::constant(self.vars(), k)
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_c(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn scale_c(&self, k: &K) -> Self {
        self.scale(k)
    }
    fn as_field(&self) -> Option<K> {
        self.as_constant()
    }
    fn negligible_c(&self, tol: f64) -> bool {
        self.negligible(tol)
    }
    fn magnitude(&self) -> f64 {
        self.max_abs_coeff()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    /// Operation needs a zero constant term.
    NonzeroConstant,
    /// Operation needs a constant term equal to one.
    NotUnit,
    /// Reversion needs s(0) = 0 and s′(0) = 1.
    BadNormalization,
    /// Leading coefficient is not an invertible scalar.
    NotInvertible,
    /// Square root of the constant term is not in the field.
    NoRoot,
    /// Quotient would have a pole.
    Pole,
    /// Requested more coefficients than the data supports.
    Truncation { needed: usize, available: usize },
}

impl Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::NonzeroConstant => write!(f, "series must have zero constant term"),
            SeriesError::NotUnit => write!(f, "series must have constant term 1"),
            SeriesError::BadNormalization => write!(f, "reversion needs s(0)=0 and s'(0)=1"),
            SeriesError::NotInvertible => write!(f, "leading coefficient is not an invertible scalar"),
            SeriesError::NoRoot => write!(f, "constant term has no square root in the field"),
            SeriesError::Pole => write!(f, "quotient has a pole at 0"),
            SeriesError::Truncation { needed, available } => {
                write!(f, "truncation order {} insufficient, {} needed", available, needed)
            }
        }
    }
}

impl std::error::Error for SeriesError {}

/// c₀ + c₁t + … + c_N t^N + O(t^{N+1}).
#[derive(Clone, Debug, PartialEq)]
pub struct XSeries<C: Coeff> {
    c: Vec<C>,
}

fn field_ratio<F: Scalar>(n: i64, d: i64) -> F {
    F::from_ratio(n, d)
}

impl<C: Coeff> XSeries<C> {
    /// Series from its first coefficients; the truncation order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        XSeries { c: coeffs }
    }

    pub fn zero(proto: &C, order: usize) -> Self {
        XSeries { c: vec![proto.zero_like(); order + 1] }
    }

    pub fn constant(k: C, order: usize) -> Self {
        let mut s = Self::zero(&k, order);
        s.c[0] = k;
        s
    }

    pub fn one(proto: &C, order: usize) -> Self {
        Self::constant(proto.one_like(), order)
    }

    /// The formal variable itself.
    pub fn var(proto: &C, order: usize) -> Self {
        let mut s = Self::zero(proto, order);
        if order >= 1 {
            s.c[1] = proto.one_like();
        }
        s
    }

    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.c
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.c[k]
    }

    pub fn proto(&self) -> &C {
        &self.c[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        XSeries { c: self.c[..=n].to_vec() }
    }

    /// Index of the first nonzero coefficient, `None` if all known ones vanish.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero_c())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        XSeries { c: (0..=n).map(|k| self.c[k].add_c(&o.c[k])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        XSeries { c: (0..=n).map(|k| self.c[k].sub_c(&o.c[k])).collect() }
    }

    pub fn neg(&self) -> Self {
        XSeries { c: self.c.iter().map(|x| x.neg_c()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let va = self.valuation().unwrap_or(n + 1);
        let vb = o.valuation().unwrap_or(n + 1);
        let mut out = vec![self.c[0].zero_like(); n + 1];
        for i in va..=n {
            if self.c[i].is_zero_c() {
                continue;
            }
            for j in vb..=(n - i) {
                if o.c[j].is_zero_c() {
                    continue;
                }
                out[i + j] = out[i + j].add_c(&self.c[i].mul_c(&o.c[j]));
            }
        }
        XSeries { c: out }
    }

    pub fn scale(&self, k: &C::Field) -> Self {
        XSeries { c: self.c.iter().map(|x| x.scale_c(k)).collect() }
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        XSeries { c: self.c.iter().map(|x| x.mul_c(k)).collect() }
    }

    /// Multiplication by t^v; the order grows by v since the new low terms are exact zeros.
    pub fn shift_up(&self, v: usize) -> Self {
        let mut c = vec![self.c[0].zero_like(); v];
        c.extend(self.c.iter().cloned());
        XSeries { c }
    }

    /// Division by t^v, which must divide the series exactly.
    pub fn shift_down(&self, v: usize) -> Result<Self, SeriesError> {
        if v > self.order() {
            return Err(SeriesError::Truncation { needed: v, available: self.order() });
        }
        if self.c[..v].iter().any(|x| !x.is_zero_c()) {
            return Err(SeriesError::Pole);
        }
        Ok(XSeries { c: self.c[v..].to_vec() })
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return XSeries { c: vec![self.c[0].zero_like()] };
        }
        XSeries {
            c: (1..=self.order()).map(|k| self.c[k].scale_c(&C::Field::from_int(k as i64))).collect(),
        }
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Self {
        let mut c = vec![self.c[0].zero_like()];
        for k in 0..=self.order() {
            c.push(self.c[k].scale_c(&field_ratio(1, k as i64 + 1)));
        }
        XSeries { c }
    }

    fn unit_scalar(&self) -> Result<C::Field, SeriesError> {
        let c0 = self.c[0].as_field().ok_or(SeriesError::NotInvertible)?;
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        Ok(c0)
    }

    /// Multiplicative inverse; the constant term must be an invertible scalar.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = self.unit_scalar()?;
        let inv0 = c0.inv().ok_or(SeriesError::NotInvertible)?;
        let n = self.order();
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        out.push(self.c[0].lift(inv0.clone()));
        for k in 1..=n {
            let mut acc = self.c[0].zero_like();
            for j in 1..=k {
                if self.c[j].is_zero_c() {
                    continue;
                }
                acc = acc.add_c(&self.c[j].mul_c(&out[k - j]));
            }
            out.push(acc.neg_c().scale_c(&inv0));
        }
        Ok(XSeries { c: out })
    }

    /// Quotient; common powers of t are cancelled first.
    pub fn div(&self, o: &Self) -> Result<Self, SeriesError> {
        let v = o.valuation().ok_or(SeriesError::NotInvertible)?;
        let num = self.shift_down(v)?;
        let den = o.shift_down(v)?;
        Ok(num.mul(&den.inverse()?))
    }

    /// exp(s) for s(0) = 0.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.c[0].is_zero_c() {
            return Err(SeriesError::NonzeroConstant);
        }
        let n = self.order();
        let mut e: Vec<C> = vec![self.c[0].one_like()];
        for k in 1..=n {
            let mut acc = self.c[0].zero_like();
            for j in 1..=k {
                if self.c[j].is_zero_c() {
                    continue;
                }
                acc = acc.add_c(&self.c[j].mul_c(&e[k - j]).scale_c(&C::Field::from_int(j as i64)));
            }
            e.push(acc.scale_c(&field_ratio(1, k as i64)));
        }
        Ok(XSeries { c: e })
    }

    /// log(s) = ∫ s′/s for s(0) = 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        match self.c[0].as_field() {
            Some(c0) if c0.is_one() => {}
            _ => return Err(SeriesError::NotUnit),
        }
        if self.order() == 0 {
            return Ok(Self::zero(self.proto(), 0));
        }
        Ok(self.derivative().mul(&self.truncate(self.order() - 1).inverse()?).integral())
    }

    /// s^α for s(0) = 1 by the J.C.P. Miller recurrence.
    pub fn pow_unit(&self, alpha: &Rat) -> Result<Self, SeriesError> {
        match self.c[0].as_field() {
            Some(c0) if c0.is_one() => {}
            _ => return Err(SeriesError::NotUnit),
        }
        let n = self.order();
        let al = C::Field::from_rat(alpha);
        let mut v: Vec<C> = vec![self.c[0].one_like()];
        for k in 1..=n {
            let mut acc = self.c[0].zero_like();
            for j in 1..=k {
                if self.c[j].is_zero_c() {
                    continue;
                }
                // α·j − (k − j)
                let w = al.clone() * C::Field::from_int(j as i64) - C::Field::from_int((k - j) as i64);
                if w.is_zero() {
                    continue;
                }
                acc = acc.add_c(&self.c[j].mul_c(&v[k - j]).scale_c(&w));
            }
            v.push(acc.scale_c(&field_ratio(1, k as i64)));
        }
        Ok(XSeries { c: v })
    }

    /// √s for s(0) = 1, coefficients stay in the base field.
    pub fn sqrt_unit(&self) -> Result<Self, SeriesError> {
        self.pow_unit(&Rat::new(BigInt::from(1), BigInt::from(2)))
    }

    /// √s for a constant term with a square root in the field.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        let c0 = self.unit_scalar()?;
        let r = c0.sqrt_checked().ok_or(SeriesError::NoRoot)?;
        let inv = c0.inv().ok_or(SeriesError::NotInvertible)?;
        Ok(self.scale(&inv).sqrt_unit()?.scale(&r))
    }

    /// Integer power, negative exponents through the inverse.
    pub fn powi(&self, e: i64) -> Result<Self, SeriesError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(self.proto(), self.order());
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// s(r(t)) for r(0) = 0.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.c[0].is_zero_c() {
            return Err(SeriesError::NonzeroConstant);
        }
        let m = inner.order();
        let n = match inner.valuation() {
            Some(v) => m.min((self.order() + 1) * v - 1),
            None => m,
        };
        let r = inner.truncate(n);
        let top = self.order().min(n);
        let mut acc = Self::constant(self.c[top].clone(), n);
        for k in (0..top).rev() {
            acc = acc.mul(&r);
            acc.c[0] = acc.c[0].add_c(&self.c[k]);
        }
        Ok(acc)
    }

    /// Compositional inverse r with s(r(w)) = w, by Newton iteration with doubling precision.
    /// A non-unit linear coefficient is scaled out first.
    pub fn reverse(&self) -> Result<Self, SeriesError> {
        let n = self.order();
        if n < 1 || !self.c[0].is_zero_c() {
            return Err(SeriesError::BadNormalization);
        }
        let c1 = match self.c[1].as_field() {
            Some(c1) if !c1.is_zero() => c1,
            _ => return Err(SeriesError::BadNormalization),
        };
        if !c1.is_one() {
            let inv = c1.inv().ok_or(SeriesError::NotInvertible)?;
            let r = self.scale(&inv).reverse()?;
            let mut pw = inv.clone();
            let mut c = r.c;
            for k in c.iter_mut().skip(1) {
                *k = k.scale_c(&pw);
                pw = pw * &inv;
            }
            return Ok(XSeries { c });
        }
        let proto = self.c[0].clone();
        let mut r = Self::var(&proto, 1);
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            let s = self.truncate(prec);
            let r_ext = r.extend(prec);
            let w = Self::var(&proto, prec);
            let resid = s.compose(&r_ext)?.sub(&w);
            let ds = s.derivative().compose(&r_ext)?;
            let ds = if ds.order() < prec { ds.extend(prec) } else { ds };
            r = r_ext.sub(&resid.mul(&ds.inverse()?));
        }
        Ok(r.extend(n).truncate(n))
    }

    /// Pads with zeros up to `order`; only sound when the padded terms are known to vanish
    /// or are about to be recomputed.
    pub fn extend(&self, order: usize) -> Self {
        let mut c = self.c.clone();
        while c.len() < order + 1 {
            c.push(self.c[0].zero_like());
        }
        XSeries { c }
    }

    /// Odd part s(t) − s(−t) over 2.
    pub fn odd_part(&self) -> Self {
        XSeries {
            c: self.c.iter().enumerate().map(|(k, x)| if k % 2 == 1 { x.clone() } else { x.zero_like() }).collect(),
        }
    }

    pub fn even_part(&self) -> Self {
        XSeries {
            c: self.c.iter().enumerate().map(|(k, x)| if k % 2 == 0 { x.clone() } else { x.zero_like() }).collect(),
        }
    }

    /// First index where two series differ, up to the smaller order.
    /// `tol` is relative to the larger coefficient magnitude, floored at 1.
    pub fn first_difference(&self, o: &Self, tol: f64) -> Option<usize> {
        let n = self.order().min(o.order());
        (0..=n).find(|&k| {
            let scale = self.c[k].magnitude().max(o.c[k].magnitude()).max(1.0);
            !self.c[k].sub_c(&o.c[k]).negligible_c(tol * scale)
        })
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> XSeries<D> {
        XSeries { c: self.c.iter().map(f).collect() }
    }

    /// Float coefficients, when every coefficient is a scalar.
    pub fn to_f64(&self) -> Option<Vec<f64>> {
        self.c.iter().map(|x| x.as_field().map(|k| k.to_f64())).collect()
    }
}

/// Lambert W series Σ (−n)^{n−1} zⁿ / n! composed with `z`.
pub fn lambert_w<C: Coeff>(z: &XSeries<C>) -> Result<XSeries<C>, SeriesError> {
    let n = z.order();
    let mut w: Vec<C> = vec![z.proto().zero_like()];
    let mut fact = BigInt::one();
    for k in 1..=n {
        fact *= BigInt::from(k);
        let num = BigInt::from(-(k as i64)).pow(k as u32 - 1);
        let r = Rat::new(num, fact.clone());
        w.push(z.proto().lift(C::Field::from_rat(&r)));
    }
    XSeries::new(w).compose(z)
}

impl<C: Coeff> Display for XSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, x) in self.c.iter().enumerate() {
            if x.is_zero_c() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({})", x)?,
                1 => write!(f, "({})*t", x)?,
                _ => write!(f, "({})*t^{}", x, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}
