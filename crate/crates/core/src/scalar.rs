//! Coefficient fields: ℚ, ℚ(√d) and IEEE floats behind one trait.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

/// A field element usable as a polynomial or series coefficient.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    /// True for ℚ and ℚ(√d); floats compare against a tolerance instead.
    const EXACT: bool;

    fn from_rat(r: &Rat) -> Self;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rat(&Rat::new(BigInt::from(n), BigInt::from(d)))
    }

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn to_f64(&self) -> f64;

    /// Square root inside the field, if it exists.
    fn sqrt_checked(&self) -> Option<Self>;

    /// Exact sign (−1, 0, 1).
    fn signum_i(&self) -> i32;

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    /// Rational components used for content extraction; empty for floats.
    fn rational_parts(&self) -> Vec<Rat>;

    fn mul_rat(&self, r: &Rat) -> Self {
        self.clone() * Self::from_rat(r)
    }

    /// Zero test used by identity checks; exact fields ignore `tol`.
    fn negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64().abs() <= tol
        }
    }

    /// Value printed in the expression grammar.
    fn to_expr(&self) -> String {
        format!("{}", self)
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }

    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(Rat::new(n, d))
    }

    fn signum_i(&self) -> i32 {
        sign_of(self)
    }

    fn rational_parts(&self) -> Vec<Rat> {
        vec![self.clone()]
    }

    fn mul_rat(&self, r: &Rat) -> Self {
        self * r
    }
}

pub(crate) fn sign_of(r: &Rat) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Correctly scaled conversion that survives huge numerators and denominators.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 {
        (r.numer().clone(), r.denom().clone() << (shift as usize))
    } else {
        (r.numer().clone() << ((-shift) as usize), r.denom().clone())
    };
    let q = (n / d).to_f64().unwrap_or(0.0);
    q * 2f64.powi(shift as i32)
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Largest square divisor split: n = s²·f with f square-free, by trial division.
/// Adequate for the small radicands that appear in the fixtures.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= p;
        }
        p += 1;
    }
    f *= m;
    (s, f)
}

/// Error raised when two elements of different quadratic fields meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMismatch(pub u64, pub u64);

impl Display for FieldMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot combine elements of Q(sqrt({})) and Q(sqrt({}))", self.0, self.1)
    }
}

impl std::error::Error for FieldMismatch {}

/// a + b√d with d square-free; `d == 0` marks a plain rational that adapts to any field.
#[derive(Clone, Debug)]
pub struct QuadNum {
    pub a: Rat,
    pub b: Rat,
    pub d: u64,
}

impl QuadNum {
    pub fn rational(a: Rat) -> Self {
        QuadNum { a, b: Rat::zero(), d: 0 }
    }

    /// Builds a + b√n, pulling square factors out of n.
    pub fn new(a: Rat, b: Rat, n: u64) -> Self {
        let (s, f) = squarefree_split(n);
        let b = b * Rat::from_integer(BigInt::from(s));
        if f == 1 || b.is_zero() {
            let extra = if f == 1 { b } else { Rat::zero() };
            return QuadNum::rational(a + extra);
        }
        QuadNum { a, b, d: f }
    }

    /// √n as an element of ℚ(√n).
    pub fn sqrt_of(n: u64) -> Self {
        QuadNum::new(Rat::zero(), Rat::one(), n)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Field tag, 0 when the value is rational.
    pub fn field(&self) -> u64 {
        if self.b.is_zero() {
            0
        } else {
            self.d
        }
    }

    fn normalized(mut self) -> Self {
        if self.b.is_zero() {
            self.d = 0;
        }
        self
    }

    fn join(&self, o: &Self) -> Result<u64, FieldMismatch> {
        match (self.field(), o.field()) {
            (0, e) | (e, 0) => Ok(e),
            (e, f) if e == f => Ok(e),
            (e, f) => Err(FieldMismatch(e, f)),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, FieldMismatch> {
        let d = self.join(o)?;
        Ok(QuadNum { a: &self.a + &o.a, b: &self.b + &o.b, d }.normalized())
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, FieldMismatch> {
        let d = self.join(o)?;
        Ok(QuadNum { a: &self.a - &o.a, b: &self.b - &o.b, d }.normalized())
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, FieldMismatch> {
        let d = self.join(o)?;
        let dr = Rat::from_integer(BigInt::from(d));
        let a = &self.a * &o.a + &self.b * &o.b * dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(QuadNum { a, b, d }.normalized())
    }

    pub fn conj(&self) -> Self {
        QuadNum { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm a² − d b².
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(BigInt::from(self.d))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, FieldMismatch> {
        self.join(o)?;
        let n = o.norm();
        assert!(!n.is_zero(), "division by zero");
        let num = self.checked_mul(&o.conj())?;
        Ok(QuadNum { a: num.a / &n, b: num.b / &n, d: num.d }.normalized())
    }
}

impl PartialEq for QuadNum {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b && (self.b.is_zero() || self.d == o.d)
    }
}

impl Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let rad = if self.b.is_one() {
            format!("sqrt({})", self.d)
        } else if (-self.b.clone()).is_one() {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", self.b, self.d)
        };
        if self.a.is_zero() {
            write!(f, "{}", rad)
        } else if rad.starts_with('-') {
            write!(f, "({} - {})", self.a, &rad[1..])
        } else {
            write!(f, "({} + {})", self.a, rad)
        }
    }
}

impl Zero for QuadNum {
    fn zero() -> Self {
        QuadNum::rational(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadNum {
    fn one() -> Self {
        QuadNum::rational(Rat::one())
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -self.clone()
    }
}

macro_rules! quad_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr for QuadNum {
            type Output = QuadNum;
            fn $m(self, o: QuadNum) -> QuadNum {
                self.$checked(&o).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl<'a> $tr<&'a QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $m(self, o: &'a QuadNum) -> QuadNum {
                self.$checked(o).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl<'a, 'b> $tr<&'b QuadNum> for &'a QuadNum {
            type Output = QuadNum;
            fn $m(self, o: &'b QuadNum) -> QuadNum {
                self.$checked(o).unwrap_or_else(|e| panic!("{}", e))
            }
        }
    };
}

quad_binop!(Add, add, checked_add);
quad_binop!(Sub, sub, checked_sub);
quad_binop!(Mul, mul, checked_mul);
quad_binop!(Div, div, checked_div);

impl Scalar for QuadNum {
    const EXACT: bool = true;

    fn from_rat(r: &Rat) -> Self {
        QuadNum::rational(r.clone())
    }

    fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * (self.d as f64).sqrt()
    }

    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(QuadNum::zero());
        }
        if self.b.is_zero() {
            if let Some(r) = self.a.sqrt_checked() {
                return Some(QuadNum::rational(r));
            }
            if self.a.is_negative() {
                return None;
            }
            // a = p/q, √a = √(p q)/q
            let pq = self.a.numer() * self.a.denom();
            let pq = pq.to_u64()?;
            let (s, f) = squarefree_split(pq);
            let coeff = Rat::new(BigInt::from(s), self.a.denom().clone());
            return Some(QuadNum { a: Rat::zero(), b: coeff, d: f });
        }
        // (x + y√d)² = a + b√d  ⇒  x² = (a ± √(a² − d b²))/2
        let disc = self.norm().sqrt_checked()?;
        let two = Rat::from_integer(BigInt::from(2));
        let dr = Rat::from_integer(BigInt::from(self.d));
        for cand in [(&self.a + &disc) / &two, (&self.a - &disc) / &two] {
            if let Some(x) = cand.sqrt_checked() {
                if x.is_zero() {
                    if let Some(y) = (&self.a / &dr).sqrt_checked() {
                        let r = QuadNum { a: Rat::zero(), b: y, d: self.d };
                        if (&r * &r) == *self {
                            return Some(r);
                        }
                    }
                    continue;
                }
                let y = &self.b / (&two * &x);
                let r = QuadNum { a: x, b: y, d: self.d };
                if (&r * &r) == *self && r.signum_i() >= 0 {
                    return Some(r);
                }
                let r = -r;
                if (&r * &r) == *self && r.signum_i() >= 0 {
                    return Some(r);
                }
            }
        }
        None
    }

    fn signum_i(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        // opposite signs: compare a² with d b²
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rat::from_integer(BigInt::from(self.d));
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    fn rational_parts(&self) -> Vec<Rat> {
        vec![self.a.clone(), self.b.clone()]
    }

    fn mul_rat(&self, r: &Rat) -> Self {
        QuadNum { a: &self.a * r, b: &self.b * r, d: self.d }.normalized()
    }

    fn to_expr(&self) -> String {
        format!("{}", self)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rat(r: &Rat) -> Self {
                rat_to_f64(r) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn sqrt_checked(&self) -> Option<Self> {
                if *self < 0.0 {
                    None
                } else {
                    Some(self.sqrt())
                }
            }

            fn signum_i(&self) -> i32 {
                if *self > 0.0 {
                    1
                } else if *self < 0.0 {
                    -1
                } else {
                    0
                }
            }

            fn rational_parts(&self) -> Vec<Rat> {
                Vec::new()
            }

            fn to_expr(&self) -> String {
                format!("{:e}", self)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Lift of a rational into any scalar field.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Positive gcd of a list of rationals: gcd of numerators over lcm of denominators.
pub fn rat_content(xs: &[Rat]) -> Rat {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for x in xs {
        if x.is_zero() {
            continue;
        }
        num = num.gcd(x.numer());
        den = den.lcm(x.denom());
    }
    if num.is_zero() {
        Rat::one()
    } else {
        Rat::new(num, den)
    }
}
