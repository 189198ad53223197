//! The rational C-algorithm, Urabe functions and the zero-Urabe identity.

use std::fmt::{self, Display};

use num_bigint::BigInt;

use crate::lienard::LienardPair;
use crate::order::MonomialOrder;
use crate::poly::{template_weights, ParamPoly};
use crate::scalar::{Rat, Scalar};
use crate::series::{Coeff, SeriesError, XSeries};

pub const DEFAULT_K: usize = 15;
pub const DEFAULT_N: usize = 44;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoError {
    /// g(0) = 0 and g′(0) = 1 required.
    NotNormalized,
    Truncation { k: usize, n: usize },
    Series(SeriesError),
}

impl Display for IsoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoError::NotNormalized => write!(f, "g(0) = 0 and g'(0) = 1 required"),
            IsoError::Truncation { k, n } => {
                write!(f, "series order {} too small for {} conditions (need {})", n, k, 2 * k + 4)
            }
            IsoError::Series(e) => write!(f, "series: {}", e),
        }
    }
}

impl std::error::Error for IsoError {}

impl From<SeriesError> for IsoError {
    fn from(e: SeriesError) -> Self {
        IsoError::Series(e)
    }
}

type PSeries<K> = XSeries<ParamPoly<K>>;

/// Necessary isochronicity conditions c_k = [ξ^{2k}] h.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionSet<K: Scalar> {
    /// Content-free conditions with positive weighted-grevlex leading coefficient.
    pub conditions: Vec<ParamPoly<K>>,
    /// Conditions exactly as they appear in h.
    pub raw: Vec<ParamPoly<K>>,
    pub k: usize,
    pub n: usize,
}

impl<K: Scalar> ConditionSet<K> {
    pub fn all_vanish(&self, tol: f64) -> bool {
        self.raw.iter().all(|c| c.negligible(tol))
    }

    /// Index (1-based) of the first nonvanishing condition.
    pub fn first_nonzero(&self, tol: f64) -> Option<usize> {
        self.raw.iter().position(|c| !c.negligible(tol)).map(|i| i + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UrabeSeries<K: Scalar> {
    pub h: PSeries<K>,
}

impl<K: Scalar> UrabeSeries<K> {
    pub fn odd_part(&self) -> PSeries<K> {
        self.h.odd_part()
    }

    pub fn even_part(&self) -> PSeries<K> {
        self.h.even_part()
    }

    /// Even coefficients c_1..c_K.
    pub fn conditions(&self, k: usize) -> Vec<ParamPoly<K>> {
        (1..=k).map(|i| self.h.coeff(2 * i).clone()).collect()
    }
}

fn check_normalized<K: Scalar>(lp: &LienardPair<K>, tol: f64) -> Result<(), IsoError> {
    if lp.center_check(tol) {
        Ok(())
    } else {
        Err(IsoError::NotNormalized)
    }
}

/// u = 2W/x², a unit series, to `order`.
fn unit_u<K: Scalar>(lp: &LienardPair<K>, order: usize) -> Result<PSeries<K>, IsoError> {
    let w = lp.w_series(order + 2)?;
    Ok(w.scale(&K::from_int(2)).shift_down(2)?)
}

/// ξ² = 2∫g·e^{2F} to `order`.
pub fn xi_squared<K: Scalar>(lp: &LienardPair<K>, order: usize) -> Result<PSeries<K>, IsoError> {
    Ok(lp.w_series(order)?.scale(&K::from_int(2)))
}

/// ξ(x) = x·√(2W/x²), odd-signed with x.
pub fn xi_series<K: Scalar>(lp: &LienardPair<K>, order: usize, tol: f64) -> Result<PSeries<K>, IsoError> {
    check_normalized(lp, tol)?;
    let u = unit_u(lp, order.max(1) - 1)?;
    let u = force_unit(u, tol);
    Ok(u.sqrt_unit()?.shift_up(1))
}

/// Float pipelines carry a constant term of 1 up to rounding; snap it so unit-only operations apply.
fn force_unit<K: Scalar>(u: PSeries<K>, tol: f64) -> PSeries<K> {
    if K::EXACT {
        return u;
    }
    let mut c = u.into_coeffs();
    if (c[0].clone() - &c[0].one_like()).negligible(tol) {
        c[0] = c[0].one_like();
    }
    XSeries::new(c)
}

/// Rational C-algorithm: c_k = [x^{2k}] e^{F}·u^{−(2k+1)/2}, by Lagrange inversion.
pub fn c_algorithm<K: Scalar>(lp: &LienardPair<K>, k: usize, n: usize, tol: f64) -> Result<ConditionSet<K>, IsoError> {
    if n < 2 * k + 4 {
        return Err(IsoError::Truncation { k, n });
    }
    check_normalized(lp, tol)?;
    let m = 2 * k;
    let ef = lp.exp_f(m)?;
    let u = force_unit(unit_u(lp, m)?, tol);
    let v = u.pow_unit(&Rat::new(BigInt::from(-1), BigInt::from(2)))?;
    let v2 = v.mul(&v);
    let mut q = ef.mul(&v);
    let mut raw = Vec::with_capacity(k);
    for _ in 1..=k {
        q = q.mul(&v2);
        raw.push(q.coeff(2 * raw.len() + 2).clone());
    }
    let order = MonomialOrder::WeightedGrevlex(template_weights(&lp.params));
    let conditions = raw.iter().map(|c| c.primitive(&order)).collect();
    Ok(ConditionSet { conditions, raw, k, n })
}

/// h = ψ′ − 1 with ψ(ξ) = φ(x(ξ)), through explicit reversion of ξ(x).
pub fn urabe_series<K: Scalar>(lp: &LienardPair<K>, n: usize, tol: f64) -> Result<UrabeSeries<K>, IsoError> {
    let xi = xi_series(lp, n + 1, tol)?;
    let x_of_xi = xi.reverse()?;
    let phi = lp.phi(n + 1)?;
    let psi = phi.compose(&x_of_xi)?;
    let mut h = psi.derivative().into_coeffs();
    h[0] = h[0].sub_c(&h[0].one_like());
    Ok(UrabeSeries { h: XSeries::new(h) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UrabeReport {
    pub passed: bool,
    pub order: usize,
    /// First power of x where the identity fails.
    pub first_failure: Option<usize>,
}

impl Display for UrabeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_failure {
            None => write!(f, "PASS to order {}", self.order),
            Some(k) => write!(f, "FAIL at order {} (checked to {})", k, self.order),
        }
    }
}

/// Checks ξ(x) = (1 + h(ξ(x)))·g(x)·e^{F(x)} as series in x to order `n`.
pub fn verify_urabe<K: Scalar>(lp: &LienardPair<K>, h: &PSeries<K>, n: usize, tol: f64) -> Result<UrabeReport, IsoError> {
    let xi = xi_series(lp, n, tol)?;
    let h = if h.order() < n { h.clone() } else { h.truncate(n) };
    let hx = h.compose(&xi)?;
    let one = XSeries::one(xi.proto(), n);
    let rhs = one.add(&hx).mul(&lp.g_series(n)?).mul(&lp.exp_f(n)?);
    let checked = rhs.order().min(xi.order());
    let first_failure = xi.first_difference(&rhs, tol);
    Ok(UrabeReport { passed: first_failure.is_none(), order: checked, first_failure })
}

/// Corollary identity g′ + f·g = 1.
pub fn zero_urabe_check<K: Scalar>(lp: &LienardPair<K>, tol: f64) -> bool {
    lp.zero_urabe_check(tol)
}

pub fn center_check<K: Scalar>(lp: &LienardPair<K>, tol: f64) -> bool {
    lp.center_check(tol)
}

/// Substitutes a homogenization scaling parameter ↦ λ^{weight}·parameter.
pub fn weighted_scaling<K: Scalar>(p: &ParamPoly<K>, lambda: &K) -> ParamPoly<K> {
    let w = template_weights(p.vars());
    let mut out = ParamPoly::zero(p.vars());
    for (m, c) in p.terms() {
        let mut k = c.clone();
        for (e, wi) in m.iter().zip(&w) {
            for _ in 0..(*e as u32 * wi) {
                k = k * lambda;
            }
        }
        out = &out + &ParamPoly::monomial(p.vars(), m, k);
    }
    out
}

/// h(0) = 0 and no even terms up to the truncation order.
pub fn is_odd<K: Scalar>(h: &PSeries<K>, tol: f64) -> bool {
    h.even_part().coeffs().iter().all(|c| c.negligible(tol)) && h.coeff(0).negligible(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lienard::{XPoly, XRatFunc};
    use crate::poly::Vars;
    use crate::scalar::rat;

    fn pair(f: &[i64], g: &[i64]) -> LienardPair<Rat> {
        let v = Vars::new::<&str>(&[]);
        let xp = |c: &[i64]| XPoly::from_coeffs(&v, c.iter().map(|&k| ParamPoly::constant(&v, rat(k, 1))).collect());
        LienardPair::new(XRatFunc::from_poly(xp(f)), XRatFunc::from_poly(xp(g)))
    }

    #[test]
    fn linear_center_is_trivial() {
        let lp = pair(&[], &[0, 1]);
        let xi = xi_series(&lp, 6, 0.0).unwrap();
        assert_eq!(xi, XSeries::var(&ParamPoly::zero(&lp.params), 6));
        let cs = c_algorithm(&lp, 3, 10, 0.0).unwrap();
        assert!(cs.all_vanish(0.0));
        let h = urabe_series(&lp, 8, 0.0).unwrap();
        assert!(h.h.is_zero());
        assert!(zero_urabe_check(&lp, 0.0));
    }

    #[test]
    fn quadratic_g_control() {
        let lp = pair(&[], &[0, 1, 1]);
        let x2 = xi_squared(&lp, 3).unwrap();
        assert_eq!(x2.coeff(2).as_constant(), Some(rat(1, 1)));
        assert_eq!(x2.coeff(3).as_constant(), Some(rat(2, 3)));
        let cs = c_algorithm(&lp, 2, 8, 0.0).unwrap();
        assert_eq!(cs.first_nonzero(0.0), Some(1));
        let h = urabe_series(&lp, 8, 0.0).unwrap();
        assert_eq!(h.conditions(2), cs.raw);
        assert!(!center_check(&pair(&[], &[0, -1]), 0.0));
    }

    #[test]
    fn truncation_guard() {
        let lp = pair(&[], &[0, 1]);
        assert_eq!(c_algorithm(&lp, 5, 10, 0.0), Err(IsoError::Truncation { k: 5, n: 10 }));
    }
}
