//! Linearizing coordinates q = ∫e^{F}, p = ẋ·e^{F} and the potential U(q).

use std::fmt::{self, Display};

use crate::lienard::{horner, CherkasSystem, LienardPair, PlanarPoly};
use crate::poly::ParamPoly;
use crate::scalar::Scalar;
use crate::series::{Coeff, SeriesError, XSeries};

type PSeries<K> = XSeries<ParamPoly<K>>;

/// Largest |x| accepted by the quadrature evaluators.
pub const QUAD_RADIUS: f64 = 0.5;
/// Largest |q| at which the potential series is evaluated.
pub const POTENTIAL_RADIUS: f64 = 0.3;
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum LinError {
    Series(SeriesError),
    /// The denominator p1 vanishes on [0, x].
    Singular { x: f64 },
    OutOfRange { x: f64, limit: f64 },
    Quadrature { a: f64, b: f64 },
    ParamCount { expected: usize, got: usize },
}

impl Display for LinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinError::Series(e) => write!(f, "series: {}", e),
            LinError::Singular { x } => write!(f, "p1 vanishes near x = {:e}", x),
            LinError::OutOfRange { x, limit } => write!(f, "|{}| exceeds {}", x, limit),
            LinError::Quadrature { a, b } => write!(f, "quadrature did not converge on [{:e}, {:e}]", a, b),
            LinError::ParamCount { expected, got } => write!(f, "expected {} parameter values, got {}", expected, got),
        }
    }
}

impl std::error::Error for LinError {}

impl From<SeriesError> for LinError {
    fn from(e: SeriesError) -> Self {
        LinError::Series(e)
    }
}

/// (p, q) with p(x, y) = z(x, y)·e^{F(x)} and q(x) = ∫₀ˣ e^{F}.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizingChart<K: Scalar> {
    pub lp: LienardPair<K>,
    pub q_of_x: PSeries<K>,
    pub exp_f: PSeries<K>,
    /// Velocity ẋ in the original coordinates.
    pub z: PlanarPoly<K>,
}

impl<K: Scalar> LinearizingChart<K> {
    pub fn order(&self) -> usize {
        self.q_of_x.order()
    }

    /// p = Σⱼ yʲ·Pⱼ(x); returns the series Pⱼ.
    pub fn p_coefficients(&self) -> Vec<PSeries<K>> {
        let n = self.exp_f.order();
        (0..=self.z.degree_y()).map(|j| self.z.y_coeff(j).to_series(n).mul(&self.exp_f)).collect()
    }

    /// Series of the Jacobian ∂(p, q)/∂(x, ẋ) = −e^{2F}.
    pub fn jacobian(&self) -> PSeries<K> {
        self.exp_f.mul(&self.exp_f).neg()
    }

    pub fn numeric(&self, params: &[f64]) -> Result<NumericChart, LinError> {
        let nl = NumericLienard::new(&self.lp, params)?;
        let z = self
            .z
            .terms()
            .iter()
            .map(|(&(i, j), c)| (i as i32, j as i32, c.map_coeffs(|k| k.to_f64()).eval(params)))
            .collect();
        Ok(NumericChart { lienard: nl, z })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSeries<K: Scalar> {
    pub u: PSeries<K>,
}

impl<K: Scalar> PotentialSeries<K> {
    /// First power of q where U differs from q²/2.
    pub fn harmonic_defect(&self, tol: f64) -> Option<usize> {
        let mut half = vec![self.u.proto().zero_like(); self.u.order() + 1];
        if half.len() > 2 {
            half[2] = ParamPoly::constant(self.u.proto().vars(), K::from_ratio(1, 2));
        }
        self.u.first_difference(&XSeries::new(half), tol)
    }

    pub fn is_harmonic(&self, tol: f64) -> bool {
        self.harmonic_defect(tol).is_none()
    }

    pub fn numeric(&self, params: &[f64]) -> Vec<f64> {
        self.u.coeffs().iter().map(|c| c.map_coeffs(|k| k.to_f64()).eval(params)).collect()
    }
}

/// Chart from a Liénard pair, with p = ẋ·e^{F}.
pub fn linearizing_chart<K: Scalar>(lp: &LienardPair<K>, n: usize) -> Result<LinearizingChart<K>, LinError> {
    let z = PlanarPoly::y(&lp.params);
    chart_with(lp, z, n)
}

/// Chart in the original coordinates of a reduced Cherkas system, p = z(x, y)·e^{F}.
pub fn linearizing_chart_cherkas<K: Scalar>(ch: &CherkasSystem<K>, n: usize) -> Result<LinearizingChart<K>, LinError> {
    chart_with(&ch.to_lienard_unchecked(), ch.z_poly(), n)
}

fn chart_with<K: Scalar>(lp: &LienardPair<K>, z: PlanarPoly<K>, n: usize) -> Result<LinearizingChart<K>, LinError> {
    Ok(LinearizingChart { lp: lp.clone(), q_of_x: lp.phi(n)?, exp_f: lp.exp_f(n)?, z })
}

/// U(q) = W(x(q)).
pub fn potential_series<K: Scalar>(lp: &LienardPair<K>, n: usize) -> Result<PotentialSeries<K>, LinError> {
    let x_of_q = lp.phi(n)?.reverse()?;
    let u = lp.w_series(n)?.compose(&x_of_q)?;
    Ok(PotentialSeries { u })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicReport {
    pub passed: bool,
    pub order: usize,
    pub first_failure: Option<usize>,
    /// Outcome of the polynomial identity g′ + f·g = 1.
    pub zero_urabe: bool,
}

impl HarmonicReport {
    pub fn consistent(&self) -> bool {
        self.passed == self.zero_urabe
    }
}

impl Display for HarmonicReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_failure {
            None => write!(f, "g*e^F = q to order {}", self.order)?,
            Some(k) => write!(f, "g*e^F differs from q at order {}", k)?,
        }
        write!(f, "; zero-Urabe identity {}", if self.zero_urabe { "holds" } else { "fails" })
    }
}

/// Checks g·e^{F} = ∫₀ˣ e^{F} as series to order `n`.
pub fn harmonic_identity_check<K: Scalar>(lp: &LienardPair<K>, n: usize, tol: f64) -> Result<HarmonicReport, LinError> {
    let lhs = lp.g_series(n)?.mul(&lp.exp_f(n)?);
    let rhs = lp.phi(n)?;
    let first_failure = lhs.first_difference(&rhs, tol);
    Ok(HarmonicReport {
        passed: first_failure.is_none(),
        order: n,
        first_failure,
        zero_urabe: lp.zero_urabe_check(tol),
    })
}

/// Float evaluators for f and g at fixed parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericLienard {
    pub f_num: Vec<f64>,
    pub f_den: Vec<f64>,
    pub g_num: Vec<f64>,
    pub g_den: Vec<f64>,
}

impl NumericLienard {
    pub fn new<K: Scalar>(lp: &LienardPair<K>, params: &[f64]) -> Result<Self, LinError> {
        if params.len() != lp.params.len() {
            return Err(LinError::ParamCount { expected: lp.params.len(), got: params.len() });
        }
        Ok(NumericLienard {
            f_num: lp.f.num.to_f64(params),
            f_den: lp.f.den.to_f64(params),
            g_num: lp.g.num.to_f64(params),
            g_den: lp.g.den.to_f64(params),
        })
    }

    pub fn f(&self, x: f64) -> f64 {
        horner(&self.f_num, x) / horner(&self.f_den, x)
    }

    pub fn g(&self, x: f64) -> f64 {
        horner(&self.g_num, x) / horner(&self.g_den, x)
    }

    fn guard(&self, x: f64) -> Result<(), LinError> {
        if !x.is_finite() || x.abs() > QUAD_RADIUS {
            return Err(LinError::OutOfRange { x, limit: QUAD_RADIUS });
        }
        for den in [&self.f_den, &self.g_den] {
            let steps = 512;
            let mut prev = horner(den, 0.0);
            for k in 0..=steps {
                let s = x * k as f64 / steps as f64;
                let v = horner(den, s);
                if v.abs() < 1e-14 || v.signum() != prev.signum() {
                    return Err(LinError::Singular { x: s });
                }
                prev = v;
            }
        }
        Ok(())
    }

    /// F(x) = ∫₀ˣ f.
    pub fn big_f(&self, x: f64) -> Result<f64, LinError> {
        self.guard(x)?;
        integrate(&|s| self.f(s), 0.0, x, QUAD_TOL * 0.1)
    }

    pub fn exp_f(&self, x: f64) -> Result<f64, LinError> {
        Ok(self.big_f(x)?.exp())
    }

    /// q(x) = ∫₀ˣ e^{F}.
    pub fn q(&self, x: f64) -> Result<f64, LinError> {
        self.guard(x)?;
        let inner = |s: f64| integrate(&|t| self.f(t), 0.0, s, QUAD_TOL * 0.01).map(f64::exp);
        integrate_fallible(&inner, 0.0, x, QUAD_TOL)
    }

    /// W(x) = ∫₀ˣ g·e^{2F}.
    pub fn w(&self, x: f64) -> Result<f64, LinError> {
        self.guard(x)?;
        let inner = |s: f64| integrate(&|t| self.f(t), 0.0, s, QUAD_TOL * 0.01).map(|fs| self.g(s) * (2.0 * fs).exp());
        integrate_fallible(&inner, 0.0, x, QUAD_TOL)
    }
}

/// Quadrature evaluators for the chart at fixed parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericChart {
    pub lienard: NumericLienard,
    z: Vec<(i32, i32, f64)>,
}

impl NumericChart {
    pub fn z(&self, x: f64, y: f64) -> f64 {
        self.z.iter().map(|&(i, j, c)| c * x.powi(i) * y.powi(j)).sum()
    }

    pub fn q(&self, x: f64) -> Result<f64, LinError> {
        self.lienard.q(x)
    }

    pub fn p(&self, x: f64, y: f64) -> Result<f64, LinError> {
        Ok(self.z(x, y) * self.lienard.exp_f(x)?)
    }

    /// H = ½p² + U(q) with U from its series coefficients.
    pub fn hamiltonian(&self, u: &[f64], x: f64, y: f64) -> Result<f64, LinError> {
        let q = self.q(x)?;
        if q.abs() > POTENTIAL_RADIUS {
            return Err(LinError::OutOfRange { x: q, limit: POTENTIAL_RADIUS });
        }
        let p = self.p(x, y)?;
        Ok(0.5 * p * p + horner(u, q))
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> Result<f64, LinError>, a: f64, b: f64) -> Result<(f64, f64), LinError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let d = h * XGK[i];
        let s = f(c - d)? + f(c + d)?;
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// Adaptive Gauss–Kronrod 7/15 with absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, LinError> {
    integrate_fallible(&|x| Ok(f(x)), a, b, tol)
}

pub fn integrate_fallible(f: &dyn Fn(f64) -> Result<f64, LinError>, a: f64, b: f64, tol: f64) -> Result<f64, LinError> {
    if a == b {
        return Ok(0.0);
    }
    let total = (b - a).abs();
    let mut stack = vec![(a, b, 0u32)];
    let mut sum = 0.0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(f, lo, hi)?;
        let local = tol * (hi - lo).abs() / total;
        if err <= local.max(f64::EPSILON * val.abs()) {
            sum += val;
        } else if depth >= 40 {
            return Err(LinError::Quadrature { a: lo, b: hi });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Ok(sum)
}

/// Evaluates a series with parametric coefficients at `params` and `x`.
pub fn eval_series<K: Scalar>(s: &PSeries<K>, params: &[f64], x: f64) -> f64 {
    let c: Vec<f64> = s.coeffs().iter().map(|p| p.map_coeffs(|k| k.to_f64()).eval(params)).collect();
    horner(&c, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lienard::{XPoly, XRatFunc};
    use crate::poly::Vars;
    use crate::scalar::{rat, Rat};
    use std::sync::Arc;

    fn xp(v: &Arc<Vars>, c: &[i64]) -> XPoly<Rat> {
        XPoly::from_coeffs(v, c.iter().map(|&k| ParamPoly::constant(v, rat(k, 1))).collect())
    }

    fn rat_example() -> LienardPair<Rat> {
        let v = Vars::new::<&str>(&[]);
        LienardPair::new(XRatFunc::new(xp(&v, &[2, 1]), xp(&v, &[1, 1])), XRatFunc::new(xp(&v, &[0, 1]), xp(&v, &[1, 1])))
    }

    #[test]
    fn rational_example_chart() {
        let lp = rat_example();
        let ch = linearizing_chart(&lp, 10).unwrap();
        let mut fact = 1i64;
        for k in 1..=10usize {
            assert_eq!(ch.q_of_x.coeff(k).as_constant(), Some(rat(1, fact)));
            fact *= k as i64;
        }
        assert!(harmonic_identity_check(&lp, 20, 0.0).unwrap().passed);
        assert!(potential_series(&lp, 12).unwrap().is_harmonic(0.0));
    }

    #[test]
    fn gk_quadrature() {
        let v = integrate(&|x: f64| x.cos(), 0.0, 1.5, 1e-13).unwrap();
        assert!((v - 1.5f64.sin()).abs() < 1e-13);
        let v = integrate(&|x: f64| 1.0 / (1.0 + x * x), -0.5, 0.5, 1e-13).unwrap();
        assert!((v - 2.0 * 0.5f64.atan()).abs() < 1e-13);
    }

    #[test]
    fn numeric_rational_chart() {
        let nl = NumericLienard::new(&rat_example(), &[]).unwrap();
        for &x in &[-0.4, -0.1, 0.2, 0.5] {
            assert!((nl.q(x).unwrap() - x * f64::exp(x)).abs() < 1e-12);
        }
        assert!(matches!(nl.q(0.7), Err(LinError::OutOfRange { .. })));
    }

    #[test]
    fn singular_guard() {
        let v = Vars::new::<&str>(&[]);
        let lp = LienardPair::new(XRatFunc::new(xp(&v, &[1]), xp(&v, &[1, 4])), XRatFunc::from_poly(xp(&v, &[0, 1])));
        let nl = NumericLienard::new(&lp, &[]).unwrap();
        assert!(matches!(nl.q(-0.3), Err(LinError::Singular { .. })));
        assert!(nl.q(0.3).is_ok());
    }
}
