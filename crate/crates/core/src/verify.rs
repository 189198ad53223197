//! Numerical checks on the original planar system: orbits, periods, drift and reversibility.

use std::f64::consts::PI;
use std::fmt::{self, Display};

use num_complex::Complex64;
use num_traits::Float;

use crate::lienard::{CherkasSystem, PlanarPoly, PlanarSystem};
use crate::linearize::{LinError, NumericLienard};
use crate::poly::{ParamPoly, Vars};
use crate::scalar::Scalar;

pub const ESCAPE_RADIUS: f64 = 2.0;
pub const TIME_CAP: f64 = 100.0;
/// |y| at which a section crossing counts as located.
pub const SECTION_TOL: f64 = 1e-12;
pub const PROBE_AMPLITUDES: [f64; 4] = [0.05, 0.1, 0.2, 0.3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ExactEvaluated,
    FloatNative,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyError {
    /// Linear part differs from (−y, x).
    LinearPart,
    DegreeTooHigh,
    ParamCount { expected: usize, got: usize },
    BadStart { x0: f64 },
    BadTolerance { tol: f64 },
    StepUnderflow { t: f64, h: f64 },
    Escape { t: f64, x: f64, y: f64 },
    NoReturn { t_max: f64 },
    Chart(LinError),
    FreeParameters,
}

impl Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::LinearPart => write!(f, "linear part is not (-y, x)"),
            VerifyError::DegreeTooHigh => write!(f, "degree exceeds 4"),
            VerifyError::ParamCount { expected, got } => write!(f, "expected {} parameter values, got {}", expected, got),
            VerifyError::BadStart { x0 } => write!(f, "start amplitude {} outside (0, 0.5]", x0),
            VerifyError::BadTolerance { tol } => write!(f, "tolerance {:e} outside [1e-14, 1e-6]", tol),
            VerifyError::StepUnderflow { t, h } => write!(f, "step size {:e} underflow at t = {}", h, t),
            VerifyError::Escape { t, x, y } => write!(f, "orbit escaped at t = {} ({}, {})", t, x, y),
            VerifyError::NoReturn { t_max } => write!(f, "no return to the section before t = {}", t_max),
            VerifyError::Chart(e) => write!(f, "{}", e),
            VerifyError::FreeParameters => write!(f, "system has free parameters"),
        }
    }
}

impl std::error::Error for VerifyError {}

impl From<LinError> for VerifyError {
    fn from(e: LinError) -> Self {
        VerifyError::Chart(e)
    }
}

/// ẋ = Σ xdot[i][j]·xⁱyʲ, ẏ likewise, with i + j ≤ 4.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSystem {
    pub xdot: [[f64; 5]; 5],
    pub ydot: [[f64; 5]; 5],
    pub provenance: Provenance,
}

impl NumericSystem {
    pub fn new(xdot: [[f64; 5]; 5], ydot: [[f64; 5]; 5], provenance: Provenance) -> Result<Self, VerifyError> {
        for i in 0..5 {
            for j in 0..5 {
                if i + j > 4 && (xdot[i][j] != 0.0 || ydot[i][j] != 0.0) {
                    return Err(VerifyError::DegreeTooHigh);
                }
            }
        }
        let lin = [xdot[0][0], xdot[1][0], xdot[0][1], ydot[0][0], ydot[1][0], ydot[0][1]];
        if lin != [0.0, 0.0, -1.0, 0.0, 1.0, 0.0] {
            return Err(VerifyError::LinearPart);
        }
        Ok(NumericSystem { xdot, ydot, provenance })
    }

    /// Evaluates parameters into a float table.
    pub fn from_planar<K: Scalar>(sys: &PlanarSystem<K>, params: &[f64]) -> Result<Self, VerifyError> {
        if params.len() != sys.params.len() {
            return Err(VerifyError::ParamCount { expected: sys.params.len(), got: params.len() });
        }
        let table = |p: &PlanarPoly<K>| -> Result<[[f64; 5]; 5], VerifyError> {
            let mut t = [[0.0; 5]; 5];
            for (&(i, j), c) in p.terms() {
                if i + j > 4 {
                    return Err(VerifyError::DegreeTooHigh);
                }
                t[i as usize][j as usize] = c.map_coeffs(|k| k.to_f64()).eval(params);
            }
            Ok(t)
        };
        let prov = if K::EXACT { Provenance::ExactEvaluated } else { Provenance::FloatNative };
        Self::new(table(&sys.xdot)?, table(&sys.ydot)?, prov)
    }

    fn eval_table(t: &[[f64; 5]; 5], x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..5).rev() {
            let mut row = 0.0;
            for j in (0..5 - i).rev() {
                row = row * y + t[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }

    pub fn rhs(&self, u: &[f64; 2]) -> [f64; 2] {
        [Self::eval_table(&self.xdot, u[0], u[1]), Self::eval_table(&self.ydot, u[0], u[1])]
    }

    /// Replaces one coefficient; used for perturbation controls.
    pub fn with_coeff(&self, eq: usize, i: usize, j: usize, v: f64) -> Result<Self, VerifyError> {
        let mut s = self.clone();
        if eq == 0 {
            s.xdot[i][j] = v;
        } else {
            s.ydot[i][j] = v;
        }
        Self::new(s.xdot, s.ydot, s.provenance)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Stats) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evaluations += o.evaluations;
    }
}

/// One accepted step with its continuous extension.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseStep<T, const N: usize> {
    pub t0: T,
    pub h: T,
    pub y0: [T; N],
    pub y1: [T; N],
    rcont: [[T; N]; 5],
}

impl<T: Float, const N: usize> DenseStep<T, N> {
    pub fn t1(&self) -> T {
        self.t0 + self.h
    }

    pub fn eval(&self, t: T) -> [T; N] {
        let th = (t - self.t0) / self.h;
        let th1 = T::one() - th;
        let r = &self.rcont;
        let mut out = [T::zero(); N];
        for i in 0..N {
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Options {
    pub escape_radius: f64,
    pub t_max: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { escape_radius: ESCAPE_RADIUS, t_max: TIME_CAP }
    }
}

fn c<T: Float>(n: f64) -> T {
    T::from(n).expect("float constant")
}

fn axpy<T: Float, const N: usize>(y: &[T; N], terms: &[(f64, &[T; N])], h: T) -> [T; N] {
    let mut out = *y;
    for (a, k) in terms {
        let a: T = c::<T>(*a) * h;
        for i in 0..N {
            out[i] = out[i] + a * k[i];
        }
    }
    out
}

/// Dormand–Prince 5(4) with Hairer's dense output.
pub struct Dopri5<T, const N: usize, F> {
    f: F,
    pub rtol: T,
    pub atol: T,
    pub stats: Stats,
}

pub struct StepResult<T, const N: usize> {
    pub y1: [T; N],
    pub k7: [T; N],
    pub err: T,
    k: [[T; N]; 7],
}

impl<T: Float, const N: usize, F: Fn(&[T; N]) -> [T; N]> Dopri5<T, N, F> {
    pub fn new(f: F, tol: T) -> Self {
        Dopri5 { f, rtol: tol, atol: tol, stats: Stats::default() }
    }

    fn eval(&mut self, y: &[T; N]) -> [T; N] {
        self.stats.evaluations += 1;
        (self.f)(y)
    }

    /// One trial step from (y, k1) of size h.
    pub fn step(&mut self, y: &[T; N], k1: &[T; N], h: T) -> StepResult<T, N> {
        let k2 = self.eval(&axpy(y, &[(1.0 / 5.0, k1)], h));
        let k3 = self.eval(&axpy(y, &[(3.0 / 40.0, k1), (9.0 / 40.0, &k2)], h));
        let k4 = self.eval(&axpy(y, &[(44.0 / 45.0, k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)], h));
        let k5 = self.eval(&axpy(
            y,
            &[(19372.0 / 6561.0, k1), (-25360.0 / 2187.0, &k2), (64448.0 / 6561.0, &k3), (-212.0 / 729.0, &k4)],
            h,
        ));
        let k6 = self.eval(&axpy(
            y,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, &k2),
                (46732.0 / 5247.0, &k3),
                (49.0 / 176.0, &k4),
                (-5103.0 / 18656.0, &k5),
            ],
            h,
        ));
        let y1 = axpy(
            y,
            &[(35.0 / 384.0, k1), (500.0 / 1113.0, &k3), (125.0 / 192.0, &k4), (-2187.0 / 6784.0, &k5), (11.0 / 84.0, &k6)],
            h,
        );
        let k7 = self.eval(&y1);
        let e = axpy(
            &[T::zero(); N],
            &[
                (71.0 / 57600.0, k1),
                (-71.0 / 16695.0, &k3),
                (71.0 / 1920.0, &k4),
                (-17253.0 / 339200.0, &k5),
                (22.0 / 525.0, &k6),
                (-1.0 / 40.0, &k7),
            ],
            h,
        );
        let mut sum = T::zero();
        for i in 0..N {
            let sk = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
            let r = e[i] / sk;
            sum = sum + r * r;
        }
        let err = (sum / c::<T>(N as f64)).sqrt();
        StepResult { y1, k7, err, k: [*k1, k2, k3, k4, k5, k6, k7] }
    }

    fn dense(&self, t0: T, h: T, y0: &[T; N], r: &StepResult<T, N>) -> DenseStep<T, N> {
        let d = [
            -12715105075.0 / 11282082432.0,
            0.0,
            87487479700.0 / 32700410799.0,
            -10690763975.0 / 1880347072.0,
            701980252875.0 / 199316789632.0,
            -1453857185.0 / 822651844.0,
            69997945.0 / 29380423.0,
        ];
        let mut rc = [[T::zero(); N]; 5];
        for i in 0..N {
            let ydiff = r.y1[i] - y0[i];
            let bspl = h * r.k[0][i] - ydiff;
            rc[0][i] = y0[i];
            rc[1][i] = ydiff;
            rc[2][i] = bspl;
            rc[3][i] = ydiff - h * r.k[6][i] - bspl;
            let mut s = T::zero();
            for (j, dj) in d.iter().enumerate() {
                s = s + c::<T>(*dj) * r.k[j][i];
            }
            rc[4][i] = h * s;
        }
        DenseStep { t0, h, y0: *y0, y1: r.y1, rcont: rc }
    }

    /// Integrates until `stop` returns true on an accepted step or `t_max` is reached.
    pub fn integrate(
        &mut self,
        y0: [T; N],
        t_max: T,
        guard: impl Fn(&[T; N]) -> bool,
        mut stop: impl FnMut(&DenseStep<T, N>) -> bool,
    ) -> Result<Vec<DenseStep<T, N>>, (T, T, [T; N])> {
        let mut t = T::zero();
        let mut y = y0;
        let mut k1 = self.eval(&y);
        let mut h = c::<T>(1e-3).min(t_max);
        let mut steps = Vec::new();
        let mut last_rejected = false;
        while t < t_max {
            if h < c::<T>(1e-14) * t.abs().max(T::one()) {
                return Err((t, h, y));
            }
            let h_try = h.min(t_max - t);
            let r = self.step(&y, &k1, h_try);
            let err = r.err;
            if err <= T::one() && r.y1.iter().all(|v| v.is_finite()) {
                self.stats.accepted += 1;
                let ds = self.dense(t, h_try, &y, &r);
                t = t + h_try;
                y = r.y1;
                k1 = r.k7;
                let done = stop(&ds);
                steps.push(ds);
                if !guard(&y) {
                    return Err((t, T::zero(), y));
                }
                if done {
                    break;
                }
                let fac = if err == T::zero() { c(10.0) } else { c::<T>(0.9) * err.powf(c(-0.2)) };
                let fac = fac.max(c(0.2)).min(if last_rejected { T::one() } else { c(10.0) });
                h = h_try * fac;
                last_rejected = false;
            } else {
                self.stats.rejected += 1;
                let fac = if err.is_finite() { (c::<T>(0.9) * err.powf(c(-0.2))).max(c(0.2)) } else { c(0.2) };
                h = h_try * fac.min(T::one());
                last_rejected = true;
            }
        }
        Ok(steps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<DenseStep<f64, 2>>,
    pub stats: Stats,
    /// Section crossing (t, x) when one was detected.
    pub crossing: Option<(f64, f64)>,
}

impl Trajectory {
    pub fn eval(&self, t: f64) -> Option<[f64; 2]> {
        let i = self.steps.partition_point(|s| s.t1() < t);
        self.steps.get(i).filter(|s| s.t0 <= t).map(|s| s.eval(t))
    }
}

fn check_inputs(x0: f64, tol: f64) -> Result<(), VerifyError> {
    if !(x0 > 0.0 && x0 <= 0.5) {
        return Err(VerifyError::BadStart { x0 });
    }
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(VerifyError::BadTolerance { tol });
    }
    Ok(())
}

/// Orbit from (x₀, 0) up to its first return to {y = 0, x > 0, ẏ > 0}.
pub fn integrate_orbit(sys: &NumericSystem, x0: f64, tol: f64, opts: &Options) -> Result<Trajectory, VerifyError> {
    check_inputs(x0, tol)?;
    let r2 = opts.escape_radius * opts.escape_radius;
    let mut solver = Dopri5::new(|u: &[f64; 2]| sys.rhs(u), tol);
    let res = solver.integrate(
        [x0, 0.0],
        opts.t_max,
        |u| u[0] * u[0] + u[1] * u[1] <= r2,
        |s| s.y0[1] < 0.0 && s.y1[1] >= 0.0 && s.y1[0] > 0.0,
    );
    let stats = solver.stats;
    let steps = match res {
        Ok(s) => s,
        Err((t, h, u)) if h == 0.0 => return Err(VerifyError::Escape { t, x: u[0], y: u[1] }),
        Err((t, h, _)) => return Err(VerifyError::StepUnderflow { t, h }),
    };
    let crossing = match steps.last() {
        Some(s) if s.y0[1] < 0.0 && s.y1[1] >= 0.0 && s.y1[0] > 0.0 => Some(locate(sys, s, tol)),
        _ => None,
    };
    Ok(Trajectory { steps, stats, crossing })
}

/// Bisection on the dense output, then Newton with direct steps from the start of the step.
fn locate(sys: &NumericSystem, s: &DenseStep<f64, 2>, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (s.t0, s.t1());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if s.eval(mid)[1] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi) - s.t0;
    let mut solver = Dopri5::new(|u: &[f64; 2]| sys.rhs(u), tol);
    let k1 = sys.rhs(&s.y0);
    let mut u = s.eval(s.t0 + tau);
    for _ in 0..8 {
        u = if tau > 0.0 { solver.step(&s.y0, &k1, tau).y1 } else { s.y0 };
        if u[1].abs() <= SECTION_TOL * 1e-2 {
            break;
        }
        let dy = sys.rhs(&u)[1];
        if dy == 0.0 {
            break;
        }
        tau -= u[1] / dy;
    }
    (s.t0 + tau, u[0])
}

/// First-return time to the positive x half-axis.
pub fn measure_period(sys: &NumericSystem, x0: f64, tol: f64) -> Result<f64, VerifyError> {
    measure_period_with(sys, x0, tol, &Options::default()).map(|(t, _)| t)
}

pub fn measure_period_with(sys: &NumericSystem, x0: f64, tol: f64, opts: &Options) -> Result<(f64, Stats), VerifyError> {
    let tr = integrate_orbit(sys, x0, tol, opts)?;
    match tr.crossing {
        Some((t, _)) => Ok((t, tr.stats)),
        None => Err(VerifyError::NoReturn { t_max: opts.t_max }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodReport {
    pub amplitudes: Vec<f64>,
    pub periods: Vec<f64>,
    /// max |T − 2π|.
    pub max_deviation: f64,
    /// max T − min T.
    pub spread: f64,
    pub threshold: f64,
    pub passed: bool,
    pub stats: Stats,
}

impl Display for PeriodReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, t) in self.amplitudes.iter().zip(&self.periods) {
            writeln!(f, "x0 = {:<5} T = {:.15} |T-2pi| = {:.3e}", a, t, (t - 2.0 * PI).abs())?;
        }
        write!(
            f,
            "max |T-2pi| = {:.3e} (threshold {:.1e}) {}",
            self.max_deviation,
            self.threshold,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Periods at each amplitude; passes when max |T − 2π| ≤ 10·tol.
pub fn isochronicity_probe(sys: &NumericSystem, amplitudes: &[f64], tol: f64) -> Result<PeriodReport, VerifyError> {
    isochronicity_probe_with(sys, amplitudes, tol, 10.0 * tol)
}

pub fn isochronicity_probe_with(sys: &NumericSystem, amplitudes: &[f64], tol: f64, threshold: f64) -> Result<PeriodReport, VerifyError> {
    let mut periods = Vec::with_capacity(amplitudes.len());
    let mut stats = Stats::default();
    for &a in amplitudes {
        let (t, s) = measure_period_with(sys, a, tol, &Options::default())?;
        periods.push(t);
        stats += s;
    }
    let max_deviation = periods.iter().map(|t| (t - 2.0 * PI).abs()).fold(0.0, f64::max);
    let hi = periods.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = periods.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(PeriodReport {
        amplitudes: amplitudes.to_vec(),
        periods,
        max_deviation,
        spread: if lo <= hi { hi - lo } else { 0.0 },
        threshold,
        passed: max_deviation <= threshold,
        stats,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftReport {
    pub max_relative: f64,
    pub samples: usize,
    pub period: Option<f64>,
}

/// Max |Φ − Φ(start)|/|Φ(start)| over one orbit, sampling each step at four interior points.
pub fn invariant_drift(
    sys: &NumericSystem,
    x0: f64,
    tol: f64,
    phi: impl Fn(f64, f64) -> Result<f64, VerifyError>,
) -> Result<DriftReport, VerifyError> {
    let tr = integrate_orbit(sys, x0, tol, &Options::default())?;
    let i0 = phi(x0, 0.0)?;
    let scale = i0.abs().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for s in &tr.steps {
        for k in 1..=4 {
            let u = s.eval(s.t0 + s.h * k as f64 / 4.0);
            worst = worst.max((phi(u[0], u[1])? - i0).abs() / scale);
            samples += 1;
        }
    }
    Ok(DriftReport { max_relative: worst, samples, period: tr.crossing.map(|c| c.0) })
}

/// Drift of I = W(x) + ½(z·e^{F})² along the orbit from (x₀, 0), W and F by quadrature.
pub fn first_integral_drift<K: Scalar>(
    ch: &CherkasSystem<K>,
    params: &[f64],
    sys: &NumericSystem,
    x0: f64,
    tol: f64,
) -> Result<DriftReport, VerifyError> {
    let nl = NumericLienard::new(&ch.to_lienard_unchecked(), params)?;
    let nc = ch.numeric(params);
    invariant_drift(sys, x0, tol, |x, y| {
        let (_, z) = nc.forward(x, y).map_err(|e| VerifyError::Chart(LinError::Singular { x: e.x }))?;
        let v = z * nl.exp_f(x)?;
        Ok(nl.w(x)? + 0.5 * v * v)
    })
}

/// Parity test: every term of ẋ odd in y and every term of ẏ even in y.
pub fn reversible_x_axis<K: Scalar>(sys: &PlanarSystem<K>) -> bool {
    sys.xdot.terms().keys().all(|&(_, j)| j % 2 == 1) && sys.ydot.terms().keys().all(|&(_, j)| j % 2 == 0)
}

/// Conditions on (c, s) for reversibility about the line through the origin with direction (c, s).
pub fn reversibility_conditions<K: Scalar>(sys: &PlanarSystem<K>) -> Result<Vec<ParamPoly<K>>, VerifyError> {
    if !sys.params.is_empty() {
        return Err(VerifyError::FreeParameters);
    }
    let cs = Vars::new(&["c", "s"]);
    let lift = |p: &PlanarPoly<K>| p.map_params(|k| k.to_registry(&cs).expect("constant coefficients"));
    let (p, q) = (lift(&sys.xdot), lift(&sys.ydot));
    let cp = PlanarPoly::constant(ParamPoly::var(&cs, 0));
    let sp = PlanarPoly::constant(ParamPoly::var(&cs, 1));
    let (bx, by) = (PlanarPoly::x(&cs), PlanarPoly::y(&cs));
    let x_of = cp.mul(&bx).sub(&sp.mul(&by));
    let y_of = sp.mul(&bx).add(&cp.mul(&by));
    let subst = |f: &PlanarPoly<K>| {
        let mut out = PlanarPoly::zero(&cs);
        for (&(i, j), k) in f.terms() {
            out = out.add(&x_of.pow(i as u32).mul(&y_of.pow(j as u32)).scale(k));
        }
        out
    };
    let (ps, qs) = (subst(&p), subst(&q));
    let big_x = cp.mul(&ps).add(&sp.mul(&qs));
    let big_y = sp.mul(&ps).neg().add(&cp.mul(&qs));
    let mut conds: Vec<ParamPoly<K>> = Vec::new();
    for (&(_, j), k) in big_x.terms() {
        if j % 2 == 0 {
            conds.push(k.clone());
        }
    }
    for (&(_, j), k) in big_y.terms() {
        if j % 2 == 1 {
            conds.push(k.clone());
        }
    }
    Ok(conds)
}

/// Dense univariate coefficients (ascending) of a (c, s) polynomial at c = 1, s = t.
fn dehomogenize<K: Scalar>(p: &ParamPoly<K>) -> Vec<K> {
    let mut v = vec![K::zero(); p.degree_in(1) as usize + 1];
    for (m, k) in p.terms() {
        v[m[1] as usize] = v[m[1] as usize].clone() + k;
    }
    trim(v)
}

fn trim<K: Scalar>(mut v: Vec<K>) -> Vec<K> {
    while v.last().map(|k| k.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn poly_rem<K: Scalar>(a: &[K], b: &[K]) -> Vec<K> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let q = r[r.len() - 1].clone() / lb.clone();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].clone() - q.clone() * bi;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn poly_gcd<K: Scalar>(a: Vec<K>, b: Vec<K>) -> Vec<K> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn derivative<K: Scalar>(p: &[K]) -> Vec<K> {
    p.iter().enumerate().skip(1).map(|(i, k)| k.clone() * K::from_int(i as i64)).collect()
}

/// Distinct real roots via a Sturm sequence, using exact signs at ±∞.
pub fn count_real_roots<K: Scalar>(p: &[K]) -> usize {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return 0;
    }
    let mut seq = vec![p.clone(), derivative(&p)];
    loop {
        let n = seq.len();
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|k| -k).collect());
    }
    let changes = |at_plus: bool| {
        let signs: Vec<i32> = seq
            .iter()
            .map(|q| {
                let s = q.last().unwrap().signum_i();
                if !at_plus && (q.len() - 1) % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(false) - changes(true)
}

fn durand_kerner(p: &[f64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lc = p[n];
    let monic: Vec<f64> = p.iter().map(|k| k / lc).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k);
    let radius = 1.0 + monic[..n].iter().map(|k| k.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius.min(10.0)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / z[i].norm().max(1.0));
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Is the system reversible about some line through the origin?
pub fn reversible_any_axis<K: Scalar>(sys: &PlanarSystem<K>, tol: f64) -> Result<bool, VerifyError> {
    let conds = reversibility_conditions(sys)?;
    let live: Vec<&ParamPoly<K>> = conds.iter().filter(|p| !p.negligible(tol)).collect();
    if live.is_empty() {
        return Ok(true);
    }
    let vertical = live.iter().all(|p| p.eval(&[K::zero(), K::one()]).negligible(tol));
    if vertical {
        return Ok(true);
    }
    if K::EXACT {
        let g = live.iter().fold(Vec::new(), |g, p| poly_gcd(g, dehomogenize(p)));
        return Ok(count_real_roots(&g) > 0);
    }
    let polys: Vec<Vec<f64>> = live
        .iter()
        .map(|p| {
            let mut v: Vec<f64> = dehomogenize(p).iter().map(|k| k.to_f64()).collect();
            while v.last().map(|k| k.abs() <= tol).unwrap_or(false) {
                v.pop();
            }
            v
        })
        .collect();
    if polys.iter().any(|v| v.len() == 1) {
        return Ok(false);
    }
    let pivot = polys.iter().filter(|v| v.len() > 1).min_by_key(|v| v.len()).expect("live condition");
    let hval = |v: &[f64], t: f64| v.iter().rev().fold(0.0, |a, &k| a * t + k);
    let scale = |v: &[f64], t: f64| v.iter().enumerate().map(|(i, k)| k.abs() * t.abs().powi(i as i32)).sum::<f64>().max(1.0);
    for z in durand_kerner(pivot) {
        if z.im.abs() > 1e-6 * z.norm().max(1.0) {
            continue;
        }
        let mut t = z.re;
        let dp = derivative(pivot);
        for _ in 0..5 {
            let d = hval(&dp, t);
            if d == 0.0 {
                break;
            }
            t -= hval(pivot, t) / d;
        }
        if polys.iter().all(|v| hval(v, t).abs() <= 1e3 * tol * scale(v, t)) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system_text;
    use crate::scalar::{rat, Rat};

    fn system(src: &str) -> PlanarSystem<Rat> {
        parse_system_text(src).unwrap().system().unwrap()
    }

    fn linear() -> NumericSystem {
        let mut xd = [[0.0; 5]; 5];
        let mut yd = [[0.0; 5]; 5];
        xd[0][1] = -1.0;
        yd[1][0] = 1.0;
        NumericSystem::new(xd, yd, Provenance::ExactEvaluated).unwrap()
    }

    #[test]
    fn linear_period() {
        for &x0 in &[0.05, 0.1, 0.3] {
            let t = measure_period(&linear(), x0, 1e-12).unwrap();
            assert!((t - 2.0 * PI).abs() < 1e-10, "{}", t);
        }
    }

    #[test]
    fn dense_output_tracks_circle() {
        let tr = integrate_orbit(&linear(), 0.2, 1e-12, &Options::default()).unwrap();
        for k in 0..50 {
            let t = 6.0 * k as f64 / 50.0;
            let u = tr.eval(t).unwrap();
            assert!((u[0] - 0.2 * t.cos()).abs() < 1e-10 && (u[1] - 0.2 * t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn input_guards() {
        assert_eq!(measure_period(&linear(), 0.7, 1e-12), Err(VerifyError::BadStart { x0: 0.7 }));
        assert_eq!(measure_period(&linear(), 0.1, 1e-3), Err(VerifyError::BadTolerance { tol: 1e-3 }));
        let mut yd = [[0.0; 5]; 5];
        yd[1][0] = 2.0;
        let mut xd = [[0.0; 5]; 5];
        xd[0][1] = -1.0;
        assert_eq!(NumericSystem::new(xd, yd, Provenance::FloatNative), Err(VerifyError::LinearPart));
    }

    #[test]
    fn x_axis_parity() {
        assert!(reversible_x_axis(&system("xdot = -y\nydot = x")));
        assert!(reversible_x_axis(&system("xdot = -y + x^2*y\nydot = x + x^2")));
        assert!(!reversible_x_axis(&system("xdot = -y + x^2\nydot = x")));
    }

    #[test]
    fn sturm_counts() {
        let p: Vec<Rat> = [-2, 0, 1].iter().map(|&k| rat(k, 1)).collect();
        assert_eq!(count_real_roots(&p), 2);
        let q: Vec<Rat> = [1, 0, 1].iter().map(|&k| rat(k, 1)).collect();
        assert_eq!(count_real_roots(&q), 0);
        let r: Vec<Rat> = [0, 0, 0, 1].iter().map(|&k| rat(k, 1)).collect();
        assert_eq!(count_real_roots(&r), 1);
    }

    #[test]
    fn any_axis() {
        assert!(reversible_any_axis(&system("xdot = -y\nydot = x"), 0.0).unwrap());
        assert!(reversible_any_axis(&system("xdot = -y + x*y\nydot = x"), 0.0).unwrap());
    }
}
