mod common;

use std::sync::Arc;

use common::{rat, system, Dense};
use isochron::catalog::{load_catalog, lookup};
use isochron::lienard::{LienardPair, XPoly, XRatFunc};
use isochron::linearize::{harmonic_identity_check, linearizing_chart, linearizing_chart_cherkas, potential_series};
use isochron::verify::{invariant_drift, NumericSystem, VerifyError};
use isochron::{ParamPoly, Rat, Vars, XSeries};
use num_traits::{One, Zero};

fn assert_series_eq(got: &XSeries<ParamPoly<Rat>>, want: &Dense, n: usize, what: &str) {
    for k in 0..=n {
        let c = got.coeff(k).as_constant().unwrap_or_else(|| panic!("{}: x^{} not constant", what, k));
        assert_eq!(c, want.0[k], "{} at x^{}", what, k);
    }
}

fn cub1(b: &Rat) -> isochron::lienard::PlanarSystem<Rat> {
    let src = "params b20\nxdot = -y - 2*b20*x*y + x^2 + 2*b20*x^3\nydot = x - 4*b20*y^2 - 2*x*y + b20*x^2 + 4*b20*x^2*y + 2*x^3";
    let s = system::<Rat>(src).instantiate(&[("b20", b.clone())]);
    let none = Vars::new::<&str>(&[]);
    s.map_params(|p| p.to_registry(&none).unwrap())
}

#[test]
fn cub1_chart_closed_form() {
    let n = 15;
    for b in [Rat::one(), rat(-2, 5), rat(1, 4)] {
        let ch = cub1(&b).to_cherkas().unwrap();
        let chart = linearizing_chart_cherkas(&ch, n).unwrap();
        // q = x(bx + 1)/(1 + 2bx)², p = (x² − y)/(1 + 2bx)²
        let den = Dense::from_rats(&[Rat::one(), &b * Rat::from_integer(2.into())], n).pow(&Rat::from_integer((-2).into()));
        let q = Dense::from_rats(&[Rat::zero(), Rat::one(), b.clone()], n).mul(&den);
        assert_series_eq(&chart.q_of_x, &q, n, "CUB1 q");
        let p = chart.p_coefficients();
        assert_series_eq(&p[0], &Dense::from_ints(&[0, 0, 1], n).mul(&den), n, "CUB1 p0");
        assert_series_eq(&p[1], &den.scale(&-Rat::one()), n, "CUB1 p1");
        assert!(p.iter().skip(2).all(|s| (0..=n).all(|k| s.coeff(k).is_zero())));
    }
}

#[test]
fn qua_chart_closed_form() {
    let n = 15;
    let sys = system::<Rat>("xdot = -y - 3*x*y - 3*x^2*y - x^3*y\nydot = x + 1/2*x^2 - 4*y^2 - 4*x*y^2 - 2*x^2*y^2");
    let ch = sys.to_cherkas().unwrap();
    let lp = ch.to_lienard(0.0).unwrap();
    assert!(lp.zero_urabe_check(0.0));
    let chart = linearizing_chart_cherkas(&ch, n).unwrap();
    // q = ½x(2 + x)·e^{−x(2+x)/(1+x)²}·(1 + x)^{−2}, p = −y·e^{−x(2+x)/(1+x)²}·(1 + x)^{−2}
    let inv_sq = Dense::from_ints(&[1, 1], n).pow(&Rat::from_integer((-2).into()));
    let u = Dense::from_ints(&[0, 2, 1], n).mul(&inv_sq);
    let e = u.scale(&-Rat::one()).exp().mul(&inv_sq);
    let q = Dense::from_ints(&[0, 2, 1], n).scale(&rat(1, 2)).mul(&e);
    assert_series_eq(&chart.q_of_x, &q, n, "QUA q");
    let p = chart.p_coefficients();
    assert!((0..=n).all(|k| p[0].coeff(k).is_zero()));
    assert_series_eq(&p[1], &e.scale(&-Rat::one()), n, "QUA p1");
}

fn xp(v: &Arc<Vars>, c: &[i64]) -> XPoly<Rat> {
    XPoly::from_coeffs(v, c.iter().map(|&k| ParamPoly::constant(v, rat(k, 1))).collect())
}

#[test]
fn rat_chart_is_x_exp_x() {
    let n = 15;
    let v = Vars::new::<&str>(&[]);
    let lp = LienardPair::new(XRatFunc::new(xp(&v, &[2, 1]), xp(&v, &[1, 1])), XRatFunc::new(xp(&v, &[0, 1]), xp(&v, &[1, 1])));
    let chart = linearizing_chart(&lp, n).unwrap();
    let ex = Dense::from_ints(&[0, 1], n).exp();
    assert_series_eq(&chart.q_of_x, &Dense::from_ints(&[0, 1], n).mul(&ex), n, "RAT q");
    let p = chart.p_coefficients();
    assert_series_eq(&p[1], &Dense::from_ints(&[1, 1], n).mul(&ex), n, "RAT p1");
    assert!(potential_series(&lp, n).unwrap().is_harmonic(0.0));
}

#[test]
fn harmonic_check_on_zero_urabe_entries() {
    let cat = load_catalog().unwrap();
    let mut count = 0;
    for e in cat.iter().filter(|e| e.is_zero_urabe() && e.is_exact()) {
        let lp = e.exact_system().unwrap().to_cherkas().unwrap().to_lienard(0.0).unwrap();
        let r = harmonic_identity_check(&lp, 30, 0.0).unwrap();
        assert!(r.passed && r.consistent(), "{}: {}", e.id, r);
        assert!(potential_series(&lp, 12).unwrap().is_harmonic(0.0), "{}", e.id);
        count += 1;
    }
    assert!(count >= 25);
    let st13 = lookup(&cat, "ST13").unwrap().exact_system().unwrap();
    let lp = st13.to_cherkas().unwrap().to_lienard(0.0).unwrap();
    let r = harmonic_identity_check(&lp, 30, 0.0).unwrap();
    assert!(!r.passed && r.consistent());
    assert!(!potential_series(&lp, 12).unwrap().is_harmonic(0.0));
}

fn hamiltonian_drift(sys: &isochron::lienard::PlanarSystem<Rat>, x0: f64) -> f64 {
    let ch = sys.to_cherkas().unwrap();
    let lp = ch.to_lienard(0.0).unwrap();
    let chart = linearizing_chart_cherkas(&ch, 20).unwrap().numeric(&[]).unwrap();
    let u = potential_series(&lp, 20).unwrap().numeric(&[]);
    let ns = NumericSystem::from_planar(sys, &[]).unwrap();
    let r = invariant_drift(&ns, x0, 1e-12, |x, y| chart.hamiltonian(&u, x, y).map_err(VerifyError::Chart)).unwrap();
    assert!(r.samples > 100);
    r.max_relative
}

#[test]
fn hamiltonian_is_conserved_along_orbits() {
    for x0 in [0.05, 0.1, 0.15] {
        let d = hamiltonian_drift(&cub1(&rat(1, 4)), x0);
        assert!(d <= 1e-8, "CUB1 x0 = {}: drift {:e}", x0, d);
    }
    let qua = system::<Rat>("xdot = -y - 3*x*y - 3*x^2*y - x^3*y\nydot = x + 1/2*x^2 - 4*y^2 - 4*x*y^2 - 2*x^2*y^2");
    for x0 in [0.05, 0.1] {
        let d = hamiltonian_drift(&qua, x0);
        assert!(d <= 1e-8, "QUA x0 = {}: drift {:e}", x0, d);
    }
}
