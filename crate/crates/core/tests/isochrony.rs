mod common;

use common::{rat, system, Dense};
use isochron::catalog::{load_catalog, lookup};
use isochron::isochrony::{c_algorithm, urabe_series, verify_urabe, xi_squared};
use isochron::parse::{eval_series, parse_expr};
use isochron::{QuadNum, Rat, XSeries};
use num_traits::{One, Zero};

const ST26: &str = "params b22
xdot = -y + x*y + (-3/8 - 2*b22)*x^2*y + (1/16 + b22)*x^3*y
ydot = x - 3/4*x^2 + 1/4*y^2 + 3/8*x^3 - 2*b22*x*y^2 + b22*x^2*y^2 - 1/16*x^4";

/// x²(1 − x/2)^α (1 − x/2 + (2b + 1/8)x²)^β with α = −2/(16b+1), β = −(16b−1)/(16b+1).
fn xi_squared_closed_form(b: &Rat, n: usize) -> Dense {
    let d = Rat::from_integer(16.into()) * b + Rat::one();
    let alpha = Rat::from_integer((-2).into()) / &d;
    let beta = -(Rat::from_integer(16.into()) * b - Rat::one()) / &d;
    let lin = Dense::from_rats(&[Rat::one(), rat(-1, 2)], n);
    let quad = Dense::from_rats(&[Rat::one(), rat(-1, 2), Rat::from_integer(2.into()) * b + rat(1, 8)], n);
    let x2 = Dense::from_ints(&[0, 0, 1], n);
    x2.mul(&lin.pow(&alpha)).mul(&quad.pow(&beta))
}

#[test]
fn st26_xi_squared_matches_closed_form() {
    let n = 20;
    let lp = system::<Rat>(ST26).to_cherkas().unwrap().to_lienard(0.0).unwrap();
    let xi2 = xi_squared(&lp, n).unwrap();
    assert!(xi2.order() >= n);
    let mut samples = 0;
    for num in -30i64..=30 {
        let b = rat(num, 7);
        if (Rat::from_integer(16.into()) * &b + Rat::one()).is_zero() {
            continue;
        }
        let want = xi_squared_closed_form(&b, n);
        for k in 0..=n {
            assert_eq!(xi2.coeff(k).eval(std::slice::from_ref(&b)), want.0[k], "b22 = {}, x^{}", b, k);
        }
        samples += 1;
    }
    let max_deg = (0..=n).map(|k| xi2.coeff(k).total_degree().unwrap_or(0)).max().unwrap();
    assert!((max_deg as usize) < samples);
}

#[test]
fn cub2_zero_urabe_fails_at_b20_one() {
    let cat = load_catalog().unwrap();
    let cub2 = lookup(&cat, "CUB2").unwrap().exact_system().unwrap();
    let lp = cub2.to_cherkas().unwrap().to_lienard(0.0).unwrap();
    assert!(!lp.zero_urabe_check(0.0));
    let at_one = cub2.instantiate(&[("b20", QuadNum::one())]);
    let lp1 = at_one.to_cherkas().unwrap().to_lienard(0.0).unwrap();
    assert!(!lp1.zero_urabe_check(0.0));
    let at_zero = cub2.instantiate(&[("b20", QuadNum::zero())]);
    assert!(at_zero.to_cherkas().unwrap().to_lienard(0.0).unwrap().zero_urabe_check(0.0));
    for id in ["CUB1", "CUB6+", "CUB6-"] {
        let s = lookup(&cat, id).unwrap().exact_system().unwrap();
        assert!(s.to_cherkas().unwrap().to_lienard(0.0).unwrap().zero_urabe_check(0.0), "{}", id);
    }
}

#[test]
fn mutated_st13_fails_conditions() {
    let ok = system::<Rat>("xdot = -y + x^3*y\nydot = x + 1/2*x^2*y^2 - 1/2*x^4");
    let lp = ok.to_cherkas().unwrap().to_lienard(0.0).unwrap();
    assert_eq!(c_algorithm(&lp, 6, 20, 0.0).unwrap().first_nonzero(0.0), None);
    for mutated in [
        "xdot = -y + 101/100*x^3*y\nydot = x + 1/2*x^2*y^2 - 1/2*x^4",
        "xdot = -y + x^3*y\nydot = x + 1/2*x^2*y^2 - 45/100*x^4",
    ] {
        let lp = system::<Rat>(mutated).to_cherkas().unwrap().to_lienard(0.0).unwrap();
        let cs = c_algorithm(&lp, 6, 20, 0.0).unwrap();
        assert_eq!(cs.first_nonzero(0.0), Some(3), "{}", mutated);
        assert!(!cs.all_vanish(0.0));
    }
}

#[test]
fn condition_routes_agree() {
    let cat = load_catalog().unwrap();
    for id in ["ST13", "ST21", "CUB2", "QUARUN1", "ST26"] {
        let sys = lookup(&cat, id).unwrap().exact_system().unwrap();
        let lp = sys.to_cherkas().unwrap().to_lienard(0.0).unwrap();
        let k = 6;
        let cs = c_algorithm(&lp, k, 2 * k + 4, 0.0).unwrap();
        let us = urabe_series(&lp, 2 * k + 4, 0.0).unwrap();
        assert_eq!(cs.raw, us.conditions(k), "{}", id);
    }
    let mutated = system::<QuadNum>("xdot = -y + x^3*y\nydot = x + 1/2*x^2*y^2 - 45/100*x^4");
    let lp = mutated.to_cherkas().unwrap().to_lienard(0.0).unwrap();
    let cs = c_algorithm(&lp, 5, 14, 0.0).unwrap();
    assert_eq!(cs.raw, urabe_series(&lp, 14, 0.0).unwrap().conditions(5));
}

#[test]
fn st13_urabe_against_independent_expansion() {
    // h = ξ³/√(4 + ξ⁶) = ξ³/2 · (1 + ξ⁶/4)^{-1/2}
    let n = 21;
    let half = Dense::from_rats(&[Rat::one()], n);
    let mut inner = vec![Rat::zero(); n + 1];
    inner[0] = Rat::one();
    inner[6] = rat(1, 4);
    let root = Dense::from_rats(&inner, n).pow(&rat(-1, 2));
    let want = Dense::from_ints(&[0, 0, 0, 1], n).mul(&root).mul(&half.scale(&rat(1, 2)));
    let lp = system::<Rat>("xdot = -y + x^3*y\nydot = x + 1/2*x^2*y^2 - 1/2*x^4").to_cherkas().unwrap().to_lienard(0.0).unwrap();
    let h = urabe_series(&lp, n, 0.0).unwrap().h;
    for k in 0..=n {
        assert_eq!(h.coeff(k).as_constant().unwrap(), want.0[k], "xi^{}", k);
    }
}

#[test]
fn wrong_urabe_candidate_fails() {
    let cat = load_catalog().unwrap();
    let st13 = lookup(&cat, "ST13").unwrap().exact_system().unwrap();
    let lp = st13.to_cherkas().unwrap().to_lienard(0.0).unwrap();
    let wrong = eval_series::<QuadNum>(&parse_expr("xi^3/sqrt(4 + 2*xi^6)").unwrap(), "xi", &lp.params, 20).unwrap();
    let r = verify_urabe(&lp, &wrong, 20, 0.0).unwrap();
    assert!(!r.passed);
    let zero = XSeries::zero(&isochron::ParamPoly::<QuadNum>::zero(&lp.params), 20);
    assert!(!verify_urabe(&lp, &zero, 20, 0.0).unwrap().passed);
    let linear = system::<QuadNum>("xdot = -y\nydot = x").to_cherkas().unwrap().to_lienard(0.0).unwrap();
    let zero = XSeries::zero(&isochron::ParamPoly::<QuadNum>::zero(&linear.params), 20);
    assert!(verify_urabe(&linear, &zero, 20, 0.0).unwrap().passed);
}
