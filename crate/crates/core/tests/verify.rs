mod common;

use std::f64::consts::PI;

use common::system;
use isochron::catalog::{load_catalog, lookup, Check, EntrySystem};
use isochron::lienard::PlanarSystem;
use isochron::verify::{isochronicity_probe_with, measure_period, reversible_any_axis, NumericSystem, PROBE_AMPLITUDES};
use isochron::{QuadNum, Scalar};

fn numeric<K: Scalar>(sys: &PlanarSystem<K>) -> NumericSystem {
    NumericSystem::from_planar(sys, &[]).unwrap()
}

#[test]
fn linear_center_period_is_two_pi() {
    let sys = numeric(&system::<QuadNum>("xdot = -y\nydot = x"));
    for a in PROBE_AMPLITUDES {
        assert!((measure_period(&sys, a, 1e-12).unwrap() - 2.0 * PI).abs() < 1e-10);
    }
}

#[test]
fn ten_entries_isochronous_at_default_amplitudes() {
    let cat = load_catalog().unwrap();
    let mut passing = Vec::new();
    for e in cat.iter().filter(|e| e.amplitudes == PROBE_AMPLITUDES && e.plan.iter().any(|c| matches!(c, Check::Period(_)))) {
        let r = isochronicity_probe_with(&e.numeric_system().unwrap(), &PROBE_AMPLITUDES, 1e-12, 1e-6).unwrap();
        assert!(r.passed, "{}: {}", e.id, r);
        passing.push(e.id.clone());
        if passing.len() == 12 {
            break;
        }
    }
    assert!(passing.len() >= 10, "{:?}", passing);
}

#[test]
fn perturbed_st13_is_not_isochronous() {
    let sys = numeric(&system::<QuadNum>("xdot = -y + x^3*y\nydot = x + 1/2*x^2*y^2 - 45/100*x^4"));
    let r = isochronicity_probe_with(&sys, &PROBE_AMPLITUDES, 1e-12, 1e-6).unwrap();
    assert!(!r.passed);
    assert!(r.spread > 1e-5, "spread {:e}", r.spread);
    let exact = numeric(&system::<QuadNum>("xdot = -y + x^3*y\nydot = x + 1/2*x^2*y^2 - 1/2*x^4"));
    let r0 = isochronicity_probe_with(&exact, &PROBE_AMPLITUDES, 1e-12, 1e-6).unwrap();
    assert!(r0.spread < 1e-9 && r.spread > 1e4 * r0.spread);
}

#[test]
fn monsters_period_only() {
    let cat = load_catalog().unwrap();
    for id in ["QUARUN42a", "QUARUN42b", "QUARUN42c", "QUARUN57"] {
        let e = lookup(&cat, id).unwrap();
        assert!(matches!(e.system, EntrySystem::Float(_)));
        let r = isochronicity_probe_with(&e.numeric_system().unwrap(), &e.amplitudes, 1e-12, 1e-4).unwrap();
        assert!(r.passed, "{}: {}", id, r);
    }
}

/// max |F(Ru) + R·F(u)| over sample points, R the reflection across the line at angle θ.
fn reflection_defect(f: &dyn Fn(f64, f64) -> (f64, f64), theta: f64) -> f64 {
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let refl = |x: f64, y: f64| (c2 * x + s2 * y, s2 * x - c2 * y);
    let mut worst: f64 = 0.0;
    for i in -3..=3 {
        for j in -3..=3 {
            let (x, y) = (0.13 * i as f64, 0.11 * j as f64 + 0.017 * i as f64);
            let (rx, ry) = refl(x, y);
            let (a, b) = f(rx, ry);
            let (u, v) = f(x, y);
            let (ru, rv) = refl(u, v);
            worst = worst.max((a + ru).abs()).max((b + rv).abs());
        }
    }
    worst
}

/// Brute-force grid over [0, π) with golden-section refinement around the best cells.
fn grid_reversible(f: &dyn Fn(f64, f64) -> (f64, f64)) -> bool {
    let n = 10_000;
    let h = PI / n as f64;
    let mut cells: Vec<(f64, f64)> = (0..n).map(|k| (reflection_defect(f, k as f64 * h), k as f64 * h)).collect();
    cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    cells.iter().take(8).any(|&(_, t)| {
        let (mut lo, mut hi) = (t - h, t + h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if reflection_defect(f, m1) < reflection_defect(f, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        reflection_defect(f, 0.5 * (lo + hi)) < 1e-9
    })
}

fn field_of(sys: &NumericSystem) -> impl Fn(f64, f64) -> (f64, f64) + '_ {
    move |x, y| {
        let r = sys.rhs(&[x, y]);
        (r[0], r[1])
    }
}

#[test]
fn reversibility_matches_grid_oracle() {
    let cat = load_catalog().unwrap();
    let mut cases: Vec<(String, PlanarSystem<QuadNum>)> = ["ST22", "ST13", "ST24", "QUARUN5", "CUB6+", "QUARUN32+", "QUARUN53-"]
        .iter()
        .map(|id| (id.to_string(), lookup(&cat, id).unwrap().exact_system().unwrap().clone()))
        .collect();
    // ẋ = −y + xy, ẏ = x rotated by the angle with cos 3/5, sin 4/5, and a non-reversible perturbation of it
    cases.push((
        "rotated".into(),
        system("xdot = -y - 36/125*x^2 - 21/125*x*y + 36/125*y^2\nydot = x - 48/125*x^2 - 28/125*x*y + 48/125*y^2"),
    ));
    cases.push((
        "rotated+".into(),
        system("xdot = -y - 36/125*x^2 - 21/125*x*y + 36/125*y^2 + x^3\nydot = x - 48/125*x^2 - 28/125*x*y + 48/125*y^2"),
    ));
    for (id, sys) in &cases {
        let ns = numeric(sys);
        let oracle = grid_reversible(&field_of(&ns));
        assert_eq!(reversible_any_axis(sys, 0.0).unwrap(), oracle, "{}", id);
    }
    let expected: Vec<bool> = cases.iter().map(|(_, s)| reversible_any_axis(s, 0.0).unwrap()).collect();
    assert_eq!(expected, [true, true, true, true, false, false, false, true, false]);
}
