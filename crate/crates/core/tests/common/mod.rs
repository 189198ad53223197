#![allow(dead_code)]

use isochron::lienard::PlanarSystem;
use isochron::parse::{parse_poly, parse_system_text};
use isochron::{ParamPoly, Rat, Scalar, Vars};
use num_traits::{One, Zero};

pub const QUARTIC_TEMPLATE: &str = "
params a11, a20, a21, a30, a31, a40, b02, b11, b20, b12, b21, b30, b22, b31, b40
xdot = -y + a11*x*y + a20*x^2 + a21*x^2*y + a30*x^3 + a31*x^3*y + a40*x^4
ydot = x + b02*y^2 + b11*x*y + b20*x^2 + b12*x*y^2 + b21*x^2*y + b30*x^3 + b22*x^2*y^2 + b31*x^3*y + b40*x^4
";

pub const CUBIC_TEMPLATE: &str = "
params a11, a20, a21, a30, b20, b11, b02, b21, b12, b30
xdot = -y + a11*x*y + a20*x^2 + a21*x^2*y + a30*x^3
ydot = x + b20*x^2 + b11*x*y + b02*y^2 + b21*y*x^2 + b12*y^2*x + b30*x^3
";

pub fn system<K: Scalar>(src: &str) -> PlanarSystem<K> {
    parse_system_text(src).unwrap().system::<K>().unwrap()
}

pub fn polys<K: Scalar>(vars: &[&str], src: &[&str]) -> Vec<ParamPoly<K>> {
    let v = Vars::new(vars);
    src.iter().map(|s| parse_poly::<K>(s, &v).unwrap()).collect()
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Dense truncated power series over ℚ, written independently of the library's series type.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense(pub Vec<Rat>);

impl Dense {
    pub fn from_ints(c: &[i64], n: usize) -> Self {
        let mut v: Vec<Rat> = c.iter().map(|&k| Rat::from_integer(k.into())).collect();
        v.resize(n + 1, Rat::zero());
        v.truncate(n + 1);
        Dense(v)
    }

    pub fn from_rats(c: &[Rat], n: usize) -> Self {
        let mut v = c.to_vec();
        v.resize(n + 1, Rat::zero());
        v.truncate(n + 1);
        Dense(v)
    }

    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn add(&self, o: &Self) -> Self {
        Dense(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Dense(self.0.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n();
        let mut r = vec![Rat::zero(); n + 1];
        for i in 0..=n {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                r[i + j] += &self.0[i] * &o.0[j];
            }
        }
        Dense(r)
    }

    pub fn inv(&self) -> Self {
        let n = self.n();
        let a0 = self.0[0].clone();
        let mut r = vec![Rat::zero(); n + 1];
        r[0] = Rat::one() / &a0;
        for k in 1..=n {
            let mut s = Rat::zero();
            for j in 1..=k {
                s += &self.0[j] * &r[k - j];
            }
            r[k] = -s / &a0;
        }
        Dense(r)
    }

    /// exp(a) for a(0) = 0, via b' = a'b.
    pub fn exp(&self) -> Self {
        assert!(self.0[0].is_zero());
        let n = self.n();
        let mut b = vec![Rat::zero(); n + 1];
        b[0] = Rat::one();
        for k in 1..=n {
            let mut s = Rat::zero();
            for j in 1..=k {
                s += Rat::from_integer((j as i64).into()) * &self.0[j] * &b[k - j];
            }
            b[k] = s / Rat::from_integer((k as i64).into());
        }
        Dense(b)
    }

    /// a^α for a(0) = 1 (Miller recurrence).
    pub fn pow(&self, alpha: &Rat) -> Self {
        assert!(self.0[0].is_one());
        let n = self.n();
        let mut b = vec![Rat::zero(); n + 1];
        b[0] = Rat::one();
        for k in 1..=n {
            let mut s = Rat::zero();
            for j in 1..=k {
                let w = (alpha + Rat::one()) * Rat::from_integer((j as i64).into()) - Rat::from_integer((k as i64).into());
                s += w * &self.0[j] * &b[k - j];
            }
            b[k] = s / Rat::from_integer((k as i64).into());
        }
        Dense(b)
    }

    pub fn integrate(&self) -> Self {
        let n = self.n();
        let mut r = vec![Rat::zero(); n + 1];
        for k in 1..=n {
            r[k] = &self.0[k - 1] / Rat::from_integer((k as i64).into());
        }
        Dense(r)
    }
}
