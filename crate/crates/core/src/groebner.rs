//! Buchberger's algorithm with Gebauer–Möller pair elimination.

use std::cmp::Ordering;
use std::fmt::{self, Display};
use std::sync::Arc;

use crate::order::MonomialOrder;
use crate::poly::{template_weights, Mono, ParamPoly, Vars, WeightedDegreeError};
use crate::scalar::Scalar;

pub const DEFAULT_PAIR_BUDGET: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GbError {
    /// More S-pairs were needed than the budget allows.
    BudgetExceeded { pairs: usize },
    Inhomogeneous { index: usize, low: u64, high: u64 },
    UnknownVariable(String),
    RegistryMismatch,
}

impl Display for GbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GbError::BudgetExceeded { pairs } => write!(f, "pair budget of {} exhausted", pairs),
            GbError::Inhomogeneous { index, low, high } => {
                write!(f, "generator {} is not weighted-homogeneous (degrees {}..{})", index, low, high)
            }
            GbError::UnknownVariable(v) => write!(f, "unknown variable {}", v),
            GbError::RegistryMismatch => write!(f, "generators use different variable registries"),
        }
    }
}

impl std::error::Error for GbError {}

#[derive(Clone, Debug, PartialEq)]
pub struct Ideal<K: Scalar> {
    pub generators: Vec<ParamPoly<K>>,
    pub order: MonomialOrder,
}

impl<K: Scalar> Ideal<K> {
    /// Zero generators are dropped.
    pub fn new(generators: Vec<ParamPoly<K>>, order: MonomialOrder) -> Self {
        Ideal { generators: generators.into_iter().filter(|g| !g.is_zero()).collect(), order }
    }

    pub fn vars(&self) -> Option<&Arc<Vars>> {
        self.generators.first().map(|g| g.vars())
    }

    /// Weights of the order, or the i+j−1 template weights when the order is unweighted.
    pub fn weights(&self) -> Vec<u32> {
        match self.order.weights() {
            Some(w) => w.to_vec(),
            None => self.vars().map(|v| template_weights(v)).unwrap_or_default(),
        }
    }

    /// Index of the first generator that is not weighted-homogeneous.
    pub fn check_homogeneous(&self) -> Result<(), GbError> {
        let w = self.weights();
        for (index, g) in self.generators.iter().enumerate() {
            if let Err(WeightedDegreeError::NotHomogeneous { low, high }) = g.weighted_degree(&w) {
                return Err(GbError::Inhomogeneous { index, low, high });
            }
        }
        Ok(())
    }
}

/// Reduced Gröbner basis: monic, inter-reduced, sorted by decreasing leading monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<K: Scalar> {
    pub elements: Vec<ParamPoly<K>>,
    pub order: MonomialOrder,
}

impl<K: Scalar> GroebnerBasis<K> {
    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].as_constant().map(|k| !k.is_zero()).unwrap_or(false)
    }

    pub fn contains(&self, p: &ParamPoly<K>) -> bool {
        normal_form(p, &self.elements, &self.order).is_zero()
    }

    pub fn reduce(&self, p: &ParamPoly<K>) -> ParamPoly<K> {
        normal_form(p, &self.elements, &self.order)
    }
}

impl<K: Scalar> Display for GroebnerBasis<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, g) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", g)?;
        }
        write!(f, "]")
    }
}

/// Terms in increasing order, so the leading term is last.
#[derive(Clone, Debug)]
struct Dense<K> {
    t: Vec<(Mono, K)>,
}

impl<K: Scalar> Dense<K> {
    fn from_poly(p: &ParamPoly<K>, o: &MonomialOrder) -> Self {
        let mut t: Vec<(Mono, K)> = p.terms().iter().map(|(m, k)| (m.clone(), k.clone())).collect();
        t.sort_by(|a, b| o.cmp(&a.0, &b.0));
        Dense { t }
    }

    fn to_poly(&self, vars: &Arc<Vars>) -> ParamPoly<K> {
        ParamPoly::from_terms(vars, self.t.iter().cloned())
    }

    fn lm(&self) -> &Mono {
        &self.t.last().expect("nonzero").0
    }

    fn lc(&self) -> &K {
        &self.t.last().expect("nonzero").1
    }

    fn is_zero(&self) -> bool {
        self.t.is_empty()
    }

    fn monic(mut self) -> Self {
        if let Some(lc) = self.t.last().map(|x| x.1.clone()) {
            let inv = lc.inv().expect("nonzero");
            for (_, k) in self.t.iter_mut() {
                *k = k.clone() * &inv;
            }
        }
        self
    }

    /// self − c·m·g, where every term of the product is shifted by `m`.
    fn sub_mul(&self, c: &K, m: &[u16], g: &Dense<K>, o: &MonomialOrder) -> Self {
        let shifted: Vec<(Mono, K)> = g.t.iter().map(|(gm, gk)| (mono_mul(gm, m), gk.clone() * c)).collect();
        let mut out = Vec::with_capacity(self.t.len() + shifted.len());
        let (mut i, mut j) = (0, 0);
        while i < self.t.len() && j < shifted.len() {
            match o.cmp(&self.t[i].0, &shifted[j].0) {
                Ordering::Less => {
                    out.push(self.t[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((shifted[j].0.clone(), -shifted[j].1.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let k = self.t[i].1.clone() - &shifted[j].1;
                    if !k.is_zero() {
                        out.push((self.t[i].0.clone(), k));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.t[i..].iter().cloned());
        out.extend(shifted[j..].iter().map(|(m, k)| (m.clone(), -k.clone())));
        Dense { t: out }
    }
}

fn mono_mul(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_div(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lcm(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Full reduction of `p` modulo `basis` (nonzero elements).
fn reduce_dense<K: Scalar>(p: Dense<K>, basis: &[&Dense<K>], o: &MonomialOrder) -> Dense<K> {
    let mut p = p;
    let mut rem: Vec<(Mono, K)> = Vec::new();
    while let Some((m, k)) = p.t.last().cloned() {
        match basis.iter().find(|g| divides(g.lm(), &m)) {
            Some(g) => {
                let c = k / g.lc().clone();
                let q = mono_div(&m, g.lm());
                p = p.sub_mul(&c, &q, g, o);
            }
            None => {
                p.t.pop();
                rem.push((m, k));
            }
        }
    }
    rem.reverse();
    Dense { t: rem }
}

/// Remainder of `p` after full division by `basis` under `order`.
pub fn normal_form<K: Scalar>(p: &ParamPoly<K>, basis: &[ParamPoly<K>], order: &MonomialOrder) -> ParamPoly<K> {
    let dense: Vec<Dense<K>> = basis.iter().filter(|g| !g.is_zero()).map(|g| Dense::from_poly(g, order)).collect();
    let refs: Vec<&Dense<K>> = dense.iter().collect();
    reduce_dense(Dense::from_poly(p, order), &refs, order).to_poly(p.vars())
}

pub fn s_polynomial<K: Scalar>(f: &ParamPoly<K>, g: &ParamPoly<K>, order: &MonomialOrder) -> ParamPoly<K> {
    let (a, b) = (Dense::from_poly(f, order), Dense::from_poly(g, order));
    dense_spoly(&a, &b, order).to_poly(f.vars())
}

fn dense_spoly<K: Scalar>(a: &Dense<K>, b: &Dense<K>, o: &MonomialOrder) -> Dense<K> {
    let l = lcm(a.lm(), b.lm());
    let ma = mono_div(&l, a.lm());
    let mb = mono_div(&l, b.lm());
    let ca = a.lc().inv().expect("nonzero");
    let left = Dense { t: Vec::new() }.sub_mul(&(-ca), &ma, a, o);
    let cb = b.lc().inv().expect("nonzero");
    left.sub_mul(&cb, &mb, b, o)
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

struct Engine<'a, K> {
    order: &'a MonomialOrder,
    polys: Vec<Dense<K>>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl<'a, K: Scalar> Engine<'a, K> {
    fn active_refs(&self) -> Vec<&Dense<K>> {
        self.polys.iter().zip(&self.active).filter(|(_, a)| **a).map(|(p, _)| p).collect()
    }

    /// Gebauer–Möller update with the new element `h`.
    fn update(&mut self, h: Dense<K>) {
        let hi = self.polys.len();
        let hm = h.lm().clone();
        self.polys.push(h);
        self.active.push(true);
        let cands: Vec<Pair> = (0..hi)
            .filter(|&g| self.active[g])
            .map(|g| Pair { i: g, j: hi, lcm: lcm(&self.polys[g].lm().clone(), &hm) })
            .collect();
        let mut kept: Vec<Pair> = Vec::new();
        for (idx, p) in cands.iter().enumerate() {
            let gm = self.polys[p.i].lm();
            if coprime(gm, &hm) {
                kept.push(p.clone());
                continue;
            }
            let dominated = cands[idx + 1..].iter().chain(kept.iter()).any(|q| divides(&q.lcm, &p.lcm));
            if !dominated {
                kept.push(p.clone());
            }
        }
        let fresh: Vec<Pair> = kept.into_iter().filter(|p| !coprime(self.polys[p.i].lm(), &hm)).collect();
        let polys = &self.polys;
        self.pairs.retain(|p| {
            !(divides(&hm, &p.lcm)
                && lcm(polys[p.i].lm(), &hm) != p.lcm
                && lcm(polys[p.j].lm(), &hm) != p.lcm)
        });
        self.pairs.extend(fresh);
        for g in 0..hi {
            if self.active[g] && divides(&hm, self.polys[g].lm()) {
                self.active[g] = false;
            }
        }
    }

    /// Normal selection: smallest lcm, ties by indices.
    fn next_pair(&mut self) -> Option<Pair> {
        let o = self.order;
        let best = (0..self.pairs.len()).min_by(|&a, &b| {
            let (p, q) = (&self.pairs[a], &self.pairs[b]);
            o.cmp(&p.lcm, &q.lcm).then((p.j, p.i).cmp(&(q.j, q.i)))
        })?;
        Some(self.pairs.swap_remove(best))
    }
}

/// Reduced Gröbner basis of `ideal`, failing once more than `max_pairs` S-pairs are reduced.
pub fn buchberger_with_budget<K: Scalar>(ideal: &Ideal<K>, max_pairs: usize) -> Result<GroebnerBasis<K>, GbError> {
    let order = &ideal.order;
    let vars = match ideal.vars() {
        Some(v) => v.clone(),
        None => return Ok(GroebnerBasis { elements: Vec::new(), order: order.clone() }),
    };
    if ideal.generators.iter().any(|g| !g.same_registry(&ideal.generators[0])) {
        return Err(GbError::RegistryMismatch);
    }
    let unit = || GroebnerBasis { elements: vec![ParamPoly::one(&vars)], order: order.clone() };
    let mut eng = Engine { order, polys: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    let mut gens: Vec<Dense<K>> = ideal.generators.iter().map(|g| Dense::from_poly(g, order)).collect();
    gens.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    for g in gens {
        let h = reduce_dense(g, &eng.active_refs(), order);
        if h.is_zero() {
            continue;
        }
        if h.lm().iter().all(|&e| e == 0) {
            return Ok(unit());
        }
        eng.update(h.monic());
    }
    let mut processed = 0usize;
    while let Some(p) = eng.next_pair() {
        processed += 1;
        if processed > max_pairs {
            return Err(GbError::BudgetExceeded { pairs: max_pairs });
        }
        let s = dense_spoly(&eng.polys[p.i], &eng.polys[p.j], order);
        let h = reduce_dense(s, &eng.active_refs(), order);
        if h.is_zero() {
            continue;
        }
        if h.lm().iter().all(|&e| e == 0) {
            return Ok(unit());
        }
        eng.update(h.monic());
    }
    let minimal: Vec<Dense<K>> = eng.polys.iter().zip(&eng.active).filter(|(_, a)| **a).map(|(p, _)| p.clone()).collect();
    let mut reduced: Vec<Dense<K>> = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others: Vec<&Dense<K>> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        let lead = Dense { t: vec![g.t.last().unwrap().clone()] };
        let tail = Dense { t: g.t[..g.t.len() - 1].to_vec() };
        let mut r = reduce_dense(tail, &others, order);
        r.t.push(lead.t[0].clone());
        reduced.push(r.monic());
    }
    reduced.sort_by(|a, b| order.cmp(b.lm(), a.lm()));
    Ok(GroebnerBasis { elements: reduced.iter().map(|d| d.to_poly(&vars)).collect(), order: order.clone() })
}

pub fn buchberger<K: Scalar>(ideal: &Ideal<K>) -> Result<GroebnerBasis<K>, GbError> {
    buchberger_with_budget(ideal, DEFAULT_PAIR_BUDGET)
}

/// Every S-polynomial of `basis` reduces to zero (no criteria applied).
pub fn is_groebner<K: Scalar>(basis: &[ParamPoly<K>], order: &MonomialOrder) -> bool {
    let dense: Vec<Dense<K>> = basis.iter().filter(|g| !g.is_zero()).map(|g| Dense::from_poly(g, order)).collect();
    let refs: Vec<&Dense<K>> = dense.iter().collect();
    for i in 0..dense.len() {
        for j in i + 1..dense.len() {
            if !reduce_dense(dense_spoly(&dense[i], &dense[j], order), &refs, order).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Each element monic with no term divisible by another element's leading monomial.
pub fn is_reduced<K: Scalar>(basis: &[ParamPoly<K>], order: &MonomialOrder) -> bool {
    let dense: Vec<Dense<K>> = basis.iter().map(|g| Dense::from_poly(g, order)).collect();
    dense.iter().enumerate().all(|(i, g)| {
        !g.is_zero()
            && g.lc().is_one()
            && dense
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .all(|(_, h)| g.t.iter().all(|(m, _)| !divides(h.lm(), m)))
    })
}

fn fresh_name(vars: &Vars, base: &str) -> String {
    let mut name = base.to_string();
    while vars.index(&name).is_some() {
        name.push('_');
    }
    name
}

/// Rabinowitsch test: f ∈ √I iff I + ⟨1 − t·f⟩ = ⟨1⟩.
pub fn radical_membership_with_budget<K: Scalar>(f: &ParamPoly<K>, ideal: &Ideal<K>, max_pairs: usize) -> Result<bool, GbError> {
    if f.is_zero() {
        return Ok(true);
    }
    let vars = f.vars().clone();
    if ideal.generators.iter().any(|g| !g.same_registry(f)) {
        return Err(GbError::RegistryMismatch);
    }
    let ext = vars.with(&fresh_name(&vars, "t"));
    let lift = |p: &ParamPoly<K>| p.to_registry(&ext).expect("registry extension");
    let t = ParamPoly::var(&ext, vars.len());
    let mut gens: Vec<ParamPoly<K>> = ideal.generators.iter().map(lift).collect();
    gens.push(&ParamPoly::one(&ext) - &(&t * &lift(f)));
    let gb = buchberger_with_budget(&Ideal::new(gens, ideal.order.extended(1)), max_pairs)?;
    Ok(gb.is_unit())
}

pub fn radical_membership<K: Scalar>(f: &ParamPoly<K>, ideal: &Ideal<K>) -> Result<bool, GbError> {
    radical_membership_with_budget(f, ideal, DEFAULT_PAIR_BUDGET)
}

/// Saturation I : f^∞, by eliminating t from I + ⟨1 − t·f⟩.
pub fn saturate<K: Scalar>(ideal: &Ideal<K>, f: &ParamPoly<K>, max_pairs: usize) -> Result<GroebnerBasis<K>, GbError> {
    let vars = f.vars().clone();
    let mut names = vec![fresh_name(&vars, "t")];
    names.extend(vars.names().iter().cloned());
    let ext = Vars::new(&names);
    let lift = |p: &ParamPoly<K>| p.to_registry(&ext).expect("registry extension");
    let t = ParamPoly::var(&ext, 0);
    let mut gens: Vec<ParamPoly<K>> = ideal.generators.iter().map(lift).collect();
    gens.push(&ParamPoly::one(&ext) - &(&t * &lift(f)));
    let order = MonomialOrder::Elimination { k: 1, rest: Box::new(ideal.order.clone()) };
    let gb = buchberger_with_budget(&Ideal::new(gens, order), max_pairs)?;
    let elements: Vec<ParamPoly<K>> = gb
        .elements
        .iter()
        .filter(|g| g.degree_in(0) == 0)
        .map(|g| g.to_registry(&vars).expect("t eliminated"))
        .collect();
    Ok(GroebnerBasis { elements, order: ideal.order.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape<K: Scalar> {
    /// The basis is {1}.
    Empty,
    /// xᵢ = gᵢ(xₙ) for i < n, and eliminant(xₙ) = 0.
    Shape { coordinates: Vec<ParamPoly<K>>, eliminant: ParamPoly<K> },
    NotShape,
}

/// Reads a lex basis of the form {x₁ − g₁(xₙ), …, gₙ(xₙ)}.
pub fn shape_extract<K: Scalar>(gb: &GroebnerBasis<K>) -> Shape<K> {
    if gb.is_unit() {
        return Shape::Empty;
    }
    if gb.order != MonomialOrder::Lex || gb.elements.is_empty() {
        return Shape::NotShape;
    }
    let vars = gb.elements[0].vars().clone();
    let n = vars.len();
    if gb.elements.len() != n {
        return Shape::NotShape;
    }
    let last = n - 1;
    let univariate = |p: &ParamPoly<K>| p.terms().keys().all(|m| m[..last].iter().all(|&e| e == 0));
    let mut coordinates = Vec::with_capacity(last);
    for (i, g) in gb.elements[..last].iter().enumerate() {
        let mut xi = vec![0u16; n];
        xi[i] = 1;
        let x = ParamPoly::monomial(&vars, &xi, K::one());
        let rest = g - &x;
        if g.coeff(&xi) != K::one() || !univariate(&rest) {
            return Shape::NotShape;
        }
        coordinates.push(-rest);
    }
    let eliminant = gb.elements[last].clone();
    if !univariate(&eliminant) {
        return Shape::NotShape;
    }
    Shape::Shape { coordinates, eliminant }
}

/// Splits by setting the pivot variable to 0 and to 1.
pub fn homogenization_split<K: Scalar>(ideal: &Ideal<K>, pivot: &str) -> Result<(Ideal<K>, Ideal<K>), GbError> {
    ideal.check_homogeneous()?;
    let vars = match ideal.vars() {
        Some(v) => v.clone(),
        None => return Ok((ideal.clone(), ideal.clone())),
    };
    let v = vars.index(pivot).ok_or_else(|| GbError::UnknownVariable(pivot.to_string()))?;
    let branch = |val: K| {
        let gens = ideal.generators.iter().map(|g| g.subs_scalar(&[(v, val.clone())])).collect();
        Ideal::new(gens, ideal.order.clone())
    };
    Ok((branch(K::zero()), branch(K::one())))
}
