//! Monomial orders on exponent vectors.

use std::cmp::Ordering;

/// Admissible monomial order. Variable 0 is the largest variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex,
    Grevlex,
    /// Weighted degree first, ties broken by lex.
    WeightedLex(Vec<u32>),
    /// Weighted degree first, ties broken by reverse lex.
    WeightedGrevlex(Vec<u32>),
    /// Block order: grevlex on the first `k` variables, then `rest` on the others.
    Elimination { k: usize, rest: Box<MonomialOrder> },
}

fn lex(a: &[u16], b: &[u16]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// α ≻ β when the last nonzero entry of α − β is negative.
fn revlex(a: &[u16], b: &[u16]) -> Ordering {
    for (x, y) in a.iter().zip(b).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

pub fn total_degree(a: &[u16]) -> u64 {
    a.iter().map(|&e| e as u64).sum()
}

pub fn weighted_deg(a: &[u16], w: &[u32]) -> u64 {
    a.iter().zip(w).map(|(&e, &w)| e as u64 * w as u64).sum()
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u16], b: &[u16]) -> Ordering {
        match self {
            MonomialOrder::Lex => lex(a, b),
            MonomialOrder::Grevlex => total_degree(a)
                .cmp(&total_degree(b))
                .then_with(|| revlex(a, b)),
            MonomialOrder::WeightedLex(w) => weighted_deg(a, w)
                .cmp(&weighted_deg(b, w))
                .then_with(|| lex(a, b)),
            MonomialOrder::WeightedGrevlex(w) => weighted_deg(a, w)
                .cmp(&weighted_deg(b, w))
                .then_with(|| revlex(a, b)),
            MonomialOrder::Elimination { k, rest } => {
                let (ah, at) = a.split_at(*k);
                let (bh, bt) = b.split_at(*k);
                total_degree(ah)
                    .cmp(&total_degree(bh))
                    .then_with(|| revlex(ah, bh))
                    .then_with(|| rest.cmp(at, bt))
            }
        }
    }

    pub fn weights(&self) -> Option<&[u32]> {
        match self {
            MonomialOrder::WeightedLex(w) | MonomialOrder::WeightedGrevlex(w) => Some(w),
            _ => None,
        }
    }

    /// Same order with one extra variable of weight `w` appended.
    pub fn extended(&self, w: u32) -> MonomialOrder {
        match self {
            MonomialOrder::WeightedLex(ws) => {
                let mut v = ws.clone();
                v.push(w);
                MonomialOrder::WeightedLex(v)
            }
            MonomialOrder::WeightedGrevlex(ws) => {
                let mut v = ws.clone();
                v.push(w);
                MonomialOrder::WeightedGrevlex(v)
            }
            MonomialOrder::Elimination { k, rest } => MonomialOrder::Elimination { k: *k, rest: Box::new(rest.extended(w)) },
            o => o.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonomialOrder::Lex => "lex",
            MonomialOrder::Grevlex => "grevlex",
            MonomialOrder::WeightedLex(_) => "weighted-lex",
            MonomialOrder::WeightedGrevlex(_) => "weighted-grevlex",
            MonomialOrder::Elimination { .. } => "elimination",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_textbook() {
        let o = MonomialOrder::Grevlex;
        // x²yz² ≻ x y³ z in grevlex? degrees 5 vs 5, last entry 2 vs 1 ⇒ smaller
        assert_eq!(o.cmp(&[2, 1, 2], &[1, 3, 1]), Ordering::Less);
        assert_eq!(o.cmp(&[1, 2, 0], &[2, 0, 1]), Ordering::Greater);
        assert_eq!(MonomialOrder::Lex.cmp(&[1, 2, 0], &[2, 0, 1]), Ordering::Less);
    }

    #[test]
    fn weighted_orders() {
        let w = vec![1, 2];
        assert_eq!(MonomialOrder::WeightedLex(w.clone()).cmp(&[2, 0], &[0, 1]), Ordering::Greater);
        assert_eq!(MonomialOrder::WeightedLex(w.clone()).cmp(&[1, 0], &[0, 1]), Ordering::Less);
        assert_eq!(MonomialOrder::WeightedGrevlex(w).cmp(&[0, 1], &[2, 0]), Ordering::Less);
    }

    #[test]
    fn elimination_block() {
        let o = MonomialOrder::Elimination { k: 1, rest: Box::new(MonomialOrder::Grevlex) };
        assert_eq!(o.cmp(&[1, 0, 0], &[0, 5, 5]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 2, 0], &[1, 0, 1]), Ordering::Greater);
    }
}
