//! Incremental fraction-free row echelon over the integers.
//!
//! Vectors are sparse, sorted by index and kept primitive (coprime entries,
//! positive leading entry). Each stored row may carry a tag vector that
//! records the combination of inserted inputs producing it; a dependent
//! insertion then yields a kernel relation among the inputs.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::Q;

pub type IntVec = Vec<(u32, BigInt)>;

pub fn is_zero(v: &IntVec) -> bool {
    v.is_empty()
}

/// `a*x + b*y` on sparse vectors.
pub fn lin_comb(a: &BigInt, x: &IntVec, b: &BigInt, y: &IntVec) -> IntVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            let v = a * &x[i].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
        } else if take_y {
            let v = b * &y[j].1;
            if !v.is_zero() {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = a * &x[i].1 + b * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn content(v: &IntVec, w: &IntVec) -> BigInt {
    let mut g = BigInt::zero();
    for (_, x) in v.iter().chain(w.iter()) {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide(v: &mut IntVec, g: &BigInt) {
    for (_, x) in v.iter_mut() {
        *x = &*x / g;
    }
}

/// Scale a rational vector to a primitive integer vector; returns the factor used.
pub fn from_rational(v: &[(u32, Q)]) -> (IntVec, Q) {
    let mut l = BigInt::one();
    for (_, x) in v {
        l = l.lcm(x.denom());
    }
    let mut out: IntVec = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (*i, x.numer() * (&l / x.denom())))
        .collect();
    out.sort_by_key(|e| e.0);
    (out, Q::from_integer(l))
}

#[derive(Clone, Debug)]
struct Row {
    v: IntVec,
    tag: IntVec,
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivots: HashMap<u32, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_pair(&self, mut v: IntVec, mut tag: IntVec) -> (IntVec, IntVec) {
        loop {
            let Some(&(c, ref lead)) = v.first() else { break };
            let Some(&ri) = self.pivots.get(&c) else { break };
            let row = &self.rows[ri];
            let p = &row.v[0].1;
            let g = p.gcd(lead);
            let a = p / &g;
            let b = -(lead / &g);
            v = lin_comb(&a, &v, &b, &row.v);
            if !row.tag.is_empty() || !tag.is_empty() {
                tag = lin_comb(&a, &tag, &b, &row.tag);
            }
            let g2 = content(&v, &tag);
            if !g2.is_zero() && !g2.is_one() {
                divide(&mut v, &g2);
                divide(&mut tag, &g2);
            }
        }
        (v, tag)
    }

    /// Insert a vector. Returns `Some(tag)` when it depends on earlier rows
    /// (the reduced tag is then a kernel relation), `None` when it extends
    /// the span.
    pub fn insert_tagged(&mut self, v: IntVec, tag: IntVec) -> Option<IntVec> {
        let (mut v, mut tag) = self.reduce_pair(v, tag);
        if v.is_empty() {
            return Some(tag);
        }
        if v[0].1.is_negative() {
            for (_, x) in v.iter_mut() {
                *x = -&*x;
            }
            for (_, x) in tag.iter_mut() {
                *x = -&*x;
            }
        }
        let c = v[0].0;
        self.pivots.insert(c, self.rows.len());
        self.rows.push(Row { v, tag });
        None
    }

    /// Insert without tracking; returns true when the span grew.
    pub fn insert(&mut self, v: IntVec) -> bool {
        self.insert_tagged(v, Vec::new()).is_none()
    }

    /// Echelon rows, each with its pivot as first entry.
    pub fn rows_iter(&self) -> impl Iterator<Item = &IntVec> {
        self.rows.iter().map(|r| &r.v)
    }

    pub fn contains(&self, v: &IntVec) -> bool {
        self.reduce_pair(v.clone(), Vec::new()).0.is_empty()
    }
}

/// Kernel of the map sending input `j` to `images[j]`, as integer relations.
pub fn kernel(images: &[IntVec]) -> Vec<IntVec> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for (j, v) in images.iter().enumerate() {
        let tag = vec![(j as u32, BigInt::one())];
        if let Some(rel) = ech.insert_tagged(v.clone(), tag) {
            out.push(rel);
        }
    }
    out
}

pub fn rank(vs: &[IntVec]) -> usize {
    let mut ech = Echelon::new();
    for v in vs {
        ech.insert(v.clone());
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(xs: &[(u32, i64)]) -> IntVec {
        xs.iter().map(|&(i, x)| (i, BigInt::from(x))).collect()
    }

    #[test]
    fn kernel_relation() {
        let a = iv(&[(0, 1), (1, 2)]);
        let b = iv(&[(1, 3), (2, 1)]);
        let c = iv(&[(0, 3), (1, 12), (2, 2)]);
        let k = kernel(&[a.clone(), b.clone(), c.clone()]);
        assert_eq!(k.len(), 1);
        let rel = &k[0];
        let mut acc: IntVec = Vec::new();
        for (j, t) in rel {
            let v = [&a, &b, &c][*j as usize];
            acc = lin_comb(&BigInt::one(), &acc, t, v);
        }
        assert!(acc.is_empty());
    }

    #[test]
    fn rank_counts_independent() {
        let vs = vec![iv(&[(0, 2)]), iv(&[(0, 4)]), iv(&[(1, 1), (5, 7)])];
        assert_eq!(rank(&vs), 2);
    }
}
