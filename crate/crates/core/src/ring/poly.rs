//! Sparse multivariate polynomials over the rationals.
//!
//! Exponent vectors are indexed by generator slot. Terms are kept in a
//! `BTreeMap`, so iteration follows lexicographic order with slot 0 most
//! significant; the leading term is the last entry.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

pub type Mono = SmallVec<[u16; 8]>;
pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::from_elem(0, nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, slot: usize) -> Self {
        Poly::monomial(nvars, unit_mono(nvars, slot, 1), Q::one())
    }

    pub fn monomial(nvars: usize, m: Mono, c: Q) -> Self {
        debug_assert_eq!(m.len(), nvars);
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().iter().all(|&e| e == 0),
            _ => false,
        }
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn leading(&self) -> Option<(&Mono, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Mono, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (mono_mul(k, m), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative in generator slot `slot`.
    pub fn diff(&self, slot: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[slot];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[slot] = e - 1;
            out.add_term(m2, c * Q::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn degree_in(&self, slot: usize) -> u16 {
        self.terms.keys().map(|m| m[slot]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u32).sum()).max().unwrap_or(0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        self.terms.keys().any(|m| m[slot] > 0)
    }

    /// Coefficients with respect to one slot: entry `k` is the coefficient of `v^k`.
    pub fn coeffs_in(&self, slot: usize) -> Vec<Poly> {
        let d = self.degree_in(slot) as usize;
        let mut out = vec![Poly::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            let k = m[slot] as usize;
            let mut m2 = m.clone();
            m2[slot] = 0;
            out[k].terms.insert(m2, c.clone());
        }
        out
    }

    pub fn from_coeffs(nvars: usize, slot: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut m2 = m.clone();
                m2[slot] += k as u16;
                out.add_term(m2, v.clone());
            }
        }
        out
    }

    pub fn lc_in(&self, slot: usize) -> Poly {
        let d = self.degree_in(slot);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[slot] == d {
                let mut m2 = m.clone();
                m2[slot] = 0;
                out.terms.insert(m2, c.clone());
            }
        }
        out
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&(Q::one() / c)));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut r = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let t = mono_div(&rm, &lm)?;
            let tc = rc / &lc;
            q.add_term(t.clone(), tc.clone());
            for (m, c) in &d.terms {
                r.add_term(mono_mul(m, &t), -(c * &tc));
            }
        }
        Some(q)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_mono(&self) -> Mono {
        let mut it = self.terms.keys();
        let mut acc = match it.next() {
            Some(m) => m.clone(),
            None => return Mono::from_elem(0, self.nvars),
        };
        for m in it {
            for (a, b) in acc.iter_mut().zip(m.iter()) {
                *a = (*a).min(*b);
            }
        }
        acc
    }

    pub fn shift_down(&self, m: &Mono) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (mono_div(k, m).expect("monomial shift"), c.clone()))
                .collect(),
        }
    }

    /// Rational scalar `s` such that `self / s` has coprime integer coefficients
    /// and a positive leading coefficient.
    pub fn integer_content(&self) -> Q {
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        if g.is_zero() {
            return Q::one();
        }
        let s = Q::new(g, l);
        match self.leading() {
            Some((_, c)) if c.is_negative() => -s,
            _ => s,
        }
    }

    pub fn primitive_integer(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let s = self.integer_content();
        self.scale(&(Q::one() / s))
    }

    /// Substitute generator slot by a rational value.
    pub fn eval_slot(&self, slot: usize, v: &Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[slot];
            let mut m2 = m.clone();
            m2[slot] = 0;
            let f = pow_q(v, e as u32);
            out.add_term(m2, c * f);
        }
        out
    }

    /// Substitute generator slot by a polynomial.
    pub fn subst_slot(&self, slot: usize, v: &Poly) -> Poly {
        let coeffs = self.coeffs_in(slot);
        let mut out = Poly::zero(self.nvars);
        for c in coeffs.iter().rev() {
            out = out.mul(v).add(c);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

pub fn pow_q(v: &Q, e: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= v;
    }
    acc
}

pub fn unit_mono(nvars: usize, slot: usize, e: u16) -> Mono {
    let mut m = Mono::from_elem(0, nvars);
    m[slot] = e;
    m
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

pub fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    let mut out = Mono::with_capacity(a.len());
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return None;
        }
        out.push(x - y);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn exact_division_roundtrip() {
        let a = x(0).add(&x(1)).add(&Poly::one(3));
        let b = x(0).sub(&x(2).scale(&q_int(2)));
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert_eq!(p.div_exact(&b).unwrap(), a);
        assert!(p.add(&Poly::one(3)).div_exact(&a).is_none());
    }

    #[test]
    fn derivative_of_power() {
        let p = x(0).pow(3);
        assert_eq!(p.diff(0), x(0).pow(2).scale(&q_int(3)));
        assert!(p.diff(1).is_zero());
    }

    #[test]
    fn primitive_part_sign_and_content() {
        let p = x(0).scale(&q_frac(-2, 3)).add(&Poly::constant(3, q_frac(4, 9)));
        let pp = p.primitive_integer();
        assert_eq!(pp, x(0).scale(&q_int(3)).sub(&Poly::constant(3, q_int(2))));
    }
}
