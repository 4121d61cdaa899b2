//! Multivariate polynomial gcd over the rationals.
//!
//! Recursive content/primitive-part decomposition with a subresultant
//! remainder sequence in the chosen main variable. The result is normalized
//! to coprime integer coefficients with a positive leading coefficient.

use super::poly::{Mono, Poly};

pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars();
    if a.is_zero() {
        return b.primitive_integer();
    }
    if b.is_zero() {
        return a.primitive_integer();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if a == b {
        return a.primitive_integer();
    }
    // Pull out the common monomial factor first.
    let ma = a.min_mono();
    let mb = b.min_mono();
    let mg: Mono = ma.iter().zip(mb.iter()).map(|(x, y)| *x.min(y)).collect();
    let a1 = a.shift_down(&ma);
    let b1 = b.shift_down(&mb);
    let core = gcd_nomono(&a1, &b1);
    if mg.iter().all(|&e| e == 0) {
        core
    } else {
        core.mul(&Poly::monomial(n, mg, num_traits::One::one())).primitive_integer()
    }
}

fn gcd_nomono(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars();
    if a.is_zero() {
        return b.primitive_integer();
    }
    if b.is_zero() {
        return a.primitive_integer();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if a.len() == 1 || b.len() == 1 {
        // A monomial-free polynomial sharing a factor with a monomial must be constant.
        return Poly::one(n);
    }
    // A variable present in only one argument cannot divide the gcd.
    for v in 0..n {
        let ua = a.uses_slot(v);
        let ub = b.uses_slot(v);
        if ua && !ub {
            return gcd(&content(a, v), b);
        }
        if ub && !ua {
            return gcd(a, &content(b, v));
        }
    }
    let v = (0..n)
        .filter(|&v| a.uses_slot(v))
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
        .expect("non-constant polynomial uses some variable");
    let ca = content(a, v);
    let cb = content(b, v);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = subresultant_gcd(&pa, &pb, v);
    let g = primitive_part(&g, v);
    c.mul(&g).primitive_integer()
}

/// Gcd of the coefficients of `a` viewed as a polynomial in slot `v`.
pub fn content(a: &Poly, v: usize) -> Poly {
    let n = a.nvars();
    let mut coeffs: Vec<Poly> = a.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(|c| c.len());
    let mut g = Poly::zero(n);
    for c in coeffs {
        g = gcd(&g, &c);
        if g.is_constant() {
            return Poly::one(n);
        }
    }
    g
}

pub fn primitive_part(a: &Poly, v: usize) -> Poly {
    if a.is_zero() {
        return a.clone();
    }
    let c = content(a, v);
    a.div_exact(&c).expect("content divides").primitive_integer()
}

fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v);
    let lb = b.lc_in(v);
    let mut r = a.clone();
    let da = a.degree_in(v);
    let mut e = da as i32 - db as i32 + 1;
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.lc_in(v);
        let shift = super::poly::unit_mono(a.nvars(), v, dr - db);
        let t = lr.mul_term(&shift, &num_traits::One::one());
        r = r.mul(&lb).sub(&t.mul(b));
        e -= 1;
    }
    if e > 0 {
        r = r.mul(&lb.pow(e as u32));
    }
    r
}

fn subresultant_gcd(a: &Poly, b: &Poly, v: usize) -> Poly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let n = a.nvars();
    let mut g = Poly::one(n);
    let mut h = Poly::one(n);
    loop {
        let delta = a.degree_in(v) - b.degree_in(v);
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return b;
        }
        if r.degree_in(v) == 0 {
            return Poly::one(n);
        }
        a = b;
        let denom = g.mul(&h.pow(delta as u32));
        b = r.div_exact(&denom).expect("subresultant division is exact");
        g = a.lc_in(v);
        if delta == 0 {
            // h unchanged
        } else if delta == 1 {
            h = g.clone();
        } else {
            let num = g.pow(delta as u32);
            let den = h.pow(delta as u32 - 1);
            h = num.div_exact(&den).expect("subresultant h update is exact");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::poly::{q_int, Q};

    fn x(i: usize) -> Poly {
        Poly::var(4, i)
    }
    fn c(v: i64) -> Poly {
        Poly::constant(4, q_int(v))
    }

    #[test]
    fn recovers_common_factor() {
        let f = x(0).mul(&x(1)).add(&c(1));
        let g1 = x(2).add(&x(0).pow(2));
        let g2 = x(3).sub(&x(1)).add(&c(3));
        let a = f.mul(&g1);
        let b = f.mul(&g2).mul(&f);
        assert_eq!(gcd(&a, &b), f.primitive_integer());
    }

    #[test]
    fn coprime_gives_one() {
        let a = x(0).add(&c(1));
        let b = x(0).sub(&c(1));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn monomial_factor() {
        let a = x(0).pow(2).mul(&x(1));
        let b = x(0).mul(&x(1).pow(3)).add(&x(0).mul(&x(2)));
        assert_eq!(gcd(&a, &b), x(0));
    }

    #[test]
    fn scaled_inputs() {
        let f = x(1).sub(&x(2)).scale(&Q::new(3.into(), 7.into()));
        let a = f.mul(&x(0).add(&c(2)));
        let b = f.mul(&x(3));
        assert_eq!(gcd(&a, &b), x(1).sub(&x(2)));
    }
}
