use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::gcd::gcd;
use super::poly::{Mono, Poly, Q};
use super::{check_chart, same_chart, ChartRef, Slot, VarKind};
use crate::error::{Error, Result};

/// Reduced quotient `num / den` of chart polynomials.
///
/// Invariants: both parts are reduced modulo `sin² + cos² = 1`, the gcd of
/// the parts is a unit, all coefficients are integers with no common factor
/// and the leading coefficient of `den` is positive.
#[derive(Clone, Debug)]
pub struct ScalarExpr {
    chart: ChartRef,
    num: Poly,
    den: Poly,
}

pub(crate) fn reduce_circle(chart: &ChartRef, p: Poly) -> Poly {
    let trig = chart.periodic_slots();
    if trig.is_empty() {
        return p;
    }
    let needs = p.terms().keys().any(|m| trig.iter().any(|&(_, s)| m[s] >= 2));
    if !needs {
        return p;
    }
    let n = p.nvars();
    let mut out = Poly::zero(n);
    for (m, c) in p.terms() {
        let mut base = m.clone();
        let mut factor = Poly::one(n);
        for &(cs, ss) in &trig {
            let e = base[ss];
            if e >= 2 {
                base[ss] = e % 2;
                let one_minus_c2 = Poly::one(n).sub(&Poly::var(n, cs).pow(2));
                factor = factor.mul(&one_minus_c2.pow((e / 2) as u32));
            }
        }
        out = out.add(&factor.mul_term(&base, c));
    }
    out
}

fn rescale(num: Poly, den: Poly) -> (Poly, Poly) {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for c in num.terms().values().chain(den.terms().values()) {
        g = g.gcd(c.numer());
        l = l.lcm(c.denom());
    }
    let mut s = Q::new(l, g);
    if den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
        s = -s;
    }
    if s.is_one() {
        (num, den)
    } else {
        (num.scale(&s), den.scale(&s))
    }
}

impl ScalarExpr {
    fn from_parts_unchecked(chart: ChartRef, num: Poly, den: Poly) -> Self {
        ScalarExpr { chart, num, den }
    }

    /// Build `num / den` and bring it to canonical form.
    pub fn from_parts(chart: &ChartRef, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = reduce_circle(chart, num);
        let den = reduce_circle(chart, den);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(chart, num, den))
    }

    fn canonical(chart: &ChartRef, num: Poly, den: Poly) -> Self {
        let n = chart.nslots();
        if num.is_zero() {
            return Self::zero(chart);
        }
        if den.is_constant() {
            let (num, den) = rescale(num, den);
            return Self::from_parts_unchecked(chart.clone(), num, den);
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let (num, den) = rescale(num, den);
        debug_assert_eq!(num.nvars(), n);
        Self::from_parts_unchecked(chart.clone(), num, den)
    }

    pub fn from_poly(chart: &ChartRef, p: Poly) -> Self {
        let p = reduce_circle(chart, p);
        Self::canonical(chart, p, Poly::one(chart.nslots()))
    }

    pub fn zero(chart: &ChartRef) -> Self {
        let n = chart.nslots();
        Self::from_parts_unchecked(chart.clone(), Poly::zero(n), Poly::one(n))
    }

    pub fn one(chart: &ChartRef) -> Self {
        Self::constant(chart, Q::one())
    }

    pub fn constant(chart: &ChartRef, c: Q) -> Self {
        let n = chart.nslots();
        Self::canonical(chart, Poly::constant(n, c), Poly::one(n))
    }

    pub fn int(chart: &ChartRef, c: i64) -> Self {
        Self::constant(chart, Q::from_integer(c.into()))
    }

    /// Coordinate function of an affine or constant variable.
    pub fn var(chart: &ChartRef, var: usize) -> Result<Self> {
        match chart.var(var).kind {
            VarKind::Periodic => Err(Error::InvalidInput(format!(
                "periodic variable `{}` is only available through cos/sin",
                chart.name(var)
            ))),
            _ => Ok(Self::from_poly(chart, Poly::var(chart.nslots(), chart.slot_of(var)))),
        }
    }

    pub fn var_named(chart: &ChartRef, name: &str) -> Result<Self> {
        Self::var(chart, chart.require(name)?)
    }

    pub fn cos(chart: &ChartRef, var: usize) -> Result<Self> {
        let (c, _) = chart.trig_slots(var).ok_or_else(|| {
            Error::InvalidInput(format!("cos of non-periodic variable `{}`", chart.name(var)))
        })?;
        Ok(Self::from_poly(chart, Poly::var(chart.nslots(), c)))
    }

    pub fn sin(chart: &ChartRef, var: usize) -> Result<Self> {
        let (_, s) = chart.trig_slots(var).ok_or_else(|| {
            Error::InvalidInput(format!("sin of non-periodic variable `{}`", chart.name(var)))
        })?;
        Ok(Self::from_poly(chart, Poly::var(chart.nslots(), s)))
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }
    pub fn numer(&self) -> &Poly {
        &self.num
    }
    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial itself when the denominator is constant.
    pub fn as_poly(&self) -> Option<Poly> {
        let d = self.den.constant_value()?;
        Some(self.num.scale(&(Q::one() / d)))
    }

    pub fn as_constant(&self) -> Option<Q> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn is_constant_value(&self, q: &Q) -> bool {
        self.as_constant().map(|c| &c == q).unwrap_or(false)
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        check_chart(&self.chart, &o.chart)?;
        Ok(self.add_impl(o))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        check_chart(&self.chart, &o.chart)?;
        Ok(self.mul_impl(o))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        check_chart(&self.chart, &o.chart)?;
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self.num.mul(&o.den);
        let den = self.den.mul(&o.num);
        Self::from_parts(&self.chart, num, den)
    }

    fn add_impl(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let ch = &self.chart;
        if self.den == o.den {
            let num = self.num.add(&o.num);
            return Self::canonical(ch, num, self.den.clone());
        }
        if self.den.is_constant() && o.den.is_constant() {
            let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
            return Self::canonical(ch, num, self.den.mul(&o.den));
        }
        let g = gcd(&self.den, &o.den);
        let (a, b) = if g.is_constant() {
            (self.den.clone(), o.den.clone())
        } else {
            (self.den.div_exact(&g).unwrap(), o.den.div_exact(&g).unwrap())
        };
        let num = reduce_circle(ch, self.num.mul(&b).add(&o.num.mul(&a)));
        let den = reduce_circle(ch, self.den.mul(&b));
        Self::canonical(ch, num, den)
    }

    fn mul_impl(&self, o: &Self) -> Self {
        let ch = &self.chart;
        if self.is_zero() || o.is_zero() {
            return Self::zero(ch);
        }
        if self.den.is_constant() && o.den.is_constant() {
            let num = reduce_circle(ch, self.num.mul(&o.num));
            return Self::canonical(ch, num, self.den.mul(&o.den));
        }
        if ch.has_periodic() {
            let num = reduce_circle(ch, self.num.mul(&o.num));
            let den = reduce_circle(ch, self.den.mul(&o.den));
            return Self::canonical(ch, num, den);
        }
        // Cross-cancel before multiplying.
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let (num, den) = rescale(n1.mul(&n2), d1.mul(&d2));
        Self::from_parts_unchecked(ch.clone(), num, den)
    }

    pub fn scale(&self, q: &Q) -> Self {
        if q.is_zero() {
            return Self::zero(&self.chart);
        }
        let (num, den) = rescale(self.num.scale(q), self.den.clone());
        Self::from_parts_unchecked(self.chart.clone(), num, den)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (num, den) = rescale(self.den.clone(), self.num.clone());
        Ok(Self::from_parts_unchecked(self.chart.clone(), num, den))
    }

    pub fn powi(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inv()?.powi(-e);
        }
        let mut acc = Self::one(&self.chart);
        let mut base = self.clone();
        let mut e = e as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        Ok(acc)
    }

    fn poly_derive(&self, p: &Poly, var: usize) -> Poly {
        let ch = &self.chart;
        match ch.var(var).kind {
            VarKind::Constant => Poly::zero(ch.nslots()),
            VarKind::Affine => p.diff(ch.slot_of(var)),
            VarKind::Periodic => {
                let (c, s) = ch.trig_slots(var).unwrap();
                let n = ch.nslots();
                // d/dθ cos = −sin, d/dθ sin = cos
                let dc = p.diff(c).mul(&Poly::var(n, s)).neg();
                let ds = p.diff(s).mul(&Poly::var(n, c));
                reduce_circle(ch, dc.add(&ds))
            }
        }
    }

    /// Partial derivative along a chart variable.
    pub fn derive(&self, var: usize) -> Self {
        let ch = &self.chart;
        if self.is_zero() || ch.var(var).kind == VarKind::Constant {
            return Self::zero(ch);
        }
        let dn = self.poly_derive(&self.num, var);
        if self.den.is_constant() {
            return Self::canonical(ch, dn, self.den.clone());
        }
        let dd = self.poly_derive(&self.den, var);
        if dd.is_zero() {
            return Self::canonical(ch, dn, self.den.clone());
        }
        // (n/d)' = (n' d − n d') / d²; divide through by gcd(d, d') first.
        let g = gcd(&self.den, &dd);
        let dg = self.den.div_exact(&g).unwrap();
        let ddg = dd.div_exact(&g).unwrap();
        let num = reduce_circle(ch, dn.mul(&dg).sub(&self.num.mul(&ddg)));
        let den = reduce_circle(ch, self.den.mul(&dg));
        Self::canonical(ch, num, den)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        let ch = &self.chart;
        let slots: Vec<usize> = match ch.trig_slots(var) {
            Some((c, s)) => vec![c, s],
            None => vec![ch.slot_of(var)],
        };
        slots.iter().any(|&s| self.num.uses_slot(s) || self.den.uses_slot(s))
    }

    /// Substitute a rational value for an affine or constant variable.
    pub fn eval_var(&self, var: usize, v: &Q) -> Result<Self> {
        let ch = &self.chart;
        if ch.var(var).kind == VarKind::Periodic {
            return Err(Error::InvalidInput(format!(
                "cannot substitute a value for periodic variable `{}`",
                ch.name(var)
            )));
        }
        let s = ch.slot_of(var);
        let num = self.num.eval_slot(s, v);
        let den = self.den.eval_slot(s, v);
        Self::from_parts(ch, num, den)
    }

    /// Move the expression to another chart with the same variable names
    /// (a variable missing from the target must not occur).
    pub fn transport(&self, target: &ChartRef) -> Result<Self> {
        if same_chart(&self.chart, target) {
            return Ok(self.clone());
        }
        let src = &self.chart;
        let mut map = vec![usize::MAX; src.nslots()];
        for (i, slot) in src.slots().iter().enumerate() {
            let (var, which) = match slot {
                Slot::Var(v) => (*v, 0),
                Slot::Cos(v) => (*v, 0),
                Slot::Sin(v) => (*v, 1),
            };
            if let Some(j) = target.index_of(src.name(var)) {
                if target.var(j).kind != src.var(var).kind {
                    return Err(Error::ChartMismatch);
                }
                map[i] = target.slot_of(j) + which;
            }
        }
        let conv = |p: &Poly| -> Result<Poly> {
            let mut out = Poly::zero(target.nslots());
            for (m, c) in p.terms() {
                let mut m2 = Mono::from_elem(0, target.nslots());
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 {
                        if map[i] == usize::MAX {
                            return Err(Error::Precondition(
                                "expression depends on a variable absent from the target chart".into(),
                            ));
                        }
                        m2[map[i]] = e;
                    }
                }
                out.add_term(m2, c.clone());
            }
            Ok(out)
        };
        Self::from_parts(target, conv(&self.num)?, conv(&self.den)?)
    }

    /// Largest total degree of the numerator.
    pub fn degree(&self) -> u32 {
        self.num.total_degree()
    }
}

impl PartialEq for ScalarExpr {
    fn eq(&self, o: &Self) -> bool {
        if !same_chart(&self.chart, &o.chart) {
            return false;
        }
        if self.num == o.num && self.den == o.den {
            return true;
        }
        if !self.chart.has_periodic() || (self.den.is_constant() && o.den.is_constant()) {
            return false;
        }
        let lhs = reduce_circle(&self.chart, self.num.mul(&o.den));
        let rhs = reduce_circle(&self.chart, o.num.mul(&self.den));
        lhs == rhs
    }
}

impl Eq for ScalarExpr {}

impl<'a> Add<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, o: &ScalarExpr) -> ScalarExpr {
        self.checked_add(o).expect("chart mismatch in addition")
    }
}

impl<'a> Sub<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, o: &ScalarExpr) -> ScalarExpr {
        self.checked_add(&-o).expect("chart mismatch in subtraction")
    }
}

impl<'a> Mul<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, o: &ScalarExpr) -> ScalarExpr {
        self.checked_mul(o).expect("chart mismatch in multiplication")
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::from_parts_unchecked(self.chart.clone(), self.num.neg(), self.den.clone())
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_mono(chart: &ChartRef, m: &Mono) -> String {
    let mut parts = Vec::new();
    for (slot, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let base = match chart.slots()[slot] {
            Slot::Var(v) => chart.name(v).to_string(),
            Slot::Cos(v) => format!("cos({})", chart.name(v)),
            Slot::Sin(v) => format!("sin({})", chart.name(v)),
        };
        if e == 1 {
            parts.push(base);
        } else {
            parts.push(format!("{}^{}", base, e));
        }
    }
    parts.join("*")
}

pub(crate) fn fmt_poly(chart: &ChartRef, p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let ms = fmt_mono(chart, m);
        let body = if ms.is_empty() {
            fmt_q(&a)
        } else if a.is_one() {
            ms
        } else {
            format!("{}*{}", fmt_q(&a), ms)
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = fmt_poly(&self.chart, &self.num);
        if self.den.is_one() {
            return write!(f, "{}", n);
        }
        let d = fmt_poly(&self.chart, &self.den);
        let n = if self.num.len() > 1 { format!("({})", n) } else { n };
        let d = if self.den.len() > 1 || !self.den.is_constant() { format!("({})", d) } else { d };
        write!(f, "{}/{}", n, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Chart, VarSpec};
    use std::sync::Arc;

    fn chart() -> ChartRef {
        Chart::new(vec![
            VarSpec::base("x1"),
            VarSpec::base("x2"),
            VarSpec::periodic_base("th"),
            VarSpec::constant("c"),
        ])
        .unwrap()
    }

    #[test]
    fn reduces_common_factor() {
        let ch = chart();
        let x = ScalarExpr::var(&ch, 0).unwrap();
        let one = ScalarExpr::one(&ch);
        let num = &(&x * &x) - &one;
        let den = &x - &one;
        let q = num.checked_div(&den).unwrap();
        assert_eq!(q, &x + &one);
        assert!(q.is_polynomial());
    }

    #[test]
    fn integer_normalization() {
        let ch = chart();
        let x2 = ScalarExpr::var(&ch, 1).unwrap();
        let e = x2.scale(&Q::from_integer(2.into())).checked_div(&ScalarExpr::int(&ch, 4)).unwrap();
        assert_eq!(e.numer(), x2.numer());
        assert_eq!(e.denom().constant_value().unwrap(), Q::from_integer(2.into()));
    }

    #[test]
    fn trig_relation_is_eager() {
        let ch = chart();
        let c = ScalarExpr::cos(&ch, 2).unwrap();
        let s = ScalarExpr::sin(&ch, 2).unwrap();
        let e = &(&s * &s) + &(&c * &c);
        assert_eq!(e, ScalarExpr::one(&ch));
        assert_eq!(s.derive(2), c);
        assert_eq!(c.derive(2), -&s);
    }

    #[test]
    fn constants_have_zero_derivative() {
        let ch = chart();
        let c = ScalarExpr::var(&ch, 3).unwrap();
        assert!(c.derive(3).is_zero());
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        let a = chart();
        let b = Chart::new(vec![VarSpec::base("y")]).unwrap();
        let x = ScalarExpr::var(&a, 0).unwrap();
        let y = ScalarExpr::var(&b, 0).unwrap();
        assert!(matches!(x.checked_add(&y), Err(Error::ChartMismatch)));
        let _ = Arc::strong_count(&a);
    }
}
