use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ring::{check_chart, ChartRef, ScalarExpr, Q};

/// Strictly increasing list of chart variable indices.
pub type IndexSet = SmallVec<[u8; 6]>;

/// Sort `idx` in place and return the permutation sign, or `None` on a repeat.
pub fn sort_sign(idx: &mut [u8]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Merge two increasing sets as `a ∧ b`; `None` when they overlap.
pub fn merge_sign(a: &[u8], b: &[u8]) -> Option<(i32, IndexSet)> {
    let mut out = IndexSet::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((if inversions.is_multiple_of(2) { 1 } else { -1 }, out))
}

/// Remove `i` from the set, returning the sign of moving it to the front.
pub fn remove_front(idx: &[u8], i: u8) -> Option<(i32, IndexSet)> {
    let pos = idx.iter().position(|&x| x == i)?;
    let mut rest = IndexSet::from_slice(idx);
    rest.remove(pos);
    Some((if pos % 2 == 0 { 1 } else { -1 }, rest))
}

/// Remove `i` from the set, returning the sign of moving it to the back.
pub fn remove_back(idx: &[u8], i: u8) -> Option<(i32, IndexSet)> {
    let pos = idx.iter().position(|&x| x == i)?;
    let mut rest = IndexSet::from_slice(idx);
    rest.remove(pos);
    Some((if (idx.len() - 1 - pos).is_multiple_of(2) { 1 } else { -1 }, rest))
}

pub(crate) fn signed(e: &ScalarExpr, s: i32) -> ScalarExpr {
    if s >= 0 {
        e.clone()
    } else {
        -e
    }
}

/// Sparse k-vector field `Σ A^I ∂_{i1}∧…∧∂_{ik}` over a chart.
///
/// Pairing with covectors uses the determinant convention, so
/// `(∂_i∧∂_j)(dx^i, dx^j) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVector {
    chart: ChartRef,
    degree: usize,
    terms: BTreeMap<IndexSet, ScalarExpr>,
}

impl MultiVector {
    pub fn zero(chart: &ChartRef, degree: usize) -> Self {
        MultiVector { chart: chart.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn function(f: ScalarExpr) -> Self {
        let mut m = MultiVector::zero(f.chart(), 0);
        m.add_term(IndexSet::new(), f);
        m
    }

    /// `∂_var` as a vector field.
    pub fn coordinate(chart: &ChartRef, var: usize) -> Result<Self> {
        let mut m = MultiVector::zero(chart, 1);
        m.add_component(&[var], ScalarExpr::one(chart))?;
        Ok(m)
    }

    /// Build from components listed in any order; each tuple is sorted with
    /// the permutation sign applied.
    pub fn from_components(
        chart: &ChartRef,
        degree: usize,
        comps: impl IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
    ) -> Result<Self> {
        let mut m = MultiVector::zero(chart, degree);
        for (idx, e) in comps {
            m.add_component(&idx, e)?;
        }
        Ok(m)
    }

    pub fn add_component(&mut self, idx: &[usize], e: ScalarExpr) -> Result<()> {
        check_chart(&self.chart, e.chart())?;
        if idx.len() != self.degree {
            return Err(Error::DegreeMismatch(format!(
                "component of arity {} in a {}-vector",
                idx.len(),
                self.degree
            )));
        }
        let mut v: IndexSet = IndexSet::new();
        for &i in idx {
            if i >= self.chart.len() {
                return Err(Error::InvalidInput(format!("index {} out of range", i)));
            }
            if !self.chart.is_coordinate(i) {
                return Err(Error::InvalidInput(format!(
                    "`{}` is a constant and carries no tangent direction",
                    self.chart.name(i)
                )));
            }
            v.push(i as u8);
        }
        let s = sort_sign(&mut v)
            .ok_or_else(|| Error::InvalidInput("repeated index in antisymmetric component".into()))?;
        self.add_term(v, signed(&e, s));
        Ok(())
    }

    pub(crate) fn add_term(&mut self, idx: IndexSet, e: ScalarExpr) {
        if e.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(v) => {
                v.insert(e);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &e;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn terms(&self) -> &BTreeMap<IndexSet, ScalarExpr> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the sorted component `idx` (with permutation sign).
    pub fn component(&self, idx: &[usize]) -> ScalarExpr {
        let mut v: IndexSet = idx.iter().map(|&i| i as u8).collect();
        match sort_sign(&mut v) {
            None => ScalarExpr::zero(&self.chart),
            Some(s) => self.terms.get(&v).map(|e| signed(e, s)).unwrap_or_else(|| ScalarExpr::zero(&self.chart)),
        }
    }

    /// The function value of a 0-vector.
    pub fn as_function(&self) -> ScalarExpr {
        self.terms.get(&IndexSet::new()).cloned().unwrap_or_else(|| ScalarExpr::zero(&self.chart))
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        check_chart(&self.chart, &o.chart)?;
        if self.degree != o.degree && !(self.is_zero() || o.is_zero()) {
            return Err(Error::DegreeMismatch(format!("{} + {}", self.degree, o.degree)));
        }
        let mut out = if self.is_zero() && self.degree != o.degree { o.clone() } else { self.clone() };
        if !(self.is_zero() && self.degree != o.degree) {
            for (k, v) in &o.terms {
                out.add_term(k.clone(), v.clone());
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.checked_add(o).expect("multivector addition")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        MultiVector {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, f: &ScalarExpr) -> Self {
        let mut out = MultiVector::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * f);
        }
        out
    }

    pub fn scale_q(&self, q: &Q) -> Self {
        let mut out = MultiVector::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.scale(q));
        }
        out
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut out = MultiVector::zero(&self.chart, self.degree + o.degree);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                if let Some((s, k)) = merge_sign(a, b) {
                    out.add_term(k, signed(&(x * y), s));
                }
            }
        }
        out
    }

    /// Insert a covector (given by its components per chart variable) into
    /// the first slot.
    pub fn contract(&self, alpha: &super::DiffForm) -> Result<Self> {
        check_chart(&self.chart, alpha.chart())?;
        if alpha.degree() != 1 {
            return Err(Error::DegreeMismatch("contraction needs a 1-form".into()));
        }
        if self.degree == 0 {
            return Err(Error::DegreeMismatch("cannot contract a function".into()));
        }
        let mut out = MultiVector::zero(&self.chart, self.degree - 1);
        for (i, a) in alpha.terms() {
            let i = i[0];
            for (k, v) in &self.terms {
                if let Some((s, rest)) = remove_front(k, i) {
                    out.add_term(rest, signed(&(a * v), s));
                }
            }
        }
        Ok(out)
    }

    /// `A(α1, …, αk)` with the determinant convention.
    pub fn evaluate(&self, forms: &[super::DiffForm]) -> Result<ScalarExpr> {
        if forms.len() != self.degree {
            return Err(Error::DegreeMismatch("wrong number of covectors".into()));
        }
        let mut cur = self.clone();
        for f in forms {
            cur = cur.contract(f)?;
        }
        Ok(cur.as_function())
    }

    /// Apply a vector field to a function.
    pub fn apply(&self, f: &ScalarExpr) -> Result<ScalarExpr> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch("only vector fields act on functions".into()));
        }
        check_chart(&self.chart, f.chart())?;
        let mut acc = ScalarExpr::zero(&self.chart);
        for (k, v) in &self.terms {
            let d = f.derive(k[0] as usize);
            if !d.is_zero() {
                acc = &acc + &(v * &d);
            }
        }
        Ok(acc)
    }

    pub fn map_coeffs(&self, f: impl Fn(&ScalarExpr) -> Result<ScalarExpr>) -> Result<Self> {
        let mut out = MultiVector::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v)?);
        }
        Ok(out)
    }

    /// True when every term only involves the given directions.
    pub fn supported_on(&self, dirs: &[usize]) -> bool {
        self.terms.keys().all(|k| k.iter().all(|&i| dirs.contains(&(i as usize))))
    }

    /// Keep only the terms whose index sets lie inside `dirs`.
    pub fn restrict_to(&self, dirs: &[usize]) -> Self {
        let mut out = MultiVector::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            if k.iter().all(|&i| dirs.contains(&(i as usize))) {
                out.add_term(k.clone(), v.clone());
            }
        }
        out
    }

    pub fn transport(&self, target: &ChartRef) -> Result<Self> {
        let mut out = MultiVector::zero(target, self.degree);
        for (k, v) in &self.terms {
            let idx: Result<Vec<usize>> = k
                .iter()
                .map(|&i| target.require(self.chart.name(i as usize)))
                .collect();
            out.add_component(&idx?, v.transport(target)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| {
                if k.is_empty() {
                    return format!("{}", v);
                }
                let names: Vec<String> = k.iter().map(|&i| format!("d_{}", self.chart.name(i as usize))).collect();
                format!("({})*{}", v, names.join("^"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
