use std::collections::BTreeMap;
use std::fmt;

use crate::calculus::{sort_sign, IndexSet, MultiVector};
use crate::error::{Error, Result};
use crate::ring::{check_chart, ChartRef, ScalarExpr};

/// Element of `Ω^{p,q}`: a base `p`-form with values in vertical `q`-vectors.
///
/// Keys are increasing tuples of base variable indices; the value at `J`
/// is the vertical multivector `η(∂_{j1}, …, ∂_{jp})`. The same container
/// also holds the coefficients of `hor_J ∧ (·)` for bigraded multivectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VValuedForm {
    chart: ChartRef,
    p: usize,
    q: usize,
    terms: BTreeMap<IndexSet, MultiVector>,
}

impl VValuedForm {
    pub fn zero(chart: &ChartRef, p: usize, q: usize) -> Self {
        VValuedForm { chart: chart.clone(), p, q, terms: BTreeMap::new() }
    }

    /// A function viewed as an element of `Ω^{0,0}`.
    pub fn function(f: ScalarExpr) -> Self {
        let mut v = Self::zero(f.chart(), 0, 0);
        v.add_term(IndexSet::new(), MultiVector::function(f));
        v
    }

    /// A vertical multivector viewed as an element of `Ω^{0,q}`.
    pub fn vertical(x: MultiVector) -> Self {
        let mut v = Self::zero(x.chart(), 0, x.degree());
        v.add_term(IndexSet::new(), x);
        v
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }
    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }
    pub fn terms(&self) -> &BTreeMap<IndexSet, MultiVector> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn set(&mut self, base: &[usize], value: MultiVector) -> Result<()> {
        check_chart(&self.chart, value.chart())?;
        if base.len() != self.p || value.degree() != self.q {
            return Err(Error::DegreeMismatch(format!(
                "({}, {}) value in a ({}, {}) element",
                base.len(),
                value.degree(),
                self.p,
                self.q
            )));
        }
        let mut idx: IndexSet = base.iter().map(|&i| i as u8).collect();
        let s = sort_sign(&mut idx).ok_or_else(|| Error::InvalidInput("repeated base index".into()))?;
        let v = if s < 0 { value.neg() } else { value };
        self.add_term(idx, v);
        Ok(())
    }

    pub(crate) fn add_term(&mut self, idx: IndexSet, v: MultiVector) {
        if v.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&v);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn get(&self, base: &[usize]) -> MultiVector {
        let mut idx: IndexSet = base.iter().map(|&i| i as u8).collect();
        match sort_sign(&mut idx) {
            None => MultiVector::zero(&self.chart, self.q),
            Some(s) => match self.terms.get(&idx) {
                Some(v) if s < 0 => v.neg(),
                Some(v) => v.clone(),
                None => MultiVector::zero(&self.chart, self.q),
            },
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.bidegree(), o.bidegree(), "bidegree mismatch");
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.chart, self.p, self.q);
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v.neg());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, f: &ScalarExpr) -> Self {
        let mut out = Self::zero(&self.chart, self.p, self.q);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.scale(f));
        }
        out
    }

    pub fn map_values(&self, q: usize, f: impl Fn(&MultiVector) -> Result<MultiVector>) -> Result<Self> {
        let mut out = Self::zero(&self.chart, self.p, q);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v)?);
        }
        Ok(out)
    }

    /// Coefficient function of a `(p, 0)` element.
    pub fn coeff(&self, base: &[usize]) -> ScalarExpr {
        self.get(base).as_function()
    }
}

impl fmt::Display for VValuedForm {
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
                let names: Vec<String> = k.iter().map(|&i| format!("d{}", self.chart.name(i as usize))).collect();
                format!("[{}]*({})", names.join("^"), v)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
