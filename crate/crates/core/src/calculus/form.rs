use std::collections::BTreeMap;
use std::fmt;

use super::multivector::{merge_sign, remove_front, signed, sort_sign, IndexSet, MultiVector};
use crate::error::{Error, Result};
use crate::ring::{check_chart, ChartRef, ScalarExpr};

/// Sparse differential form `Σ ω_I dx^{i1}∧…∧dx^{ik}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffForm {
    chart: ChartRef,
    degree: usize,
    terms: BTreeMap<IndexSet, ScalarExpr>,
}

impl DiffForm {
    pub fn zero(chart: &ChartRef, degree: usize) -> Self {
        DiffForm { chart: chart.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn function(f: ScalarExpr) -> Self {
        let mut w = DiffForm::zero(f.chart(), 0);
        w.add_term(IndexSet::new(), f);
        w
    }

    /// `dx^var`.
    pub fn coordinate(chart: &ChartRef, var: usize) -> Result<Self> {
        let mut w = DiffForm::zero(chart, 1);
        w.add_component(&[var], ScalarExpr::one(chart))?;
        Ok(w)
    }

    pub fn from_components(
        chart: &ChartRef,
        degree: usize,
        comps: impl IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
    ) -> Result<Self> {
        let mut w = DiffForm::zero(chart, degree);
        for (idx, e) in comps {
            w.add_component(&idx, e)?;
        }
        Ok(w)
    }

    pub fn add_component(&mut self, idx: &[usize], e: ScalarExpr) -> Result<()> {
        check_chart(&self.chart, e.chart())?;
        if idx.len() != self.degree {
            return Err(Error::DegreeMismatch(format!("component of arity {} in a {}-form", idx.len(), self.degree)));
        }
        let mut v: IndexSet = IndexSet::new();
        for &i in idx {
            if i >= self.chart.len() || !self.chart.is_coordinate(i) {
                return Err(Error::InvalidInput(format!("index {} is not a coordinate", i)));
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

    pub fn component(&self, idx: &[usize]) -> ScalarExpr {
        let mut v: IndexSet = idx.iter().map(|&i| i as u8).collect();
        match sort_sign(&mut v) {
            None => ScalarExpr::zero(&self.chart),
            Some(s) => self.terms.get(&v).map(|e| signed(e, s)).unwrap_or_else(|| ScalarExpr::zero(&self.chart)),
        }
    }

    pub fn as_function(&self) -> ScalarExpr {
        self.terms.get(&IndexSet::new()).cloned().unwrap_or_else(|| ScalarExpr::zero(&self.chart))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.degree == o.degree || self.is_zero() || o.is_zero(), "form degree mismatch");
        if self.is_zero() {
            return o.clone();
        }
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, f: &ScalarExpr) -> Self {
        let mut out = DiffForm::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * f);
        }
        out
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut out = DiffForm::zero(&self.chart, self.degree + o.degree);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                if let Some((s, k)) = merge_sign(a, b) {
                    out.add_term(k, signed(&(x * y), s));
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = DiffForm::zero(&self.chart, self.degree + 1);
        for i in self.chart.coordinates() {
            for (k, v) in &self.terms {
                let dv = v.derive(i);
                if dv.is_zero() {
                    continue;
                }
                if let Some((s, idx)) = merge_sign(&[i as u8], k) {
                    out.add_term(idx, signed(&dv, s));
                }
            }
        }
        out
    }

    /// Interior product `i_X ω`, inserting `X` in the first slot.
    pub fn interior(&self, x: &MultiVector) -> Result<Self> {
        check_chart(&self.chart, x.chart())?;
        if x.degree() != 1 {
            return Err(Error::DegreeMismatch("interior product needs a vector field".into()));
        }
        if self.degree == 0 {
            return Ok(DiffForm::zero(&self.chart, 0));
        }
        let mut out = DiffForm::zero(&self.chart, self.degree - 1);
        for (xi, xv) in x.terms() {
            let i = xi[0];
            for (k, v) in &self.terms {
                if let Some((s, rest)) = remove_front(k, i) {
                    out.add_term(rest, signed(&(xv * v), s));
                }
            }
        }
        Ok(out)
    }

    /// Lie derivative through Cartan's formula.
    pub fn lie_derivative(&self, x: &MultiVector) -> Result<Self> {
        let a = self.d().interior(x)?;
        let b = self.interior(x)?.d();
        if self.degree == 0 {
            return Ok(a);
        }
        Ok(a.add(&b))
    }

    /// `ω(X1, …, Xk)`.
    pub fn evaluate(&self, xs: &[MultiVector]) -> Result<ScalarExpr> {
        if xs.len() != self.degree {
            return Err(Error::DegreeMismatch("wrong number of vector fields".into()));
        }
        let mut cur = self.clone();
        for x in xs {
            cur = cur.interior(x)?;
        }
        Ok(cur.as_function())
    }

    pub fn supported_on(&self, dirs: &[usize]) -> bool {
        self.terms.keys().all(|k| k.iter().all(|&i| dirs.contains(&(i as usize))))
    }

    pub fn restrict_to(&self, dirs: &[usize]) -> Self {
        let mut out = DiffForm::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            if k.iter().all(|&i| dirs.contains(&(i as usize))) {
                out.add_term(k.clone(), v.clone());
            }
        }
        out
    }
}

/// `df` of a function.
pub fn differential(f: &ScalarExpr) -> DiffForm {
    DiffForm::function(f.clone()).d()
}

impl fmt::Display for DiffForm {
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
                format!("({})*{}", v, names.join("^"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
