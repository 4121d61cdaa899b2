use std::collections::BTreeMap;
use std::fmt;

use super::CouplingData;
use crate::calculus::{merge_sign, schouten, MultiVector};
use crate::error::{Error, Result};
use crate::fibration::{cov_ext_d, VValuedForm};
use crate::ring::{check_chart, ChartRef, ScalarExpr};

/// Element of `𝔐^k = ⊕_{p+q=k} Ω^{p,q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MElement {
    chart: ChartRef,
    degree: usize,
    parts: BTreeMap<(usize, usize), VValuedForm>,
}

impl MElement {
    pub fn zero(chart: &ChartRef, degree: usize) -> Self {
        MElement { chart: chart.clone(), degree, parts: BTreeMap::new() }
    }

    pub fn from_part(v: VValuedForm) -> Self {
        let (p, q) = v.bidegree();
        let mut m = Self::zero(v.chart(), p + q);
        m.add_part(v);
        m
    }

    pub fn function(f: ScalarExpr) -> Self {
        Self::from_part(VValuedForm::function(f))
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn parts(&self) -> &BTreeMap<(usize, usize), VValuedForm> {
        &self.parts
    }
    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, p: usize, q: usize) -> VValuedForm {
        self.parts.get(&(p, q)).cloned().unwrap_or_else(|| VValuedForm::zero(&self.chart, p, q))
    }

    pub fn add_part(&mut self, v: VValuedForm) {
        if v.is_zero() {
            return;
        }
        let (p, q) = v.bidegree();
        assert_eq!(p + q, self.degree, "total degree mismatch");
        let next = match self.parts.remove(&(p, q)) {
            Some(old) => old.add(&v),
            None => v,
        };
        if !next.is_zero() {
            self.parts.insert((p, q), next);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for v in o.parts.values() {
            out.add_part(v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MElement {
            chart: self.chart.clone(),
            degree: self.degree,
            parts: self.parts.iter().map(|(k, v)| (*k, v.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl fmt::Display for MElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.parts.values().map(|v| v.to_string()).collect();
        write!(f, "{}", s.join(" + "))
    }
}

fn plus(a: VValuedForm, b: VValuedForm) -> VValuedForm {
    if a.is_zero() {
        b
    } else if b.is_zero() {
        a
    } else {
        a.add(&b)
    }
}

/// `∂^σ_{2,−1} = −ad_σ`.
pub fn d_sigma(sigma: &VValuedForm, eta: &VValuedForm) -> Result<VValuedForm> {
    check_chart(sigma.chart(), eta.chart())?;
    let (p, q) = eta.bidegree();
    if q == 0 {
        return Ok(VValuedForm::zero(eta.chart(), p + 2, 0));
    }
    let mut out = VValuedForm::zero(eta.chart(), p + 2, q - 1);
    let outer = if p % 2 == 0 { -1 } else { 1 };
    for (ij, s) in sigma.terms() {
        let f = MultiVector::function(s.as_function());
        for (k, v) in eta.terms() {
            if let Some((sg, idx)) = merge_sign(ij, k) {
                let br = schouten(&f, v)?;
                out.add_term(idx, if sg * outer < 0 { br.neg() } else { br });
            }
        }
    }
    Ok(out)
}

/// `∂^P_{0,1} = ad_P` with `(ad_P η)(u…) = (−1)^p [P, η(u…)]`.
pub fn d_p(p_tensor: &MultiVector, eta: &VValuedForm) -> Result<VValuedForm> {
    check_chart(p_tensor.chart(), eta.chart())?;
    let (p, q) = eta.bidegree();
    let mut out = VValuedForm::zero(eta.chart(), p, q + 1);
    for (k, v) in eta.terms() {
        let br = schouten(p_tensor, v)?;
        out.add_term(k.clone(), if p % 2 == 1 { br.neg() } else { br });
    }
    Ok(out)
}

impl CouplingData {
    pub fn d_sigma(&self, eta: &VValuedForm) -> Result<VValuedForm> {
        d_sigma(self.sigma(), eta)
    }
    pub fn d_gamma(&self, eta: &VValuedForm) -> Result<VValuedForm> {
        cov_ext_d(self.connection(), eta)
    }
    pub fn d_p(&self, eta: &VValuedForm) -> Result<VValuedForm> {
        d_p(self.p(), eta)
    }

    /// All three components of `∂` applied to a homogeneous element.
    pub fn d_total(&self, eta: &VValuedForm) -> Result<MElement> {
        let (p, q) = eta.bidegree();
        let mut out = MElement::zero(eta.chart(), p + q + 1);
        out.add_part(self.d_sigma(eta)?);
        out.add_part(self.d_gamma(eta)?);
        out.add_part(self.d_p(eta)?);
        Ok(out)
    }
}

/// `∂ = ∂^σ_{2,−1} + ∂^γ_{1,0} + ∂^P_{0,1}` on `𝔐`.
pub fn m_differential(data: &CouplingData, eta: &MElement) -> Result<MElement> {
    check_chart(data.chart(), eta.chart())?;
    let mut out = MElement::zero(eta.chart(), eta.degree() + 1);
    for v in eta.parts().values() {
        out = out.add(&data.d_total(v)?);
    }
    Ok(out)
}

/// Bigraded components of `∂²` on one homogeneous element.
#[derive(Clone, Debug)]
pub struct CobResiduals {
    /// `(∂^P)²`
    pub cob1: VValuedForm,
    /// `∂^γ∂^P + ∂^P∂^γ`
    pub cob2: VValuedForm,
    /// `∂^σ∂^P + ∂^P∂^σ + (∂^γ)²`
    pub cob3: VValuedForm,
    /// `∂^σ∂^γ + ∂^γ∂^σ`
    pub cob4: VValuedForm,
    /// `(∂^σ)²`
    pub sigma_sq: VValuedForm,
}

impl CobResiduals {
    pub fn all(&self) -> [&VValuedForm; 5] {
        [&self.cob1, &self.cob2, &self.cob3, &self.cob4, &self.sigma_sq]
    }
    pub fn is_zero(&self) -> bool {
        self.all().iter().all(|r| r.is_zero())
    }
}

pub fn cob_residuals(data: &CouplingData, eta: &VValuedForm) -> Result<CobResiduals> {
    let dp = data.d_p(eta)?;
    let dg = data.d_gamma(eta)?;
    let ds = data.d_sigma(eta)?;
    Ok(CobResiduals {
        cob1: data.d_p(&dp)?,
        cob2: plus(data.d_gamma(&dp)?, data.d_p(&dg)?),
        cob3: plus(plus(data.d_sigma(&dp)?, data.d_p(&ds)?), data.d_gamma(&dg)?),
        cob4: plus(data.d_sigma(&dg)?, data.d_gamma(&ds)?),
        sigma_sq: data.d_sigma(&ds)?,
    })
}

/// Generators of `𝔐` as an algebra: coordinate functions, the base
/// differentials `du^i` and the vertical coordinate fields `∂_a`.
pub fn generators(data: &CouplingData) -> Result<Vec<VValuedForm>> {
    let ch = data.chart();
    let mut out = Vec::new();
    for v in ch.coordinates() {
        if ch.var(v).kind == crate::ring::VarKind::Periodic {
            out.push(VValuedForm::function(ScalarExpr::cos(ch, v)?));
            out.push(VValuedForm::function(ScalarExpr::sin(ch, v)?));
        } else {
            out.push(VValuedForm::function(ScalarExpr::var(ch, v)?));
        }
    }
    for &b in data.connection().base() {
        let mut w = VValuedForm::zero(ch, 1, 0);
        w.set(&[b], MultiVector::function(ScalarExpr::one(ch)))?;
        out.push(w);
    }
    for &a in data.connection().fiber() {
        out.push(VValuedForm::vertical(MultiVector::coordinate(ch, a)?));
    }
    Ok(out)
}

/// Which of the relations `(∂^P)² = 0`, …, `∂^σ∂^γ + ∂^γ∂^σ = 0`, `(∂^σ)² = 0`
/// hold on the generators (each component of `∂²` is a derivation).
pub fn cob_on_generators(data: &CouplingData) -> Result<[bool; 5]> {
    let mut ok = [true; 5];
    for g in generators(data)? {
        let r = cob_residuals(data, &g)?;
        for (k, v) in r.all().iter().enumerate() {
            if !v.is_zero() {
                ok[k] = false;
            }
        }
    }
    Ok(ok)
}

pub(crate) fn require_bidegree(v: &VValuedForm, p: usize, q: usize, what: &str) -> Result<()> {
    if v.bidegree() != (p, q) {
        return Err(Error::DegreeMismatch(format!(
            "{} must have bidegree ({}, {}), got {:?}",
            what,
            p,
            q,
            v.bidegree()
        )));
    }
    Ok(())
}
