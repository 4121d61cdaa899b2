//! Coupling tensors on a fibered chart: extraction of the geometric data
//! `(γ, σ, P)`, reconstruction, the structure equations and the bigraded
//! complex `𝔐` with its three differentials.

pub mod automorphism;
pub mod complex;

use std::collections::HashMap;

use crate::calculus::{is_poisson, schouten, sharp, DiffForm, MultiVector};
use crate::error::{Error, Result};
use crate::fibration::{bigrade, combinations, cov_ext_d, curvature, Bundle, Connection, VValuedForm};
use crate::linalg::FieldMatrix;
use crate::ring::{check_chart, ChartRef, ScalarExpr};

pub use automorphism::{
    bar_partial, extend_to_poisson, linearize_vertical, membership_a_gamma, split_poisson_vf, tau_and_rho,
    Linearization, Membership, Split, SplitOutcome, TauRho,
};
pub use complex::{cob_on_generators, cob_residuals, d_p, d_sigma, m_differential, CobResiduals, MElement};

/// Geometric data `(γ, σ, P)` of a coupling tensor.
type Minors = HashMap<(Vec<usize>, Vec<usize>), ScalarExpr>;

#[derive(Clone, Debug)]
pub struct CouplingData {
    conn: Connection,
    sigma: VValuedForm,
    p: MultiVector,
    s: FieldMatrix,
    b: FieldMatrix,
}

impl CouplingData {
    /// Checks shapes and nondegeneracy of `σ`; the structure equations are
    /// not checked here.
    pub fn new(conn: Connection, sigma: VValuedForm, p: MultiVector) -> Result<Self> {
        check_chart(conn.chart(), sigma.chart())?;
        check_chart(conn.chart(), p.chart())?;
        if sigma.bidegree() != (2, 0) {
            return Err(Error::DegreeMismatch("coupling form must be a base 2-form".into()));
        }
        if p.degree() != 2 || !p.supported_on(conn.fiber()) {
            return Err(Error::InvalidInput("P must be a vertical bivector".into()));
        }
        let base = conn.base();
        let m = base.len();
        if m % 2 == 1 {
            return Err(Error::NotCoupling(format!("base dimension {} is odd", m)));
        }
        let rows: Vec<Vec<ScalarExpr>> =
            base.iter().map(|&i| base.iter().map(|&j| sigma.coeff(&[i, j])).collect()).collect();
        let s = FieldMatrix::new(conn.chart(), rows);
        let sinv = s.inverse().map_err(|_| Error::NotCoupling("coupling form is degenerate".into()))?;
        let b = FieldMatrix::new(
            conn.chart(),
            sinv.rows.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
        );
        Ok(CouplingData { conn, sigma, p, s, b })
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }
    pub fn sigma(&self) -> &VValuedForm {
        &self.sigma
    }
    pub fn p(&self) -> &MultiVector {
        &self.p
    }
    pub fn chart(&self) -> &ChartRef {
        self.conn.chart()
    }
    pub fn bundle(&self) -> Bundle {
        self.conn.bundle()
    }
    /// `S_{ij} = σ(∂_i, ∂_j)` over the base coordinates.
    pub fn sigma_matrix(&self) -> &FieldMatrix {
        &self.s
    }
    /// `B = −S^{-1}`, the horizontal block `Π(du^i, du^j)`.
    pub fn base_block(&self) -> &FieldMatrix {
        &self.b
    }

    fn base_pos(&self, var: u8) -> usize {
        self.conn.base().iter().position(|&b| b == var as usize).expect("base variable")
    }

    /// Minors `det M_{I,J}` for all `p`-subsets of base coordinates.
    fn minors(&self, m: &FieldMatrix, p: usize) -> Result<Minors> {
        let idx: Vec<usize> = (0..self.conn.base().len()).collect();
        let subsets = combinations(&idx, p);
        let mut out = HashMap::new();
        for i in &subsets {
            for j in &subsets {
                let rows = i.iter().map(|&r| j.iter().map(|&c| m.rows[r][c].clone()).collect()).collect();
                out.insert((i.clone(), j.clone()), FieldMatrix::new(self.chart(), rows).det()?);
            }
        }
        Ok(out)
    }
}

/// Whether the horizontal block of `Π` (relative to the chart's base
/// coordinates) is nondegenerate; the reason is given when it is not.
pub fn coupling_check(pi: &MultiVector, bundle: &Bundle) -> Result<(bool, Option<String>)> {
    check_chart(pi.chart(), bundle.chart())?;
    if pi.degree() != 2 {
        return Err(Error::DegreeMismatch("coupling tensors are bivectors".into()));
    }
    let base = bundle.base();
    if base.len() % 2 == 1 {
        return Ok((false, Some(format!("base dimension {} is odd, no nondegenerate block", base.len()))));
    }
    let rows = base.iter().map(|&i| base.iter().map(|&j| pi.component(&[i, j])).collect()).collect();
    let d = FieldMatrix::new(pi.chart(), rows).det()?;
    if d.is_zero() {
        return Ok((false, Some("horizontal block is degenerate".into())));
    }
    Ok((true, None))
}

pub fn is_coupling(pi: &MultiVector, bundle: &Bundle) -> Result<bool> {
    Ok(coupling_check(pi, bundle)?.0)
}

/// Geometric data of a coupling bivector. The horizontal distribution is
/// `Π♯(V⁰)`, the coupling form is `−B^{-1}` and `P` is the vertical part.
pub fn extract_data(pi: &MultiVector, bundle: &Bundle) -> Result<CouplingData> {
    if let (false, Some(why)) = coupling_check(pi, bundle)? {
        return Err(Error::NotCoupling(why));
    }
    let ch = pi.chart();
    let base = bundle.base();
    let rows = base.iter().map(|&i| base.iter().map(|&j| pi.component(&[i, j])).collect()).collect();
    let a = FieldMatrix::new(ch, rows).inverse()?;
    let mut lifts = Vec::new();
    for (k, _) in base.iter().enumerate() {
        let mut h = MultiVector::zero(ch, 1);
        for (j, &bj) in base.iter().enumerate() {
            let v = sharp(pi, &DiffForm::coordinate(ch, bj)?)?;
            h = h.add(&v.scale(&a.rows[k][j]));
        }
        lifts.push(h);
    }
    let conn = Connection::from_lifts(bundle, &lifts)?;
    let mut sigma = VValuedForm::zero(ch, 2, 0);
    for (x, &i) in base.iter().enumerate() {
        for (y, &j) in base.iter().enumerate().skip(x + 1) {
            sigma.set(&[i, j], MultiVector::function(-&a.rows[x][y]))?;
        }
    }
    let parts = bigrade(pi, &conn)?;
    if parts.get(&(1, 1)).is_some_and(|v| !v.is_zero()) {
        return Err(Error::NotCoupling("mixed component survives the splitting".into()));
    }
    let p = parts.get(&(0, 2)).map(|v| v.get(&[])).unwrap_or_else(|| MultiVector::zero(ch, 2));
    CouplingData::new(conn, sigma, p)
}

/// `Π = Σ_{i<j} B^{ij} hor_i ∧ hor_j + P`, without any check.
pub fn assemble_tensor(data: &CouplingData) -> MultiVector {
    let base = data.conn.base();
    let mut out = data.p.clone();
    for (x, &i) in base.iter().enumerate() {
        for (y, &j) in base.iter().enumerate().skip(x + 1) {
            let w = data.conn.hor(i).wedge(data.conn.hor(j));
            out = out.add(&w.scale(&data.b.rows[x][y]));
        }
    }
    out
}

/// Residuals of the four structure equations.
#[derive(Clone, Debug)]
pub struct StructureReport {
    /// `[P, P]`
    pub cc1: VValuedForm,
    /// `(u) ↦ [hor_u, P]`
    pub cc2: VValuedForm,
    /// `Curv(u, v) + P♯dσ(u, v)`
    pub cc3: VValuedForm,
    /// `∂^γ σ`
    pub cc4: VValuedForm,
}

impl StructureReport {
    pub fn residuals(&self) -> [(&'static str, &VValuedForm); 4] {
        [("CC1", &self.cc1), ("CC2", &self.cc2), ("CC3", &self.cc3), ("CC4", &self.cc4)]
    }
    pub fn violated(&self) -> Vec<&'static str> {
        self.residuals().iter().filter(|(_, r)| !r.is_zero()).map(|(n, _)| *n).collect()
    }
    pub fn holds(&self) -> bool {
        self.violated().is_empty()
    }
}

pub fn verify_structure_equations(data: &CouplingData) -> Result<StructureReport> {
    let ch = data.chart();
    let conn = &data.conn;
    let cc1 = VValuedForm::vertical(schouten(&data.p, &data.p)?);
    let mut cc2 = VValuedForm::zero(ch, 1, 2);
    for &i in conn.base() {
        cc2.set(&[i], schouten(conn.hor(i), &data.p)?)?;
    }
    let curv = curvature(conn)?;
    let mut cc3 = VValuedForm::zero(ch, 2, 1);
    for (ij, c) in curv.terms() {
        cc3.add_term(ij.clone(), c.clone());
    }
    for (ij, s) in data.sigma.terms() {
        let h = schouten(&data.p, &MultiVector::function(s.as_function()))?;
        // [P, f] = −P♯df
        cc3.add_term(ij.clone(), h.neg());
    }
    let cc4 = cov_ext_d(conn, &data.sigma)?;
    Ok(StructureReport { cc1, cc2, cc3, cc4 })
}

/// `Π` from data satisfying the structure equations.
pub fn build_coupling(data: &CouplingData) -> Result<MultiVector> {
    let rep = verify_structure_equations(data)?;
    if !rep.holds() {
        return Err(Error::NotCoupling(format!("data violates {}", rep.violated().join(", "))));
    }
    Ok(assemble_tensor(data))
}

/// The assembled tensor together with a direct Jacobi check.
pub fn build_and_check(data: &CouplingData) -> Result<(MultiVector, bool)> {
    let pi = assemble_tensor(data);
    let ok = is_poisson(&pi)?;
    Ok((pi, ok))
}

/// `♭_σ : 𝒱^k(E) → 𝔐^k`, `hor_J ∧ a_J ↦ (−1)^p Σ_J det(S_{I,J}) a_J`.
pub fn flat_sigma(data: &CouplingData, a: &MultiVector) -> Result<MElement> {
    check_chart(a.chart(), data.chart())?;
    let parts = bigrade(a, &data.conn)?;
    let mut out = MElement::zero(data.chart(), a.degree());
    for (&(p, q), vv) in &parts {
        let minors = data.minors(&data.s, p)?;
        let mut eta = VValuedForm::zero(data.chart(), p, q);
        for combo in combinations(data.conn.base(), p) {
            let ipos: Vec<usize> = combo.iter().map(|&v| data.base_pos(v as u8)).collect();
            let mut acc = MultiVector::zero(data.chart(), q);
            for (j, v) in vv.terms() {
                let jpos: Vec<usize> = j.iter().map(|&x| data.base_pos(x)).collect();
                acc = acc.add(&v.scale(&minors[&(ipos.clone(), jpos)]));
            }
            eta.set(&combo, if p % 2 == 1 { acc.neg() } else { acc })?;
        }
        out.add_part(eta);
    }
    Ok(out)
}

/// Inverse of [`flat_sigma`].
pub fn unflat_sigma(data: &CouplingData, eta: &MElement) -> Result<MultiVector> {
    check_chart(eta.chart(), data.chart())?;
    let sinv = data.s.inverse()?;
    let mut out = MultiVector::zero(data.chart(), eta.degree());
    for (&(p, q), vv) in eta.parts() {
        let minors = data.minors(&sinv, p)?;
        for combo in combinations(data.conn.base(), p) {
            let jpos: Vec<usize> = combo.iter().map(|&v| data.base_pos(v as u8)).collect();
            let mut acc = MultiVector::zero(data.chart(), q);
            for (i, v) in vv.terms() {
                let ipos: Vec<usize> = i.iter().map(|&x| data.base_pos(x)).collect();
                acc = acc.add(&v.scale(&minors[&(jpos.clone(), ipos)]));
            }
            let idx: Vec<u8> = combo.iter().map(|&v| v as u8).collect();
            let term = data.conn.hor_wedge(&idx).wedge(&acc);
            out = out.add(&if p % 2 == 1 { term.neg() } else { term });
        }
    }
    Ok(out)
}

/// `♯_H α = Σ α_k B^{kj} hor_j` for `α ∈ Ω^{1,0}`.
pub fn sharp_h(data: &CouplingData, alpha: &VValuedForm) -> Result<MultiVector> {
    complex::require_bidegree(alpha, 1, 0, "argument of ♯_H")?;
    let base = data.conn.base();
    let mut out = MultiVector::zero(data.chart(), 1);
    for (k, &bk) in base.iter().enumerate() {
        let ak = alpha.coeff(&[bk]);
        if ak.is_zero() {
            continue;
        }
        for (j, &bj) in base.iter().enumerate() {
            out = out.add(&data.conn.hor(bj).scale(&(&ak * &data.b.rows[k][j])));
        }
    }
    Ok(out)
}
