//! Fibered charts, Ehresmann connections and the induced bigradings.

mod vvform;

use std::collections::BTreeMap;

pub use vvform::VValuedForm;

use crate::calculus::{merge_sign, schouten, DiffForm, IndexSet, MultiVector};
use crate::error::{Error, Result};
use crate::ring::{check_chart, Chart, ChartRef, ScalarExpr, VarKind, VarRole, VarSpec};

/// Chart split into base and fiber coordinates.
#[derive(Clone, Debug)]
pub struct Bundle {
    chart: ChartRef,
    base: Vec<usize>,
    fiber: Vec<usize>,
}

impl Bundle {
    pub fn new(chart: &ChartRef) -> Self {
        Bundle { chart: chart.clone(), base: chart.base(), fiber: chart.fiber() }
    }
    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }
    pub fn base(&self) -> &[usize] {
        &self.base
    }
    pub fn fiber(&self) -> &[usize] {
        &self.fiber
    }
    pub fn base_dim(&self) -> usize {
        self.base.len()
    }
    pub fn is_vertical(&self, a: &MultiVector) -> bool {
        a.supported_on(&self.fiber)
    }
    /// True when a form only involves base differentials.
    pub fn is_basic_form(&self, w: &DiffForm) -> bool {
        w.supported_on(&self.base)
    }
}

/// Ehresmann connection `hor(∂_i) = ∂_i + Σ_a γ_i^a ∂_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    chart: ChartRef,
    base: Vec<usize>,
    fiber: Vec<usize>,
    gamma: Vec<Vec<ScalarExpr>>,
    hor: Vec<MultiVector>,
}

impl Connection {
    /// `gamma[i][a]` for the `i`-th base and `a`-th fiber coordinate.
    pub fn new(bundle: &Bundle, gamma: Vec<Vec<ScalarExpr>>) -> Result<Self> {
        let ch = bundle.chart();
        if gamma.len() != bundle.base.len() || gamma.iter().any(|r| r.len() != bundle.fiber.len()) {
            return Err(Error::InvalidInput("connection coefficient table has the wrong shape".into()));
        }
        let mut hor = Vec::new();
        for (i, row) in gamma.iter().enumerate() {
            let mut h = MultiVector::coordinate(ch, bundle.base[i])?;
            for (a, g) in row.iter().enumerate() {
                check_chart(ch, g.chart())?;
                h.add_component(&[bundle.fiber[a]], g.clone())?;
            }
            hor.push(h);
        }
        Ok(Connection { chart: ch.clone(), base: bundle.base.clone(), fiber: bundle.fiber.clone(), gamma, hor })
    }

    pub fn trivial(bundle: &Bundle) -> Self {
        let z = ScalarExpr::zero(bundle.chart());
        Self::new(bundle, vec![vec![z; bundle.fiber.len()]; bundle.base.len()]).expect("trivial connection")
    }

    /// Connection whose horizontal lifts are the given vector fields.
    pub fn from_lifts(bundle: &Bundle, lifts: &[MultiVector]) -> Result<Self> {
        let mut gamma = Vec::new();
        for (i, h) in lifts.iter().enumerate() {
            for &b in bundle.base() {
                let want = if b == bundle.base[i] { 1 } else { 0 };
                if !h.component(&[b]).is_constant_value(&crate::ring::poly::q_int(want)) {
                    return Err(Error::InvalidInput("lift does not project onto the coordinate field".into()));
                }
            }
            gamma.push(bundle.fiber().iter().map(|&a| h.component(&[a])).collect());
        }
        Self::new(bundle, gamma)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }
    pub fn base(&self) -> &[usize] {
        &self.base
    }
    pub fn fiber(&self) -> &[usize] {
        &self.fiber
    }
    pub fn bundle(&self) -> Bundle {
        Bundle { chart: self.chart.clone(), base: self.base.clone(), fiber: self.fiber.clone() }
    }
    pub fn gamma(&self, i: usize, a: usize) -> &ScalarExpr {
        &self.gamma[i][a]
    }

    /// Horizontal lift of the coordinate field of base variable `var`.
    pub fn hor(&self, var: usize) -> &MultiVector {
        let i = self.base.iter().position(|&b| b == var).expect("base variable");
        &self.hor[i]
    }

    pub fn lifts(&self) -> &[MultiVector] {
        &self.hor
    }

    /// `hor_J = hor_{j1} ∧ … ∧ hor_{jp}`.
    pub fn hor_wedge(&self, idx: &[u8]) -> MultiVector {
        let mut acc = MultiVector::function(ScalarExpr::one(&self.chart));
        for &j in idx {
            acc = acc.wedge(self.hor(j as usize));
        }
        acc
    }

    pub fn is_flat(&self) -> Result<bool> {
        Ok(curvature(self)?.is_zero())
    }
}

/// Bigraded components `A_{p,q}` of a multivector: entry `(p, q)` stores the
/// vertical coefficients of `hor_J ∧ (·)`.
pub type Bigraded = BTreeMap<(usize, usize), VValuedForm>;

type Formal = BTreeMap<(IndexSet, IndexSet), ScalarExpr>;

fn formal_add(f: &mut Formal, key: (IndexSet, IndexSet), v: ScalarExpr) {
    if v.is_zero() {
        return;
    }
    let e = f.entry(key).or_insert_with(|| ScalarExpr::zero(v.chart()));
    *e = &*e + &v;
}

/// Decompose `A = Σ A_{p,q}` with respect to `TE = ℍ ⊕ 𝕍`.
pub fn bigrade(a: &MultiVector, conn: &Connection) -> Result<Bigraded> {
    check_chart(a.chart(), conn.chart())?;
    let ch = conn.chart();
    let mut acc: Formal = BTreeMap::new();
    for (idx, coeff) in a.terms() {
        let ib: IndexSet = idx.iter().copied().filter(|&i| conn.base.contains(&(i as usize))).collect();
        let ifib: IndexSet = idx.iter().copied().filter(|&i| conn.fiber.contains(&(i as usize))).collect();
        if ib.len() + ifib.len() != idx.len() {
            return Err(Error::InvalidInput("multivector involves a direction outside the bundle".into()));
        }
        let (s0, _) = merge_sign(&ib, &ifib).expect("disjoint");
        // ∂_{u_i} = hor_i − Σ_a γ_i^a ∂_a, expanded left to right.
        let mut cur: Formal = BTreeMap::new();
        cur.insert((IndexSet::new(), IndexSet::new()), if s0 < 0 { -coeff } else { coeff.clone() });
        for &i in &ib {
            let bi = conn.base.iter().position(|&b| b == i as usize).unwrap();
            let mut next: Formal = BTreeMap::new();
            for ((j, k), v) in &cur {
                if let Some((s, j2)) = merge_sign(j, &[i]) {
                    let s = if k.len() % 2 == 0 { s } else { -s };
                    formal_add(&mut next, (j2, k.clone()), if s < 0 { -v } else { v.clone() });
                }
                for (ai, &fa) in conn.fiber.iter().enumerate() {
                    let g = &conn.gamma[bi][ai];
                    if g.is_zero() {
                        continue;
                    }
                    if let Some((s, k2)) = merge_sign(k, &[fa as u8]) {
                        let t = v * g;
                        formal_add(&mut next, (j.clone(), k2), if s < 0 { t } else { -t });
                    }
                }
            }
            cur = next;
        }
        for ((j, k), v) in cur {
            if let Some((s, k2)) = merge_sign(&k, &ifib) {
                formal_add(&mut acc, (j, k2), if s < 0 { -v } else { v });
            }
        }
    }
    let mut out: Bigraded = BTreeMap::new();
    for ((j, k), v) in acc {
        if v.is_zero() {
            continue;
        }
        let (p, q) = (j.len(), k.len());
        let entry = out.entry((p, q)).or_insert_with(|| VValuedForm::zero(ch, p, q));
        let mut mv = MultiVector::zero(ch, q);
        mv.add_term(k, v);
        entry.add_term(j, mv);
    }
    Ok(out)
}

/// Rebuild `Σ hor_J ∧ V_J` from bigraded components.
pub fn assemble(parts: &Bigraded, conn: &Connection, degree: usize) -> MultiVector {
    let mut out = MultiVector::zero(conn.chart(), degree);
    for vv in parts.values() {
        out = out.add(&assemble_one(vv, conn));
    }
    out
}

pub fn assemble_one(vv: &VValuedForm, conn: &Connection) -> MultiVector {
    let (p, q) = vv.bidegree();
    let mut out = MultiVector::zero(conn.chart(), p + q);
    for (j, v) in vv.terms() {
        out = out.add(&conn.hor_wedge(j).wedge(v));
    }
    out
}

/// Curvature form `Curv(∂_i, ∂_j) = [hor_i, hor_j]`, an element of `Ω^{2,1}`.
pub fn curvature(conn: &Connection) -> Result<VValuedForm> {
    let ch = conn.chart();
    let mut out = VValuedForm::zero(ch, 2, 1);
    for (x, &i) in conn.base.iter().enumerate() {
        for &j in &conn.base[x + 1..] {
            let c = schouten(conn.hor(i), conn.hor(j))?;
            if !c.supported_on(&conn.fiber) {
                return Err(Error::Precondition("bracket of horizontal lifts is not vertical".into()));
            }
            out.set(&[i, j], c)?;
        }
    }
    Ok(out)
}

/// Covariant exterior derivative `∂^γ : Ω^{p,q} → Ω^{p+1,q}`.
pub fn cov_ext_d(conn: &Connection, eta: &VValuedForm) -> Result<VValuedForm> {
    check_chart(conn.chart(), eta.chart())?;
    let (p, q) = eta.bidegree();
    let mut out = VValuedForm::zero(conn.chart(), p + 1, q);
    for (j, v) in eta.terms() {
        for &i in &conn.base {
            if let Some((s, j2)) = merge_sign(&[i as u8], j) {
                let lie = schouten(conn.hor(i), v)?;
                out.add_term(j2, if s < 0 { lie.neg() } else { lie });
            }
        }
    }
    Ok(out)
}

/// Right-hand side of the curvature identity for `(∂^γ)²`:
/// `−Σ_{i<j} (−1)^{i+j} L_{Curv(u_i,u_j)} η(…)`.
pub fn curvature_action(conn: &Connection, eta: &VValuedForm) -> Result<VValuedForm> {
    let curv = curvature(conn)?;
    let (p, q) = eta.bidegree();
    let mut out = VValuedForm::zero(conn.chart(), p + 2, q);
    for (ij, c) in curv.terms() {
        for (k, v) in eta.terms() {
            // −(−1)^{i+j} is the sign of moving the pair to the front.
            if let Some((s, idx)) = merge_sign(ij, k) {
                let lie = schouten(c, v)?;
                out.add_term(idx, if s < 0 { lie.neg() } else { lie });
            }
        }
    }
    Ok(out)
}

/// `π*η` for a `(p, 0)` element.
pub fn pullback(eta: &VValuedForm) -> Result<DiffForm> {
    let (p, q) = eta.bidegree();
    if q != 0 {
        return Err(Error::DegreeMismatch("pullback needs a (p, 0) element".into()));
    }
    let mut w = DiffForm::zero(eta.chart(), p);
    for (j, v) in eta.terms() {
        let idx: Vec<usize> = j.iter().map(|&i| i as usize).collect();
        w.add_component(&idx, v.as_function())?;
    }
    Ok(w)
}

/// `(p, 0)` component of a form with respect to the dual splitting, as a
/// base form: the coefficient at `J` is `ω(hor_{j1}, …, hor_{jp})`.
pub fn horizontal_part(w: &DiffForm, conn: &Connection) -> Result<VValuedForm> {
    let p = w.degree();
    let mut out = VValuedForm::zero(conn.chart(), p, 0);
    for combo in combinations(&conn.base, p) {
        let lifts: Vec<MultiVector> = combo.iter().map(|&i| conn.hor(i).clone()).collect();
        let v = w.evaluate(&lifts)?;
        out.set(&combo, MultiVector::function(v))?;
    }
    Ok(out)
}

/// Pullback compatibility `π*(∂^γ η) = (d π*η)_{p+1,0}`; returns the
/// difference, which vanishes when the identity holds.
pub fn pullback_check(conn: &Connection, eta: &VValuedForm) -> Result<VValuedForm> {
    let lhs = cov_ext_d(conn, eta)?;
    let rhs = horizontal_part(&pullback(eta)?.d(), conn)?;
    Ok(lhs.sub(&rhs))
}

/// Foliated exterior derivative on forms annihilating the vertical bundle.
pub fn foliated_d(conn: &Connection, beta: &DiffForm) -> Result<DiffForm> {
    if !conn.is_flat()? {
        return Err(Error::Precondition("foliated differential needs a flat connection".into()));
    }
    let bundle = conn.bundle();
    if !bundle.is_basic_form(beta) {
        return Err(Error::Precondition("form does not annihilate the vertical bundle".into()));
    }
    let mut eta = VValuedForm::zero(conn.chart(), beta.degree(), 0);
    for (j, v) in beta.terms() {
        let idx: Vec<usize> = j.iter().map(|&i| i as usize).collect();
        eta.set(&idx, MultiVector::function(v.clone()))?;
    }
    pullback(&cov_ext_d(conn, &eta)?)
}

/// Restriction of a vertical, base-independent bivector to the fiber chart.
pub fn project_poisson(p: &MultiVector, bundle: &Bundle) -> Result<(ChartRef, MultiVector)> {
    check_chart(p.chart(), bundle.chart())?;
    if !bundle.is_vertical(p) {
        return Err(Error::Precondition("tensor is not vertical".into()));
    }
    for v in p.terms().values() {
        for &b in bundle.base() {
            if v.depends_on(b) {
                return Err(Error::Precondition(format!(
                    "coefficients depend on base variable `{}`",
                    bundle.chart().name(b)
                )));
            }
        }
    }
    let ch = bundle.chart();
    let specs: Vec<VarSpec> = ch
        .vars()
        .iter()
        .filter(|v| v.role == VarRole::Fiber || v.kind == VarKind::Constant)
        .cloned()
        .collect();
    let fc = Chart::new(specs)?;
    Ok((fc.clone(), p.transport(&fc)?))
}

pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_expr;

    fn setup() -> (Bundle, Connection) {
        let ch = Chart::new(vec![VarSpec::base("u1"), VarSpec::base("u2"), VarSpec::fiber("y1")]).unwrap();
        let b = Bundle::new(&ch);
        let u2 = parse_expr("u2", &ch).unwrap();
        let z = ScalarExpr::zero(&ch);
        let c = Connection::new(&b, vec![vec![u2], vec![z]]).unwrap();
        (b, c)
    }

    #[test]
    fn curvature_of_u2_connection() {
        let (_, c) = setup();
        let curv = curvature(&c).unwrap();
        let dy = MultiVector::coordinate(c.chart(), 2).unwrap();
        assert_eq!(curv.get(&[0, 1]), dy.neg());
        assert!(cov_ext_d(&c, &curv).unwrap().is_zero());
    }

    #[test]
    fn bigrade_of_coordinate_field() {
        let (_, c) = setup();
        let d1 = MultiVector::coordinate(c.chart(), 0).unwrap();
        let parts = bigrade(&d1, &c).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(assemble(&parts, &c, 1), d1);
    }
}
