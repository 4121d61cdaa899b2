use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use super::{
    encode, encode_all, grade_data, independent_mod, kernel_elements, lichnerowicz_graded, rank_of, realized,
    realized_mv, reject_parameters, vv_basis, CohomologyReport, Grading, Registry, Rep, WeightRow,
};
use crate::calculus::{lichnerowicz_delta, MultiVector};
use crate::coupling::{assemble_tensor, sharp_h, CouplingData, MElement};
use crate::error::{Error, Result};
use crate::fibration::VValuedForm;
use crate::linalg::{Echelon, IntVec};
use crate::ring::{ScalarExpr, Q};

fn graded(data: &CouplingData) -> Result<Grading> {
    reject_parameters(data.chart())?;
    grade_data(data).ok_or_else(|| {
        Error::Unsupported("coupling data admits no Euler grading; weight blocks would not be finite".into())
    })
}

fn weights_for(data: &CouplingData, g: &Grading, bidegrees: &[(usize, usize)], bound: u32) -> BTreeSet<i32> {
    let conn = data.connection();
    let mut out = BTreeSet::new();
    for &(p, q) in bidegrees {
        out.extend(realized(data.chart(), g, conn.base(), conn.fiber(), p, q, bound));
    }
    out
}

fn map_all(xs: &[MElement], f: impl Fn(&VValuedForm) -> Result<VValuedForm>, degree: usize) -> Result<Vec<MElement>> {
    xs.iter()
        .map(|x| {
            let mut out = MElement::zero(x.chart(), degree);
            for v in x.parts().values() {
                out.add_part(f(v)?);
            }
            Ok(out)
        })
        .collect()
}

/// `C^p_L`: Casimir-valued `(p, 0)` forms of weight `l`.
fn casimir_valued(data: &CouplingData, g: &Grading, p: usize, l: i32, bound: u32) -> Result<Vec<MElement>> {
    let cells = vv_basis(data.connection(), g, p, 0, l, bound);
    let imgs = map_all(&cells, |v| data.d_p(v), p + 1)?;
    let enc = encode_all(&imgs, &mut Registry::new())?;
    Ok(kernel_elements(&cells, &enc, &MElement::zero(data.chart(), p)))
}

struct HbarBlock {
    row: WeightRow,
    reps: Vec<MElement>,
    composite_zero: bool,
}

fn hbar_block(data: &CouplingData, g: &Grading, p: usize, l: i32, bound: u32) -> Result<HbarBlock> {
    let cp = casimir_valued(data, g, p, l, bound)?;
    let imgs = map_all(&cp, |v| data.d_gamma(v), p + 1)?;
    let enc = encode_all(&imgs, &mut Registry::new())?;
    let cocycles = kernel_elements(&cp, &enc, &MElement::zero(data.chart(), p));
    let mut reg = Registry::new();
    let mut composite_zero = true;
    let prev = if p > 0 {
        let cprev = casimir_valued(data, g, p - 1, l - g.shift, bound)?;
        let imgs = map_all(&cprev, |v| data.d_gamma(v), p)?;
        for x in &imgs {
            for v in x.parts().values() {
                if !data.d_gamma(v)?.is_zero() || !data.d_p(v)?.is_zero() {
                    composite_zero = false;
                }
            }
        }
        encode_all(&imgs, &mut reg)?
    } else {
        Vec::new()
    };
    let image = rank_of(&prev);
    let reps = independent_mod(&prev, &cocycles, &mut reg)?;
    Ok(HbarBlock {
        row: WeightRow {
            weight: Some(l),
            label: None,
            cochains: cp.len(),
            kernel: cocycles.len(),
            image,
            dim: cocycles.len() - image,
        },
        reps,
        composite_zero,
    })
}

fn hbar_on(data: &CouplingData, g: &Grading, p: usize, bound: u32, ws: &BTreeSet<i32>) -> Result<CohomologyReport> {
    let ws: Vec<i32> = ws.iter().copied().collect();
    let blocks: Vec<HbarBlock> = ws.par_iter().map(|&l| hbar_block(data, g, p, l, bound)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut reps = Vec::new();
    let mut composite_zero = true;
    for b in blocks {
        composite_zero &= b.composite_zero;
        reps.extend(b.reps.into_iter().map(|r| (b.row.weight, Rep::Bigraded(r))));
        rows.push(b.row);
    }
    Ok(CohomologyReport {
        title: format!("H^{} (foliated, Casimir-valued)", p),
        degree: p,
        bound,
        exact: true,
        grading: Some(g.clone()),
        rows,
        representatives: reps,
        composite_zero,
        undecided: 0,
    })
}

/// Cohomology of `∂^γ` on Casimir-valued base forms, per weight.
pub fn hbar_cohomology(data: &CouplingData, p: usize, bound: u32) -> Result<CohomologyReport> {
    let g = graded(data)?;
    let ws = weights_for(data, &g, &[(p, 0)], bound);
    hbar_on(data, &g, p, bound, &ws)
}

// ---------------------------------------------------------------------------

/// A vertical Poisson field in the kernel of `ρ` with its witnesses:
/// `[hor_i, Y] = −P♯dβ_i` and `∂^γc = ∂^γβ + ∂^σY` with `c` Casimir-valued.
#[derive(Clone, Debug)]
pub struct RhoRep {
    pub weight: i32,
    pub y: MultiVector,
    pub beta: VValuedForm,
    pub c: VValuedForm,
}

impl RhoRep {
    /// `X_Y = −♯_H(β − c) + Y`.
    pub fn field(&self, data: &CouplingData) -> Result<MultiVector> {
        Ok(sharp_h(data, &self.beta.sub(&self.c))?.neg().add(&self.y))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoRow {
    pub weight: i32,
    /// Pairs `(Y, β)` solving the membership equations.
    pub pairs: usize,
    /// Independent vertical parts in the kernel of `ρ`.
    pub kernel: usize,
    pub hamiltonian: usize,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct RhoReport {
    pub bound: u32,
    pub grading: Grading,
    pub rows: Vec<RhoRow>,
    pub representatives: Vec<RhoRep>,
    pub undecided: usize,
}

impl RhoReport {
    pub fn dim(&self) -> usize {
        self.rows.iter().map(|r| r.dim).sum()
    }
}

fn vertical(x: &MElement) -> MultiVector {
    x.part(0, 1).get(&[])
}

/// Membership pairs `(Y, β)` of weight `l`: `∂^P Y = 0`, `∂^γY + ∂^Pβ = 0`.
fn membership_pairs(data: &CouplingData, g: &Grading, l: i32, bound: u32) -> Result<Vec<MElement>> {
    let mut cells = vv_basis(data.connection(), g, 0, 1, l, bound);
    cells.extend(vv_basis(data.connection(), g, 1, 0, l, bound));
    let imgs: Vec<MElement> = cells
        .iter()
        .map(|x| {
            let mut out = MElement::zero(data.chart(), 2);
            for v in x.parts().values() {
                out.add_part(data.d_p(v)?);
                if v.bidegree() == (0, 1) {
                    out.add_part(data.d_gamma(v)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let enc = encode_all(&imgs, &mut Registry::new())?;
    Ok(kernel_elements(&cells, &enc, &MElement::zero(data.chart(), 1)))
}

struct RhoBlock {
    row: RhoRow,
    reps: Vec<RhoRep>,
}

fn hamiltonians(data: &CouplingData, g: &Grading, l: i32, bound: u32, reg: &mut Registry) -> Result<Vec<(IntVec, Q)>> {
    let fs = vv_basis(data.connection(), g, 0, 0, l - g.shift, bound);
    let hs = map_all(&fs, |v| data.d_p(v), 1)?;
    encode_all(&hs, reg)
}

fn rho_block(data: &CouplingData, g: &Grading, l: i32, bound: u32) -> Result<RhoBlock> {
    let ch = data.chart();
    let pairs = membership_pairs(data, g, l, bound)?;
    let taus: Vec<MElement> = pairs
        .iter()
        .map(|x| {
            let yv = x.part(0, 1);
            let beta = x.part(1, 0);
            Ok(MElement::from_part(data.d_gamma(&beta)?.add(&data.d_sigma(&yv)?)))
        })
        .collect::<Result<_>>()?;
    let c1 = casimir_valued(data, g, 1, l, bound)?;
    let dc = map_all(&c1, |v| data.d_gamma(v), 2)?;

    let mut reg = Registry::new();
    let off = pairs.len() as u32;
    let dc_enc = encode_all(&dc, &mut reg)?;
    let tau_enc = encode_all(&taus, &mut reg)?;
    let mut ech = Echelon::new();
    for (l_idx, (v, _)) in dc_enc.iter().enumerate() {
        ech.insert_tagged(v.clone(), vec![(off + l_idx as u32, BigInt::one())]);
    }
    let mut kernel: Vec<(MElement, VValuedForm)> = Vec::new();
    for (j, (v, _)) in tau_enc.iter().enumerate() {
        if let Some(rel) = ech.insert_tagged(v.clone(), vec![(j as u32, BigInt::one())]) {
            let mut x = MElement::zero(ch, 1);
            let mut c = VValuedForm::zero(ch, 1, 0);
            for (idx, t) in &rel {
                let t = Q::from_integer(t.clone());
                if *idx < off {
                    let k = *idx as usize;
                    let s = ScalarExpr::constant(ch, t * &tau_enc[k].1);
                    for v in pairs[k].parts().values() {
                        x.add_part(v.scale(&s));
                    }
                } else {
                    let k = (*idx - off) as usize;
                    let s = ScalarExpr::constant(ch, -(t * &dc_enc[k].1));
                    c = c.add(&c1[k].part(1, 0).scale(&s));
                }
            }
            if !x.is_zero() {
                kernel.push((x, c));
            }
        }
    }

    let mut reg_v = Registry::new();
    let ham = hamiltonians(data, g, l, bound, &mut reg_v)?;
    let ham_rank = rank_of(&ham);
    let mut ech = Echelon::new();
    for (v, _) in &ham {
        ech.insert(v.clone());
    }
    let mut reps = Vec::new();
    let mut kernel_vertical = Echelon::new();
    for (x, c) in &kernel {
        let y = vertical(x);
        let (v, _) = encode(&y, &mut reg_v)?;
        kernel_vertical.insert(v.clone());
        if ech.insert(v) {
            reps.push(RhoRep { weight: l, y, beta: x.part(1, 0), c: c.clone() });
        }
    }
    let row = RhoRow {
        weight: l,
        pairs: pairs.len(),
        kernel: kernel_vertical.rank(),
        hamiltonian: ham_rank,
        dim: reps.len(),
    };
    Ok(RhoBlock { row, reps })
}

fn rho_on(data: &CouplingData, g: &Grading, bound: u32, ws: &BTreeSet<i32>) -> Result<RhoReport> {
    let ws: Vec<i32> = ws.iter().copied().collect();
    let blocks: Vec<RhoBlock> = ws.par_iter().map(|&l| rho_block(data, g, l, bound)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut reps = Vec::new();
    for b in blocks {
        rows.push(b.row);
        reps.extend(b.reps);
    }
    Ok(RhoReport { bound, grading: g.clone(), rows, representatives: reps, undecided: 0 })
}

/// Vertical Poisson fields in the kernel of `ρ` modulo Hamiltonian fields of `P`.
pub fn kernel_rho_mod_ham(data: &CouplingData, bound: u32) -> Result<RhoReport> {
    let g = graded(data)?;
    let ws = weights_for(data, &g, &[(0, 1)], bound);
    rho_on(data, &g, bound, &ws)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralRow {
    pub weight: i32,
    /// `E_2^{1,0}`.
    pub e2_10: usize,
    /// `E_∞^{0,1}`.
    pub einf_01: usize,
    /// `H¹(𝔐, ∂)`.
    pub h1: usize,
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub bound: u32,
    pub grading: Grading,
    pub rows: Vec<SpectralRow>,
}

impl SpectralReport {
    pub fn e2_10(&self) -> usize {
        self.rows.iter().map(|r| r.e2_10).sum()
    }
    pub fn einf_01(&self) -> usize {
        self.rows.iter().map(|r| r.einf_01).sum()
    }
    pub fn h1(&self) -> usize {
        self.rows.iter().map(|r| r.h1).sum()
    }
}

/// Degree-one cocycles of the total differential `∂` on `𝔐¹_L`.
fn m_cocycles(data: &CouplingData, g: &Grading, l: i32, bound: u32) -> Result<Vec<MElement>> {
    let mut cells = vv_basis(data.connection(), g, 0, 1, l, bound);
    cells.extend(vv_basis(data.connection(), g, 1, 0, l, bound));
    let imgs: Vec<MElement> = cells
        .iter()
        .map(|x| {
            let mut out = MElement::zero(data.chart(), 2);
            for v in x.parts().values() {
                out = out.add(&data.d_total(v)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let enc = encode_all(&imgs, &mut Registry::new())?;
    Ok(kernel_elements(&cells, &enc, &MElement::zero(data.chart(), 1)))
}

fn spectral_block(data: &CouplingData, g: &Grading, l: i32, bound: u32) -> Result<SpectralRow> {
    let e2 = hbar_block(data, g, 1, l, bound)?.row.dim;
    let z = m_cocycles(data, g, l, bound)?;
    let mut reg_v = Registry::new();
    let ham = hamiltonians(data, g, l, bound, &mut reg_v)?;
    let mut all = ham.clone();
    for x in &z {
        all.push(encode(&vertical(x), &mut reg_v)?);
    }
    let einf = rank_of(&all) - rank_of(&ham);
    let fs = vv_basis(data.connection(), g, 0, 0, l - g.shift, bound);
    let df: Vec<MElement> = fs.iter().map(|x| data.d_total(&x.part(0, 0))).collect::<Result<_>>()?;
    let h1 = z.len() - rank_of(&encode_all(&df, &mut Registry::new())?);
    Ok(SpectralRow { weight: l, e2_10: e2, einf_01: einf, h1 })
}

/// `E_2^{1,0}`, `E_∞^{0,1}` and `H¹(𝔐)` per weight.
pub fn spectral_terms(data: &CouplingData, bound: u32) -> Result<SpectralReport> {
    let g = graded(data)?;
    let ws: Vec<i32> = weights_for(data, &g, &[(1, 0), (0, 1)], bound).into_iter().collect();
    let rows: Vec<SpectralRow> = ws.par_iter().map(|&l| spectral_block(data, &g, l, bound)).collect::<Result<_>>()?;
    Ok(SpectralReport { bound, grading: g, rows })
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitRow {
    pub weight: i32,
    pub hbar: usize,
    pub rho: usize,
    pub lichnerowicz: usize,
}

#[derive(Clone, Debug)]
pub struct H1Split {
    pub bound: u32,
    pub grading: Grading,
    pub rows: Vec<SplitRow>,
    pub hbar: CohomologyReport,
    pub rho: RhoReport,
    pub lichnerowicz: CohomologyReport,
    /// Poisson fields assembled from the split representatives.
    pub fields: Vec<MultiVector>,
    /// Every assembled field is Poisson and together they span `H¹_Π` at each weight.
    pub reps_match: bool,
}

impl H1Split {
    pub fn left(&self) -> usize {
        self.rows.iter().map(|r| r.hbar + r.rho).sum()
    }
    pub fn right(&self) -> usize {
        self.rows.iter().map(|r| r.lichnerowicz).sum()
    }
}

fn fields_span_h1(pi: &MultiVector, g: &Grading, l: i32, bound: u32, fields: &[MultiVector], dim: usize) -> Result<bool> {
    for x in fields {
        if !lichnerowicz_delta(pi, x)?.is_zero() {
            return Ok(false);
        }
    }
    let mut reg = Registry::new();
    let fs = super::mv_basis(pi.chart(), g, 0, l - g.shift, bound);
    let hams: Vec<MultiVector> = fs.iter().map(|f| lichnerowicz_delta(pi, f)).collect::<Result<_>>()?;
    let ham = encode_all(&hams, &mut reg)?;
    let mut all = ham.clone();
    all.extend(encode_all(fields, &mut reg)?);
    Ok(rank_of(&all) - rank_of(&ham) == dim && fields.len() == dim)
}

/// `H¹_Π ≅ H¹_∂̄ ⊕ ker ρ / Ham` per weight, with both sides computed
/// independently and the split representatives reassembled into Poisson
/// fields of `Π`.
pub fn h1_split(data: &CouplingData, bound: u32) -> Result<H1Split> {
    let g = graded(data)?;
    let pi = assemble_tensor(data);
    let mut ws = weights_for(data, &g, &[(1, 0), (0, 1)], bound);
    ws.extend(realized_mv(data.chart(), &g, 1, bound));
    let hbar = hbar_on(data, &g, 1, bound, &ws)?;
    let rho = rho_on(data, &g, bound, &ws)?;
    let lich = lichnerowicz_graded(&pi, &g, 1, bound, &ws)?;
    let mut rows = Vec::new();
    let mut fields = Vec::new();
    let mut reps_match = hbar.composite_zero && lich.composite_zero;
    for &l in &ws {
        let row = SplitRow { weight: l, hbar: hbar.dim_at(l), rho: rho.rows.iter().filter(|r| r.weight == l).map(|r| r.dim).sum(), lichnerowicz: lich.dim_at(l) };
        let mut fl = Vec::new();
        for (w, r) in &hbar.representatives {
            if *w == Some(l) {
                if let Rep::Bigraded(m) = r {
                    fl.push(sharp_h(data, &m.part(1, 0))?.neg());
                }
            }
        }
        for r in rho.representatives.iter().filter(|r| r.weight == l) {
            fl.push(r.field(data)?);
        }
        reps_match &= fields_span_h1(&pi, &g, l, bound, &fl, row.lichnerowicz)?;
        fields.extend(fl);
        rows.push(row);
    }
    Ok(H1Split { bound, grading: g, rows, hbar, rho, lichnerowicz: lich, fields, reps_match })
}

