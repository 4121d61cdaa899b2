//! Truncated cohomology by exact linear algebra.
//!
//! Complexes are split by an Euler weight: every affine coordinate `x` gets
//! a positive weight `ω_x`, periodic coordinates weight zero, `∂_x` weight
//! `−ω_x` and a base differential `du^i` weight `κ_i`. When the input is
//! homogeneous every differential shifts the weight by the same amount, so
//! each weight block is finite-dimensional (trig degree capped at the bound)
//! and its cohomology is computed exactly. Reports cover every weight that a
//! cochain with coefficient degree at most `D` can carry.

mod split;
mod vanishing;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::calculus::{lichnerowicz_delta, IndexSet, MultiVector};
use crate::coupling::{CouplingData, MElement};
use crate::error::{Error, Result};
use crate::fibration::{combinations, Connection, VValuedForm};
use crate::linalg::expand::{mono_expr, rational_terms};
use crate::linalg::sparse::from_rational;
use crate::linalg::{Echelon, IntVec};
use crate::ring::{ChartRef, Mono, Poly, ScalarExpr, Slot, VarKind, Q};

pub use split::{h1_split, hbar_cohomology, kernel_rho_mod_ham, spectral_terms, H1Split, RhoReport, SpectralReport};
pub use vanishing::{vanishing_conditions, VanishingReport};

/// Euler weights of the chart variables and the common shift of the
/// differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub weights: Vec<i32>,
    pub shift: i32,
    /// `κ_i` for base variables (zero elsewhere).
    pub kappa: Vec<i32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum W {
    Zero,
    Hom(i32),
    Mixed,
}

impl W {
    fn join(self, o: W) -> W {
        match (self, o) {
            (W::Zero, x) | (x, W::Zero) => x,
            (W::Hom(a), W::Hom(b)) if a == b => W::Hom(a),
            _ => W::Mixed,
        }
    }
}

impl Grading {
    fn slot_weight(&self, chart: &ChartRef, slot: usize) -> i32 {
        match chart.slots()[slot] {
            Slot::Var(v) => self.weights[v],
            Slot::Cos(_) | Slot::Sin(_) => 0,
        }
    }

    pub fn mono_weight(&self, chart: &ChartRef, m: &Mono) -> i32 {
        m.iter().enumerate().map(|(s, &e)| e as i32 * self.slot_weight(chart, s)).sum()
    }

    fn poly_weight(&self, chart: &ChartRef, p: &Poly) -> W {
        p.terms().keys().fold(W::Zero, |acc, m| acc.join(W::Hom(self.mono_weight(chart, m))))
    }

    fn expr_weight(&self, f: &ScalarExpr) -> W {
        match (self.poly_weight(f.chart(), f.numer()), self.poly_weight(f.chart(), f.denom())) {
            (W::Zero, _) => W::Zero,
            (W::Hom(a), W::Hom(b)) => W::Hom(a - b),
            _ => W::Mixed,
        }
    }

    /// Weight of a multivector, `w(f) − ω(I)` for every term.
    pub(crate) fn mv_weight(&self, a: &MultiVector) -> W {
        a.terms().iter().fold(W::Zero, |acc, (idx, f)| {
            let off: i32 = idx.iter().map(|&i| self.weights[i as usize]).sum();
            acc.join(match self.expr_weight(f) {
                W::Hom(w) => W::Hom(w - off),
                other => other,
            })
        })
    }

    fn frame_offset(&self, j: &[u8], k: &[u8]) -> i32 {
        j.iter().map(|&i| self.kappa[i as usize]).sum::<i32>() - k.iter().map(|&i| self.weights[i as usize]).sum::<i32>()
    }

    /// All affine weights equal: the common value.
    fn uniform(&self, chart: &ChartRef) -> Option<i32> {
        let ws: BTreeSet<i32> = (0..chart.len())
            .filter(|&v| chart.var(v).kind == VarKind::Affine)
            .map(|v| self.weights[v])
            .collect();
        if ws.len() == 1 {
            ws.into_iter().next()
        } else {
            None
        }
    }
}

fn reject_parameters(chart: &ChartRef) -> Result<()> {
    if !chart.constants().is_empty() {
        return Err(Error::Unsupported(
            "cohomology needs rational coefficients; substitute the symbolic parameters first".into(),
        ));
    }
    Ok(())
}

/// Candidate weight vectors, by increasing total weight.
pub(crate) fn candidates(chart: &ChartRef) -> Vec<Vec<i32>> {
    let affine: Vec<usize> = (0..chart.len()).filter(|&v| chart.var(v).kind == VarKind::Affine).collect();
    let mut tuples: Vec<Vec<i32>> = vec![Vec::new()];
    for _ in &affine {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (1..=4).map(move |w| {
                    let mut t2 = t.clone();
                    t2.push(w);
                    t2
                })
            })
            .collect();
    }
    tuples.sort_by_key(|t| (t.iter().sum::<i32>(), t.clone()));
    tuples
        .into_iter()
        .map(|t| {
            let mut w = vec![0; chart.len()];
            for (k, &v) in affine.iter().enumerate() {
                w[v] = t[k];
            }
            w
        })
        .collect()
}

/// Minimal grading making a tensor homogeneous.
pub fn grade_tensor(pi: &MultiVector) -> Option<Grading> {
    let ch = pi.chart();
    for weights in candidates(ch) {
        let g = Grading { weights, shift: 0, kappa: vec![0; ch.len()] };
        match g.mv_weight(pi) {
            W::Zero => return Some(g),
            W::Hom(s) => return Some(Grading { shift: s, ..g }),
            W::Mixed => continue,
        }
    }
    None
}

/// Minimal grading for coupling data: `P` of weight `s`, `hor_i` of weight
/// `−ω_i`, `S_ij` of weight `−s − ω_i − ω_j`; then `κ_i = s + ω_i`.
pub fn grade_data(data: &CouplingData) -> Option<Grading> {
    let ch = data.chart();
    let base = data.connection().base();
    'outer: for weights in candidates(ch) {
        let mut g = Grading { weights, shift: 0, kappa: vec![0; ch.len()] };
        let mut s = match g.mv_weight(data.p()) {
            W::Mixed => continue,
            W::Zero => None,
            W::Hom(s) => Some(s),
        };
        for &i in base {
            match g.mv_weight(data.connection().hor(i)) {
                W::Hom(w) if w == -g.weights[i] => {}
                _ => continue 'outer,
            }
        }
        for (x, &i) in base.iter().enumerate() {
            for (y, &j) in base.iter().enumerate() {
                match g.expr_weight(&data.sigma_matrix().rows[x][y]) {
                    W::Zero => {}
                    W::Mixed => continue 'outer,
                    W::Hom(w) => {
                        let need = -w - g.weights[i] - g.weights[j];
                        match s {
                            None => s = Some(need),
                            Some(s0) if s0 == need => {}
                            _ => continue 'outer,
                        }
                    }
                }
            }
        }
        g.shift = s.unwrap_or(0);
        for &i in base {
            g.kappa[i] = g.shift + g.weights[i];
        }
        return Some(g);
    }
    None
}

// ---------------------------------------------------------------------------
// Monomials and block bases

/// Affine exponent vectors over `vars` with `Σ e_v ω_v = target`.
fn affine_of_weight(chart: &ChartRef, g: &Grading, vars: &[usize], target: i32) -> Vec<Mono> {
    let n = chart.nslots();
    let mut out = Vec::new();
    fn rec(chart: &ChartRef, g: &Grading, vars: &[usize], k: usize, left: i32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if k == vars.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let v = vars[k];
        let w = g.weights[v];
        let s = chart.slot_of(v);
        let mut e = 0;
        while e * w <= left {
            cur[s] = e as u16;
            rec(chart, g, vars, k + 1, left - e * w, cur, out);
            e += 1;
        }
        cur[s] = 0;
    }
    if target < 0 {
        return out;
    }
    let mut cur = Mono::from_elem(0, n);
    rec(chart, g, vars, 0, target, &mut cur, &mut out);
    out
}

fn with_trig(chart: &ChartRef, periodic: &[usize], bound: u32, base: Vec<Mono>) -> Vec<Mono> {
    let mut out = base;
    for &v in periodic {
        let (cs, ss) = chart.trig_slots(v).expect("periodic");
        let mut next = Vec::new();
        for m in &out {
            for b in 0..=1u32.min(bound) {
                for a in 0..=bound - b {
                    let mut m2 = m.clone();
                    m2[cs] = a as u16;
                    m2[ss] = b as u16;
                    next.push(m2);
                }
            }
        }
        out = next;
    }
    out
}

fn split_vars(chart: &ChartRef) -> (Vec<usize>, Vec<usize>) {
    let coords = chart.coordinates();
    let affine = coords.iter().copied().filter(|&v| chart.var(v).kind == VarKind::Affine).collect();
    let periodic = coords.iter().copied().filter(|&v| chart.var(v).kind == VarKind::Periodic).collect();
    (affine, periodic)
}

/// Monomials of weight `target` (trig degree per periodic variable at most `bound`).
fn monomials_of_weight(chart: &ChartRef, g: &Grading, target: i32, bound: u32) -> Vec<Mono> {
    let (affine, periodic) = split_vars(chart);
    with_trig(chart, &periodic, bound, affine_of_weight(chart, g, &affine, target))
}

/// Weights of monomials of affine degree at most `bound`.
fn low_degree_weights(chart: &ChartRef, g: &Grading, bound: u32) -> BTreeSet<i32> {
    let (affine, _) = split_vars(chart);
    let mut out = BTreeSet::new();
    fn rec(g: &Grading, vars: &[usize], k: usize, left: u32, acc: i32, out: &mut BTreeSet<i32>) {
        if k == vars.len() {
            out.insert(acc);
            return;
        }
        for e in 0..=left {
            rec(g, vars, k + 1, left - e, acc + e as i32 * g.weights[vars[k]], out);
        }
    }
    rec(g, &affine, 0, bound, 0, &mut out);
    out
}

/// Frames `(J, K)` of bidegree `(p, q)` with their weight offsets.
fn frames(g: &Grading, base: &[usize], fiber: &[usize], p: usize, q: usize) -> Vec<(IndexSet, IndexSet, i32)> {
    let mut out = Vec::new();
    for j in combinations(base, p) {
        for k in combinations(fiber, q) {
            let j: IndexSet = j.iter().map(|&x| x as u8).collect();
            let k: IndexSet = k.iter().map(|&x| x as u8).collect();
            let off = g.frame_offset(&j, &k);
            out.push((j, k, off));
        }
    }
    out
}

/// Weights carried by `(p, q)` cochains whose coefficients have degree at most `bound`.
fn realized(chart: &ChartRef, g: &Grading, base: &[usize], fiber: &[usize], p: usize, q: usize, bound: u32) -> BTreeSet<i32> {
    let mono = low_degree_weights(chart, g, bound);
    let mut out = BTreeSet::new();
    for (_, _, off) in frames(g, base, fiber, p, q) {
        for w in &mono {
            out.insert(w + off);
        }
    }
    out
}

/// Basis of `k`-vector fields of weight `l` (multivector frames over all coordinates).
fn mv_basis(chart: &ChartRef, g: &Grading, k: usize, l: i32, bound: u32) -> Vec<MultiVector> {
    let mut out = Vec::new();
    for dirs in combinations(&chart.coordinates(), k) {
        let off = -dirs.iter().map(|&i| g.weights[i]).sum::<i32>();
        for m in monomials_of_weight(chart, g, l - off, bound) {
            let mut mv = MultiVector::zero(chart, k);
            mv.add_component(&dirs, mono_expr(chart, &m)).expect("frame");
            out.push(mv);
        }
    }
    out
}

/// Basis of `Ω^{p,q}` elements of weight `l`.
fn vv_basis(conn: &Connection, g: &Grading, p: usize, q: usize, l: i32, bound: u32) -> Vec<MElement> {
    let ch = conn.chart();
    let mut out = Vec::new();
    for (j, k, off) in frames(g, conn.base(), conn.fiber(), p, q) {
        for m in monomials_of_weight(ch, g, l - off, bound) {
            let mut mv = MultiVector::zero(ch, q);
            let dirs: Vec<usize> = k.iter().map(|&i| i as usize).collect();
            mv.add_component(&dirs, mono_expr(ch, &m)).expect("frame");
            let mut v = VValuedForm::zero(ch, p, q);
            let jb: Vec<usize> = j.iter().map(|&i| i as usize).collect();
            v.set(&jb, mv).expect("frame");
            out.push(MElement::from_part(v));
        }
    }
    out
}

fn realized_mv(chart: &ChartRef, g: &Grading, k: usize, bound: u32) -> BTreeSet<i32> {
    realized(chart, g, &[], &chart.coordinates(), 0, k, bound)
}

// ---------------------------------------------------------------------------
// Coordinates

type Key = (IndexSet, IndexSet, Mono);

/// Assigns coordinates to monomial cochains. With a degree split, cochains
/// of coefficient degree above the split get the smaller indices.
#[derive(Default)]
pub(crate) struct Registry {
    map: HashMap<Key, u32>,
    low: u32,
    high: u32,
    split: Option<u32>,
}

const LOW_BASE: u32 = 1 << 31;

impl Registry {
    fn new() -> Self {
        Self::default()
    }

    fn with_split(bound: u32) -> Self {
        Registry { split: Some(bound), ..Self::default() }
    }

    fn index(&mut self, key: Key) -> u32 {
        if let Some(&i) = self.map.get(&key) {
            return i;
        }
        let deg: u32 = key.2.iter().map(|&e| e as u32).sum();
        let i = match self.split {
            Some(b) if deg > b => {
                self.high += 1;
                self.high - 1
            }
            _ => {
                self.low += 1;
                LOW_BASE + self.low - 1
            }
        };
        self.map.insert(key, i);
        i
    }
}

pub(crate) trait Cochain: Clone + Send + Sync {
    fn entries(&self, reg: &mut Registry) -> Result<Vec<(u32, Q)>>;
    fn scaled(&self, q: &Q) -> Self;
    fn plus(&self, o: &Self) -> Self;
}

fn push_terms(out: &mut Vec<(u32, Q)>, reg: &mut Registry, j: &IndexSet, k: &IndexSet, f: &ScalarExpr) -> Result<()> {
    for (m, q) in rational_terms(f)? {
        out.push((reg.index((j.clone(), k.clone(), m)), q));
    }
    Ok(())
}

impl Cochain for MultiVector {
    fn entries(&self, reg: &mut Registry) -> Result<Vec<(u32, Q)>> {
        let mut out = Vec::new();
        let empty = IndexSet::new();
        for (idx, f) in self.terms() {
            push_terms(&mut out, reg, &empty, idx, f)?;
        }
        Ok(out)
    }
    fn scaled(&self, q: &Q) -> Self {
        self.scale_q(q)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
}

impl Cochain for MElement {
    fn entries(&self, reg: &mut Registry) -> Result<Vec<(u32, Q)>> {
        let mut out = Vec::new();
        for v in self.parts().values() {
            for (j, mv) in v.terms() {
                for (k, f) in mv.terms() {
                    push_terms(&mut out, reg, j, k, f)?;
                }
            }
        }
        Ok(out)
    }
    fn scaled(&self, q: &Q) -> Self {
        let c = ScalarExpr::constant(self.chart(), q.clone());
        let mut out = MElement::zero(self.chart(), self.degree());
        for v in self.parts().values() {
            out.add_part(v.scale(&c));
        }
        out
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
}

/// Integer coordinate vector of a cochain and the factor it was scaled by.
pub(crate) fn encode<T: Cochain>(x: &T, reg: &mut Registry) -> Result<(IntVec, Q)> {
    let mut e = x.entries(reg)?;
    e.sort_by_key(|t| t.0);
    let mut merged: Vec<(u32, Q)> = Vec::with_capacity(e.len());
    for (i, q) in e {
        match merged.last_mut() {
            Some(last) if last.0 == i => last.1 = &last.1 + &q,
            _ => merged.push((i, q)),
        }
    }
    merged.retain(|t| !t.1.is_zero());
    Ok(from_rational(&merged))
}

pub(crate) fn encode_all<T: Cochain>(xs: &[T], reg: &mut Registry) -> Result<Vec<(IntVec, Q)>> {
    xs.iter().map(|x| encode(x, reg)).collect()
}

/// Linear combination `Σ t_j l_j x_j` described by an integer relation on
/// scaled inputs.
pub(crate) fn combine<T: Cochain>(xs: &[T], scales: &[Q], rel: &IntVec, zero: T) -> T {
    let mut acc = zero;
    for (j, t) in rel {
        let j = *j as usize;
        if j < xs.len() {
            acc = acc.plus(&xs[j].scaled(&(Q::from_integer(t.clone()) * &scales[j])));
        }
    }
    acc
}

/// Kernel of `x_j ↦ images[j]` as cochains.
pub(crate) fn kernel_elements<T: Cochain>(xs: &[T], images: &[(IntVec, Q)], zero: &T) -> Vec<T> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    let scales: Vec<Q> = images.iter().map(|(_, l)| l.clone()).collect();
    for (j, (v, _)) in images.iter().enumerate() {
        if let Some(rel) = ech.insert_tagged(v.clone(), vec![(j as u32, BigInt::one())]) {
            out.push(combine(xs, &scales, &rel, zero.clone()));
        }
    }
    out
}

pub(crate) fn rank_of(vs: &[(IntVec, Q)]) -> usize {
    let mut ech = Echelon::new();
    for (v, _) in vs {
        ech.insert(v.clone());
    }
    ech.rank()
}

/// Elements of `cands` independent modulo `span(base)`, in order.
pub(crate) fn independent_mod<T: Cochain>(
    base: &[(IntVec, Q)],
    cands: &[T],
    reg: &mut Registry,
) -> Result<Vec<T>> {
    let mut ech = Echelon::new();
    for (v, _) in base {
        ech.insert(v.clone());
    }
    let mut out = Vec::new();
    for c in cands {
        if ech.insert(encode(c, reg)?.0) {
            out.push(c.clone());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightRow {
    /// `None` for the single row of a truncated (non-graded) computation.
    pub weight: Option<i32>,
    /// Coefficient degree, when all affine weights coincide.
    pub label: Option<i32>,
    pub cochains: usize,
    pub kernel: usize,
    pub image: usize,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub enum Rep {
    Field(MultiVector),
    Bigraded(MElement),
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Field(x) => write!(f, "{}", x),
            Rep::Bigraded(x) => write!(f, "{}", x),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub title: String,
    pub degree: usize,
    pub bound: u32,
    /// True when the input was weight-homogeneous and every block was complete.
    pub exact: bool,
    pub grading: Option<Grading>,
    pub rows: Vec<WeightRow>,
    pub representatives: Vec<(Option<i32>, Rep)>,
    /// Image of the previous differential lies in the kernel (checked by composing).
    pub composite_zero: bool,
    /// Existential solves left open at the bound.
    pub undecided: usize,
}

impl CohomologyReport {
    pub fn dim(&self) -> usize {
        self.rows.iter().map(|r| r.dim).sum()
    }
    pub fn dim_at(&self, weight: i32) -> usize {
        self.rows.iter().filter(|r| r.weight == Some(weight)).map(|r| r.dim).sum()
    }
    pub fn dims_by_label(&self) -> Vec<(i32, usize)> {
        self.rows.iter().filter_map(|r| r.label.map(|l| (l, r.dim))).collect()
    }
}

fn label_for(chart: &ChartRef, g: &Grading, weight: i32, k: usize) -> Option<i32> {
    g.uniform(chart).and_then(|w| {
        let x = weight + k as i32 * w;
        (x % w == 0).then_some(x / w)
    })
}

// ---------------------------------------------------------------------------
// Lichnerowicz

struct LichBlock {
    row: WeightRow,
    reps: Vec<MultiVector>,
    composite_zero: bool,
}

fn lich_block(pi: &MultiVector, g: &Grading, k: usize, l: i32, bound: u32) -> Result<LichBlock> {
    let ch = pi.chart();
    let cells = mv_basis(ch, g, k, l, bound);
    let mut reg_next = Registry::new();
    let imgs: Vec<MultiVector> = cells.iter().map(|c| lichnerowicz_delta(pi, c)).collect::<Result<_>>()?;
    let enc = encode_all(&imgs, &mut reg_next)?;
    let kernel = kernel_elements(&cells, &enc, &MultiVector::zero(ch, k));
    let mut reg = Registry::new();
    let mut composite_zero = true;
    let prev_img = if k > 0 {
        let prev = mv_basis(ch, g, k - 1, l - g.shift, bound);
        let imgs: Vec<MultiVector> = prev.iter().map(|c| lichnerowicz_delta(pi, c)).collect::<Result<_>>()?;
        for x in &imgs {
            if !lichnerowicz_delta(pi, x)?.is_zero() {
                composite_zero = false;
            }
        }
        encode_all(&imgs, &mut reg)?
    } else {
        Vec::new()
    };
    let image = rank_of(&prev_img);
    let reps = independent_mod(&prev_img, &kernel, &mut reg)?;
    let row = WeightRow {
        weight: Some(l),
        label: label_for(ch, g, l, k),
        cochains: cells.len(),
        kernel: kernel.len(),
        image,
        dim: kernel.len() - image,
    };
    debug_assert_eq!(reps.len(), row.dim);
    Ok(LichBlock { row, reps, composite_zero })
}

/// `H^k` of `δ_Π` on a given grading, at every weight in `weights`.
pub(crate) fn lichnerowicz_graded(
    pi: &MultiVector,
    g: &Grading,
    k: usize,
    bound: u32,
    weights: &BTreeSet<i32>,
) -> Result<CohomologyReport> {
    let ws: Vec<i32> = weights.iter().copied().collect();
    let blocks: Vec<LichBlock> = ws.par_iter().map(|&l| lich_block(pi, g, k, l, bound)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut reps = Vec::new();
    let mut composite_zero = true;
    for b in blocks {
        composite_zero &= b.composite_zero;
        for r in b.reps {
            reps.push((b.row.weight, Rep::Field(r)));
        }
        rows.push(b.row);
    }
    Ok(CohomologyReport {
        title: format!("H^{} (Lichnerowicz)", k),
        degree: k,
        bound,
        exact: true,
        grading: Some(g.clone()),
        rows,
        representatives: reps,
        composite_zero,
        undecided: 0,
    })
}

/// Poisson cohomology `H^k_Π` at coefficient degree at most `bound`.
///
/// Weight-homogeneous tensors are split into exact weight blocks. Otherwise
/// the report is truncated: cocycles of degree at most `D` modulo
/// coboundaries of degree at most `D + 1` that land in degree at most `D`.
pub fn lichnerowicz_cohomology(pi: &MultiVector, k: usize, bound: u32) -> Result<CohomologyReport> {
    reject_parameters(pi.chart())?;
    if pi.degree() != 2 {
        return Err(Error::DegreeMismatch("Poisson tensors are bivectors".into()));
    }
    for f in pi.terms().values() {
        if !f.is_polynomial() {
            return Err(Error::Unsupported(format!("coefficient `{}` is not polynomial", f)));
        }
    }
    match grade_tensor(pi) {
        Some(g) => {
            let ws = realized_mv(pi.chart(), &g, k, bound);
            lichnerowicz_graded(pi, &g, k, bound, &ws)
        }
        None => lichnerowicz_truncated(pi, k, bound),
    }
}

/// All `k`-vector monomial fields of coefficient degree at most `bound`.
fn mv_upto(chart: &ChartRef, k: usize, bound: u32) -> Vec<MultiVector> {
    let coords = chart.coordinates();
    let monos = crate::linalg::expand::monomials_upto(chart, &coords, bound);
    let mut out = Vec::new();
    for idx in combinations(&coords, k) {
        for m in &monos {
            let deg: u32 = m.iter().map(|&e| e as u32).sum();
            if deg > bound {
                continue;
            }
            let mut mv = MultiVector::zero(chart, k);
            mv.add_component(&idx, mono_expr(chart, m)).expect("frame");
            out.push(mv);
        }
    }
    out
}

fn lichnerowicz_truncated(pi: &MultiVector, k: usize, bound: u32) -> Result<CohomologyReport> {
    let ch = pi.chart();
    let cells = mv_upto(ch, k, bound);
    let imgs: Vec<MultiVector> = cells.par_iter().map(|c| lichnerowicz_delta(pi, c)).collect::<Result<_>>()?;
    let mut reg_next = Registry::new();
    let enc = encode_all(&imgs, &mut reg_next)?;
    let kernel = kernel_elements(&cells, &enc, &MultiVector::zero(ch, k));
    let mut composite_zero = true;
    let mut low_rows: Vec<(IntVec, Q)> = Vec::new();
    let mut reg = Registry::with_split(bound);
    if k > 0 {
        let prev = mv_upto(ch, k - 1, bound + 1);
        let imgs: Vec<MultiVector> = prev.par_iter().map(|c| lichnerowicz_delta(pi, c)).collect::<Result<_>>()?;
        let mut ech = Echelon::new();
        for x in &imgs {
            if !lichnerowicz_delta(pi, x)?.is_zero() {
                composite_zero = false;
            }
            ech.insert(encode(x, &mut reg)?.0);
        }
        low_rows = ech_low_rows(&ech);
    }
    let image = low_rows.len();
    let reps = independent_mod(&low_rows, &kernel, &mut reg)?;
    let row = WeightRow {
        weight: None,
        label: None,
        cochains: cells.len(),
        kernel: kernel.len(),
        image,
        dim: kernel.len() - image,
    };
    Ok(CohomologyReport {
        title: format!("H^{} (Lichnerowicz, truncated)", k),
        degree: k,
        bound,
        exact: false,
        grading: None,
        rows: vec![row],
        representatives: reps.into_iter().map(|r| (None, Rep::Field(r))).collect(),
        composite_zero,
        undecided: 0,
    })
}

/// Rows of an echelon whose pivot lies in the low-degree region; they span
/// the intersection of the row space with that region.
fn ech_low_rows(ech: &Echelon) -> Vec<(IntVec, Q)> {
    ech.rows_iter()
        .filter(|v| v.first().is_some_and(|e| e.0 >= LOW_BASE))
        .map(|v| (v.clone(), Q::one()))
        .collect()
}

/// `H⁰`: Casimir functions, reported with the same conventions.
pub fn casimirs(pi: &MultiVector, bound: u32) -> Result<CohomologyReport> {
    lichnerowicz_cohomology(pi, 0, bound)
}
