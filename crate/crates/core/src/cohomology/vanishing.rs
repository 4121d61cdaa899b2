use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{
    candidates, encode_all, kernel_elements, lichnerowicz_cohomology, rank_of, realized, reject_parameters, vv_basis,
    CohomologyReport, Grading, Registry, Rep, WeightRow, W,
};
use crate::calculus::schouten;
use crate::coupling::{CouplingData, MElement};
use crate::error::{Error, Result};
use crate::fibration::{cov_ext_d, project_poisson, Connection};
use crate::linalg::expand::rational_terms;
use crate::ring::check_chart;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A4Row {
    pub weight: i32,
    /// `dim Ham_ℱ` in this weight.
    pub foliated_hamiltonians: usize,
    /// Dimension of `P♯d(C_ℱ)` in this weight.
    pub generated: usize,
}

#[derive(Clone, Debug)]
pub struct VanishingReport {
    pub bound: u32,
    /// Lifts of the flat connection preserve `P`.
    pub zx0: bool,
    /// Vertical Poisson fields modulo Hamiltonian ones, fiberwise.
    pub zx1: CohomologyReport,
    /// `H¹` of the foliated differential along the horizontal foliation.
    pub zx2: CohomologyReport,
    /// `H¹` of the projected Poisson structure on the leaf space.
    pub zx3: CohomologyReport,
    pub a4: Vec<A4Row>,
    pub consistent: bool,
}

impl VanishingReport {
    pub fn a4_holds(&self) -> bool {
        self.a4.iter().all(|r| r.foliated_hamiltonians == r.generated)
    }
}

fn is_trivial(conn: &Connection) -> bool {
    (0..conn.base().len()).all(|i| (0..conn.fiber().len()).all(|a| conn.gamma(i, a).is_zero()))
}

/// Minimal grading with `P` homogeneous and each flat lift `hor⁰_i` of
/// weight `−ω_i`; the foliated differential then preserves weight.
fn grade_flat(data: &CouplingData, flat: &Connection) -> Option<Grading> {
    let ch = data.chart();
    'outer: for weights in candidates(ch) {
        let mut g = Grading { weights, shift: 0, kappa: vec![0; ch.len()] };
        match g.mv_weight(data.p()) {
            W::Mixed => continue,
            W::Zero => {}
            W::Hom(s) => g.shift = s,
        }
        for &i in flat.base() {
            match g.mv_weight(flat.hor(i)) {
                W::Hom(w) if w == -g.weights[i] => {}
                _ => continue 'outer,
            }
            g.kappa[i] = g.weights[i];
        }
        return Some(g);
    }
    None
}

fn foliated_block(flat: &Connection, g: &Grading, l: i32, bound: u32) -> Result<(WeightRow, Vec<MElement>)> {
    let ch = flat.chart();
    let d = |xs: &[MElement], deg: usize| -> Result<Vec<MElement>> {
        xs.iter()
            .map(|x| {
                let mut out = MElement::zero(ch, deg);
                for v in x.parts().values() {
                    out.add_part(cov_ext_d(flat, v)?);
                }
                Ok(out)
            })
            .collect()
    };
    let cells = vv_basis(flat, g, 1, 0, l, bound);
    let enc = encode_all(&d(&cells, 2)?, &mut Registry::new())?;
    let cocycles = kernel_elements(&cells, &enc, &MElement::zero(ch, 1));
    let fs = vv_basis(flat, g, 0, 0, l, bound);
    let mut reg = Registry::new();
    let exact = encode_all(&d(&fs, 1)?, &mut reg)?;
    let image = rank_of(&exact);
    let reps = super::independent_mod(&exact, &cocycles, &mut reg)?;
    let row = WeightRow {
        weight: Some(l),
        label: None,
        cochains: cells.len(),
        kernel: cocycles.len(),
        image,
        dim: cocycles.len() - image,
    };
    Ok((row, reps))
}

fn a4_block(data: &CouplingData, flat: &Connection, g: &Grading, l: i32, bound: u32) -> Result<A4Row> {
    let ch = data.chart();
    let fs = vv_basis(flat, g, 0, 0, l - g.shift, bound);
    let hams: Vec<MElement> = fs.iter().map(|f| Ok(MElement::from_part(data.d_p(&f.part(0, 0))?))).collect::<Result<_>>()?;
    let variation: Vec<MElement> = hams
        .iter()
        .map(|h| Ok(MElement::from_part(cov_ext_d(flat, &h.part(0, 1))?)))
        .collect::<Result<_>>()?;
    let preserving = kernel_elements(&fs, &encode_all(&variation, &mut Registry::new())?, &MElement::zero(ch, 0));
    let foliated: Vec<MElement> = fs
        .iter()
        .map(|f| Ok(MElement::from_part(cov_ext_d(flat, &f.part(0, 0))?)))
        .collect::<Result<_>>()?;
    let basic = kernel_elements(&fs, &encode_all(&foliated, &mut Registry::new())?, &MElement::zero(ch, 0));
    let ham_of = |xs: &[MElement]| -> Result<usize> {
        let hs: Vec<MElement> = xs.iter().map(|f| Ok(MElement::from_part(data.d_p(&f.part(0, 0))?))).collect::<Result<_>>()?;
        Ok(rank_of(&encode_all(&hs, &mut Registry::new())?))
    };
    Ok(A4Row { weight: l, foliated_hamiltonians: ham_of(&preserving)?, generated: ham_of(&basic)? })
}

/// Truncated checks of the hypotheses of the vanishing theorem for a
/// transversal bi-fibration given by the flat connection `flat`.
///
/// The leaf space of the horizontal foliation is identified with the fiber
/// chart, so `flat` must be the trivial connection and `P` independent of
/// the base. Vertical Poisson fields are then taken fiberwise.
pub fn vanishing_conditions(data: &CouplingData, flat: &Connection, bound: u32) -> Result<VanishingReport> {
    check_chart(data.chart(), flat.chart())?;
    reject_parameters(data.chart())?;
    if flat.base() != data.connection().base() {
        return Err(Error::InvalidInput("flat connection lives on a different bundle".into()));
    }
    if !flat.is_flat()? {
        return Err(Error::Precondition("γ⁰ is not flat".into()));
    }
    if !is_trivial(flat) {
        return Err(Error::Unsupported(
            "leaf space of the horizontal foliation is only available in product charts (trivial γ⁰)".into(),
        ));
    }
    for f in data.p().terms().values() {
        rational_terms(f)?;
    }
    let mut zx0 = true;
    for &i in flat.base() {
        if !schouten(flat.hor(i), data.p())?.is_zero() {
            zx0 = false;
        }
    }
    let (_, upsilon) = project_poisson(data.p(), &data.bundle())?;
    let mut zx1 = lichnerowicz_cohomology(&upsilon, 1, bound)?;
    zx1.title = "Poiss_V / Ham (fiberwise)".into();
    let mut zx3 = lichnerowicz_cohomology(&upsilon, 1, bound)?;
    zx3.title = "H^1 of the projected structure".into();

    let g = grade_flat(data, flat)
        .ok_or_else(|| Error::Unsupported("no Euler grading compatible with P and γ⁰".into()))?;
    let ws: Vec<i32> = realized(data.chart(), &g, flat.base(), flat.fiber(), 1, 0, bound).into_iter().collect();
    let blocks: Vec<(WeightRow, Vec<MElement>)> =
        ws.par_iter().map(|&l| foliated_block(flat, &g, l, bound)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut reps = Vec::new();
    for (row, rs) in blocks {
        reps.extend(rs.into_iter().map(|r| (row.weight, Rep::Bigraded(r))));
        rows.push(row);
    }
    let zx2 = CohomologyReport {
        title: "H^1 of the foliated differential".into(),
        degree: 1,
        bound,
        exact: true,
        grading: Some(g.clone()),
        rows,
        representatives: reps,
        composite_zero: true,
        undecided: 0,
    };

    let hw: BTreeSet<i32> = realized(data.chart(), &g, &[], &data.chart().coordinates(), 0, 1, bound);
    let hw: Vec<i32> = hw.into_iter().collect();
    let a4: Vec<A4Row> = hw.par_iter().map(|&l| a4_block(data, flat, &g, l, bound)).collect::<Result<_>>()?;

    let consistent = zx1.dim() == 0 && zx2.dim() == 0 && zx3.dim() == 0;
    Ok(VanishingReport { bound, zx0, zx1, zx2, zx3, a4, consistent })
}
