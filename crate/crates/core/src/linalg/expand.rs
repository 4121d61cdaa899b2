//! Coefficient extraction: viewing an expression as a polynomial in a subset
//! of generator slots with coefficients in the field of the others.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::sparse::from_rational;
use super::{Echelon, FieldMatrix, IntVec};
use crate::error::{Error, Result};
use crate::ring::{ChartRef, Mono, Poly, ScalarExpr, Slot, VarKind, Q};

/// Slots carrying the given variables (both trig slots for periodic ones).
pub fn slot_mask(chart: &ChartRef, vars: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; chart.nslots()];
    for (s, slot) in chart.slots().iter().enumerate() {
        let v = match *slot {
            Slot::Var(v) | Slot::Cos(v) | Slot::Sin(v) => v,
        };
        mask[s] = vars.contains(&v);
    }
    mask
}

/// Mask of every non-constant slot.
pub fn coordinate_mask(chart: &ChartRef) -> Vec<bool> {
    let vars: Vec<usize> = (0..chart.len()).filter(|&v| chart.var(v).kind != VarKind::Constant).collect();
    slot_mask(chart, &vars)
}

/// `f = Σ_m c_m · m` with `m` a monomial in the masked slots.
pub fn split_by_slots(f: &ScalarExpr, key: &[bool]) -> Result<BTreeMap<Mono, ScalarExpr>> {
    let chart = f.chart();
    if f.denom().terms().keys().any(|m| m.iter().zip(key).any(|(&e, &k)| k && e > 0)) {
        return Err(Error::Unsupported(format!("denominator of `{}` depends on an expansion variable", f)));
    }
    let n = chart.nslots();
    let mut parts: BTreeMap<Mono, Poly> = BTreeMap::new();
    for (m, c) in f.numer().terms() {
        let mut km = m.clone();
        let mut rm = m.clone();
        for s in 0..n {
            if key[s] {
                rm[s] = 0;
            } else {
                km[s] = 0;
            }
        }
        parts.entry(km).or_insert_with(|| Poly::zero(n)).add_term(rm, c.clone());
    }
    let mut out = BTreeMap::new();
    for (k, p) in parts {
        if !p.is_zero() {
            out.insert(k, ScalarExpr::from_parts(chart, p, f.denom().clone())?);
        }
    }
    Ok(out)
}

/// Rational coefficients of a polynomial expression over all slots.
pub fn rational_terms(f: &ScalarExpr) -> Result<Vec<(Mono, Q)>> {
    let d = f
        .denom()
        .constant_value()
        .ok_or_else(|| Error::Unsupported(format!("coefficient `{}` is not polynomial", f)))?;
    if !f.chart().constants().is_empty() {
        let cs: Vec<usize> = f.chart().constants().iter().map(|&v| f.chart().slot_of(v)).collect();
        if f.numer().terms().keys().any(|m| cs.iter().any(|&s| m[s] > 0)) {
            return Err(Error::Unsupported(format!(
                "coefficient `{}` involves a symbolic parameter; substitute it first",
                f
            )));
        }
    }
    Ok(f.numer().terms().iter().map(|(m, c)| (m.clone(), c / &d)).filter(|(_, c)| !c.is_zero()).collect())
}

/// Solve `Σ_j x_j columns[j] = rhs` componentwise, identifying coefficients of
/// monomials in the masked slots; unknowns live in the field of the other
/// slots. Returns the solution with free unknowns set to zero.
pub fn solve_split(
    chart: &ChartRef,
    key: &[bool],
    columns: &[Vec<ScalarExpr>],
    rhs: &[ScalarExpr],
) -> Result<Option<Vec<ScalarExpr>>> {
    let mut index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    let mut col_entries: Vec<Vec<(usize, ScalarExpr)>> = Vec::with_capacity(columns.len());
    let register = |comp: usize, e: &ScalarExpr, index: &mut BTreeMap<(usize, Mono), usize>| -> Result<Vec<(usize, ScalarExpr)>> {
        let mut out = Vec::new();
        for (m, c) in split_by_slots(e, key)? {
            let n = index.len();
            let r = *index.entry((comp, m)).or_insert(n);
            out.push((r, c));
        }
        Ok(out)
    };
    for col in columns {
        if col.len() != rhs.len() {
            return Err(Error::DegreeMismatch("column length differs from right-hand side".into()));
        }
        let mut entries = Vec::new();
        for (comp, e) in col.iter().enumerate() {
            entries.extend(register(comp, e, &mut index)?);
        }
        col_entries.push(entries);
    }
    let mut rhs_entries = Vec::new();
    for (comp, e) in rhs.iter().enumerate() {
        rhs_entries.extend(register(comp, e, &mut index)?);
    }
    let nrows = index.len();
    let zero = ScalarExpr::zero(chart);
    let mut rows = vec![vec![zero.clone(); columns.len()]; nrows];
    for (j, entries) in col_entries.iter().enumerate() {
        for (r, c) in entries {
            rows[*r][j] = &rows[*r][j] + c;
        }
    }
    let mut b = vec![zero; nrows];
    for (r, c) in rhs_entries {
        b[r] = &b[r] + &c;
    }
    if columns.is_empty() {
        return Ok(if b.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None });
    }
    let rational = col_entries.iter().flatten().map(|e| &e.1).chain(b.iter()).all(|e| e.as_constant().is_some());
    if rational {
        return Ok(solve_rational(chart, &col_entries, &b));
    }
    Ok(FieldMatrix::new(chart, rows).solve(&b))
}

fn to_intvec(entries: &[(usize, Q)]) -> (IntVec, Q) {
    let mut merged: BTreeMap<u32, Q> = BTreeMap::new();
    for (r, c) in entries {
        let e = merged.entry(*r as u32).or_insert_with(Q::zero);
        *e = &*e + c;
    }
    let v: Vec<(u32, Q)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    from_rational(&v)
}

/// Sparse solve over ℚ: the right-hand side enters the echelon last, and a
/// dependency relation yields the solution with free unknowns zero.
fn solve_rational(chart: &ChartRef, cols: &[Vec<(usize, ScalarExpr)>], b: &[ScalarExpr]) -> Option<Vec<ScalarExpr>> {
    let n = cols.len();
    let mut ech = Echelon::new();
    let mut scales = Vec::with_capacity(n);
    for (j, col) in cols.iter().enumerate() {
        let q: Vec<(usize, Q)> = col.iter().map(|(r, c)| (*r, c.as_constant().expect("rational"))).collect();
        let (v, l) = to_intvec(&q);
        scales.push(l);
        ech.insert_tagged(v, vec![(j as u32, BigInt::one())]);
    }
    let q: Vec<(usize, Q)> = b.iter().enumerate().map(|(r, c)| (r, c.as_constant().expect("rational"))).collect();
    let (v, lr) = to_intvec(&q);
    if v.is_empty() {
        return Some(vec![ScalarExpr::zero(chart); n]);
    }
    let rel = ech.insert_tagged(v, vec![(n as u32, BigInt::one())])?;
    let tr = rel.iter().find(|(j, _)| *j as usize == n).map(|(_, t)| Q::from_integer(t.clone()))?;
    let mut x = vec![ScalarExpr::zero(chart); n];
    for (j, t) in &rel {
        let j = *j as usize;
        if j < n {
            let val = -(Q::from_integer(t.clone()) * &scales[j]) / (&tr * &lr);
            x[j] = ScalarExpr::constant(chart, val);
        }
    }
    Some(x)
}

/// Normal-form monomials in the given coordinates: affine total degree at
/// most `bound`, and `cos^a sin^b` (`b ≤ 1`, `a + b ≤ bound`) for each
/// periodic coordinate.
pub fn monomials_upto(chart: &ChartRef, vars: &[usize], bound: u32) -> Vec<Mono> {
    let n = chart.nslots();
    let affine: Vec<usize> = vars.iter().copied().filter(|&v| chart.var(v).kind == VarKind::Affine).collect();
    let periodic: Vec<usize> = vars.iter().copied().filter(|&v| chart.var(v).kind == VarKind::Periodic).collect();
    let mut out: Vec<Mono> = vec![Mono::from_elem(0, n)];
    fn extend_affine(acc: Vec<Mono>, slot: usize, bound: u32) -> Vec<Mono> {
        let mut next = Vec::new();
        for m in acc {
            let used: u32 = m.iter().map(|&e| e as u32).sum();
            for e in 0..=bound.saturating_sub(used) {
                let mut m2 = m.clone();
                m2[slot] = e as u16;
                next.push(m2);
            }
        }
        next
    }
    let mut affine_total = out;
    for &v in &affine {
        affine_total = extend_affine(affine_total, chart.slot_of(v), bound);
    }
    out = affine_total;
    for &v in &periodic {
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
    out.sort();
    out
}

pub fn mono_expr(chart: &ChartRef, m: &Mono) -> ScalarExpr {
    ScalarExpr::from_poly(chart, Poly::monomial(chart.nslots(), m.clone(), Q::from_integer(1.into())))
}
