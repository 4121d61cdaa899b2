//! Multivector and differential-form calculus on a chart.
//!
//! The Schouten–Nijenhuis bracket is normalised so that `[X, Y]` is the Lie
//! bracket, `[X, f] = X(f)` and `[Ψ, F] = −Ψ♯dF` for a bivector `Ψ`, where
//! `⟨β, Ψ♯α⟩ = Ψ(α, β)`.

mod form;
mod multivector;

use std::collections::HashMap;

pub use form::{differential, DiffForm};
pub use multivector::{merge_sign, remove_back, remove_front, sort_sign, IndexSet, MultiVector};

use crate::error::{Error, Result};
use crate::ring::{check_chart, ScalarExpr};
use multivector::signed;

fn bracket_half(a: &MultiVector, b: &MultiVector, out: &mut MultiVector, sign: i32) {
    // Σ_i (A ∂⃖/∂ξ_i) ∧ ∂_i B
    let mut dcache: HashMap<(u8, usize), ScalarExpr> = HashMap::new();
    let bterms: Vec<(&IndexSet, &ScalarExpr)> = b.terms().iter().collect();
    for (ia, ca) in a.terms() {
        for &i in ia.iter() {
            let (s1, rest) = remove_back(ia, i).expect("index present");
            for (jb, (kb, cb)) in bterms.iter().enumerate() {
                let d = dcache.entry((i, jb)).or_insert_with(|| cb.derive(i as usize));
                if d.is_zero() {
                    continue;
                }
                if let Some((s2, idx)) = merge_sign(&rest, kb) {
                    let v = ca * d;
                    out.add_term(idx, signed(&v, s1 * s2 * sign));
                }
            }
        }
    }
}

/// Schouten–Nijenhuis bracket of an `a`-vector and a `b`-vector.
pub fn schouten(a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
    check_chart(a.chart(), b.chart())?;
    let (p, q) = (a.degree(), b.degree());
    if p + q == 0 {
        return Ok(MultiVector::zero(a.chart(), 0));
    }
    let mut out = MultiVector::zero(a.chart(), p + q - 1);
    bracket_half(a, b, &mut out, 1);
    let e = (p as i64 - 1) * (q as i64 - 1);
    let s = if e.rem_euclid(2) == 0 { -1 } else { 1 };
    bracket_half(b, a, &mut out, s);
    Ok(out)
}

/// `[Ψ, Ψ]`.
pub fn jacobiator(psi: &MultiVector) -> Result<MultiVector> {
    schouten(psi, psi)
}

pub fn is_poisson(psi: &MultiVector) -> Result<bool> {
    if psi.degree() != 2 {
        return Err(Error::DegreeMismatch("Poisson tensors are bivectors".into()));
    }
    Ok(jacobiator(psi)?.is_zero())
}

/// Lichnerowicz differential `δ_Ψ A = [Ψ, A]`.
pub fn lichnerowicz_delta(psi: &MultiVector, a: &MultiVector) -> Result<MultiVector> {
    schouten(psi, a)
}

/// `Ψ♯α`, defined by `⟨β, Ψ♯α⟩ = Ψ(α, β)`.
pub fn sharp(psi: &MultiVector, alpha: &DiffForm) -> Result<MultiVector> {
    if psi.degree() != 2 {
        return Err(Error::DegreeMismatch("sharp is defined for bivectors".into()));
    }
    psi.contract(alpha)
}

pub fn hamiltonian_vf(psi: &MultiVector, f: &ScalarExpr) -> Result<MultiVector> {
    sharp(psi, &differential(f))
}

pub fn is_casimir(psi: &MultiVector, f: &ScalarExpr) -> Result<bool> {
    Ok(hamiltonian_vf(psi, f)?.is_zero())
}

/// `L_X Ψ = [X, Ψ] = 0`.
pub fn is_poisson_vf(psi: &MultiVector, x: &MultiVector) -> Result<bool> {
    if x.degree() != 1 {
        return Err(Error::DegreeMismatch("expected a vector field".into()));
    }
    Ok(schouten(x, psi)?.is_zero())
}

/// Poisson bracket `{f, g} = Ψ(df, dg)`.
pub fn poisson_bracket(psi: &MultiVector, f: &ScalarExpr, g: &ScalarExpr) -> Result<ScalarExpr> {
    psi.evaluate(&[differential(f), differential(g)])
}

pub fn exterior_d(w: &DiffForm) -> DiffForm {
    w.d()
}

pub fn interior(x: &MultiVector, w: &DiffForm) -> Result<DiffForm> {
    w.interior(x)
}

/// Lie derivative of a form along a vector field.
pub fn lie_derivative_form(x: &MultiVector, w: &DiffForm) -> Result<DiffForm> {
    w.lie_derivative(x)
}

/// Lie derivative of a multivector field, `L_X A = [X, A]`.
pub fn lie_derivative(x: &MultiVector, a: &MultiVector) -> Result<MultiVector> {
    if x.degree() != 1 {
        return Err(Error::DegreeMismatch("expected a vector field".into()));
    }
    schouten(x, a)
}
