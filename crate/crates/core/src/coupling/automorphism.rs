//! Infinitesimal automorphisms of a coupling tensor: the operator `∂̄`,
//! the subalgebra `A_γ`, the map `ρ`, extension of vertical fields and the
//! splitting of Poisson vector fields.

use super::complex::require_bidegree;
use super::{assemble_tensor, flat_sigma, sharp_h, CouplingData};
use crate::calculus::{hamiltonian_vf, is_poisson, schouten, MultiVector};
use crate::error::{Error, Result};
use crate::fibration::VValuedForm;
use crate::linalg::expand::{coordinate_mask, mono_expr, monomials_upto, slot_mask, solve_split};
use crate::ring::ScalarExpr;

fn casimir_failure(data: &CouplingData, v: &VValuedForm) -> Result<Option<(String, ScalarExpr)>> {
    for (k, mv) in v.terms() {
        let f = mv.as_function();
        if !hamiltonian_vf(data.p(), &f)?.is_zero() {
            let names: Vec<String> = k.iter().map(|&i| format!("d{}", data.chart().name(i as usize))).collect();
            return Ok(Some((names.join("^"), f)));
        }
    }
    Ok(None)
}

pub fn is_casimir_valued(data: &CouplingData, v: &VValuedForm) -> Result<bool> {
    Ok(casimir_failure(data, v)?.is_none())
}

/// `∂̄ = ∂^γ` restricted to forms with Casimir coefficients.
pub fn bar_partial(data: &CouplingData, alpha: &VValuedForm) -> Result<VValuedForm> {
    if alpha.bidegree().1 != 0 {
        return Err(Error::DegreeMismatch("∂̄ acts on (p, 0) elements".into()));
    }
    if let Some((at, f)) = casimir_failure(data, alpha)? {
        return Err(Error::Precondition(format!("coefficient `{}` at {} is not a Casimir of P", f, at)));
    }
    data.d_gamma(alpha)
}

#[derive(Clone, Debug)]
pub enum Membership {
    /// `Y ∈ A_γ`, with `β_Y` solving `P♯dβ_i = −[hor_i, Y]`.
    Member(VValuedForm),
    /// No solution with fiber degree within the bound, for this base direction.
    Unresolved { bound: u32, base_var: usize },
}

fn require_vertical_field(data: &CouplingData, y: &MultiVector) -> Result<()> {
    if y.degree() != 1 || !y.supported_on(data.connection().fiber()) {
        return Err(Error::InvalidInput("expected a vertical vector field".into()));
    }
    Ok(())
}

/// Decide `Y ∈ A_γ` by solving for `β_Y` among polynomials in the fiber
/// coordinates of degree at most `bound` with coefficients in the field of
/// base functions.
pub fn membership_a_gamma(data: &CouplingData, y: &MultiVector, bound: u32) -> Result<Membership> {
    require_vertical_field(data, y)?;
    if !schouten(y, data.p())?.is_zero() {
        return Err(Error::Precondition("vertical field does not preserve P".into()));
    }
    let ch = data.chart();
    let conn = data.connection();
    let fiber = conn.fiber();
    let key = slot_mask(ch, fiber);
    let monos: Vec<ScalarExpr> = monomials_upto(ch, fiber, bound).iter().map(|m| mono_expr(ch, m)).collect();
    let mut columns = Vec::with_capacity(monos.len());
    for m in &monos {
        let h = hamiltonian_vf(data.p(), m)?;
        columns.push(fiber.iter().map(|&a| h.component(&[a])).collect::<Vec<_>>());
    }
    let mut beta = VValuedForm::zero(ch, 1, 0);
    for &i in conn.base() {
        let br = schouten(conn.hor(i), y)?;
        if !br.supported_on(fiber) {
            return Err(Error::Precondition("bracket with a horizontal lift is not vertical".into()));
        }
        let rhs: Vec<ScalarExpr> = fiber.iter().map(|&a| -&br.component(&[a])).collect();
        match solve_split(ch, &key, &columns, &rhs)? {
            None => return Ok(Membership::Unresolved { bound, base_var: i }),
            Some(x) => {
                let mut b = ScalarExpr::zero(ch);
                for (xm, m) in x.iter().zip(&monos) {
                    if !xm.is_zero() {
                        b = &b + &(xm * m);
                    }
                }
                beta.set(&[i], MultiVector::function(b))?;
            }
        }
    }
    Ok(Membership::Member(beta))
}

/// `τ_Y = ∂^γ β_Y + ∂^σ Y` and the class `ρ(Y)`.
#[derive(Clone, Debug)]
pub struct TauRho {
    pub tau: VValuedForm,
    pub casimir_valued: bool,
    pub closed: bool,
    /// A Casimir-valued `c` with `∂̄c = τ`, when one was found within the bound;
    /// `ρ(Y) = 0` exactly when such a `c` exists.
    pub primitive: Option<VValuedForm>,
    pub bound: u32,
}

pub(crate) fn tau_of(data: &CouplingData, y: &MultiVector, beta: &VValuedForm) -> Result<VValuedForm> {
    require_vertical_field(data, y)?;
    require_bidegree(beta, 1, 0, "β_Y")?;
    let yv = VValuedForm::vertical(y.clone());
    let eq = data.d_gamma(&yv)?.add(&data.d_p(beta)?);
    if !eq.is_zero() {
        return Err(Error::Precondition(format!("β does not solve [hor, Y] = −P♯dβ; residual {}", eq)));
    }
    Ok(data.d_gamma(beta)?.add(&data.d_sigma(&yv)?))
}

/// Casimir-valued `c ∈ Ω^{1,0}` with `∂^γ c = τ`, coefficients polynomial of
/// degree at most `bound` in all coordinates.
pub fn solve_primitive(data: &CouplingData, tau: &VValuedForm, bound: u32) -> Result<Option<VValuedForm>> {
    require_bidegree(tau, 2, 0, "τ")?;
    let ch = data.chart();
    let conn = data.connection();
    let base = conn.base();
    let fiber = conn.fiber();
    let coords = ch.coordinates();
    let monos: Vec<ScalarExpr> = monomials_upto(ch, &coords, bound).iter().map(|m| mono_expr(ch, m)).collect();
    let pairs: Vec<(usize, usize)> =
        base.iter().enumerate().flat_map(|(x, &i)| base[x + 1..].iter().map(move |&j| (i, j))).collect();
    let ncas = base.len() * fiber.len();
    let zero = ScalarExpr::zero(ch);
    let mut columns = Vec::new();
    for (bi, &i) in base.iter().enumerate() {
        for m in &monos {
            let mut col = vec![zero.clone(); ncas + pairs.len()];
            let h = hamiltonian_vf(data.p(), m)?;
            for (a, &fa) in fiber.iter().enumerate() {
                col[bi * fiber.len() + a] = h.component(&[fa]);
            }
            let mut e = VValuedForm::zero(ch, 1, 0);
            e.set(&[i], MultiVector::function(m.clone()))?;
            let d = data.d_gamma(&e)?;
            for (k, &(u, v)) in pairs.iter().enumerate() {
                col[ncas + k] = d.coeff(&[u, v]);
            }
            columns.push(col);
        }
    }
    let mut rhs = vec![zero; ncas + pairs.len()];
    for (k, &(u, v)) in pairs.iter().enumerate() {
        rhs[ncas + k] = tau.coeff(&[u, v]);
    }
    let Some(x) = solve_split(ch, &coordinate_mask(ch), &columns, &rhs)? else { return Ok(None) };
    let mut c = VValuedForm::zero(ch, 1, 0);
    for (bi, &i) in base.iter().enumerate() {
        let mut f = ScalarExpr::zero(ch);
        for (k, m) in monos.iter().enumerate() {
            let xm = &x[bi * monos.len() + k];
            if !xm.is_zero() {
                f = &f + &(xm * m);
            }
        }
        c.set(&[i], MultiVector::function(f))?;
    }
    Ok(Some(c))
}

pub fn tau_and_rho(data: &CouplingData, y: &MultiVector, beta: &VValuedForm, bound: u32) -> Result<TauRho> {
    let tau = tau_of(data, y, beta)?;
    let casimir_valued = is_casimir_valued(data, &tau)?;
    let closed = data.d_gamma(&tau)?.is_zero();
    let primitive = solve_primitive(data, &tau, bound)?;
    Ok(TauRho { tau, casimir_valued, closed, primitive, bound })
}

/// `X_Y = −♯_H(β_Y − c_Y) + Y`, checked to be a Poisson vector field.
pub fn extend_to_poisson(
    data: &CouplingData,
    y: &MultiVector,
    beta: &VValuedForm,
    c: &VValuedForm,
) -> Result<MultiVector> {
    require_bidegree(c, 1, 0, "c_Y")?;
    let tau = tau_of(data, y, beta)?;
    if let Some((at, f)) = casimir_failure(data, c)? {
        return Err(Error::Precondition(format!("c_Y coefficient `{}` at {} is not a Casimir", f, at)));
    }
    if data.d_gamma(c)? != tau {
        return Err(Error::Precondition("c_Y is not a primitive of τ_Y".into()));
    }
    let x = sharp_h(data, &beta.sub(c))?.neg().add(y);
    let r = schouten(&assemble_tensor(data), &x)?;
    if !r.is_zero() {
        return Err(Error::Precondition(format!("extension fails to preserve Π: {}", r)));
    }
    Ok(x)
}

/// `Z = ♯_H α + X_Y` with `α` a `∂̄`-cocycle and `Y = pr_V Z ∈ ker ρ`.
#[derive(Clone, Debug)]
pub struct Split {
    pub alpha: VValuedForm,
    pub y: MultiVector,
    pub beta: VValuedForm,
    pub c: VValuedForm,
    pub x_y: MultiVector,
    /// `β_Y` was taken from the horizontal part of `♭_σ Z` because the
    /// bounded solve found none.
    pub beta_from_witness: bool,
    /// `c_Y` was taken as `β_Y − (♭_σ Z)_{1,0}` because the bounded solve
    /// found none.
    pub c_from_witness: bool,
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    NotPoisson { residual: MultiVector },
    Split(Box<Split>),
}

pub fn split_poisson_vf(data: &CouplingData, z: &MultiVector, bound: u32) -> Result<SplitOutcome> {
    if z.degree() != 1 {
        return Err(Error::DegreeMismatch("expected a vector field".into()));
    }
    let pi = assemble_tensor(data);
    let residual = schouten(&pi, z)?;
    if !residual.is_zero() {
        return Ok(SplitOutcome::NotPoisson { residual });
    }
    let eta = flat_sigma(data, z)?;
    let eta10 = eta.part(1, 0);
    let y = eta.part(0, 1).get(&[]);
    let (beta, beta_from_witness) = match membership_a_gamma(data, &y, bound)? {
        Membership::Member(b) => (b, false),
        Membership::Unresolved { .. } => (eta10.clone(), true),
    };
    let tau = tau_of(data, &y, &beta)?;
    let (c, c_from_witness) = match solve_primitive(data, &tau, bound)? {
        Some(c) => (c, false),
        None => (beta.sub(&eta10), true),
    };
    let x_y = extend_to_poisson(data, &y, &beta, &c)?;
    let alpha = eta10.neg().add(&beta).sub(&c);
    bar_partial(data, &alpha)?;
    let back = sharp_h(data, &alpha)?.add(&x_y);
    if &back != z {
        return Err(Error::Precondition("split does not reassemble the field".into()));
    }
    Ok(SplitOutcome::Split(Box::new(Split { alpha, y, beta, c, x_y, beta_from_witness, c_from_witness })))
}

/// Linear part of `P` along the zero section `y = 0`.
#[derive(Clone, Debug)]
pub struct Linearization {
    /// `(σ, α, β, c)` with `c = ∂_{y^σ} P^{αβ}` at `y = 0`, `α < β`.
    pub structure_constants: Vec<(usize, usize, usize, ScalarExpr)>,
    pub constant_over_base: bool,
    pub p1: MultiVector,
    pub jacobi_ok: bool,
}

pub fn linearize_vertical(data: &CouplingData) -> Result<Linearization> {
    let ch = data.chart();
    let fiber = data.connection().fiber().to_vec();
    let at_zero = |f: &ScalarExpr| -> Result<ScalarExpr> {
        let mut g = f.clone();
        for &a in &fiber {
            g = g.eval_var(a, &crate::ring::poly::q_int(0))?;
        }
        Ok(g)
    };
    for v in data.p().terms().values() {
        if !at_zero(v)?.is_zero() {
            return Err(Error::Precondition("P does not vanish along the zero section".into()));
        }
    }
    let mut constants = Vec::new();
    let mut p1 = MultiVector::zero(ch, 2);
    let mut constant_over_base = true;
    for (idx, v) in data.p().terms() {
        let (a, b) = (idx[0] as usize, idx[1] as usize);
        for &s in &fiber {
            let c = at_zero(&v.derive(s))?;
            if c.is_zero() {
                continue;
            }
            if data.connection().base().iter().any(|&u| c.depends_on(u)) {
                constant_over_base = false;
            }
            p1.add_component(&[a, b], &c * &ScalarExpr::var(ch, s)?)?;
            constants.push((s, a, b, c));
        }
    }
    constants.sort_by_key(|x| (x.0, x.1, x.2));
    let jacobi_ok = is_poisson(&p1)?;
    Ok(Linearization { structure_constants: constants, constant_over_base, p1, jacobi_ok })
}
