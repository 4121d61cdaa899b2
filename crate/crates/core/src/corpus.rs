//! Built-in example tensors.

use crate::calculus::MultiVector;
use crate::error::Result;
use crate::fibration::{Bundle, Connection, VValuedForm};
use crate::coupling::CouplingData;
use crate::ring::{parse_expr, Chart, ChartRef, ScalarExpr, VarSpec, Q};

#[derive(Clone, Debug)]
pub struct Example {
    pub name: &'static str,
    pub chart: ChartRef,
    pub bundle: Bundle,
    pub pi: MultiVector,
    /// The vertical Poisson tensor the example is built over.
    pub vertical: MultiVector,
}

fn var(ch: &ChartRef, name: &str) -> ScalarExpr {
    ScalarExpr::var_named(ch, name).expect("chart variable")
}

fn bivector(ch: &ChartRef, entries: &[(usize, usize, ScalarExpr)]) -> Result<MultiVector> {
    let mut out = MultiVector::zero(ch, 2);
    for (a, b, f) in entries {
        out.add_component(&[*a, *b], f.clone())?;
    }
    Ok(out)
}

/// `½ ε_{αβγ} x^γ ∂_α ∧ ∂_β` on the named coordinates.
pub fn lambda_so3(ch: &ChartRef, xs: [&str; 3]) -> Result<MultiVector> {
    let i: Vec<usize> = xs.iter().map(|n| ch.require(n)).collect::<Result<_>>()?;
    bivector(
        ch,
        &[(i[0], i[1], var(ch, xs[2])), (i[1], i[2], var(ch, xs[0])), (i[2], i[0], var(ch, xs[1]))],
    )
}

/// `∂_1 ∧ (x_2 ∂_2 + x_3 ∂_3)`.
pub fn lambda_la2(ch: &ChartRef, xs: [&str; 3]) -> Result<MultiVector> {
    let i: Vec<usize> = xs.iter().map(|n| ch.require(n)).collect::<Result<_>>()?;
    bivector(ch, &[(i[0], i[1], var(ch, xs[1])), (i[0], i[2], var(ch, xs[2]))])
}

fn cross(a: &[ScalarExpr; 3], b: &[ScalarExpr; 3]) -> [ScalarExpr; 3] {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

fn dot(a: &[ScalarExpr; 3], b: &[ScalarExpr; 3]) -> ScalarExpr {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

fn grad(ch: &ChartRef, f: &ScalarExpr, xs: [&str; 3]) -> Result<[ScalarExpr; 3]> {
    let d = |n: &str| -> Result<ScalarExpr> { Ok(f.derive(ch.require(n)?)) };
    Ok([d(xs[0])?, d(xs[1])?, d(xs[2])?])
}

/// `(∂_u + (w × ∇ϱ)·∂_x)`.
fn lift(ch: &ChartRef, u: &str, w: &[ScalarExpr; 3], rho: &ScalarExpr, xs: [&str; 3]) -> Result<MultiVector> {
    let mut h = MultiVector::coordinate(ch, ch.require(u)?)?;
    let v = cross(w, &grad(ch, rho, xs)?);
    for (k, n) in xs.iter().enumerate() {
        h.add_component(&[ch.require(n)?], v[k].clone())?;
    }
    Ok(h)
}

const XS: [&str; 3] = ["x1", "x2", "x3"];

/// `Π_{ϱ,c}` over the sphere chart `(p, q)` with fiber `so(3)*`. With `c`
/// absent the chart carries a symbolic constant `c`. The horizontal
/// coefficient is `1/(2 − Δ_ϱ + 2c‖x‖²)`.
pub fn so3_leaf(rho1: &str, rho2: &str, c: Option<Q>) -> Result<Example> {
    let mut specs = vec![VarSpec::base("p"), VarSpec::base("q"), VarSpec::fiber("x1"), VarSpec::fiber("x2"), VarSpec::fiber("x3")];
    if c.is_none() {
        specs.push(VarSpec::constant("c"));
    }
    let ch = Chart::new(specs)?;
    let r1 = parse_expr(rho1, &ch)?;
    let r2 = parse_expr(rho2, &ch)?;
    let cc = match &c {
        Some(q) => ScalarExpr::constant(&ch, q.clone()),
        None => var(&ch, "c"),
    };
    let x = [var(&ch, "x1"), var(&ch, "x2"), var(&ch, "x3")];
    let g1 = grad(&ch, &r1, XS)?;
    let g2 = grad(&ch, &r2, XS)?;
    let delta = &(&r2.derive(ch.require("p")?) - &r1.derive(ch.require("q")?)) + &dot(&x, &cross(&g1, &g2));
    let norm = dot(&x, &x);
    let denom = &(&ScalarExpr::int(&ch, 2) - &delta) + &(&ScalarExpr::int(&ch, 2) * &(&cc * &norm));
    let coeff = denom.inv()?;
    let hp = lift(&ch, "p", &x, &r1, XS)?;
    let hq = lift(&ch, "q", &x, &r2, XS)?;
    let vertical = lambda_so3(&ch, XS)?;
    let pi = hp.wedge(&hq).scale(&coeff).add(&vertical);
    Ok(Example { name: "so3-leaf", bundle: Bundle::new(&ch), chart: ch, pi, vertical })
}

/// `Λ_LA2` on `ℝ³`, all coordinates fiber.
pub fn open_book() -> Result<Example> {
    let ch = Chart::new(XS.iter().map(|n| VarSpec::fiber(n)).collect())?;
    let pi = lambda_la2(&ch, XS)?;
    Ok(Example { name: "open-book", bundle: Bundle::new(&ch), chart: ch, vertical: pi.clone(), pi })
}

/// `Π_ϱ` over the cylinder `(t, φ mod 2π)` with fiber `(ℝ³, Λ_LA2)`; the
/// horizontal coefficient is `1/(2 − Δ_ϱ)`.
pub fn cylinder(rho1: &str, rho2: &str) -> Result<Example> {
    let ch = Chart::new(vec![
        VarSpec::base("t"),
        VarSpec::periodic_base("phi"),
        VarSpec::fiber("x1"),
        VarSpec::fiber("x2"),
        VarSpec::fiber("x3"),
    ])?;
    let r1 = parse_expr(rho1, &ch)?;
    let r2 = parse_expr(rho2, &ch)?;
    let psi = [ScalarExpr::zero(&ch), -&var(&ch, "x3"), var(&ch, "x2")];
    let g1 = grad(&ch, &r1, XS)?;
    let g2 = grad(&ch, &r2, XS)?;
    let delta = &(&r2.derive(ch.require("t")?) - &r1.derive(ch.require("phi")?)) + &dot(&psi, &cross(&g1, &g2));
    let coeff = (&ScalarExpr::int(&ch, 2) - &delta).inv()?;
    let ht = lift(&ch, "t", &psi, &r1, XS)?;
    let hp = lift(&ch, "phi", &psi, &r2, XS)?;
    let vertical = lambda_la2(&ch, XS)?;
    let pi = ht.wedge(&hp).scale(&coeff).add(&vertical);
    Ok(Example { name: "cylinder", bundle: Bundle::new(&ch), chart: ch, pi, vertical })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fiber {
    La2,
    So3,
}

/// `∂_u ∧ ∂_v + P` on `ℝ² × ℝ³`.
pub fn product_r2(fiber: Fiber) -> Result<Example> {
    let ch = Chart::new(vec![
        VarSpec::base("u"),
        VarSpec::base("v"),
        VarSpec::fiber("x1"),
        VarSpec::fiber("x2"),
        VarSpec::fiber("x3"),
    ])?;
    let vertical = match fiber {
        Fiber::La2 => lambda_la2(&ch, XS)?,
        Fiber::So3 => lambda_so3(&ch, XS)?,
    };
    let mut pi = vertical.clone();
    pi.add_component(&[ch.require("u")?, ch.require("v")?], ScalarExpr::one(&ch))?;
    Ok(Example { name: "product-r2", bundle: Bundle::new(&ch), chart: ch, pi, vertical })
}

/// The fields `∂_1`, `x_2∂_2 − x_3∂_3`, `x_3∂_2`, `x_2∂_3` preserving `Λ_LA2`.
pub fn z_fields(ch: &ChartRef, xs: [&str; 3]) -> Result<[MultiVector; 4]> {
    let i: Vec<usize> = xs.iter().map(|n| ch.require(n)).collect::<Result<_>>()?;
    let field = |parts: &[(usize, ScalarExpr)]| -> Result<MultiVector> {
        let mut out = MultiVector::zero(ch, 1);
        for (k, f) in parts {
            out.add_component(&[*k], f.clone())?;
        }
        Ok(out)
    };
    let (x2, x3) = (var(ch, xs[1]), var(ch, xs[2]));
    Ok([
        field(&[(i[0], ScalarExpr::one(ch))])?,
        field(&[(i[1], x2.clone()), (i[2], -&x3)])?,
        field(&[(i[1], x3)])?,
        field(&[(i[2], x2)])?,
    ])
}

/// Data on a four-dimensional base with `σ = f du1∧du2 + du3∧du4`, zero `P`
/// and trivial connection; `∂^γσ ≠ 0` once `f` depends on `u3`.
pub fn non_closed_sigma(f: &str) -> Result<CouplingData> {
    let ch = Chart::new(vec![
        VarSpec::base("u1"),
        VarSpec::base("u2"),
        VarSpec::base("u3"),
        VarSpec::base("u4"),
        VarSpec::fiber("y"),
    ])?;
    let bundle = Bundle::new(&ch);
    let conn = Connection::trivial(&bundle);
    let mut sigma = VValuedForm::zero(&ch, 2, 0);
    sigma.set(&[0, 1], MultiVector::function(parse_expr(f, &ch)?))?;
    sigma.set(&[2, 3], MultiVector::function(ScalarExpr::one(&ch)))?;
    CouplingData::new(conn, sigma, MultiVector::zero(&ch, 2))
}
