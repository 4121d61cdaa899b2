use std::str::FromStr;
use std::time::Instant;

use pcoupling::calculus::{jacobiator, lichnerowicz_delta, schouten, MultiVector};
use pcoupling::cohomology::{
    h1_split, hbar_cohomology, lichnerowicz_cohomology, spectral_terms, vanishing_conditions, CohomologyReport,
    Grading,
};
use pcoupling::corpus::{self, Example, Fiber};
use pcoupling::coupling::{
    assemble_tensor, build_and_check, cob_on_generators, coupling_check, extend_to_poisson, extract_data, flat_sigma,
    m_differential, membership_a_gamma, split_poisson_vf, tau_and_rho, verify_structure_equations, CouplingData,
    Membership, SplitOutcome,
};
use pcoupling::fibration::{assemble, bigrade, cov_ext_d, curvature, Bundle, Connection, VValuedForm};
use pcoupling::ring::{Chart, ChartRef, ScalarExpr, VarKind, Q};
use pcoupling::{Error, Result};

use crate::defs::{self, DefinitionFile, SectionKind};
use crate::report::{Report, Status, Truncation};
use crate::{AutomorphismCmd, Cli, CohomologyCmd, Command, DataCmd, ExampleCmd, FiberArg, Options, VerifyCmd};

pub const EXAMPLES: [&str; 4] = ["open-book", "so3-leaf", "cylinder", "product-r2"];

/// Rational values for constants, and the chart left after removing them.
pub struct Substitution {
    vars: Vec<(usize, Q)>,
    target: ChartRef,
}

impl Substitution {
    pub fn new(chart: &ChartRef, values: &[(String, Q)]) -> Result<Self> {
        let mut vars = Vec::new();
        for (n, q) in values {
            let v = chart.require(n)?;
            if chart.var(v).kind != VarKind::Constant {
                return Err(Error::InvalidInput(format!("`{}` is not a constant", n)));
            }
            vars.push((v, q.clone()));
        }
        let target = if vars.is_empty() {
            chart.clone()
        } else {
            Chart::new(chart.vars().iter().filter(|s| !values.iter().any(|(n, _)| *n == s.name)).cloned().collect())?
        };
        Ok(Substitution { vars, target })
    }

    pub fn chart(&self) -> &ChartRef {
        &self.target
    }

    pub fn expr(&self, e: &ScalarExpr) -> Result<ScalarExpr> {
        let mut e = e.clone();
        for (v, q) in &self.vars {
            e = e.eval_var(*v, q)?;
        }
        e.transport(&self.target)
    }

    pub fn multivector(&self, a: &MultiVector) -> Result<MultiVector> {
        a.map_coeffs(|e| {
            let mut e = e.clone();
            for (v, q) in &self.vars {
                e = e.eval_var(*v, q)?;
            }
            Ok(e)
        })?
        .transport(&self.target)
    }
}

pub fn parse_assignments(items: &[String]) -> Result<Vec<(String, Q)>> {
    let mut out: Vec<(String, Q)> = Vec::new();
    for s in items {
        let (n, v) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("`--set {}`: expected NAME=RATIONAL", s)))?;
        let q = Q::from_str(v.trim()).map_err(|_| Error::InvalidInput(format!("`{}` is not a rational", v.trim())))?;
        let n = n.trim().to_string();
        if out.iter().any(|(m, _)| *m == n) {
            return Err(Error::InvalidInput(format!("`{}` is set twice", n)));
        }
        out.push((n, q));
    }
    Ok(out)
}

/// A vector field written as `(x1) = f; (x2) = g`.
pub fn parse_field(src: &str, chart: &ChartRef) -> Result<MultiVector> {
    let mut out = MultiVector::zero(chart, 1);
    for piece in src.split(';') {
        if piece.trim().is_empty() {
            continue;
        }
        let start = piece.len() - piece.trim_start().len();
        let (idx, e) = defs::parse_component(piece, 1, start, chart)?;
        if idx.len() != 1 {
            return Err(Error::InvalidInput(format!("`{}`: vector field components take one index", piece.trim())));
        }
        out.add_component(&[idx[0].0], e)?;
    }
    Ok(out)
}

struct Ctx<'a> {
    opts: &'a Options,
    file: Option<DefinitionFile>,
    values: Vec<(String, Q)>,
}

struct Source {
    pi: MultiVector,
    bundle: Bundle,
}

impl Source {
    fn chart(&self) -> &ChartRef {
        self.pi.chart()
    }

    fn data(&self) -> Result<CouplingData> {
        extract_data(&self.pi, &self.bundle)
    }
}

impl<'a> Ctx<'a> {
    fn new(opts: &'a Options) -> Result<Self> {
        let values = parse_assignments(&opts.set)?;
        let file = match &opts.file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::InvalidInput(format!("cannot read {}: {}", p.display(), e)))?;
                Some(defs::parse(&text)?.substitute(&values)?)
            }
            None => None,
        };
        Ok(Ctx { opts, file, values })
    }

    fn rho(&self) -> Result<(String, String)> {
        let Some(r) = &self.opts.rho else {
            return Ok(("0".into(), "0".into()));
        };
        let parts: Vec<&str> = r.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a] => Ok((a.to_string(), a.to_string())),
            [a, b] => Ok((a.to_string(), b.to_string())),
            _ => Err(Error::InvalidInput("--rho takes one or two expressions".into())),
        }
    }

    fn example(&self, name: &str) -> Result<Example> {
        let (r1, r2) = self.rho()?;
        if self.opts.rho.is_some() && !matches!(name, "so3-leaf" | "cylinder") {
            return Err(Error::InvalidInput(format!("--rho does not apply to `{}`", name)));
        }
        let ex = match name {
            "open-book" => corpus::open_book()?,
            "so3-leaf" => corpus::so3_leaf(&r1, &r2, None)?,
            "cylinder" => corpus::cylinder(&r1, &r2)?,
            "product-r2" => corpus::product_r2(match self.opts.fiber {
                FiberArg::La2 => Fiber::La2,
                FiberArg::So3 => Fiber::So3,
            })?,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown example `{}` (known: {})",
                    name,
                    EXAMPLES.join(", ")
                )))
            }
        };
        let sub = Substitution::new(&ex.chart, &self.values)?;
        let ch = sub.chart().clone();
        Ok(Example {
            name: ex.name,
            bundle: Bundle::new(&ch),
            pi: sub.multivector(&ex.pi)?,
            vertical: sub.multivector(&ex.vertical)?,
            chart: ch,
        })
    }

    fn tensor(&self, name: &str) -> Result<Source> {
        match &self.file {
            Some(f) => Ok(Source { pi: f.tensor(name)?, bundle: f.bundle() }),
            None => {
                let ex = self.example(name)?;
                Ok(Source { pi: ex.pi, bundle: ex.bundle })
            }
        }
    }

    /// A connection section, `trivial`, or the connection of a coupling tensor.
    fn connection(&self, name: &str, bundle: Option<&Bundle>) -> Result<Connection> {
        if name == "trivial" {
            let b = match (bundle, &self.file) {
                (Some(b), _) => b.clone(),
                (None, Some(f)) => f.bundle(),
                (None, None) => return Err(Error::InvalidInput("`trivial` needs a tensor to fix the bundle".into())),
            };
            return Ok(Connection::trivial(&b));
        }
        if let Some(f) = &self.file {
            if f.sections.iter().any(|s| s.name == name && s.kind == SectionKind::Connection) {
                return f.connection(name);
            }
        }
        Ok(self.tensor(name)?.data()?.connection().clone())
    }
}

fn grading_text(chart: &ChartRef, g: &Grading) -> String {
    let ws: Vec<String> =
        chart.coordinates().iter().map(|&v| format!("{}:{}", chart.name(v), g.weights[v])).collect();
    format!("{} shift {}", ws.join(" "), g.shift)
}

fn truncation(bound: u32, exact: bool, chart: &ChartRef, g: Option<&Grading>, undecided: usize) -> Truncation {
    Truncation { degree_bound: bound, exact, grading: g.map(|g| grading_text(chart, g)), undecided }
}

fn weight_key(label: Option<i32>, weight: Option<i32>) -> String {
    match (label, weight) {
        (Some(l), _) => format!("w{}", l),
        (None, Some(w)) => format!("L{}", w),
        (None, None) => "total".into(),
    }
}

fn cohomology_into(report: &mut Report, rep: &CohomologyReport, prefix: &str, chart: &ChartRef) {
    for row in &rep.rows {
        report.dim(format!("{}{}", prefix, weight_key(row.label, row.weight)), row.dim);
    }
    for (w, r) in &rep.representatives {
        let label = rep.rows.iter().find(|row| row.weight == *w).and_then(|row| row.label);
        report.rep(format!("{}{}", prefix, weight_key(label, *w)), r);
    }
    report.flag(format!("{}composite-zero", prefix), rep.composite_zero);
    if rep.undecided > 0 {
        report.check(format!("{}complete", prefix), Status::Undecided, None);
    }
    if report.truncation.is_none() {
        report.truncation = Some(truncation(rep.bound, rep.exact, chart, rep.grading.as_ref(), rep.undecided));
    }
}

fn verify_jacobi(report: &mut Report, src: &Source) -> Result<()> {
    let r = jacobiator(&src.pi)?;
    report.residual_check("jacobi", r.is_zero(), &r);
    Ok(())
}

fn structure_checks(report: &mut Report, data: &CouplingData) -> Result<()> {
    let s = verify_structure_equations(data)?;
    for (name, r) in s.residuals() {
        report.residual_check(name, r.is_zero(), r);
    }
    Ok(())
}

fn nondegenerate(report: &mut Report, src: &Source) -> Result<bool> {
    let (ok, why) = coupling_check(&src.pi, &src.bundle)?;
    report.flag("nondegenerate", ok);
    if let Some(w) = why {
        report.note(w);
    }
    Ok(ok)
}

/// `♭_σ∘δ_Π = ∂∘♭_σ` on coordinate functions, vertical coordinate fields
/// and horizontal lifts.
fn intertwining(data: &CouplingData, pi: &MultiVector) -> Result<bool> {
    let ch = data.chart();
    let mut gens = Vec::new();
    for v in ch.coordinates() {
        let f = if ch.var(v).kind == VarKind::Periodic { ScalarExpr::cos(ch, v)? } else { ScalarExpr::var(ch, v)? };
        gens.push(MultiVector::function(f));
    }
    for &a in data.connection().fiber() {
        gens.push(MultiVector::coordinate(ch, a)?);
    }
    gens.extend(data.connection().lifts().iter().cloned());
    for a in gens {
        let lhs = flat_sigma(data, &lichnerowicz_delta(pi, &a)?)?;
        let rhs = m_differential(data, &flat_sigma(data, &a)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

fn data_verify(report: &mut Report, src: &Source) -> Result<()> {
    if !nondegenerate(report, src)? {
        return Ok(());
    }
    let data = src.data()?;
    structure_checks(report, &data)?;
    let cob = cob_on_generators(&data)?;
    for (name, ok) in ["Cob1", "Cob2", "Cob3", "Cob4", "sigma-squared"].iter().zip(cob) {
        report.flag(*name, ok);
    }
    report.flag("flat-intertwining", intertwining(&data, &src.pi)?);
    let back = assemble_tensor(&data);
    report.residual_check("roundtrip", back == src.pi, back.sub(&src.pi));
    Ok(())
}

fn data_extract(report: &mut Report, src: &Source) -> Result<()> {
    if !nondegenerate(report, src)? {
        return Ok(());
    }
    let data = src.data()?;
    let ch = src.chart();
    for (&i, h) in data.connection().base().iter().zip(data.connection().lifts()) {
        report.rep(format!("hor_{}", ch.name(i)), h);
    }
    report.rep("sigma", data.sigma());
    report.rep("P", data.p());
    let back = assemble_tensor(&data);
    report.residual_check("roundtrip", back == src.pi, back.sub(&src.pi));
    Ok(())
}

fn sigma_from_form(f: &DefinitionFile, name: &str) -> Result<VValuedForm> {
    let w = f.form(name)?;
    if w.degree() != 2 {
        return Err(Error::DegreeMismatch(format!("coupling form `{}` must be a 2-form", name)));
    }
    let bundle = f.bundle();
    let mut sigma = VValuedForm::zero(&f.chart, 2, 0);
    for (k, e) in w.terms() {
        let idx: Vec<usize> = k.iter().map(|&i| i as usize).collect();
        if !idx.iter().all(|i| bundle.base().contains(i)) {
            return Err(Error::InvalidInput(format!("coupling form `{}` has a vertical component", name)));
        }
        sigma.set(&idx, MultiVector::function(e.clone()))?;
    }
    Ok(sigma)
}

fn data_build(
    report: &mut Report,
    ctx: &Ctx,
    tensor: Option<&str>,
    connection: Option<&str>,
    sigma: Option<&str>,
    vertical: Option<&str>,
) -> Result<()> {
    let data = match (connection, sigma, vertical) {
        (None, None, None) => {
            let name = tensor.ok_or_else(|| Error::InvalidInput("give a tensor or --connection/--sigma/--vertical".into()))?;
            let src = ctx.tensor(name)?;
            if !nondegenerate(report, &src)? {
                return Ok(());
            }
            let data = src.data()?;
            let back = assemble_tensor(&data);
            report.residual_check("roundtrip", back == src.pi, back.sub(&src.pi));
            data
        }
        (Some(c), Some(s), Some(p)) => {
            let f = ctx
                .file
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("building from sections needs --file".into()))?;
            let conn = ctx.connection(c, None)?;
            CouplingData::new(conn, sigma_from_form(f, s)?, f.tensor(p)?)?
        }
        _ => return Err(Error::InvalidInput("--connection, --sigma and --vertical go together".into())),
    };
    structure_checks(report, &data)?;
    let (pi, ok) = build_and_check(&data)?;
    report.flag("jacobi", ok);
    report.rep("Pi", &pi);
    Ok(())
}

fn run_bigrade(report: &mut Report, ctx: &Ctx, tensor: &str, connection: Option<&str>) -> Result<()> {
    let src = ctx.tensor(tensor)?;
    let conn = match connection {
        Some(c) => ctx.connection(c, Some(&src.bundle))?,
        None if coupling_check(&src.pi, &src.bundle).map(|r| r.0).unwrap_or(false) => {
            src.data()?.connection().clone()
        }
        None => {
            report.note("tensor is not a coupling; using the trivial connection");
            Connection::trivial(&src.bundle)
        }
    };
    let parts = bigrade(&src.pi, &conn)?;
    for ((p, q), v) in &parts {
        report.rep(format!("({},{})", p, q), v);
        report.dim(format!("terms({},{})", p, q), v.terms().len());
    }
    let back = assemble(&parts, &conn, src.pi.degree());
    report.residual_check("reassembly", back == src.pi, back.sub(&src.pi));
    Ok(())
}

fn run_curvature(report: &mut Report, ctx: &Ctx, name: &str) -> Result<()> {
    let conn = ctx.connection(name, None)?;
    let curv = curvature(&conn)?;
    report.rep("Curv", &curv);
    report.rep("flat", curv.is_zero());
    let b = cov_ext_d(&conn, &curv)?;
    report.residual_check("bianchi", b.is_zero(), &b);
    Ok(())
}

fn run_cohomology(report: &mut Report, ctx: &Ctx, cmd: &CohomologyCmd) -> Result<()> {
    let d = ctx.opts.degree_bound;
    match cmd {
        CohomologyCmd::H0 { tensor } | CohomologyCmd::H1 { tensor } => {
            let k = usize::from(matches!(cmd, CohomologyCmd::H1 { .. }));
            let src = ctx.tensor(tensor)?;
            let rep = lichnerowicz_cohomology(&src.pi, k, d)?;
            cohomology_into(report, &rep, "", src.chart());
        }
        CohomologyCmd::Hbar { tensor, degree } => {
            let src = ctx.tensor(tensor)?;
            let rep = hbar_cohomology(&src.data()?, *degree, d)?;
            cohomology_into(report, &rep, "", src.chart());
        }
        CohomologyCmd::Spectral { tensor } => {
            let src = ctx.tensor(tensor)?;
            let sp = spectral_terms(&src.data()?, d)?;
            report.dim("E2_10", sp.e2_10());
            report.dim("Einf_01", sp.einf_01());
            report.dim("H1", sp.h1());
            report.truncation = Some(truncation(d, true, src.chart(), Some(&sp.grading), 0));
        }
        CohomologyCmd::Split { tensor } => {
            let src = ctx.tensor(tensor)?;
            split_into(report, &src, d)?;
        }
    }
    Ok(())
}

fn split_into(report: &mut Report, src: &Source, d: u32) -> Result<()> {
    let s = h1_split(&src.data()?, d)?;
    report.dim("hbar", s.hbar.dim());
    report.dim("rho", s.rho.dim());
    report.dim("left", s.left());
    report.dim("right", s.right());
    for row in &s.rows {
        report.dim(format!("L{}", row.weight), row.lichnerowicz);
    }
    report.flag("split-match", s.left() == s.right());
    report.flag("reps-match", s.reps_match);
    if s.rho.undecided > 0 {
        report.check("rho-complete", Status::Undecided, None);
    }
    for (w, r) in &s.hbar.representatives {
        report.rep(format!("hbar.{}", weight_key(None, *w)), r);
    }
    for r in &s.rho.representatives {
        report.rep(format!("rho.L{}", r.weight), &r.y);
    }
    let exact = s.lichnerowicz.exact && s.hbar.exact;
    report.truncation = Some(truncation(d, exact, src.chart(), Some(&s.grading), s.rho.undecided));
    Ok(())
}

fn run_automorphism(report: &mut Report, ctx: &Ctx, cmd: &AutomorphismCmd) -> Result<()> {
    let d = ctx.opts.degree_bound;
    report.truncation = Some(Truncation { degree_bound: d, exact: true, grading: None, undecided: 0 });
    match cmd {
        AutomorphismCmd::Split { tensor, field } => {
            let src = ctx.tensor(tensor)?;
            let data = src.data()?;
            let z = parse_field(field, src.chart())?;
            match split_poisson_vf(&data, &z, d)? {
                SplitOutcome::NotPoisson { residual } => report.residual_check("poisson", false, residual),
                SplitOutcome::Split(s) => {
                    report.flag("poisson", true);
                    report.flag("reassembly", true);
                    report.rep("alpha", &s.alpha);
                    report.rep("Y", &s.y);
                    report.rep("beta_Y", &s.beta);
                    report.rep("c_Y", &s.c);
                    report.rep("X_Y", &s.x_y);
                    if s.beta_from_witness {
                        report.note("β_Y read off from ♭_σ Z; no solution within the bound");
                    }
                    if s.c_from_witness {
                        report.note("c_Y read off from ♭_σ Z; no primitive within the bound");
                    }
                }
            }
        }
        AutomorphismCmd::Extend { tensor, vertical } => {
            let src = ctx.tensor(tensor)?;
            let data = src.data()?;
            let y = parse_field(vertical, src.chart())?;
            if !y.supported_on(data.connection().fiber()) {
                return Err(Error::InvalidInput("the field has horizontal components".into()));
            }
            let r = schouten(&y, data.p())?;
            report.residual_check("preserves-P", r.is_zero(), &r);
            if !r.is_zero() {
                return Ok(());
            }
            let beta = match membership_a_gamma(&data, &y, d)? {
                Membership::Member(b) => b,
                Membership::Unresolved { base_var, .. } => {
                    report.check("membership", Status::Undecided, None);
                    report.note(format!("no β_Y within the bound along `{}`", src.chart().name(base_var)));
                    return Ok(());
                }
            };
            report.flag("membership", true);
            report.rep("beta_Y", &beta);
            let tr = tau_and_rho(&data, &y, &beta, d)?;
            report.rep("tau_Y", &tr.tau);
            report.flag("tau-casimir-valued", tr.casimir_valued);
            report.flag("tau-closed", tr.closed);
            match tr.primitive {
                Some(c) => {
                    report.flag("rho-vanishes", true);
                    report.rep("c_Y", &c);
                    let x = extend_to_poisson(&data, &y, &beta, &c)?;
                    report.flag("poisson", true);
                    report.rep("X_Y", &x);
                }
                None => report.check("rho-vanishes", Status::Undecided, None),
            }
        }
    }
    Ok(())
}

fn run_vanishing(report: &mut Report, ctx: &Ctx, tensor: &str, flat: &str) -> Result<()> {
    let d = ctx.opts.degree_bound;
    let src = ctx.tensor(tensor)?;
    let data = src.data()?;
    let flat = ctx.connection(flat, Some(&src.bundle))?;
    let v = vanishing_conditions(&data, &flat, d)?;
    report.flag("ZX0", v.zx0);
    report.flag("ZX1", v.zx1.dim() == 0);
    report.flag("ZX2", v.zx2.dim() == 0);
    report.flag("ZX3", v.zx3.dim() == 0);
    report.flag("A4", v.a4_holds());
    report.dim("ZX1", v.zx1.dim());
    report.dim("ZX2", v.zx2.dim());
    report.dim("ZX3", v.zx3.dim());
    for row in &v.zx1.rows {
        report.dim(format!("ZX1.{}", weight_key(row.label, row.weight)), row.dim);
    }
    report.rep("verdict", if v.consistent { "consistent" } else { "not consistent" });
    report.note("only the hypotheses are checked, at the truncation bound");
    let g = v.zx2.grading.clone();
    report.truncation = Some(truncation(d, v.zx1.exact, src.chart(), g.as_ref(), 0));
    Ok(())
}

fn has_constants(ch: &ChartRef) -> bool {
    ch.vars().iter().any(|v| v.kind == VarKind::Constant)
}

fn run_example(report: &mut Report, ctx: &Ctx, name: &str) -> Result<()> {
    let d = ctx.opts.degree_bound;
    let ex = ctx.example(name)?;
    let src = Source { pi: ex.pi.clone(), bundle: ex.bundle.clone() };
    verify_jacobi(report, &src)?;
    if src.bundle.base().is_empty() {
        let h0 = lichnerowicz_cohomology(&src.pi, 0, d)?;
        cohomology_into(report, &h0, "H0.", src.chart());
        let h1 = lichnerowicz_cohomology(&src.pi, 1, d)?;
        cohomology_into(report, &h1, "H1.", src.chart());
        return Ok(());
    }
    data_verify(report, &src)?;
    if has_constants(src.chart()) {
        report.note("symbolic constants present; use --set to compute cohomology");
        return Ok(());
    }
    match split_into(report, &src, d) {
        Ok(()) => {}
        Err(Error::Unsupported(why)) => {
            report.note(format!("H1 split skipped: {}", why));
            return Ok(());
        }
        Err(e) => return Err(e),
    }
    let sp = spectral_terms(&src.data()?, d)?;
    report.dim("E2_10", sp.e2_10());
    report.dim("Einf_01", sp.einf_01());
    Ok(())
}

/// Run a parsed command line; `echo` is recorded as the command.
pub fn run(cli: &Cli, echo: &str) -> Result<Report> {
    let t0 = Instant::now();
    let ctx = Ctx::new(&cli.opts)?;
    let mut report = Report::new(echo);
    match &cli.command {
        Command::Verify(VerifyCmd::Jacobi { tensor }) => verify_jacobi(&mut report, &ctx.tensor(tensor)?)?,
        Command::Verify(VerifyCmd::Coupling { tensor }) => {
            let src = ctx.tensor(tensor)?;
            verify_jacobi(&mut report, &src)?;
            if nondegenerate(&mut report, &src)? {
                structure_checks(&mut report, &src.data()?)?;
            }
        }
        Command::Data(DataCmd::Extract { tensor }) => data_extract(&mut report, &ctx.tensor(tensor)?)?,
        Command::Data(DataCmd::Verify { tensor }) => data_verify(&mut report, &ctx.tensor(tensor)?)?,
        Command::Data(DataCmd::Build { tensor, connection, sigma, vertical }) => data_build(
            &mut report,
            &ctx,
            tensor.as_deref(),
            connection.as_deref(),
            sigma.as_deref(),
            vertical.as_deref(),
        )?,
        Command::Bigrade { tensor, connection } => run_bigrade(&mut report, &ctx, tensor, connection.as_deref())?,
        Command::Curvature { connection } => run_curvature(&mut report, &ctx, connection)?,
        Command::Cohomology(c) => run_cohomology(&mut report, &ctx, c)?,
        Command::Automorphism(c) => run_automorphism(&mut report, &ctx, c)?,
        Command::Vanishing { tensor, flat } => run_vanishing(&mut report, &ctx, tensor, flat)?,
        Command::Example(ExampleCmd::Run { name }) => run_example(&mut report, &ctx, name)?,
        Command::Example(ExampleCmd::List) => {
            for n in EXAMPLES {
                let ex = ctx.example(n)?;
                report.rep(n, &ex.chart);
            }
        }
    }
    report.wall_clock_ms = t0.elapsed().as_millis() as u64;
    Ok(report)
}
