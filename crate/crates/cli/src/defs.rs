//! Tensor-definition files.
//!
//! ```text
//! [chart]
//! base = p q
//! fiber = x1 x2 x3
//! constant = c
//!
//! [tensor PI]
//! (x1,x2) = x3
//! ```

use std::collections::BTreeMap;
use std::fmt;

use pcoupling::calculus::{sort_sign, DiffForm, MultiVector};
use pcoupling::fibration::{Bundle, Connection};
use pcoupling::ring::{parse_expr_at, Chart, ChartRef, ScalarExpr, VarKind, VarRole, VarSpec};
use pcoupling::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionKind {
    Tensor,
    Connection,
    Form,
}

impl SectionKind {
    fn keyword(self) -> &'static str {
        match self {
            SectionKind::Tensor => "tensor",
            SectionKind::Connection => "connection",
            SectionKind::Form => "form",
        }
    }
}

/// Source position of a section header or entry (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Section {
    pub kind: SectionKind,
    pub name: String,
    pub span: Span,
    pub degree: usize,
    /// Sorted variable indices (connections: `[base, fiber]`, unsorted) and values.
    pub entries: BTreeMap<Vec<usize>, ScalarExpr>,
}

#[derive(Clone, Debug)]
pub struct DefinitionFile {
    pub chart: ChartRef,
    pub sections: Vec<Section>,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

/// Column (1-based) of the byte offset `at` inside `line`.
fn col_of(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

struct ChartSpec {
    lists: BTreeMap<&'static str, Vec<(String, Span)>>,
}

impl ChartSpec {
    const KEYS: [&'static str; 4] = ["base", "periodic", "fiber", "constant"];

    fn build(&self) -> Result<ChartRef> {
        let mut specs = Vec::new();
        let mut seen: BTreeMap<&str, Span> = BTreeMap::new();
        for key in Self::KEYS {
            for (n, sp) in self.lists.get(key).map(|v| v.as_slice()).unwrap_or(&[]) {
                if seen.insert(n.as_str(), *sp).is_some() {
                    return Err(err(sp.line, sp.col, format!("variable `{}` declared twice", n)));
                }
                specs.push(match key {
                    "base" => VarSpec::base(n),
                    "periodic" => VarSpec::periodic_base(n),
                    "fiber" => VarSpec::fiber(n),
                    _ => VarSpec::constant(n),
                });
            }
        }
        Chart::new(specs)
    }
}

/// Component tuple `(a, b, ...)` at the start of `text`; returns the names
/// with their columns and the remainder after `=`.
fn split_entry(text: &str, lineno: usize, offset: usize, raw: &str) -> Result<(Vec<(String, usize)>, usize)> {
    let open = offset;
    let close = match text.find(')') {
        Some(i) => offset + i,
        None => return Err(err(lineno, col_of(raw, open), "missing `)`")),
    };
    let mut names = Vec::new();
    let inner_start = open + 1;
    let inner = &raw[inner_start..close];
    let mut pos = inner_start;
    let parts: Vec<&str> = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').collect() };
    for part in parts {
        let lead = part.len() - part.trim_start().len();
        let name = part.trim();
        if !is_ident(name) {
            return Err(err(lineno, col_of(raw, pos + lead), format!("expected a variable name, found `{}`", name)));
        }
        names.push((name.to_string(), col_of(raw, pos + lead)));
        pos += part.len() + 1;
    }
    let rest = &raw[close + 1..];
    let lead = rest.len() - rest.trim_start().len();
    if !rest.trim_start().starts_with('=') {
        return Err(err(lineno, col_of(raw, close + 1 + lead), "expected `=`"));
    }
    Ok((names, close + 1 + lead + 1))
}

/// Parse one `(a, b) = expr` component against `chart`. Used for the file
/// format and for command-line fields.
pub fn parse_component(raw: &str, lineno: usize, start: usize, chart: &ChartRef) -> Result<(Vec<(usize, usize)>, ScalarExpr)> {
    let (names, eq) = split_entry(&raw[start..], lineno, start, raw)?;
    let mut idx = Vec::new();
    for (n, col) in names {
        let v = chart.index_of(&n).ok_or_else(|| err(lineno, col, format!("unknown variable `{}`", n)))?;
        if !chart.is_coordinate(v) {
            return Err(err(lineno, col, format!("`{}` is a constant, not a coordinate", n)));
        }
        idx.push((v, col));
    }
    let src = &raw[eq..];
    let lead = src.len() - src.trim_start().len();
    let body = src.trim();
    if body.is_empty() {
        return Err(err(lineno, col_of(raw, eq + lead), "missing expression"));
    }
    let e = parse_expr_at(body, chart, lineno, col_of(raw, eq + lead))?;
    Ok((idx, e))
}

/// Sort an antisymmetric index tuple, folding the permutation sign into `e`.
fn normalize(idx: &[(usize, usize)], e: ScalarExpr, lineno: usize) -> Result<(Vec<usize>, ScalarExpr)> {
    let mut keys: Vec<u8> = idx.iter().map(|(v, _)| *v as u8).collect();
    match sort_sign(&mut keys) {
        Some(s) => Ok((keys.into_iter().map(usize::from).collect(), if s < 0 { -&e } else { e })),
        None => {
            let mut seen = Vec::new();
            for (v, col) in idx {
                if seen.contains(v) {
                    return Err(err(lineno, *col, "repeated index in antisymmetric component"));
                }
                seen.push(*v);
            }
            unreachable!()
        }
    }
}

pub fn parse(src: &str) -> Result<DefinitionFile> {
    let mut chart_spec: Option<ChartSpec> = None;
    let mut chart: Option<ChartRef> = None;
    let mut sections: Vec<Section> = Vec::new();
    let mut in_chart = false;

    let finish_chart = |spec: &Option<ChartSpec>, chart: &mut Option<ChartRef>| -> Result<()> {
        if chart.is_none() {
            if let Some(s) = spec {
                *chart = Some(s.build()?);
            }
        }
        Ok(())
    };

    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let start = body.len() - body.trim_start().len();
        let col = col_of(raw, start);
        if trimmed.starts_with('[') {
            let Some(end) = trimmed.find(']') else {
                return Err(err(lineno, col, "unterminated section header"));
            };
            if !trimmed[end + 1..].trim().is_empty() {
                return Err(err(lineno, col + end + 1, "trailing text after section header"));
            }
            let words: Vec<&str> = trimmed[1..end].split_whitespace().collect();
            match words.as_slice() {
                ["chart"] => {
                    if chart_spec.is_some() {
                        return Err(err(lineno, col, "duplicate [chart] section"));
                    }
                    chart_spec = Some(ChartSpec { lists: BTreeMap::new() });
                    in_chart = true;
                }
                [kind, name] => {
                    let kind = match *kind {
                        "tensor" => SectionKind::Tensor,
                        "connection" => SectionKind::Connection,
                        "form" => SectionKind::Form,
                        other => return Err(err(lineno, col + 1, format!("unknown section kind `{}`", other))),
                    };
                    if !is_ident(name) && !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
                        return Err(err(lineno, col, format!("invalid section name `{}`", name)));
                    }
                    finish_chart(&chart_spec, &mut chart)?;
                    if chart.is_none() {
                        return Err(err(lineno, col, "[chart] must come first"));
                    }
                    if sections.iter().any(|s| s.name == *name) {
                        return Err(err(lineno, col, format!("duplicate section name `{}`", name)));
                    }
                    let degree = if kind == SectionKind::Connection { 2 } else { usize::MAX };
                    sections.push(Section {
                        kind,
                        name: name.to_string(),
                        span: Span { line: lineno, col },
                        degree,
                        entries: BTreeMap::new(),
                    });
                    in_chart = false;
                }
                _ => return Err(err(lineno, col, "malformed section header")),
            }
            continue;
        }
        if in_chart {
            let spec = chart_spec.as_mut().expect("inside [chart]");
            let Some(eq) = body.find('=') else {
                return Err(err(lineno, col, "expected `key = names`"));
            };
            let key = body[..eq].trim();
            let Some(k) = ChartSpec::KEYS.iter().find(|k| **k == key) else {
                return Err(err(lineno, col, format!("unknown chart key `{}`", key)));
            };
            if spec.lists.contains_key(k) {
                return Err(err(lineno, col, format!("duplicate chart key `{}`", key)));
            }
            let mut names = Vec::new();
            let mut pos = eq + 1;
            for w in body[eq + 1..].split_whitespace() {
                let at = pos + body[pos..].find(w).expect("word inside line");
                if !is_ident(w) {
                    return Err(err(lineno, col_of(raw, at), format!("invalid variable name `{}`", w)));
                }
                names.push((w.to_string(), Span { line: lineno, col: col_of(raw, at) }));
                pos = at + w.len();
            }
            spec.lists.insert(k, names);
            continue;
        }
        let Some(sec) = sections.last_mut() else {
            return Err(err(lineno, col, "entry outside any section"));
        };
        let ch = chart.as_ref().expect("chart built before sections");
        if trimmed.starts_with("degree") {
            let Some(eq) = body.find('=') else {
                return Err(err(lineno, col, "expected `degree = k`"));
            };
            let v = body[eq + 1..].trim();
            let d: usize = v.parse().map_err(|_| err(lineno, col, format!("invalid degree `{}`", v)))?;
            if sec.kind == SectionKind::Connection {
                return Err(err(lineno, col, "connections have no degree"));
            }
            if sec.degree != usize::MAX || !sec.entries.is_empty() {
                return Err(err(lineno, col, "degree must precede all components"));
            }
            sec.degree = d;
            continue;
        }
        if !trimmed.starts_with('(') {
            return Err(err(lineno, col, "expected a component `(..) = expr`"));
        }
        let (idx, e) = parse_component(body, lineno, start, ch)?;
        match sec.kind {
            SectionKind::Connection => {
                if idx.len() != 2 {
                    return Err(err(lineno, col, "connection entries are `(base, fiber) = γ`"));
                }
                let (u, a) = (idx[0], idx[1]);
                if ch.var(u.0).role != VarRole::Base {
                    return Err(err(lineno, u.1, format!("`{}` is not a base variable", ch.name(u.0))));
                }
                if ch.var(a.0).role != VarRole::Fiber {
                    return Err(err(lineno, a.1, format!("`{}` is not a fiber variable", ch.name(a.0))));
                }
                if sec.entries.insert(vec![u.0, a.0], e).is_some() {
                    return Err(err(lineno, col, "duplicate component"));
                }
            }
            _ => {
                if sec.degree == usize::MAX {
                    sec.degree = idx.len();
                } else if sec.degree != idx.len() {
                    return Err(err(
                        lineno,
                        col,
                        format!("arity mismatch: expected {} indices, found {}", sec.degree, idx.len()),
                    ));
                }
                let (key, e) = normalize(&idx, e, lineno)?;
                if sec.entries.contains_key(&key) {
                    return Err(err(lineno, col, "duplicate component"));
                }
                if !e.is_zero() {
                    sec.entries.insert(key, e);
                }
            }
        }
    }
    finish_chart(&chart_spec, &mut chart)?;
    let chart = chart.ok_or_else(|| err(1, 1, "missing [chart] section"))?;
    for s in &mut sections {
        if s.degree == usize::MAX {
            s.degree = 0;
        }
    }
    Ok(DefinitionFile { chart, sections })
}

impl DefinitionFile {
    pub fn section(&self, name: &str, kind: SectionKind) -> Result<&Section> {
        match self.sections.iter().find(|s| s.name == name) {
            Some(s) if s.kind == kind => Ok(s),
            Some(s) => Err(Error::InvalidInput(format!("`{}` is a {}, not a {}", name, s.kind.keyword(), kind.keyword()))),
            None => Err(Error::InvalidInput(format!("no {} named `{}`", kind.keyword(), name))),
        }
    }

    pub fn bundle(&self) -> Bundle {
        Bundle::new(&self.chart)
    }

    pub fn tensor(&self, name: &str) -> Result<MultiVector> {
        let s = self.section(name, SectionKind::Tensor)?;
        if s.degree == 0 {
            let f = s.entries.get(&Vec::new()).cloned().unwrap_or_else(|| ScalarExpr::zero(&self.chart));
            return Ok(MultiVector::function(f));
        }
        let mut out = MultiVector::zero(&self.chart, s.degree);
        for (k, e) in &s.entries {
            out.add_component(k, e.clone())?;
        }
        Ok(out)
    }

    pub fn form(&self, name: &str) -> Result<DiffForm> {
        let s = self.section(name, SectionKind::Form)?;
        if s.degree == 0 {
            let f = s.entries.get(&Vec::new()).cloned().unwrap_or_else(|| ScalarExpr::zero(&self.chart));
            return Ok(DiffForm::function(f));
        }
        DiffForm::from_components(&self.chart, s.degree, s.entries.iter().map(|(k, e)| (k.clone(), e.clone())))
    }

    pub fn connection(&self, name: &str) -> Result<Connection> {
        let s = self.section(name, SectionKind::Connection)?;
        let ch = &self.chart;
        let bundle = self.bundle();
        let gamma = bundle
            .base()
            .iter()
            .map(|&u| {
                bundle
                    .fiber()
                    .iter()
                    .map(|&a| s.entries.get(&vec![u, a]).cloned().unwrap_or_else(|| ScalarExpr::zero(ch)))
                    .collect()
            })
            .collect();
        Connection::new(&bundle, gamma)
    }

    /// Substitute rationals for constants, moving every section to the
    /// chart without those constants.
    pub fn substitute(&self, values: &[(String, pcoupling::ring::Q)]) -> Result<DefinitionFile> {
        if values.is_empty() {
            return Ok(self.clone());
        }
        let mut vars = Vec::new();
        for (n, _) in values {
            let v = self.chart.require(n)?;
            if self.chart.var(v).kind != VarKind::Constant {
                return Err(Error::InvalidInput(format!("`{}` is not a constant", n)));
            }
            vars.push(v);
        }
        let target = Chart::new(
            self.chart.vars().iter().filter(|s| !values.iter().any(|(n, _)| *n == s.name)).cloned().collect(),
        )?;
        let sub = |e: &ScalarExpr| -> Result<ScalarExpr> {
            let mut e = e.clone();
            for (v, (_, q)) in vars.iter().zip(values) {
                e = e.eval_var(*v, q)?;
            }
            e.transport(&target)
        };
        let remap = |k: &[usize]| -> Vec<usize> {
            k.iter().map(|&v| target.index_of(self.chart.name(v)).expect("coordinates survive")).collect()
        };
        let mut sections = Vec::new();
        for s in &self.sections {
            let mut entries = BTreeMap::new();
            for (k, e) in &s.entries {
                let e = sub(e)?;
                if !e.is_zero() || s.kind == SectionKind::Connection {
                    entries.insert(remap(k), e);
                }
            }
            sections.push(Section { entries, ..s.clone() });
        }
        Ok(DefinitionFile { chart: target, sections })
    }
}

impl fmt::Display for DefinitionFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[chart]")?;
        let ch = &self.chart;
        let group = |kind: VarKind, role: VarRole| -> Vec<&str> {
            ch.vars().iter().filter(|v| v.kind == kind && v.role == role).map(|v| v.name.as_str()).collect()
        };
        for (key, names) in [
            ("base", group(VarKind::Affine, VarRole::Base)),
            ("periodic", group(VarKind::Periodic, VarRole::Base)),
            ("fiber", group(VarKind::Affine, VarRole::Fiber)),
            ("constant", group(VarKind::Constant, VarRole::Parameter)),
        ] {
            if !names.is_empty() {
                writeln!(f, "{} = {}", key, names.join(" "))?;
            }
        }
        for s in &self.sections {
            writeln!(f)?;
            writeln!(f, "[{} {}]", s.kind.keyword(), s.name)?;
            if s.kind != SectionKind::Connection && (s.entries.is_empty() || s.degree == 0) {
                writeln!(f, "degree = {}", s.degree)?;
            }
            for (k, e) in &s.entries {
                let names: Vec<&str> = k.iter().map(|&v| ch.name(v)).collect();
                writeln!(f, "({}) = {}", names.join(","), e)?;
            }
        }
        Ok(())
    }
}
