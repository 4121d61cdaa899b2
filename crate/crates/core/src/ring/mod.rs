//! Exact coefficient field: rational functions over a chart of variables.
//!
//! A chart fixes an ordered list of variables. Affine variables are plain
//! polynomial generators, periodic variables `θ` contribute the pair
//! `cos θ`, `sin θ` with `sin² = 1 − cos²` applied eagerly, and constant
//! variables are symbolic parameters with vanishing derivatives.

mod expr;
pub mod gcd;
mod parse;
pub mod poly;

use std::fmt;
use std::sync::Arc;

pub use expr::ScalarExpr;
pub use parse::{parse_expr, parse_expr_at};
pub use poly::{Mono, Poly, Q};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Affine,
    Periodic,
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRole {
    Base,
    Fiber,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSpec {
    pub name: String,
    pub kind: VarKind,
    pub role: VarRole,
}

impl VarSpec {
    pub fn base(name: &str) -> Self {
        VarSpec { name: name.into(), kind: VarKind::Affine, role: VarRole::Base }
    }
    pub fn fiber(name: &str) -> Self {
        VarSpec { name: name.into(), kind: VarKind::Affine, role: VarRole::Fiber }
    }
    pub fn periodic_base(name: &str) -> Self {
        VarSpec { name: name.into(), kind: VarKind::Periodic, role: VarRole::Base }
    }
    pub fn constant(name: &str) -> Self {
        VarSpec { name: name.into(), kind: VarKind::Constant, role: VarRole::Parameter }
    }
}

/// Generator slot in the underlying polynomial ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Var(usize),
    Cos(usize),
    Sin(usize),
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    vars: Vec<VarSpec>,
    slots: Vec<Slot>,
    var_slot: Vec<usize>,
}

pub type ChartRef = Arc<Chart>;

impl Chart {
    pub fn new(vars: Vec<VarSpec>) -> Result<ChartRef> {
        let mut slots = Vec::new();
        let mut var_slot = Vec::new();
        for (i, v) in vars.iter().enumerate() {
            if v.name.is_empty() || !v.name.chars().next().unwrap().is_alphabetic() {
                return Err(Error::InvalidInput(format!("bad variable name `{}`", v.name)));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidInput(format!("duplicate variable `{}`", v.name)));
            }
            if matches!(v.name.as_str(), "cos" | "sin") {
                return Err(Error::InvalidInput(format!("reserved name `{}`", v.name)));
            }
            if (v.kind == VarKind::Constant) != (v.role == VarRole::Parameter) {
                return Err(Error::InvalidInput(format!(
                    "variable `{}`: constants and only constants have the parameter role",
                    v.name
                )));
            }
            var_slot.push(slots.len());
            match v.kind {
                VarKind::Periodic => {
                    slots.push(Slot::Cos(i));
                    slots.push(Slot::Sin(i));
                }
                _ => slots.push(Slot::Var(i)),
            }
        }
        Ok(Arc::new(Chart { vars, slots, var_slot }))
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }
    pub fn var(&self, i: usize) -> &VarSpec {
        &self.vars[i]
    }
    pub fn len(&self) -> usize {
        self.vars.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
    pub fn nslots(&self) -> usize {
        self.slots.len()
    }
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }
    pub fn slot_of(&self, var: usize) -> usize {
        self.var_slot[var]
    }
    /// `(cos, sin)` slots of a periodic variable.
    pub fn trig_slots(&self, var: usize) -> Option<(usize, usize)> {
        (self.vars[var].kind == VarKind::Periodic).then(|| (self.var_slot[var], self.var_slot[var] + 1))
    }
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }
    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
    pub fn name(&self, var: usize) -> &str {
        &self.vars[var].name
    }
    pub fn is_coordinate(&self, var: usize) -> bool {
        self.vars[var].kind != VarKind::Constant
    }
    /// Variables that carry tangent directions (everything except constants).
    pub fn coordinates(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_coordinate(i)).collect()
    }
    pub fn base(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vars[i].role == VarRole::Base).collect()
    }
    pub fn fiber(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vars[i].role == VarRole::Fiber).collect()
    }
    pub fn constants(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vars[i].kind == VarKind::Constant).collect()
    }
    pub fn periodic_slots(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter_map(|i| self.trig_slots(i)).collect()
    }
    pub fn has_periodic(&self) -> bool {
        self.vars.iter().any(|v| v.kind == VarKind::Periodic)
    }
}

pub fn same_chart(a: &ChartRef, b: &ChartRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub fn check_chart(a: &ChartRef, b: &ChartRef) -> Result<()> {
    if same_chart(a, b) {
        Ok(())
    } else {
        Err(Error::ChartMismatch)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vars.iter().map(|v| v.name.as_str()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}
