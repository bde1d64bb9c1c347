//! In-memory MILP representation.
//!
//! A [`MilpModel`] owns an ordered list of variables, an ordered list of
//! linear constraints and a minimization objective. Handles ([`Var`]) are
//! plain indices into the variable list and stay valid for the lifetime of
//! the model; the model only ever grows.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Handle of a variable inside a [`MilpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub(crate) usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// A linear expression `sum(coef * var) + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    terms: Vec<(Var, f64)>,
    constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: value,
        }
    }

    pub fn term(var: Var, coef: f64) -> Self {
        LinExpr {
            terms: vec![(var, coef)],
            constant: 0.0,
        }
    }

    pub fn add_term(&mut self, var: Var, coef: f64) -> &mut Self {
        self.terms.push((var, coef));
        self
    }

    pub fn add_constant(&mut self, value: f64) -> &mut Self {
        self.constant += value;
        self
    }

    pub fn terms(&self) -> &[(Var, f64)] {
        &self.terms
    }

    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    /// Sum of `coef * var` over an iterator of pairs.
    pub fn sum<I: IntoIterator<Item = (Var, f64)>>(items: I) -> Self {
        LinExpr {
            terms: items.into_iter().collect(),
            constant: 0.0,
        }
    }

    /// Merges duplicate variables and drops exact zeros. Terms keep the order
    /// of first appearance.
    pub fn normalized(&self) -> LinExpr {
        let mut order: Vec<Var> = Vec::new();
        let mut acc: HashMap<Var, f64> = HashMap::new();
        for &(v, c) in &self.terms {
            let e = acc.entry(v).or_insert_with(|| {
                order.push(v);
                0.0
            });
            *e += c;
        }
        let terms = order
            .into_iter()
            .filter_map(|v| {
                let c = acc[&v];
                (c != 0.0).then_some((v, c))
            })
            .collect();
        LinExpr {
            terms,
            constant: self.constant,
        }
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(v, c)| c * values[v.0])
            .sum::<f64>()
            + self.constant
    }

    pub fn scaled(mut self, factor: f64) -> LinExpr {
        for t in &mut self.terms {
            t.1 *= factor;
        }
        self.constant *= factor;
        self
    }
}

impl From<Var> for LinExpr {
    fn from(v: Var) -> Self {
        LinExpr::term(v, 1.0)
    }
}

impl From<f64> for LinExpr {
    fn from(c: f64) -> Self {
        LinExpr::constant(c)
    }
}

impl<T: Into<LinExpr>> AddAssign<T> for LinExpr {
    fn add_assign(&mut self, rhs: T) {
        let rhs = rhs.into();
        self.terms.extend(rhs.terms);
        self.constant += rhs.constant;
    }
}

impl<T: Into<LinExpr>> SubAssign<T> for LinExpr {
    fn sub_assign(&mut self, rhs: T) {
        *self += rhs.into().scaled(-1.0);
    }
}

impl<T: Into<LinExpr>> Add<T> for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: T) -> LinExpr {
        self += rhs;
        self
    }
}

impl<T: Into<LinExpr>> Sub<T> for LinExpr {
    type Output = LinExpr;
    fn sub(mut self, rhs: T) -> LinExpr {
        self -= rhs;
        self
    }
}

impl<T: Into<LinExpr>> Add<T> for Var {
    type Output = LinExpr;
    fn add(self, rhs: T) -> LinExpr {
        LinExpr::from(self) + rhs
    }
}

impl<T: Into<LinExpr>> Sub<T> for Var {
    type Output = LinExpr;
    fn sub(self, rhs: T) -> LinExpr {
        LinExpr::from(self) - rhs
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(self, rhs: f64) -> LinExpr {
        self.scaled(rhs)
    }
}

impl Mul<Var> for f64 {
    type Output = LinExpr;
    fn mul(self, rhs: Var) -> LinExpr {
        LinExpr::term(rhs, self)
    }
}

impl Mul<LinExpr> for f64 {
    type Output = LinExpr;
    fn mul(self, rhs: LinExpr) -> LinExpr {
        rhs.scaled(self)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scaled(-1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// A row `expr (rel) rhs`. The stored expression carries no constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    /// Signed violation at `values`; zero when satisfied.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.expr.eval(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    DuplicateName(String),
    UndeclaredVariable { constraint: String, index: usize },
    InvalidBounds { name: String, lower: f64, upper: f64 },
    NonFiniteCoefficient { constraint: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DuplicateName(n) => write!(f, "duplicate name `{n}`"),
            ModelError::UndeclaredVariable { constraint, index } => write!(
                f,
                "constraint `{constraint}` references undeclared variable #{index}"
            ),
            ModelError::InvalidBounds { name, lower, upper } => {
                write!(f, "variable `{name}` has invalid bounds [{lower}, {upper}]")
            }
            ModelError::NonFiniteCoefficient { constraint } => {
                write!(f, "constraint `{constraint}` has a non-finite coefficient")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Solver-agnostic MILP: minimize `objective` subject to `constraints`.
#[derive(Clone, Debug, Default)]
pub struct MilpModel {
    vars: Vec<Variable>,
    var_names: HashMap<String, Var>,
    constraints: Vec<Constraint>,
    con_names: HashSet<String>,
    objective: LinExpr,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<Var, ModelError> {
        let name = name.into();
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            VarKind::Continuous => (lower, upper),
        };
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY
            || upper == f64::NEG_INFINITY
        {
            return Err(ModelError::InvalidBounds { name, lower, upper });
        }
        if self.var_names.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        let v = Var(self.vars.len());
        self.var_names.insert(name.clone(), v);
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        Ok(v)
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<Var, ModelError> {
        self.add_variable(name, VarKind::Continuous, lower, upper)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<Var, ModelError> {
        self.add_variable(name, VarKind::Binary, 0.0, 1.0)
    }

    /// Adds `expr (rel) rhs`; the expression constant is moved to the right-hand side.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: impl Into<LinExpr>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, ModelError> {
        let name = name.into();
        let expr = expr.into().normalized();
        for &(v, c) in expr.terms() {
            if v.0 >= self.vars.len() {
                return Err(ModelError::UndeclaredVariable {
                    constraint: name,
                    index: v.0,
                });
            }
            if !c.is_finite() {
                return Err(ModelError::NonFiniteCoefficient { constraint: name });
            }
        }
        if !rhs.is_finite() || !expr.constant_part().is_finite() {
            return Err(ModelError::NonFiniteCoefficient { constraint: name });
        }
        if self.con_names.contains(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        let rhs = rhs - expr.constant_part();
        let expr = LinExpr {
            terms: expr.terms,
            constant: 0.0,
        };
        self.con_names.insert(name.clone());
        self.constraints.push(Constraint {
            name,
            expr,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    /// Sets the (minimized) objective.
    pub fn set_objective(&mut self, expr: impl Into<LinExpr>) -> Result<(), ModelError> {
        let expr = expr.into().normalized();
        if let Some(&(v, _)) = expr.terms().iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(ModelError::UndeclaredVariable {
                constraint: "objective".into(),
                index: v.0,
            });
        }
        self.objective = expr;
        Ok(())
    }

    /// Tightens the bounds of an existing variable (used to fix variables).
    pub fn set_bounds(&mut self, var: Var, lower: f64, upper: f64) -> Result<(), ModelError> {
        let v = &mut self.vars[var.0];
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::InvalidBounds {
                name: v.name.clone(),
                lower,
                upper,
            });
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn fix(&mut self, var: Var, value: f64) -> Result<(), ModelError> {
        self.set_bounds(var, value, value)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, var: Var) -> &Variable {
        &self.vars[var.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        self.var_names.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn var_handles(&self) -> impl Iterator<Item = Var> {
        (0..self.vars.len()).map(Var)
    }

    /// Smallest and largest absolute nonzero coefficient over rows and objective.
    pub fn coefficient_range(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        let rows = self.constraints.iter().map(|c| &c.expr);
        for expr in rows.chain(std::iter::once(&self.objective)) {
            for &(_, c) in expr.terms() {
                let a = c.abs();
                if a > 0.0 {
                    lo = lo.min(a);
                    hi = hi.max(a);
                }
            }
        }
        (hi > 0.0).then_some((lo, hi))
    }

    /// Largest bound or row violation of `values`, plus integrality violation
    /// of binaries.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (v, &x) in self.vars.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
            if v.kind == VarKind::Binary {
                worst = worst.max((x - x.round()).abs());
            }
        }
        for c in &self.constraints {
            worst = worst.max(c.violation(values));
        }
        worst
    }

    /// The first constraint violated by more than `tol`, if any.
    pub fn first_violated(&self, values: &[f64], tol: f64) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.violation(values) > tol)
    }
}
