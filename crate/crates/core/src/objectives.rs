//! Power-to-liquid efficiency and specific production cost.

use std::fmt;

use henopt_milp::{LinExpr, MilpModel, Relation, Var};

use crate::case::CaseDefinition;
use crate::encode::{encode_pwl1d, encode_simplex_surface, Direction, EncodeError};
use crate::hen::{HenBlock, UtilityKind};
use crate::pwl::{build_simplex_surface, Pwl1D, PwlError, SimplexSurface};

#[derive(Debug)]
pub enum ObjectiveError {
    Encode(EncodeError),
    /// A ratio surface would include a non-positive denominator.
    Domain(String),
}

impl fmt::Display for ObjectiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveError::Encode(e) => write!(f, "{e}"),
            ObjectiveError::Domain(m) => write!(f, "domain error: {m}"),
        }
    }
}

impl std::error::Error for ObjectiveError {}

impl From<EncodeError> for ObjectiveError {
    fn from(e: EncodeError) -> Self {
        ObjectiveError::Encode(e)
    }
}

impl From<henopt_milp::ModelError> for ObjectiveError {
    fn from(e: henopt_milp::ModelError) -> Self {
        ObjectiveError::Encode(EncodeError::Model(e))
    }
}

impl From<PwlError> for ObjectiveError {
    fn from(e: PwlError) -> Self {
        ObjectiveError::Encode(EncodeError::Pwl(e))
    }
}

/// Boxes of the two ratio surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBoxes {
    pub p_el: (f64, f64),
    pub tac: (f64, f64),
}

#[derive(Debug, Clone, Copy)]
pub struct RatioGrids {
    pub eta: (usize, usize),
    pub c_prod: (usize, usize),
}

impl Default for RatioGrids {
    fn default() -> Self {
        RatioGrids { eta: (4, 4), c_prod: (3, 3) }
    }
}

#[derive(Debug, Clone)]
pub struct ObjectiveBundle {
    pub eta_var: Option<Var>,
    pub cprod_var: Option<Var>,
    pub p_el_var: Var,
    pub h_dot_var: Var,
    pub tac_var: Var,
    pub m_prod_var: Var,
    pub capex_hen_expr: LinExpr,
    pub capex_sys_expr: LinExpr,
    pub opex_expr: LinExpr,
    pub eta_surface: Option<RatioModel>,
    pub cprod_surface: Option<RatioModel>,
}

/// How a ratio ended up encoded, depending on which inputs can move.
#[derive(Debug, Clone)]
pub enum RatioModel {
    Constant(f64),
    Linear(f64),
    Curve(Pwl1D),
    Surface(SimplexSurface),
}

/// `p_el = P_sys(u) + eps_hu * sum q_hu + eps_cu * sum q_cu`, kW.
pub fn p_el_expr(c: &CaseDefinition, hen: &HenBlock) -> LinExpr {
    let p = &c.performance.p_sys;
    hen.expr_of(|u| p.eval(u))
        + hen.utility_sum(UtilityKind::Hot) * c.economics.eps_hu
        + hen.utility_sum(UtilityKind::Cold) * c.economics.eps_cu
}

fn expr_range(hen: &HenBlock, p: &Pwl1D) -> (f64, f64) {
    let (lo, hi) = hen.range;
    let mut vals = vec![p.eval(lo), p.eval(hi)];
    vals.extend(p.breakpoints().iter().zip(p.values()).filter(|(b, _)| **b > lo && **b < hi).map(|(_, v)| *v));
    vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

pub fn build_p_el(m: &mut MilpModel, c: &CaseDefinition, hen: &HenBlock) -> Result<Var, ObjectiveError> {
    let (lo, hi) = expr_range(hen, &c.performance.p_sys);
    let util_max: f64 = hen
        .utilities
        .iter()
        .map(|u| {
            let eps = match u.kind {
                UtilityKind::Hot => c.economics.eps_hu,
                UtilityKind::Cold => c.economics.eps_cu,
            };
            eps * m.variable(u.q).upper
        })
        .sum();
    let v = m.add_continuous("obj.p_el", lo, hi + util_max)?;
    m.add_constraint("obj.p_el.def", p_el_expr(c, hen) - v, Relation::Eq, 0.0)?;
    Ok(v)
}

/// `(CAPEX_sys, CAPEX_HEN)`; the network part is the area-cost envelopes
/// plus a fixed cost per exchanger.
pub fn build_capex(c: &CaseDefinition, hen: &HenBlock) -> (LinExpr, LinExpr) {
    let e = &c.economics;
    let sys = LinExpr::constant(e.af_inv * e.c_sys);
    let net = (hen.area_cost() + hen.exchanger_count() * e.c_f_hex) * e.af_hen();
    (sys, net)
}

/// Annual feedstock and electricity cost. Feed flows are t/h and prices
/// €/t; electricity is €/MWh against kW.
pub fn build_opex(c: &CaseDefinition, hen: &HenBlock, p_el: Var) -> LinExpr {
    let e = &c.economics;
    let mut per_hour = LinExpr::from(p_el) * (e.c_el / 1000.0);
    for ((_, price), flow) in e.c_feedstock.iter().zip(&c.performance.feed_flows) {
        per_hour += hen.expr_of(|u| flow.eval(u)) * *price;
    }
    per_hour * (e.af_op * e.t_full_load)
}

fn opex_range(c: &CaseDefinition, hen: &HenBlock, p_el: (f64, f64)) -> (f64, f64) {
    let e = &c.economics;
    let mut lo = p_el.0 * e.c_el / 1000.0;
    let mut hi = p_el.1 * e.c_el / 1000.0;
    for ((_, price), flow) in e.c_feedstock.iter().zip(&c.performance.feed_flows) {
        let (a, b) = expr_range(hen, flow);
        lo += price * a;
        hi += price * b;
    }
    (lo * e.af_op * e.t_full_load, hi * e.af_op * e.t_full_load)
}

/// Bounded variable tied to a linear expression.
fn defined_var(m: &mut MilpModel, name: &str, e: LinExpr, lo: f64, hi: f64) -> Result<Var, ObjectiveError> {
    let v = m.add_continuous(name, lo, hi)?;
    m.add_constraint(format!("{name}.def"), e - v, Relation::Eq, 0.0)?;
    Ok(v)
}

fn narrow(m: &mut MilpModel, v: Var, lo: f64, hi: f64) -> Result<(f64, f64), ObjectiveError> {
    let var = m.variable(v);
    let (a, b) = (var.lower.max(lo), var.upper.min(hi));
    if a > b {
        return Err(ObjectiveError::Domain(format!("box [{lo}, {hi}] misses `{}` in [{}, {}]", var.name, var.lower, var.upper)));
    }
    m.set_bounds(v, a, b)?;
    Ok((a, b))
}

/// `out = num / (scale * den)`, encoded according to which of the two can
/// move.
pub fn encode_ratio(
    m: &mut MilpModel,
    name: &str,
    num: Var,
    den: Var,
    scale: f64,
    grid: (usize, usize),
) -> Result<(Var, RatioModel), ObjectiveError> {
    let (nl, nh) = (m.variable(num).lower, m.variable(num).upper);
    let (dl, dh) = (m.variable(den).lower, m.variable(den).upper);
    if !(dl > 0.0) {
        return Err(ObjectiveError::Domain(format!("{name}: denominator lower bound {dl} is not positive")));
    }
    let f = |a: f64, b: f64| a / (scale * b);
    let corners = [f(nl, dl), f(nl, dh), f(nh, dl), f(nh, dh)];
    let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let out = m.add_continuous(name, lo, hi)?;
    let model = match (nh > nl, dh > dl) {
        (false, false) => {
            m.fix(out, f(nl, dl))?;
            RatioModel::Constant(f(nl, dl))
        }
        (_, false) => {
            let k = 1.0 / (scale * dl);
            m.add_constraint(format!("{name}.def"), out - k * num, Relation::Eq, 0.0)?;
            RatioModel::Linear(k)
        }
        (false, true) => {
            let n = grid.1.max(2);
            let xs: Vec<f64> = (0..n).map(|i| dl + (dh - dl) * i as f64 / (n - 1) as f64).collect();
            let p = Pwl1D::new(xs.clone(), xs.iter().map(|&x| f(nl, x)).collect())?;
            encode_pwl1d(m, name, &p, den, out, Direction::Exact)?;
            RatioModel::Curve(p)
        }
        (true, true) => {
            let s = build_simplex_surface(f, (nl, nh), (dl, dh), grid.0, grid.1)?;
            encode_simplex_surface(m, name, &s, num, den, out)?;
            RatioModel::Surface(s)
        }
    };
    Ok((out, model))
}

/// `eta = H_prod / P_el` on the box of the two inputs.
pub fn build_efficiency(
    m: &mut MilpModel,
    h_dot: Var,
    p_el: Var,
    grid: (usize, usize),
) -> Result<(Var, RatioModel), ObjectiveError> {
    encode_ratio(m, "obj.eta", h_dot, p_el, 1.0, grid)
}

/// `c_prod = TAC / (t * m_prod)`, €/kg.
pub fn build_production_cost(
    m: &mut MilpModel,
    c: &CaseDefinition,
    tac: Var,
    m_prod: Var,
    grid: (usize, usize),
) -> Result<(Var, RatioModel), ObjectiveError> {
    encode_ratio(m, "obj.cprod", tac, m_prod, c.economics.t_full_load, grid)
}

/// Every objective quantity. Without `boxes` the ratio surfaces are left
/// out, which is what single-objective bound solves need.
pub fn build_objectives(
    m: &mut MilpModel,
    c: &CaseDefinition,
    hen: &HenBlock,
    boxes: Option<&RatioBoxes>,
    grids: RatioGrids,
) -> Result<ObjectiveBundle, ObjectiveError> {
    let p_el_var = build_p_el(m, c, hen)?;
    let perf = &c.performance;
    let (hl, hh) = expr_range(hen, &perf.h_dot_prod);
    let h_dot_var = defined_var(m, "obj.h_dot", hen.expr_of(|u| perf.h_dot_prod.eval(u)), hl, hh)?;
    let (ml, mh) = expr_range(hen, &perf.m_prod_total);
    let m_prod_var = defined_var(m, "obj.m_prod", hen.expr_of(|u| perf.m_prod_total.eval(u)), ml, mh)?;

    let (capex_sys_expr, capex_hen_expr) = build_capex(c, hen);
    let opex_expr = build_opex(c, hen, p_el_var);
    let p_box = (m.variable(p_el_var).lower, m.variable(p_el_var).upper);
    let (ol, oh) = opex_range(c, hen, p_box);
    let net_max: f64 = c.economics.af_hen()
        * (hen.matches.iter().map(|mv| m.variable(mv.area_cost).upper).sum::<f64>()
            + hen.utilities.iter().map(|uv| m.variable(uv.area_cost).upper).sum::<f64>()
            + c.economics.c_f_hex * (hen.matches.len() + hen.utilities.len()) as f64);
    let sys = capex_sys_expr.constant_part();
    let tac_var = defined_var(
        m,
        "obj.tac",
        capex_sys_expr.clone() + capex_hen_expr.clone() + opex_expr.clone(),
        sys + ol,
        sys + net_max + oh,
    )?;

    let (mut eta_var, mut cprod_var, mut eta_surface, mut cprod_surface) = (None, None, None, None);
    if let Some(b) = boxes {
        narrow(m, p_el_var, b.p_el.0, b.p_el.1)?;
        narrow(m, tac_var, b.tac.0, b.tac.1)?;
        let (e, es) = build_efficiency(m, h_dot_var, p_el_var, grids.eta)?;
        let (cp, cs) = build_production_cost(m, c, tac_var, m_prod_var, grids.c_prod)?;
        eta_var = Some(e);
        cprod_var = Some(cp);
        eta_surface = Some(es);
        cprod_surface = Some(cs);
    }
    Ok(ObjectiveBundle {
        eta_var,
        cprod_var,
        p_el_var,
        h_dot_var,
        tac_var,
        m_prod_var,
        capex_hen_expr,
        capex_sys_expr,
        opex_expr,
        eta_surface,
        cprod_surface,
    })
}
