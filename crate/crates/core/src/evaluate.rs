//! Exact evaluation of a network design: no surfaces, no envelopes.

use std::path::Path;

use serde::Serialize;

use crate::area::{match_u, AreaCostLaw};
use crate::case::{CaseDefinition, CaseError};
use crate::hen::{HenDesign, UtilityKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub u: f64,
    pub eta: f64,
    pub c_prod: f64,
    pub p_el: f64,
    pub h_dot: f64,
    pub m_prod: f64,
    pub capex_sys: f64,
    pub capex_hen: f64,
    pub opex: f64,
    pub tac: f64,
    pub hex_count: usize,
    pub sum_q: f64,
    pub sum_q_cu: f64,
    pub sum_q_hu: f64,
    pub area_cost: f64,
}

pub fn p_el_at(c: &CaseDefinition, u: f64, q_hu: f64, q_cu: f64) -> f64 {
    c.performance.p_sys.eval(u) + c.economics.eps_hu * q_hu + c.economics.eps_cu * q_cu
}

pub fn opex_at(c: &CaseDefinition, u: f64, p_el: f64) -> f64 {
    let e = &c.economics;
    let feed: f64 = e.c_feedstock.iter().zip(&c.performance.feed_flows).map(|((_, p), f)| p * f.eval(u)).sum();
    e.af_op * e.t_full_load * (feed + e.c_el / 1000.0 * p_el)
}

/// Mass flow implied by a cost and a specific cost, kg/h.
pub fn product_flow_from_cost(tac: f64, c_prod: f64, t_full_load: f64) -> f64 {
    tac / (c_prod * t_full_load)
}

pub fn evaluate_design(c: &CaseDefinition, d: &HenDesign) -> Evaluation {
    let e = &c.economics;
    let u = d.u;
    let law = AreaCostLaw { c_v: e.c_v_hex, beta: e.beta };
    let coeff = |id: &str| c.stream(id).map_or(f64::NAN, |s| s.u_coeff);
    let mut area_cost: f64 =
        d.matches.iter().map(|r| law.cost(r.duty, match_u(coeff(&r.hot), coeff(&r.cold)), r.dt_hot_end, r.dt_cold_end)).sum();
    for r in &d.utilities {
        let util = match r.kind {
            UtilityKind::Cold => &c.hen_config.cold_utility,
            UtilityKind::Hot => &c.hen_config.hot_utility,
        };
        area_cost += law.cost(r.duty, match_u(coeff(&r.stream), util.u_coeff), r.dt_hot_end, r.dt_cold_end);
    }
    let hex_count = d.matches.len() + d.utilities.len();
    let sum_q_cu = d.sum_utility(UtilityKind::Cold);
    let sum_q_hu = d.sum_utility(UtilityKind::Hot);
    let p_el = p_el_at(c, u, sum_q_hu, sum_q_cu);
    let h_dot = c.performance.h_dot_prod.eval(u);
    let m_prod = c.performance.m_prod_total.eval(u);
    let capex_sys = e.af_inv * e.c_sys;
    let capex_hen = e.af_hen() * (area_cost + e.c_f_hex * hex_count as f64);
    let opex = opex_at(c, u, p_el);
    let tac = capex_sys + capex_hen + opex;
    Evaluation {
        u,
        eta: h_dot / p_el,
        c_prod: tac / (e.t_full_load * m_prod),
        p_el,
        h_dot,
        m_prod,
        capex_sys,
        capex_hen,
        opex,
        tac,
        hex_count,
        sum_q: d.sum_match_duty(),
        sum_q_cu,
        sum_q_hu,
        area_cost,
    }
}

/// Reads a fixed design (operating point, waste-heat settings, matches and
/// utilities with their approach temperatures) and fills in the areas.
pub fn load_design(path: &Path, c: &CaseDefinition) -> Result<HenDesign, CaseError> {
    let text = std::fs::read_to_string(path).map_err(|source| CaseError::Io { path: path.into(), source })?;
    let mut d: HenDesign = serde_json::from_str(&text).map_err(|e| CaseError::Schema(format!("{}: {e}", path.display())))?;
    if !c.opvar.contains(d.u) {
        return Err(CaseError::Domain(format!("design operating point {} outside [{}, {}]", d.u, c.opvar.lower, c.opvar.upper)));
    }
    d.complete(c).map_err(|e| CaseError::Schema(e.to_string()))?;
    Ok(d)
}
