//! Stage-wise heat exchanger network superstructure with stream parameters
//! that follow the operating variable.
//!
//! Temperatures live at stage boundaries (locations `0..=N`): hot-side
//! streams enter at location 0, cold streams at location N, and stage `k`
//! (1-based) sits between locations `k - 1` and `k`. Coolers sit after the
//! last location of a hot stream, heaters after location 0 of a cold one.
//! Waste-heat streams (`cs`) have a free flow and outlet temperature and get
//! no utility.

use std::fmt;

use henopt_milp::{LinExpr, MilpModel, Relation, Solution, Var};
use log::debug;
use serde::{Deserialize, Serialize};

use crate::area::{area, chen_lmtd, match_u, AreaCostLaw, EnvelopeCache};
use crate::case::{CaseDefinition, ParamModel, StreamDef, StreamKind};
use crate::encode::{
    bilinear_error_bound, encode_bilinear_product, encode_simplex_surface, encode_switched_plane_envelope,
    AxisBlock, EncodeError,
};
use crate::pwl::{build_simplex_surface, PwlError};

#[derive(Debug)]
pub enum HenError {
    Encode(EncodeError),
    Domain(String),
    /// The solution handed to extraction carries no values.
    NoSolution,
}

impl fmt::Display for HenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HenError::Encode(e) => write!(f, "{e}"),
            HenError::Domain(m) => write!(f, "domain error: {m}"),
            HenError::NoSolution => write!(f, "solution has no values to extract"),
        }
    }
}

impl std::error::Error for HenError {}

impl From<EncodeError> for HenError {
    fn from(e: EncodeError) -> Self {
        HenError::Encode(e)
    }
}

impl From<henopt_milp::ModelError> for HenError {
    fn from(e: henopt_milp::ModelError) -> Self {
        HenError::Encode(EncodeError::Model(e))
    }
}

impl From<PwlError> for HenError {
    fn from(e: PwlError) -> Self {
        HenError::Encode(EncodeError::Pwl(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpMode {
    Coupled,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct HenOptions {
    /// Points of the shared operating-variable grid in coupled mode.
    pub axis_points: usize,
    /// Grid of the `F(u) * drop` stage surfaces, `(u, drop)`.
    pub stage_grid: (usize, usize),
    /// Grid of the `F * drop` surfaces of free-flow streams.
    pub cs_grid: (usize, usize),
    pub prune_pairs: bool,
}

impl Default for HenOptions {
    fn default() -> Self {
        HenOptions { axis_points: 7, stage_grid: (3, 3), cs_grid: (5, 5), prune_pairs: true }
    }
}

/// Parameter ranges of one stream over the operating range in use.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamBounds {
    pub t_in: (f64, f64),
    pub t_out: (f64, f64),
    pub f: (f64, f64),
    pub duty_max: f64,
    /// Coldest and hottest temperature the stream can take.
    pub t_lo: f64,
    pub t_hi: f64,
}

impl StreamBounds {
    pub fn span(&self) -> f64 {
        self.t_hi - self.t_lo
    }
}

pub fn stream_bounds(s: &StreamDef, lo: f64, hi: f64) -> StreamBounds {
    let t_in = s.t_in.range_over(lo, hi);
    let t_out = s.t_out.range_over(lo, hi);
    let f = s.f.range_over(lo, hi);
    let duty_max = if s.f.is_free() || s.t_out.is_free() || s.t_in.is_free() {
        f.1 * (t_in.1 - t_out.0).abs().max((t_out.1 - t_in.0).abs())
    } else {
        let n = if hi > lo { 61 } else { 1 };
        (0..n)
            .map(|k| {
                let u = if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
                s.f.at(u).unwrap() * (s.t_in.at(u).unwrap() - s.t_out.at(u).unwrap()).abs()
            })
            .fold(0.0, f64::max)
    };
    let (t_lo, t_hi) = if s.kind.is_hot_side() { (t_out.0, t_in.1) } else { (t_in.0, t_out.1) };
    StreamBounds { t_in, t_out, f, duty_max, t_lo, t_hi }
}

/// Upper bound on the duty of one match: the smaller of the two largest
/// stream duties over `[lo, hi]`.
pub fn big_m_for_pair(i: &StreamDef, j: &StreamDef, lo: f64, hi: f64) -> f64 {
    stream_bounds(i, lo, hi).duty_max.min(stream_bounds(j, lo, hi).duty_max)
}

/// Relaxation constant for the approach constraints of a pair: large enough
/// that `dt <= t_hot - t_cold + gamma` holds for any temperatures when the
/// match is off.
pub fn approach_gamma(hot: &StreamBounds, cold: &StreamBounds) -> f64 {
    let dt_max = hot.t_hi - cold.t_lo;
    (dt_max - (hot.t_lo - cold.t_hi)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityKind {
    Cold,
    Hot,
}

#[derive(Debug, Clone)]
pub struct CsVars {
    pub t_out: Var,
    pub f: Var,
}

#[derive(Debug, Clone)]
pub struct StreamVars {
    /// Index into `CaseDefinition::streams`.
    pub stream: usize,
    pub kind: StreamKind,
    pub temps: Vec<Var>,
    pub drops: Vec<Var>,
    pub stage_duty: Vec<Var>,
    pub bounds: StreamBounds,
    /// Largest total deviation of the stage duties from `F * drop`.
    pub stage_error: f64,
    pub cs: Option<CsVars>,
}

#[derive(Debug, Clone)]
pub struct PairVars {
    /// Indices into `HenBlock::streams`.
    pub hot: usize,
    pub cold: usize,
    pub dt: Vec<Var>,
    pub big_m: f64,
    pub gamma: f64,
    pub u: f64,
}

#[derive(Debug, Clone)]
pub struct MatchVars {
    pub pair: usize,
    pub hot: usize,
    pub cold: usize,
    pub stage: usize,
    pub q: Var,
    pub z: Var,
    pub area_cost: Var,
}

#[derive(Debug, Clone)]
pub struct UtilityVars {
    pub stream: usize,
    pub kind: UtilityKind,
    pub q: Var,
    pub z: Var,
    pub dt: Var,
    pub area_cost: Var,
    pub u: f64,
}

#[derive(Debug, Clone)]
pub struct HenBlock {
    pub mode: OpMode,
    pub opvar: Var,
    pub axis: Option<AxisBlock>,
    pub n_stages: usize,
    pub dt_min: f64,
    pub streams: Vec<StreamVars>,
    pub pairs: Vec<PairVars>,
    pub matches: Vec<MatchVars>,
    pub utilities: Vec<UtilityVars>,
    pub range: (f64, f64),
}

impl HenBlock {
    /// `g(u)` as a linear expression: interpolated on the shared grid in
    /// coupled mode, a constant in fixed mode.
    pub fn expr_of<G: Fn(f64) -> f64>(&self, g: G) -> LinExpr {
        match (&self.axis, self.mode) {
            (Some(axis), _) => axis.expr(g),
            (None, OpMode::Fixed(u)) => LinExpr::constant(g(u)),
            (None, OpMode::Coupled) => LinExpr::constant(g(self.range.0)),
        }
    }

    pub fn param_expr(&self, p: &ParamModel) -> LinExpr {
        match p {
            ParamModel::Constant(v) => LinExpr::constant(*v),
            ParamModel::Pwl(pw) => self.expr_of(|u| pw.eval(u)),
            ParamModel::Free { .. } => unreachable!("free parameters have their own variables"),
        }
    }

    pub fn utility_sum(&self, kind: UtilityKind) -> LinExpr {
        LinExpr::sum(self.utilities.iter().filter(|u| u.kind == kind).map(|u| (u.q, 1.0)))
    }

    /// Sum of every existence binary (matches and utilities).
    pub fn exchanger_count(&self) -> LinExpr {
        LinExpr::sum(self.matches.iter().map(|m| (m.z, 1.0)).chain(self.utilities.iter().map(|u| (u.z, 1.0))))
    }

    pub fn area_cost(&self) -> LinExpr {
        LinExpr::sum(
            self.matches.iter().map(|m| (m.area_cost, 1.0)).chain(self.utilities.iter().map(|u| (u.area_cost, 1.0))),
        )
    }

    pub fn binaries(&self) -> impl Iterator<Item = Var> + '_ {
        self.matches.iter().map(|m| m.z).chain(self.utilities.iter().map(|u| u.z))
    }
}

fn stream_duty(s: &StreamDef, u: f64) -> f64 {
    s.f.at(u).unwrap() * (s.t_in.at(u).unwrap() - s.t_out.at(u).unwrap()).abs()
}

fn axis_breakpoints(c: &CaseDefinition, n: usize) -> Vec<f64> {
    let (lo, hi) = (c.opvar.lower, c.opvar.upper);
    let mut pts = c.opvar.grid(n);
    let mut add = |p: &ParamModel| {
        if let ParamModel::Pwl(pw) = p {
            pts.extend(pw.breakpoints().iter().copied());
        }
    };
    for s in &c.streams {
        add(&s.t_in);
        add(&s.t_out);
        add(&s.f);
    }
    let perf = &c.performance;
    for p in [&perf.p_sys, &perf.m_prod_total, &perf.h_dot_prod].into_iter().chain(&perf.feed_flows) {
        pts.extend(p.breakpoints().iter().copied());
    }
    let tol = 1e-9 * (hi - lo).abs().max(1e-12);
    pts.retain(|&x| x >= lo - tol && x <= hi + tol);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= tol);
    pts
}

pub fn build_hen(
    m: &mut MilpModel,
    c: &CaseDefinition,
    mode: OpMode,
    opts: &HenOptions,
    envelopes: &EnvelopeCache,
) -> Result<HenBlock, HenError> {
    let (lo, hi) = match mode {
        OpMode::Coupled => (c.opvar.lower, c.opvar.upper),
        OpMode::Fixed(u) => {
            if !c.opvar.contains(u) {
                return Err(HenError::Domain(format!(
                    "{} = {u} outside [{}, {}]",
                    c.opvar.name, c.opvar.lower, c.opvar.upper
                )));
            }
            (u, u)
        }
    };
    let n = c.hen_config.n_stages;
    let dt_min = c.hen_config.dt_min;
    if n == 0 {
        return Err(HenError::Domain("need at least one stage".into()));
    }
    let opvar = m.add_continuous(format!("op.{}", c.opvar.name), lo, hi)?;
    let axis = match mode {
        OpMode::Coupled if hi > lo => Some(AxisBlock::new(m, "axis", opvar, axis_breakpoints(c, opts.axis_points))?),
        _ => None,
    };
    let mut block = HenBlock {
        mode,
        opvar,
        axis,
        n_stages: n,
        dt_min,
        streams: Vec::new(),
        pairs: Vec::new(),
        matches: Vec::new(),
        utilities: Vec::new(),
        range: (lo, hi),
    };

    let all_bounds: Vec<StreamBounds> = c.streams.iter().map(|s| stream_bounds(s, lo, hi)).collect();
    let cold_total: f64 =
        c.streams.iter().zip(&all_bounds).filter(|(s, _)| s.kind == StreamKind::Cold).map(|(_, b)| b.duty_max).sum();
    let hot_total: f64 = c
        .streams
        .iter()
        .zip(&all_bounds)
        .filter(|(s, _)| s.kind.is_hot_side())
        .map(|(_, b)| b.duty_max)
        .sum();

    for (si, s) in c.streams.iter().enumerate() {
        let mut b = all_bounds[si].clone();
        let id = &s.id;
        let hot = s.kind.is_hot_side();
        let mut drop_max = b.span();
        if s.kind == StreamKind::Cs {
            b.duty_max = b.duty_max.min(cold_total);
            if b.f.0 > 0.0 {
                drop_max = drop_max.min(cold_total / b.f.0);
            }
        }
        let temps: Vec<Var> =
            (0..=n).map(|l| m.add_continuous(format!("t.{id}.{l}"), b.t_lo, b.t_hi)).collect::<Result<_, _>>()?;
        let drops: Vec<Var> =
            (1..=n).map(|k| m.add_continuous(format!("d.{id}.{k}"), 0.0, drop_max)).collect::<Result<_, _>>()?;
        for k in 1..=n {
            m.add_constraint(format!("drop.{id}.{k}"), temps[k - 1] - temps[k] - drops[k - 1], Relation::Eq, 0.0)?;
        }
        let stage_duty: Vec<Var> = (1..=n)
            .map(|k| m.add_continuous(format!("y.{id}.{k}"), 0.0, b.f.1 * drop_max))
            .collect::<Result<_, _>>()?;

        let mut stage_error = 0.0;
        let mut cs = None;
        if s.kind == StreamKind::Cs {
            let t_in = block.param_expr(&s.t_in);
            m.add_constraint(format!("inlet.{id}"), t_in - temps[0], Relation::Eq, 0.0)?;
            let t_out = m.add_continuous(format!("cs.tout.{id}"), b.t_out.0, b.t_out.1)?;
            let f = m.add_continuous(format!("cs.f.{id}"), b.f.0, b.f.1)?;
            m.add_constraint(format!("outlet.{id}"), temps[n] - t_out, Relation::Eq, 0.0)?;
            for k in 0..n {
                encode_bilinear_product(m, &format!("sd.{id}.{}", k + 1), f, drops[k], stage_duty[k], opts.cs_grid)?;
                if b.f.1 > b.f.0 {
                    stage_error += bilinear_error_bound(b.f, (0.0, drop_max), opts.cs_grid);
                }
            }
            cs = Some(CsVars { t_out, f });
        } else {
            let (inlet, outlet) = if hot { (0, n) } else { (n, 0) };
            let t_in = block.param_expr(&s.t_in);
            let t_out = block.param_expr(&s.t_out);
            m.add_constraint(format!("inlet.{id}"), t_in - temps[inlet], Relation::Eq, 0.0)?;
            if hot {
                m.add_constraint(format!("outlet.{id}"), temps[outlet] - t_out, Relation::Ge, 0.0)?;
            } else {
                m.add_constraint(format!("outlet.{id}"), t_out - temps[outlet], Relation::Ge, 0.0)?;
            }
            let f_param = &s.f;
            let f_varies = f_param.depends_on_u() && block.axis.is_some();
            for k in 0..n {
                let name = format!("sd.{id}.{}", k + 1);
                if f_varies {
                    let ParamModel::Pwl(fp) = f_param else { unreachable!() };
                    let surf = build_simplex_surface(
                        |u, d| fp.eval(u) * d,
                        (lo, hi),
                        (0.0, drop_max),
                        opts.stage_grid.0,
                        opts.stage_grid.1,
                    )?;
                    encode_simplex_surface(m, &name, &surf, opvar, drops[k], stage_duty[k])?;
                    stage_error += surf.max_abs_error.max(bilinear_error_bound(b.f, (0.0, drop_max), opts.stage_grid));
                } else {
                    let fv = f_param.at(lo).unwrap();
                    m.add_constraint(name, stage_duty[k] - fv * drops[k], Relation::Eq, 0.0)?;
                }
            }
        }
        block.streams.push(StreamVars { stream: si, kind: s.kind, temps, drops, stage_duty, bounds: b, stage_error, cs });
    }

    // utilities at the stream ends
    let law = AreaCostLaw { c_v: c.economics.c_v_hex, beta: c.economics.beta };
    for (bi, sv) in block.streams.iter().enumerate() {
        let s = &c.streams[sv.stream];
        let b = &sv.bounds;
        let (kind, util) = match s.kind {
            StreamKind::Hot => (UtilityKind::Cold, &c.hen_config.cold_utility),
            StreamKind::Cold => (UtilityKind::Hot, &c.hen_config.hot_utility),
            StreamKind::Cs => continue,
        };
        if b.duty_max <= 0.0 {
            continue;
        }
        let mid = |p: &ParamModel| {
            let (a, z) = p.range_over(lo, hi);
            0.5 * (a + z)
        };
        // `dt` is the variable end: stream at its last location against the
        // utility outlet. The other end is fixed by the stream target.
        let (dt_lo_data, dt_hi, dt_other) = match kind {
            UtilityKind::Cold => (b.t_out.0 - util.t_out, b.t_hi - util.t_out, mid(&s.t_out) - util.t_in),
            UtilityKind::Hot => (util.t_out - b.t_out.1, util.t_out - b.t_lo, util.t_in - mid(&s.t_out)),
        };
        let dt_other_worst = match kind {
            UtilityKind::Cold => b.t_out.0 - util.t_in,
            UtilityKind::Hot => util.t_in - b.t_out.1,
        };
        if dt_other_worst < dt_min || dt_hi < dt_min {
            debug!("no {kind:?} utility for {}: approach below minimum", s.id);
            continue;
        }
        let id = &s.id;
        let tag = match kind {
            UtilityKind::Cold => "cu",
            UtilityKind::Hot => "hu",
        };
        let q = m.add_continuous(format!("{tag}.q.{id}"), 0.0, b.duty_max)?;
        let z = m.add_binary(format!("{tag}.z.{id}"))?;
        let dt = m.add_continuous(format!("{tag}.dt.{id}"), dt_min, dt_hi)?;
        m.add_constraint(format!("{tag}.on.{id}"), q - b.duty_max * z, Relation::Le, 0.0)?;
        let gamma = (dt_min - dt_lo_data).max(0.0);
        let end = match kind {
            UtilityKind::Cold => LinExpr::from(sv.temps[block.n_stages]) - util.t_out,
            UtilityKind::Hot => LinExpr::constant(util.t_out) - sv.temps[0],
        };
        m.add_constraint(format!("{tag}.app.{id}"), LinExpr::from(dt) - end + gamma * z, Relation::Le, gamma)?;
        let u = match_u(s.u_coeff, util.u_coeff);
        let env = envelopes.utility_envelope(law, u, b.duty_max, dt_min, dt_hi, dt_other)?;
        let cap = env.planes.iter().map(|p| p.max_over_box(&[(0.0, b.duty_max), (dt_min, dt_hi)])).fold(0.0, f64::max);
        let area_cost = m.add_continuous(format!("{tag}.cost.{id}"), 0.0, cap)?;
        encode_switched_plane_envelope(m, &format!("{tag}.env.{id}"), &env, &[q, dt], area_cost, z)?;
        block.utilities.push(UtilityVars { stream: bi, kind, q, z, dt, area_cost, u });
    }

    // overall balances
    for sv in &block.streams {
        let s = &c.streams[sv.stream];
        if s.kind == StreamKind::Cs {
            continue;
        }
        let id = &s.id;
        let mut lhs = LinExpr::sum(sv.stage_duty.iter().map(|&y| (y, 1.0)));
        for u in block.utilities.iter().filter(|u| block.streams[u.stream].stream == sv.stream) {
            lhs.add_term(u.q, 1.0);
        }
        let total = block.expr_of(|u| stream_duty(s, u));
        m.add_constraint(format!("balance.{id}"), lhs - total, Relation::Eq, 0.0)?;
    }

    // process matches
    let hot_idx: Vec<usize> = (0..block.streams.len()).filter(|&i| block.streams[i].kind.is_hot_side()).collect();
    let cold_idx: Vec<usize> = (0..block.streams.len()).filter(|&i| block.streams[i].kind == StreamKind::Cold).collect();
    for &hi_ in &hot_idx {
        for &ci in &cold_idx {
            let (hs, cs_) = (&block.streams[hi_], &block.streams[ci]);
            let (hb, cb) = (&hs.bounds, &cs_.bounds);
            if opts.prune_pairs && hb.t_hi <= cb.t_lo + dt_min {
                continue;
            }
            let (hdef, cdef) = (&c.streams[hs.stream], &c.streams[cs_.stream]);
            let big_m = hb.duty_max.min(cb.duty_max).min(hot_total).min(cold_total);
            if big_m <= 0.0 {
                continue;
            }
            let dt_hi = (hb.t_hi - cb.t_lo).max(dt_min);
            let gamma = approach_gamma(hb, cb);
            let u = match_u(hdef.u_coeff, cdef.u_coeff);
            let tag = format!("{}.{}", hdef.id, cdef.id);
            let dt: Vec<Var> = (0..=n)
                .map(|l| m.add_continuous(format!("dt.{tag}.{l}"), dt_min, dt_hi))
                .collect::<Result<_, _>>()?;
            let env = envelopes.match_envelope(law, u, big_m, dt_min, dt_hi)?;
            let boxb = [(0.0, big_m), (dt_min, dt_hi), (dt_min, dt_hi)];
            let cap = env.planes.iter().map(|p| p.max_over_box(&boxb)).fold(0.0, f64::max);
            let pair = block.pairs.len();
            let (ht, ct) = (hs.temps.clone(), cs_.temps.clone());
            for k in 1..=n {
                let q = m.add_continuous(format!("q.{tag}.{k}"), 0.0, big_m)?;
                let z = m.add_binary(format!("z.{tag}.{k}"))?;
                m.add_constraint(format!("on.{tag}.{k}"), q - big_m * z, Relation::Le, 0.0)?;
                for (end, l) in [("h", k - 1), ("c", k)] {
                    m.add_constraint(
                        format!("app{end}.{tag}.{k}"),
                        dt[l] - ht[l] + ct[l] + gamma * z,
                        Relation::Le,
                        gamma,
                    )?;
                }
                let area_cost = m.add_continuous(format!("cost.{tag}.{k}"), 0.0, cap)?;
                encode_switched_plane_envelope(m, &format!("env.{tag}.{k}"), &env, &[q, dt[k - 1], dt[k]], area_cost, z)?;
                block.matches.push(MatchVars { pair, hot: hi_, cold: ci, stage: k, q, z, area_cost });
            }
            block.pairs.push(PairVars { hot: hi_, cold: ci, dt, big_m, gamma, u });
        }
    }

    // stage balances
    for (si, sv) in block.streams.iter().enumerate() {
        for k in 1..=n {
            let mut e = LinExpr::from(sv.stage_duty[k - 1]);
            for mv in block.matches.iter().filter(|mv| mv.stage == k && (mv.hot == si || mv.cold == si)) {
                e.add_term(mv.q, -1.0);
            }
            m.add_constraint(format!("stage.{}.{k}", c.streams[sv.stream].id), e, Relation::Eq, 0.0)?;
        }
    }
    debug!(
        "network block: {} pairs, {} matches, {} utilities, {} binaries in model",
        block.pairs.len(),
        block.matches.len(),
        block.utilities.len(),
        m.num_binaries()
    );
    Ok(block)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub hot: String,
    pub cold: String,
    pub stage: usize,
    pub duty: f64,
    pub dt_hot_end: f64,
    pub dt_cold_end: f64,
    #[serde(default)]
    pub area: f64,
    #[serde(default)]
    pub lmtd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityRecord {
    pub stream: String,
    pub kind: UtilityKind,
    pub duty: f64,
    pub dt_hot_end: f64,
    pub dt_cold_end: f64,
    #[serde(default)]
    pub area: f64,
    #[serde(default)]
    pub lmtd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsSetting {
    pub id: String,
    pub t_out: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenDesign {
    pub u: f64,
    pub matches: Vec<MatchRecord>,
    pub utilities: Vec<UtilityRecord>,
    pub cs: Vec<CsSetting>,
    #[serde(default)]
    pub hex_count: usize,
    /// Matches switched on with a negligible duty.
    #[serde(default)]
    pub spurious: Vec<(String, String, usize)>,
    /// Stage-boundary temperatures per stream, locations `0..=N`.
    #[serde(default)]
    pub temperatures: Vec<(String, Vec<f64>)>,
}

pub const DUTY_THRESHOLD: f64 = 1e-3;

impl HenDesign {
    pub fn sum_match_duty(&self) -> f64 {
        self.matches.iter().map(|m| m.duty).sum()
    }

    pub fn sum_utility(&self, kind: UtilityKind) -> f64 {
        self.utilities.iter().filter(|u| u.kind == kind).map(|u| u.duty).sum()
    }

    /// Fills in LMTD, area and the exchanger count from the duties and
    /// approach temperatures.
    pub fn complete(&mut self, c: &CaseDefinition) -> Result<(), HenError> {
        let coeff = |id: &str| {
            c.stream(id).map(|s| s.u_coeff).ok_or_else(|| HenError::Domain(format!("unknown stream `{id}`")))
        };
        for r in &mut self.matches {
            let u = match_u(coeff(&r.hot)?, coeff(&r.cold)?);
            r.lmtd = chen_lmtd(r.dt_hot_end, r.dt_cold_end);
            r.area = area(r.duty, u, r.dt_hot_end, r.dt_cold_end);
        }
        for r in &mut self.utilities {
            let util = match r.kind {
                UtilityKind::Cold => &c.hen_config.cold_utility,
                UtilityKind::Hot => &c.hen_config.hot_utility,
            };
            let u = match_u(coeff(&r.stream)?, util.u_coeff);
            r.lmtd = chen_lmtd(r.dt_hot_end, r.dt_cold_end);
            r.area = area(r.duty, u, r.dt_hot_end, r.dt_cold_end);
        }
        self.hex_count = self.matches.len() + self.utilities.len();
        Ok(())
    }
}

pub fn extract_design(sol: &Solution, h: &HenBlock, c: &CaseDefinition) -> Result<HenDesign, HenError> {
    if !sol.status.has_solution() || sol.values.is_empty() {
        return Err(HenError::NoSolution);
    }
    let v = |x: Var| sol.value(x);
    let u = v(h.opvar);
    let id = |bi: usize| c.streams[h.streams[bi].stream].id.clone();
    let mut design = HenDesign {
        u,
        matches: Vec::new(),
        utilities: Vec::new(),
        cs: Vec::new(),
        hex_count: 0,
        spurious: Vec::new(),
        temperatures: Vec::new(),
    };
    for mv in &h.matches {
        if v(mv.z) <= 0.5 {
            continue;
        }
        let q = v(mv.q);
        if q < DUTY_THRESHOLD {
            design.spurious.push((id(mv.hot), id(mv.cold), mv.stage));
            continue;
        }
        let (ht, ct) = (&h.streams[mv.hot].temps, &h.streams[mv.cold].temps);
        design.matches.push(MatchRecord {
            hot: id(mv.hot),
            cold: id(mv.cold),
            stage: mv.stage,
            duty: q,
            dt_hot_end: v(ht[mv.stage - 1]) - v(ct[mv.stage - 1]),
            dt_cold_end: v(ht[mv.stage]) - v(ct[mv.stage]),
            area: 0.0,
            lmtd: 0.0,
        });
    }
    for uv in &h.utilities {
        let q = v(uv.q);
        if v(uv.z) <= 0.5 || q < DUTY_THRESHOLD {
            continue;
        }
        let sv = &h.streams[uv.stream];
        let s = &c.streams[sv.stream];
        let t_out = s.t_out.at(u).unwrap();
        let (dt_hot_end, dt_cold_end) = match uv.kind {
            UtilityKind::Cold => {
                let cu = &c.hen_config.cold_utility;
                (v(sv.temps[h.n_stages]) - cu.t_out, t_out - cu.t_in)
            }
            UtilityKind::Hot => {
                let hu = &c.hen_config.hot_utility;
                (hu.t_in - t_out, hu.t_out - v(sv.temps[0]))
            }
        };
        design.utilities.push(UtilityRecord {
            stream: s.id.clone(),
            kind: uv.kind,
            duty: q,
            dt_hot_end,
            dt_cold_end,
            area: 0.0,
            lmtd: 0.0,
        });
    }
    for sv in &h.streams {
        let s = &c.streams[sv.stream];
        if let Some(cs) = &sv.cs {
            design.cs.push(CsSetting { id: s.id.clone(), t_out: v(cs.t_out), f: v(cs.f) });
        }
        design.temperatures.push((s.id.clone(), sv.temps.iter().map(|&t| v(t)).collect()));
    }
    design.complete(c)?;
    Ok(design)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub subject: String,
    pub amount: f64,
}

/// Post-solve structural checks: stream balances, minimum approach at
/// active matches, zero duty at inactive matches, monotone temperatures.
pub fn check_solution(sol: &Solution, h: &HenBlock, c: &CaseDefinition) -> Vec<Violation> {
    let v = |x: Var| sol.value(x);
    let u = v(h.opvar);
    let mut out = Vec::new();
    let id = |bi: usize| c.streams[h.streams[bi].stream].id.clone();
    for (bi, sv) in h.streams.iter().enumerate() {
        let s = &c.streams[sv.stream];
        let exchanged: f64 =
            h.matches.iter().filter(|mv| mv.hot == bi || mv.cold == bi).map(|mv| v(mv.q)).sum::<f64>();
        let util: f64 = h.utilities.iter().filter(|uv| uv.stream == bi).map(|uv| v(uv.q)).sum();
        let (target, tol) = match &sv.cs {
            Some(cs) => {
                let q = v(cs.f) * (s.t_in.at(u).unwrap() - v(cs.t_out));
                (q, sv.stage_error + 1e-6 * q.abs() + 1e-6)
            }
            None => {
                let exact = stream_duty(s, u);
                let interp = h.expr_of(|x| stream_duty(s, x)).eval(&sol.values);
                (exact, (interp - exact).abs() + 1e-6 * exact.abs() + 1e-6)
            }
        };
        let resid = (exchanged + util - target).abs();
        if resid > tol {
            out.push(Violation { check: "balance", subject: s.id.clone(), amount: resid - tol });
        }
        if sv.cs.is_none() {
            // temperatures against the duty actually exchanged
            let t = |l: usize| v(sv.temps[l]);
            let f = s.f.at(u).unwrap();
            let drop = (t(0) - t(h.n_stages)).abs();
            let resid = (f * drop - exchanged).abs();
            let tol = sv.stage_error + 1e-6 * exchanged.abs() + 1e-6;
            if resid > tol {
                out.push(Violation { check: "stage balance", subject: s.id.clone(), amount: resid - tol });
            }
        }
        for l in 0..h.n_stages {
            let d = v(sv.temps[l + 1]) - v(sv.temps[l]);
            if d > 1e-6 {
                out.push(Violation { check: "monotone", subject: format!("{} location {l}", s.id), amount: d });
            }
        }
    }
    for mv in &h.matches {
        let tag = format!("{}-{} stage {}", id(mv.hot), id(mv.cold), mv.stage);
        if v(mv.z) > 0.5 {
            let (ht, ct) = (&h.streams[mv.hot].temps, &h.streams[mv.cold].temps);
            for l in [mv.stage - 1, mv.stage] {
                let app = v(ht[l]) - v(ct[l]);
                if app < h.dt_min - 1e-6 {
                    out.push(Violation { check: "approach", subject: tag.clone(), amount: h.dt_min - app });
                }
            }
        } else if v(mv.q) > 1e-9 {
            out.push(Violation { check: "inactive duty", subject: tag, amount: v(mv.q) });
        }
    }
    for uv in &h.utilities {
        if v(uv.z) <= 0.5 && v(uv.q) > 1e-9 {
            out.push(Violation { check: "inactive duty", subject: format!("utility {}", id(uv.stream)), amount: v(uv.q) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::area::EnvelopeSettings;
    use crate::case::{parse_case, MINIMAL_CASE};
    use henopt_milp::{Backend, HighsBackend, SolveOptions};

    fn tiny() -> CaseDefinition {
        parse_case(MINIMAL_CASE).unwrap()
    }

    fn block(c: &CaseDefinition, mode: OpMode) -> (MilpModel, HenBlock) {
        let mut m = MilpModel::new();
        let cache = EnvelopeCache::new(EnvelopeSettings::default());
        let h = build_hen(&mut m, c, mode, &HenOptions::default(), &cache).unwrap();
        (m, h)
    }

    fn solve(m: &MilpModel) -> Solution {
        HighsBackend.solve(m, &SolveOptions::default().with_gap(1e-9)).unwrap()
    }

    #[test]
    fn recovery_of_one_pair_is_limited_by_the_targets() {
        let c = tiny();
        let (mut m, h) = block(&c, OpMode::Fixed(0.5));
        assert_eq!(h.matches.len(), 1);
        m.set_objective(LinExpr::term(h.matches[0].q, -1.0)).unwrap();
        let sol = solve(&m);
        assert!(sol.status.has_solution());
        assert!((sol.value(h.matches[0].q) - 100.0).abs() < 1e-6, "{}", sol.value(h.matches[0].q));
        for uv in &h.utilities {
            assert!(sol.value(uv.q) < 1e-6);
        }
        assert!(check_solution(&sol, &h, &c).is_empty());
    }

    #[test]
    fn no_matches_means_utilities_carry_the_loads() {
        let c = tiny();
        let (mut m, h) = block(&c, OpMode::Fixed(0.5));
        for mv in &h.matches {
            m.fix(mv.z, 0.0).unwrap();
        }
        m.set_objective(h.area_cost()).unwrap();
        let sol = solve(&m);
        let d = extract_design(&sol, &h, &c).unwrap();
        assert!(d.matches.is_empty());
        assert!((d.sum_utility(UtilityKind::Cold) - 100.0).abs() < 1e-6);
        assert!((d.sum_utility(UtilityKind::Hot) - 100.0).abs() < 1e-6);
        assert_eq!(d.hex_count, 2);
        assert!(check_solution(&sol, &h, &c).is_empty());
    }

    #[test]
    fn fixed_mode_has_no_axis() {
        let c = tiny();
        let (m, h) = block(&c, OpMode::Fixed(0.25));
        assert!(h.axis.is_none());
        assert_eq!(m.variable(h.opvar).lower, 0.25);
        assert_eq!(m.variable(h.opvar).upper, 0.25);
        assert_eq!(h.expr_of(|u| 4.0 * u).constant_part(), 1.0);
        let (_, hc) = block(&c, OpMode::Coupled);
        assert!(hc.axis.is_some());
    }

    #[test]
    fn operating_point_outside_range() {
        let c = tiny();
        let mut m = MilpModel::new();
        let cache = EnvelopeCache::new(EnvelopeSettings::default());
        let r = build_hen(&mut m, &c, OpMode::Fixed(1.5), &HenOptions::default(), &cache);
        assert!(matches!(r, Err(HenError::Domain(_))));
    }

    #[test]
    fn big_m_takes_the_smaller_duty() {
        let mut c = tiny();
        c.streams[1].f = ParamModel::Constant(0.4);
        assert_eq!(big_m_for_pair(&c.streams[0], &c.streams[1], 0.0, 1.0), 40.0);
        let rc = crate::case::load_case(std::path::Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/data/reference_case.json"
        )))
        .unwrap();
        let (h8, c4) = (rc.stream("H8").unwrap(), rc.stream("C4").unwrap());
        let m = big_m_for_pair(h8, c4, rc.opvar.lower, rc.opvar.upper);
        assert!((m - 94.4).abs() < 1e-9, "{m}");
    }

    #[test]
    fn gamma_relaxes_any_temperatures() {
        let c = tiny();
        let (h, k) = (stream_bounds(&c.streams[0], 0.0, 1.0), stream_bounds(&c.streams[1], 0.0, 1.0));
        let g = approach_gamma(&h, &k);
        let dt_max = h.t_hi - k.t_lo;
        for th in [h.t_lo, h.t_hi] {
            for tc in [k.t_lo, k.t_hi] {
                assert!(dt_max <= th - tc + g + 1e-12);
            }
        }
    }

    #[test]
    fn design_roundtrips_through_json() {
        let c = tiny();
        let (mut m, h) = block(&c, OpMode::Fixed(0.5));
        m.set_objective(LinExpr::term(h.matches[0].q, -1.0)).unwrap();
        let d = extract_design(&solve(&m), &h, &c).unwrap();
        let back: HenDesign = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
