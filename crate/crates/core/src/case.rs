//! Problem instance: streams, products, economics and performance curves.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::pwl::{fit_pwl_1d, Pwl1D, PwlError};

#[derive(Debug)]
pub enum CaseError {
    Io { path: PathBuf, source: std::io::Error },
    /// Document does not match the case schema; the message names the field.
    Schema(String),
    /// A model does not cover the operating range, or `u` lies outside it.
    Domain(String),
    Fit { what: String, source: PwlError },
}

impl fmt::Display for CaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CaseError::Schema(m) => write!(f, "schema error: {m}"),
            CaseError::Domain(m) => write!(f, "domain error: {m}"),
            CaseError::Fit { what, source } => write!(f, "fitting {what}: {source}"),
        }
    }
}

impl std::error::Error for CaseError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingVariable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl OperatingVariable {
    pub fn contains(&self, u: f64) -> bool {
        let tol = 1e-12 * (self.upper - self.lower).abs().max(1.0);
        u >= self.lower - tol && u <= self.upper + tol
    }

    /// `n` equally spaced points from `lower` to `upper`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.upper
                } else {
                    self.lower + (self.upper - self.lower) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamKind {
    Hot,
    Cold,
    Cs,
}

impl StreamKind {
    /// Streams that give off heat in the network.
    pub fn is_hot_side(self) -> bool {
        matches!(self, StreamKind::Hot | StreamKind::Cs)
    }
}

/// Dependence of one stream parameter on the operating variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "ParamSpec")]
pub enum ParamModel {
    Constant(f64),
    Pwl(Pwl1D),
    Free { lower: f64, upper: f64 },
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum ParamSpec {
    Constant(f64),
    Pwl(Pwl1D),
    Free { lower: f64, upper: f64 },
    Fit(FitSpec),
}

#[derive(Debug, Clone, Deserialize)]
struct FitSpec {
    samples: Vec<(f64, f64)>,
    rmse_target: f64,
}

impl TryFrom<ParamSpec> for ParamModel {
    type Error = PwlError;
    fn try_from(s: ParamSpec) -> Result<Self, PwlError> {
        Ok(match s {
            ParamSpec::Constant(v) => ParamModel::Constant(v),
            ParamSpec::Pwl(p) => ParamModel::Pwl(p),
            ParamSpec::Free { lower, upper } => ParamModel::Free { lower, upper },
            ParamSpec::Fit(f) => ParamModel::Pwl(fit_pwl_1d(&f.samples, f.rmse_target)?),
        })
    }
}

impl ParamModel {
    /// Value at `u`; `None` for free parameters.
    pub fn at(&self, u: f64) -> Option<f64> {
        match self {
            ParamModel::Constant(v) => Some(*v),
            ParamModel::Pwl(p) => Some(p.eval(u)),
            ParamModel::Free { .. } => None,
        }
    }

    /// Smallest and largest value over `[lo, hi]`, or the free bounds.
    pub fn range_over(&self, lo: f64, hi: f64) -> (f64, f64) {
        match self {
            ParamModel::Constant(v) => (*v, *v),
            ParamModel::Free { lower, upper } => (*lower, *upper),
            ParamModel::Pwl(p) => {
                let mut vals = vec![p.eval(lo), p.eval(hi)];
                vals.extend(
                    p.breakpoints()
                        .iter()
                        .zip(p.values())
                        .filter(|(b, _)| **b > lo && **b < hi)
                        .map(|(_, v)| *v),
                );
                vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
            }
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, ParamModel::Free { .. })
    }

    pub fn depends_on_u(&self) -> bool {
        matches!(self, ParamModel::Pwl(_))
    }

    fn covers(&self, lo: f64, hi: f64) -> bool {
        match self {
            ParamModel::Pwl(p) => {
                let (a, b) = p.domain();
                let tol = 1e-12 * (hi - lo).abs().max(1.0);
                a <= lo + tol && b >= hi - tol
            }
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamDef {
    pub id: String,
    pub kind: StreamKind,
    pub t_in: ParamModel,
    pub t_out: ParamModel,
    pub f: ParamModel,
    pub u_coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDef {
    pub index: u32,
    pub name: String,
    pub h_prod: f64,
    pub rho_prod: f64,
    pub mu_prod: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicParams {
    pub t_full_load: f64,
    pub af_inv: f64,
    /// Annualisation applied to the exchanger cost coefficients. Defaults to
    /// `af_inv`; set it to 1 when the coefficients are already per year.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub af_hen: Option<f64>,
    pub af_op: f64,
    pub c_sys: f64,
    pub c_el: f64,
    pub c_feedstock: Vec<(String, f64)>,
    pub c_f_hex: f64,
    pub c_v_hex: f64,
    pub beta: f64,
    pub eps_hu: f64,
    pub eps_cu: f64,
}

impl EconomicParams {
    pub fn af_hen(&self) -> f64 {
        self.af_hen.unwrap_or(self.af_inv)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceModels {
    /// System power, kW.
    #[serde(deserialize_with = "curve")]
    pub p_sys: Pwl1D,
    /// Total product mass flow, kg/h.
    #[serde(deserialize_with = "curve")]
    pub m_prod_total: Pwl1D,
    /// Chemical enthalpy flow of the products, kW.
    #[serde(deserialize_with = "curve")]
    pub h_dot_prod: Pwl1D,
    /// Feedstock mass flows in t/h, in the order of `c_feedstock`.
    #[serde(deserialize_with = "curves")]
    pub feed_flows: Vec<Pwl1D>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum CurveSpec {
    Pwl(Pwl1D),
    Fit(FitSpec),
}

impl CurveSpec {
    fn build(self) -> Result<Pwl1D, PwlError> {
        match self {
            CurveSpec::Pwl(p) => Ok(p),
            CurveSpec::Fit(f) => fit_pwl_1d(&f.samples, f.rmse_target),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CurveField {
    Spec(CurveSpec),
    Plain(Pwl1D),
}

impl CurveField {
    fn build(self) -> Result<Pwl1D, PwlError> {
        match self {
            CurveField::Spec(s) => s.build(),
            CurveField::Plain(p) => Ok(p),
        }
    }
}

fn curve<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Pwl1D, D::Error> {
    CurveField::deserialize(d)?.build().map_err(serde::de::Error::custom)
}

fn curves<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Pwl1D>, D::Error> {
    Vec::<CurveField>::deserialize(d)?
        .into_iter()
        .map(|c| c.build().map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityDef {
    pub t_in: f64,
    pub t_out: f64,
    pub u_coeff: f64,
}

fn default_cold_utility() -> UtilityDef {
    UtilityDef { t_in: 15.0, t_out: 20.0, u_coeff: 0.5 }
}

fn default_hot_utility() -> UtilityDef {
    UtilityDef { t_in: 1000.0, t_out: 999.0, u_coeff: 0.5 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenConfig {
    pub n_stages: usize,
    pub dt_min: f64,
    #[serde(default = "default_cold_utility")]
    pub cold_utility: UtilityDef,
    #[serde(default = "default_hot_utility")]
    pub hot_utility: UtilityDef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseDefinition {
    pub opvar: OperatingVariable,
    pub streams: Vec<StreamDef>,
    pub products: Vec<ProductDef>,
    pub economics: EconomicParams,
    pub performance: PerformanceModels,
    pub hen_config: HenConfig,
}

impl CaseDefinition {
    pub fn stream(&self, id: &str) -> Option<&StreamDef> {
        self.streams.iter().find(|s| s.id == id)
    }

    pub fn streams_of(&self, kind: StreamKind) -> impl Iterator<Item = &StreamDef> {
        self.streams.iter().filter(move |s| s.kind == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case serialises")
    }

    pub fn save(&self, path: &Path) -> Result<(), CaseError> {
        std::fs::write(path, self.to_json()).map_err(|source| CaseError::Io { path: path.into(), source })
    }
}

/// Parses a case document and checks that every operating-variable model
/// covers the operating range and that references line up.
pub fn parse_case(text: &str) -> Result<CaseDefinition, CaseError> {
    let case: CaseDefinition = serde_json::from_str(text).map_err(|e| CaseError::Schema(e.to_string()))?;
    check_integrity(&case)?;
    Ok(case)
}

pub fn load_case(path: &Path) -> Result<CaseDefinition, CaseError> {
    let text = std::fs::read_to_string(path).map_err(|source| CaseError::Io { path: path.into(), source })?;
    parse_case(&text)
}

fn check_integrity(c: &CaseDefinition) -> Result<(), CaseError> {
    let (lo, hi) = (c.opvar.lower, c.opvar.upper);
    let mut ids = HashSet::new();
    for s in &c.streams {
        if !ids.insert(s.id.as_str()) {
            return Err(CaseError::Schema(format!("streams: duplicate id `{}`", s.id)));
        }
        for (name, p) in [("t_in", &s.t_in), ("t_out", &s.t_out), ("f", &s.f)] {
            if !p.covers(lo, hi) {
                let ParamModel::Pwl(pw) = p else { unreachable!() };
                return Err(CaseError::Domain(format!(
                    "stream {} {name}: model domain {:?} does not cover operating range [{lo}, {hi}]",
                    s.id,
                    pw.domain()
                )));
            }
        }
    }
    let perf = &c.performance;
    let named = [("p_sys", &perf.p_sys), ("m_prod_total", &perf.m_prod_total), ("h_dot_prod", &perf.h_dot_prod)];
    for (name, p) in named.into_iter().chain(perf.feed_flows.iter().map(|p| ("feed_flows", p))) {
        if !ParamModel::Pwl(p.clone()).covers(lo, hi) {
            return Err(CaseError::Domain(format!(
                "performance {name}: model domain {:?} does not cover operating range [{lo}, {hi}]",
                p.domain()
            )));
        }
    }
    if perf.feed_flows.len() != c.economics.c_feedstock.len() {
        return Err(CaseError::Schema(format!(
            "performance.feed_flows: {} curves for {} feedstock prices",
            perf.feed_flows.len(),
            c.economics.c_feedstock.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamValues {
    pub t_in: f64,
    pub t_out: f64,
    pub f: f64,
}

impl StreamValues {
    /// Heat given off (hot) or taken up (cold), kW.
    pub fn duty(&self) -> f64 {
        self.f * (self.t_in - self.t_out).abs()
    }
}

pub fn stream_parameter_at(s: &StreamDef, opvar: &OperatingVariable, u: f64) -> Result<StreamValues, CaseError> {
    if !opvar.contains(u) {
        return Err(CaseError::Domain(format!(
            "{} = {u} outside [{}, {}]",
            opvar.name, opvar.lower, opvar.upper
        )));
    }
    let get = |name: &str, p: &ParamModel| {
        p.at(u).ok_or_else(|| CaseError::Domain(format!("stream {} {name} is a free design variable", s.id)))
    };
    Ok(StreamValues { t_in: get("t_in", &s.t_in)?, t_out: get("t_out", &s.t_out)?, f: get("f", &s.f)? })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

/// Operating points checked by [`validate_case`]; includes the seven
/// equally spaced simulation points.
pub const VALIDATION_POINTS: usize = 61;

pub fn validate_case(c: &CaseDefinition) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |subject: &str, message: String| out.push(Diagnostic { subject: subject.into(), message });
    let ov = &c.opvar;
    if !(ov.lower < ov.upper) {
        diag("opvar", format!("lower {} not below upper {}", ov.lower, ov.upper));
    }
    let hc = &c.hen_config;
    if hc.n_stages < 1 {
        diag("hen_config", "n_stages must be at least 1".into());
    }
    if !(hc.dt_min > 0.0) {
        diag("hen_config", format!("dt_min {} must be positive", hc.dt_min));
    }
    if !(hc.cold_utility.t_in < hc.cold_utility.t_out) {
        diag("cold_utility", "outlet must be warmer than inlet".into());
    }
    if !(hc.hot_utility.t_in > hc.hot_utility.t_out) {
        diag("hot_utility", "outlet must be colder than inlet".into());
    }
    let e = &c.economics;
    if !(e.beta > 0.0 && e.beta <= 1.0) {
        diag("economics", "cost exponent out of (0,1]".into());
    }
    let costs = [
        ("c_sys", e.c_sys),
        ("c_el", e.c_el),
        ("c_f_hex", e.c_f_hex),
        ("c_v_hex", e.c_v_hex),
        ("t_full_load", e.t_full_load),
        ("af_op", e.af_op),
        ("eps_hu", e.eps_hu),
        ("eps_cu", e.eps_cu),
    ];
    for (name, v) in costs.into_iter().chain(e.c_feedstock.iter().map(|(n, v)| (n.as_str(), *v))) {
        if !(v >= 0.0) {
            diag("economics", format!("{name} = {v} is negative"));
        }
    }
    if !(e.af_inv > 0.0) {
        diag("economics", format!("af_inv = {} must be positive (1/depreciation period)", e.af_inv));
    }
    if let Some(a) = e.af_hen {
        if !(a > 0.0) {
            diag("economics", format!("af_hen = {a} must be positive"));
        }
    }
    for p in &c.products {
        if !(p.h_prod > 0.0) {
            diag(&p.name, format!("h_prod = {} must be positive", p.h_prod));
        }
    }
    let mut ids = HashSet::new();
    for s in &c.streams {
        if !ids.insert(&s.id) {
            diag(&s.id, "duplicate stream id".into());
        }
        if !(s.u_coeff > 0.0) {
            diag(&s.id, format!("u_coeff = {} must be positive", s.u_coeff));
        }
    }
    let grid = ov.grid(VALIDATION_POINTS);
    for s in &c.streams {
        for (name, p) in [("t_in", &s.t_in), ("t_out", &s.t_out), ("f", &s.f)] {
            if !p.covers(ov.lower, ov.upper) {
                diag(&s.id, format!("{name} model does not cover the operating range"));
            }
            if let ParamModel::Free { lower, upper } = p {
                if !(lower < upper) {
                    diag(&s.id, format!("{name} free bounds [{lower}, {upper}] are empty"));
                }
            }
        }
        if s.kind == StreamKind::Cs {
            if !matches!(s.t_in, ParamModel::Constant(_)) {
                diag(&s.id, "combustion stream inlet must be constant".into());
            }
            if !s.t_out.is_free() || !s.f.is_free() {
                diag(&s.id, "combustion stream outlet and flow capacity must be free".into());
            }
            let (lo_f, _) = s.f.range_over(ov.lower, ov.upper);
            if !(lo_f > 0.0) {
                diag(&s.id, format!("flow capacity lower bound {lo_f} must be positive"));
            }
            let t_in = s.t_in.range_over(ov.lower, ov.upper).0;
            let (_, hi_out) = s.t_out.range_over(ov.lower, ov.upper);
            if hi_out > t_in {
                diag(&s.id, format!("outlet upper bound {hi_out} above inlet {t_in}"));
            }
            continue;
        }
        for &u in &grid {
            let Ok(v) = stream_parameter_at(s, ov, u) else {
                diag(&s.id, format!("free parameter on a {:?} stream", s.kind));
                break;
            };
            let bad = match s.kind {
                StreamKind::Hot => v.t_in < v.t_out,
                StreamKind::Cold => v.t_in > v.t_out,
                StreamKind::Cs => false,
            };
            if bad {
                diag(&s.id, format!("t_in {} vs t_out {} has the wrong order at u = {u}", v.t_in, v.t_out));
                break;
            }
            if !(v.f > 0.0) {
                diag(&s.id, format!("flow capacity {} not positive at u = {u}", v.f));
                break;
            }
        }
    }
    let perf = &c.performance;
    let named = [("p_sys", &perf.p_sys), ("m_prod_total", &perf.m_prod_total), ("h_dot_prod", &perf.h_dot_prod)];
    for (name, p) in named {
        if grid.iter().any(|&u| !(p.eval(u) > 0.0)) {
            diag("performance", format!("{name} must stay positive over the operating range"));
        }
    }
    for (k, p) in perf.feed_flows.iter().enumerate() {
        if grid.iter().any(|&u| p.eval(u) < 0.0) {
            diag("performance", format!("feed flow {k} negative over the operating range"));
        }
    }
    if perf.feed_flows.len() != e.c_feedstock.len() {
        diag("performance", "feed flow count differs from feedstock price count".into());
    }
    out
}

/// One row of a stream table in the layout
/// `id, kind, t_in_min, t_in_max, t_out_min, t_out_max, f_min, f_max, u_coeff`.
#[derive(Debug, Clone, Deserialize)]
pub struct StreamRow {
    pub id: String,
    pub kind: StreamKind,
    pub t_in_min: f64,
    pub t_in_max: f64,
    pub t_out_min: f64,
    pub t_out_max: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub u_coeff: f64,
}

impl StreamRow {
    /// Process streams get a straight line from the minimum at the lower end
    /// of the operating range to the maximum at the upper end (a constant
    /// when both coincide); combustion streams keep a constant inlet and
    /// free outlet and flow capacity.
    pub fn to_stream(&self, opvar: &OperatingVariable) -> Result<StreamDef, CaseError> {
        let ramp = |lo: f64, hi: f64| -> Result<ParamModel, CaseError> {
            if lo == hi {
                Ok(ParamModel::Constant(lo))
            } else {
                Pwl1D::linear(opvar.lower, lo, opvar.upper, hi)
                    .map(ParamModel::Pwl)
                    .map_err(|source| CaseError::Fit { what: self.id.clone(), source })
            }
        };
        let (t_in, t_out, f) = if self.kind == StreamKind::Cs {
            (
                ParamModel::Constant(self.t_in_max),
                ParamModel::Free { lower: self.t_out_min, upper: self.t_out_max },
                ParamModel::Free { lower: self.f_min, upper: self.f_max },
            )
        } else {
            (ramp(self.t_in_min, self.t_in_max)?, ramp(self.t_out_min, self.t_out_max)?, ramp(self.f_min, self.f_max)?)
        };
        Ok(StreamDef { id: self.id.clone(), kind: self.kind, t_in, t_out, f, u_coeff: self.u_coeff })
    }
}

pub fn read_stream_table<R: std::io::Read>(reader: R, opvar: &OperatingVariable) -> Result<Vec<StreamDef>, CaseError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (line, row) in rdr.deserialize::<StreamRow>().enumerate() {
        let row = row.map_err(|e| CaseError::Schema(format!("stream table row {}: {e}", line + 1)))?;
        out.push(row.to_stream(opvar)?);
    }
    Ok(out)
}

pub fn load_stream_table(path: &Path, opvar: &OperatingVariable) -> Result<Vec<StreamDef>, CaseError> {
    let file = std::fs::File::open(path).map_err(|source| CaseError::Io { path: path.into(), source })?;
    read_stream_table(file, opvar)
}

/// One hot and one cold stream, 100 kW each, constant parameters.
#[cfg(test)]
pub(crate) const MINIMAL_CASE: &str = r#"{
  "opvar": {"name": "u", "lower": 0.0, "upper": 1.0},
  "streams": [
    {"id": "H", "kind": "hot", "t_in": {"constant": 150.0}, "t_out": {"constant": 50.0}, "f": {"constant": 1.0}, "u_coeff": 0.5},
    {"id": "C", "kind": "cold", "t_in": {"constant": 20.0}, "t_out": {"constant": 120.0}, "f": {"constant": 1.0}, "u_coeff": 0.5}
  ],
  "products": [{"index": 1, "name": "p", "h_prod": 44.0, "rho_prod": 800.0, "mu_prod": 1.0}],
  "economics": {"t_full_load": 8000, "af_inv": 0.05, "af_op": 1, "c_sys": 1e6, "c_el": 20,
                "c_feedstock": [["water", 3.54]], "c_f_hex": 1000, "c_v_hex": 60, "beta": 0.8,
                "eps_hu": 1.05, "eps_cu": 0.05},
  "performance": {
    "p_sys": {"pwl": {"breakpoints": [0, 1], "values": [100, 120]}},
    "m_prod_total": {"breakpoints": [0, 1], "values": [10, 12]},
    "h_dot_prod": {"fit": {"samples": [[0, 50], [0.5, 55], [1, 60]], "rmse_target": 0.01}},
    "feed_flows": [{"pwl": {"breakpoints": [0, 1], "values": [0.1, 0.2]}}]
  },
  "hen_config": {"n_stages": 1, "dt_min": 1.0}
}"#;
