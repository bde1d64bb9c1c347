//! Piecewise-linear models: 1-D segmented curves, triangulated surfaces on
//! regular grids, and convex max-of-planes envelopes.

use std::fmt;

use henopt_milp::{Backend, HighsBackend, LinExpr, MilpModel, Relation, SolveOptions};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub enum PwlError {
    /// Too few points, repeated abscissae, unsorted breakpoints and the like.
    Domain(String),
    /// A sampled function returned NaN or infinity.
    Sampling(String),
    /// The requested accuracy could not be reached.
    FitFailure(String),
}

impl fmt::Display for PwlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PwlError::Domain(m) => write!(f, "domain error: {m}"),
            PwlError::Sampling(m) => write!(f, "sampling error: {m}"),
            PwlError::FitFailure(m) => write!(f, "fit failure: {m}"),
        }
    }
}

impl std::error::Error for PwlError {}

/// Anything that can be evaluated at a point of its input space.
pub trait PwlModel {
    fn value_at(&self, x: &[f64]) -> f64;
}

/// Root-mean-square deviation of `model` from `samples`, divided by the
/// value range of the samples (by 1 when all sample values coincide).
pub fn rmse<M: PwlModel + ?Sized>(model: &M, samples: &[(Vec<f64>, f64)]) -> Result<f64, PwlError> {
    if samples.is_empty() {
        return Err(PwlError::Domain("no samples".into()));
    }
    let (mut lo, mut hi, mut sq) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for (x, y) in samples {
        lo = lo.min(*y);
        hi = hi.max(*y);
        let r = model.value_at(x) - y;
        sq += r * r;
    }
    Ok((sq / samples.len() as f64).sqrt() / value_range(lo, hi))
}

fn value_range(lo: f64, hi: f64) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

// ---------------------------------------------------------------------------
// 1-D

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Pwl1DRaw", into = "Pwl1DRaw")]
pub struct Pwl1D {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    convex_flag: bool,
}

#[derive(Serialize, Deserialize)]
struct Pwl1DRaw {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<Pwl1DRaw> for Pwl1D {
    type Error = PwlError;
    fn try_from(raw: Pwl1DRaw) -> Result<Self, PwlError> {
        Pwl1D::new(raw.breakpoints, raw.values)
    }
}

impl From<Pwl1D> for Pwl1DRaw {
    fn from(p: Pwl1D) -> Self {
        Pwl1DRaw { breakpoints: p.breakpoints, values: p.values }
    }
}

impl Pwl1D {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, PwlError> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(PwlError::Domain(format!(
                "need at least two breakpoints with one value each (got {} and {})",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(PwlError::Domain("non-finite breakpoint or value".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PwlError::Domain("breakpoints must be strictly ascending".into()));
        }
        let mut p = Pwl1D { breakpoints, values, convex_flag: false };
        let s = p.slopes();
        p.convex_flag = s.windows(2).all(|w| w[1] >= w[0]);
        Ok(p)
    }

    /// Straight line through `(x0, y0)` and `(x1, y1)`.
    pub fn linear(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, PwlError> {
        Self::new(vec![x0, x1], vec![y0, y1])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn convex_flag(&self) -> bool {
        self.convex_flag
    }

    pub fn segments(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn slopes(&self) -> Vec<f64> {
        (0..self.segments())
            .map(|j| {
                (self.values[j + 1] - self.values[j]) / (self.breakpoints[j + 1] - self.breakpoints[j])
            })
            .collect()
    }

    /// Value at `x`; outside the domain the end segments are extended.
    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        let j = match bp.partition_point(|&b| b <= x) {
            0 => 0,
            k => (k - 1).min(bp.len() - 2),
        };
        let t = (x - bp[j]) / (bp[j + 1] - bp[j]);
        (1.0 - t) * self.values[j] + t * self.values[j + 1]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Segment lines as `(slope, intercept)`.
    pub fn lines(&self) -> Vec<(f64, f64)> {
        self.slopes()
            .into_iter()
            .enumerate()
            .map(|(j, s)| (s, self.values[j] - s * self.breakpoints[j]))
            .collect()
    }
}

impl PwlModel for Pwl1D {
    fn value_at(&self, x: &[f64]) -> f64 {
        self.eval(x[0])
    }
}

fn samples_1d(samples: &[(f64, f64)]) -> Vec<(Vec<f64>, f64)> {
    samples.iter().map(|&(x, y)| (vec![x], y)).collect()
}

/// Continuous least-squares fit with knots at `knots` (ascending).
fn least_squares_on_knots(xs: &[f64], ys: &[f64], knots: &[f64]) -> Result<Pwl1D, PwlError> {
    let n = knots.len();
    let mut basis = DMatrix::<f64>::zeros(xs.len(), n);
    for (r, &x) in xs.iter().enumerate() {
        let j = match knots.partition_point(|&k| k <= x) {
            0 => 0,
            k => (k - 1).min(n - 2),
        };
        let t = (x - knots[j]) / (knots[j + 1] - knots[j]);
        basis[(r, j)] += 1.0 - t;
        basis[(r, j + 1)] += t;
    }
    let rhs = DVector::from_column_slice(ys);
    let coef = basis
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| PwlError::FitFailure(e.to_string()))?;
    Pwl1D::new(knots.to_vec(), coef.iter().copied().collect())
}

/// Greedy segmented fit: start from a single line over the sample span and
/// keep inserting the sample abscissa that lowers the RMSE the most until
/// `rmse_target` is met.
pub fn fit_pwl_1d(samples: &[(f64, f64)], rmse_target: f64) -> Result<Pwl1D, PwlError> {
    if samples.len() < 2 {
        return Err(PwlError::Domain("need at least two samples".into()));
    }
    if !(rmse_target >= 0.0) {
        return Err(PwlError::Domain(format!("invalid RMSE target {rmse_target}")));
    }
    if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(PwlError::Sampling("non-finite sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.windows(2).any(|w| w[1].0 == w[0].0) {
        return Err(PwlError::Domain("sample abscissae must be distinct".into()));
    }
    let xs: Vec<f64> = sorted.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = sorted.iter().map(|s| s.1).collect();
    let wrapped = samples_1d(&sorted);

    let mut knots = vec![xs[0], *xs.last().unwrap()];
    let mut model = least_squares_on_knots(&xs, &ys, &knots)?;
    let mut err = rmse(&model, &wrapped)?;
    while err > rmse_target + 1e-12 {
        let mut best: Option<(f64, Pwl1D, f64)> = None;
        for &c in &xs[1..xs.len() - 1] {
            if knots.contains(&c) {
                continue;
            }
            let mut trial = knots.clone();
            trial.push(c);
            trial.sort_by(f64::total_cmp);
            let m = least_squares_on_knots(&xs, &ys, &trial)?;
            let e = rmse(&m, &wrapped)?;
            if best.as_ref().map_or(true, |b| e < b.2) {
                best = Some((c, m, e));
            }
        }
        let Some((c, m, e)) = best else {
            return Err(PwlError::FitFailure(format!(
                "RMSE {err:.3e} above target {rmse_target:.3e} with every sample used as a breakpoint"
            )));
        };
        knots.push(c);
        knots.sort_by(f64::total_cmp);
        model = m;
        err = e;
    }
    Ok(model)
}

// ---------------------------------------------------------------------------
// Triangulated surfaces

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSurface {
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    /// `node_values[i][j]` is the value at `(grid_x[i], grid_y[j])`.
    pub node_values: Vec<Vec<f64>>,
    /// Node indices `i * ny + j`, listed in serpentine order over the cells.
    pub triangulation: Vec<[usize; 3]>,
    pub rmse: f64,
    pub max_abs_error: f64,
}

/// Side length of the validation grid used for surface RMSE.
pub const VALIDATION_GRID: usize = 25;

impl SimplexSurface {
    pub fn nx(&self) -> usize {
        self.grid_x.len()
    }

    pub fn ny(&self) -> usize {
        self.grid_y.len()
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i * self.ny() + j
    }

    /// Grid coordinates and value of node `n`.
    pub fn node(&self, n: usize) -> (f64, f64, f64) {
        let (i, j) = (n / self.ny(), n % self.ny());
        (self.grid_x[i], self.grid_y[j], self.node_values[i][j])
    }

    pub fn simplex_count(&self) -> usize {
        self.triangulation.len()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (i, s) = locate(&self.grid_x, x);
        let (j, t) = locate(&self.grid_y, y);
        let f = |a: usize, b: usize| self.node_values[i + a][j + b];
        if s >= t {
            (1.0 - s) * f(0, 0) + (s - t) * f(1, 0) + t * f(1, 1)
        } else {
            (1.0 - t) * f(0, 0) + s * f(1, 1) + (t - s) * f(0, 1)
        }
    }
}

impl PwlModel for SimplexSurface {
    fn value_at(&self, x: &[f64]) -> f64 {
        self.eval(x[0], x[1])
    }
}

fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let i = match grid.partition_point(|&g| g <= x) {
        0 => 0,
        k => (k - 1).min(grid.len() - 2),
    };
    (i, (x - grid[i]) / (grid[i + 1] - grid[i]))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}

/// Triangles of an `nx`-by-`ny` grid with the lower-left to upper-right
/// diagonal in every cell. Rows of cells are walked alternately left to right
/// and right to left so that consecutive triangles share an edge inside a row.
pub fn serpentine_triangulation(nx: usize, ny: usize) -> Vec<[usize; 3]> {
    let id = |i: usize, j: usize| i * ny + j;
    let mut out = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        let cols: Vec<usize> = if j % 2 == 0 { (0..nx - 1).collect() } else { (0..nx - 1).rev().collect() };
        for i in cols {
            let lower = [id(i, j), id(i + 1, j), id(i + 1, j + 1)];
            let upper = [id(i, j), id(i + 1, j + 1), id(i, j + 1)];
            if j % 2 == 0 {
                out.push(upper);
                out.push(lower);
            } else {
                out.push(lower);
                out.push(upper);
            }
        }
    }
    out
}

pub fn build_simplex_surface<F: Fn(f64, f64) -> f64>(
    f: F,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<SimplexSurface, PwlError> {
    if nx < 2 || ny < 2 {
        return Err(PwlError::Domain(format!("grid {nx}x{ny} too small")));
    }
    if !(x_range.1 > x_range.0 && y_range.1 > y_range.0) {
        return Err(PwlError::Domain(format!("empty rectangle {x_range:?} x {y_range:?}")));
    }
    let grid_x = linspace(x_range.0, x_range.1, nx);
    let grid_y = linspace(y_range.0, y_range.1, ny);
    let mut node_values = vec![vec![0.0; ny]; nx];
    for (i, &x) in grid_x.iter().enumerate() {
        for (j, &y) in grid_y.iter().enumerate() {
            let v = f(x, y);
            if !v.is_finite() {
                return Err(PwlError::Sampling(format!("f({x}, {y}) = {v}")));
            }
            node_values[i][j] = v;
        }
    }
    let mut s = SimplexSurface {
        grid_x,
        grid_y,
        node_values,
        triangulation: serpentine_triangulation(nx, ny),
        rmse: 0.0,
        max_abs_error: 0.0,
    };
    let mut samples = Vec::with_capacity(VALIDATION_GRID * VALIDATION_GRID);
    for x in linspace(x_range.0, x_range.1, VALIDATION_GRID) {
        for y in linspace(y_range.0, y_range.1, VALIDATION_GRID) {
            let v = f(x, y);
            if !v.is_finite() {
                return Err(PwlError::Sampling(format!("f({x}, {y}) = {v}")));
            }
            s.max_abs_error = s.max_abs_error.max((s.eval(x, y) - v).abs());
            samples.push((vec![x, y], v));
        }
    }
    s.rmse = rmse(&s, &samples)?;
    Ok(s)
}

// ---------------------------------------------------------------------------
// Plane envelopes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl Plane {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Largest value over an axis-aligned box.
    pub fn max_over_box(&self, bounds: &[(f64, f64)]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(bounds)
                .map(|(a, &(lo, hi))| (a * lo).max(a * hi))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneEnvelope {
    pub planes: Vec<Plane>,
    pub input_dim: usize,
    /// Largest `f - envelope` over the fit samples.
    pub max_underestimate_gap: f64,
    /// Largest `envelope - f` over the fit samples.
    pub max_overestimate: f64,
}

impl PlaneEnvelope {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.planes.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Envelope of `g(x) = scale * f(x / stretch)` given the envelope of `f`.
    pub fn rescaled(&self, scale: f64, stretch: &[f64]) -> PlaneEnvelope {
        let planes = self
            .planes
            .iter()
            .map(|p| Plane {
                coefficients: p.coefficients.iter().zip(stretch).map(|(a, s)| scale * a / s).collect(),
                intercept: scale * p.intercept,
            })
            .collect();
        PlaneEnvelope {
            planes,
            input_dim: self.input_dim,
            max_underestimate_gap: scale * self.max_underestimate_gap,
            max_overestimate: scale * self.max_overestimate,
        }
    }

    fn measure(&mut self, points: &[Vec<f64>], values: &[f64]) {
        let (mut under, mut over) = (0.0_f64, 0.0_f64);
        for (x, &y) in points.iter().zip(values) {
            let e = self.eval(x);
            under = under.max(y - e);
            over = over.max(e - y);
        }
        self.max_underestimate_gap = under;
        self.max_overestimate = over;
    }
}

impl PwlModel for PlaneEnvelope {
    fn value_at(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnvelopeOptions {
    /// Weight of overestimation relative to underestimation in the minimax
    /// objective: the fit minimises `t` with `f - env <= t` and
    /// `env - f <= over_ratio * t`.
    pub over_ratio: f64,
    pub max_rounds: usize,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        EnvelopeOptions { over_ratio: 2.0, max_rounds: 30 }
    }
}

/// Max-of-planes fit to `values` sampled at `points`.
///
/// Planes are added one at a time, each seeded at the worst underestimated
/// sample from a local least-squares plane, followed by alternating
/// assignment / minimax LP rounds. The best envelope seen is kept, so more
/// planes never give a larger error.
pub fn fit_convex_planes(
    points: &[Vec<f64>],
    values: &[f64],
    n_planes: usize,
    opts: EnvelopeOptions,
) -> Result<PlaneEnvelope, PwlError> {
    if points.is_empty() || points.len() != values.len() {
        return Err(PwlError::Domain("need one value per sample point".into()));
    }
    if n_planes == 0 {
        return Err(PwlError::Domain("need at least one plane".into()));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(PwlError::Domain("inconsistent sample dimension".into()));
    }
    if points.iter().flatten().chain(values).any(|v| !v.is_finite()) {
        return Err(PwlError::Sampling("non-finite sample".into()));
    }
    let fit = PlaneFit::new(points, values, opts);
    let mut planes = vec![fit.local_plane(0, points.len())];
    let mut score;
    (planes, score) = fit.minimax(planes);
    let mut best = (planes.clone(), score);
    for _ in 1..n_planes {
        let worst = fit.worst_under(&planes);
        let mut seed = fit.local_plane(worst, 2 * (dim + 1) + 1);
        let shift = values[worst] - seed.eval(&points[worst]);
        seed.intercept += shift;
        planes.push(seed);
        (planes, score) = fit.minimax(planes);
        if score < best.1 - 1e-12 * best.1.abs().max(1.0) {
            best = (planes.clone(), score);
        }
    }
    let mut env = PlaneEnvelope { planes: best.0, input_dim: dim, max_underestimate_gap: 0.0, max_overestimate: 0.0 };
    env.measure(points, values);
    Ok(env)
}

struct PlaneFit<'a> {
    points: &'a [Vec<f64>],
    values: &'a [f64],
    opts: EnvelopeOptions,
    lo: Vec<f64>,
    span: Vec<f64>,
}

impl<'a> PlaneFit<'a> {
    fn new(points: &'a [Vec<f64>], values: &'a [f64], opts: EnvelopeOptions) -> Self {
        let dim = points[0].len();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for d in 0..dim {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let span = lo.iter().zip(&hi).map(|(l, h)| if h > l { h - l } else { 1.0 }).collect();
        PlaneFit { points, values, opts, lo, span }
    }

    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn score(&self, planes: &[Plane]) -> f64 {
        let mut s = 0.0_f64;
        for (x, &y) in self.points.iter().zip(self.values) {
            let e = planes.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max);
            s = s.max(y - e).max((e - y) / self.opts.over_ratio);
        }
        s
    }

    fn worst_under(&self, planes: &[Plane]) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (x, &y)) in self.points.iter().zip(self.values).enumerate() {
            let e = planes.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max);
            if y - e > best.1 {
                best = (i, y - e);
            }
        }
        best.0
    }

    /// Least-squares plane through the `count` samples nearest to sample
    /// `center` in box-normalised coordinates.
    fn local_plane(&self, center: usize, count: usize) -> Plane {
        let dim = self.dim();
        let c = &self.points[center];
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        let dist = |i: usize| -> f64 {
            (0..dim).map(|d| ((self.points[i][d] - c[d]) / self.span[d]).powi(2)).sum()
        };
        idx.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)));
        idx.truncate(count.max(dim + 1));
        let mut a = DMatrix::<f64>::zeros(idx.len(), dim + 1);
        let mut b = DVector::<f64>::zeros(idx.len());
        for (r, &i) in idx.iter().enumerate() {
            for d in 0..dim {
                a[(r, d)] = (self.points[i][d] - self.lo[d]) / self.span[d];
            }
            a[(r, dim)] = 1.0;
            b[r] = self.values[i];
        }
        let sol = a.svd(true, true).solve(&b, 1e-12).unwrap_or_else(|_| DVector::zeros(dim + 1));
        self.denormalize(sol.as_slice())
    }

    fn denormalize(&self, c: &[f64]) -> Plane {
        let dim = self.dim();
        let coefficients: Vec<f64> = (0..dim).map(|d| c[d] / self.span[d]).collect();
        let intercept = c[dim] - (0..dim).map(|d| coefficients[d] * self.lo[d]).sum::<f64>();
        Plane { coefficients, intercept }
    }

    /// Alternates sample-to-plane assignment with the minimax LP. Works in
    /// box-normalised coordinates so the LP stays well scaled.
    fn minimax(&self, mut planes: Vec<Plane>) -> (Vec<Plane>, f64) {
        let mut score = self.score(&planes);
        for _ in 0..self.opts.max_rounds {
            let Some(next) = self.minimax_round(&planes) else { break };
            let s = self.score(&next);
            if s >= score - 1e-12 * score.abs().max(1.0) {
                break;
            }
            planes = next;
            score = s;
        }
        (planes, score)
    }

    fn minimax_round(&self, planes: &[Plane]) -> Option<Vec<Plane>> {
        let dim = self.dim();
        let k = planes.len();
        let mut m = MilpModel::new();
        let coef: Vec<Vec<_>> = (0..k)
            .map(|p| {
                (0..=dim)
                    .map(|d| m.add_continuous(format!("a{p}_{d}"), f64::NEG_INFINITY, f64::INFINITY).unwrap())
                    .collect()
            })
            .collect();
        let t = m.add_continuous("t", 0.0, f64::INFINITY).unwrap();
        let norm: Vec<Vec<f64>> = self
            .points
            .iter()
            .map(|x| (0..dim).map(|d| (x[d] - self.lo[d]) / self.span[d]).collect())
            .collect();
        let plane_expr = |p: usize, z: &[f64]| {
            let mut e = LinExpr::term(coef[p][dim], 1.0);
            for d in 0..dim {
                e.add_term(coef[p][d], z[d]);
            }
            e
        };
        for (i, (x, &y)) in self.points.iter().zip(self.values).enumerate() {
            let owner = (0..k)
                .max_by(|&a, &b| planes[a].eval(x).total_cmp(&planes[b].eval(x)))
                .unwrap();
            for p in 0..k {
                let e = plane_expr(p, &norm[i]) - self.opts.over_ratio * t;
                m.add_constraint(format!("o{i}_{p}"), e, Relation::Le, y).ok()?;
            }
            let e = plane_expr(owner, &norm[i]) + t;
            m.add_constraint(format!("u{i}"), e, Relation::Ge, y).ok()?;
        }
        m.set_objective(t).ok()?;
        let sol = HighsBackend.solve(&m, &SolveOptions::default().with_time_limit(60.0)).ok()?;
        if !sol.status.has_solution() {
            return None;
        }
        Some(
            (0..k)
                .map(|p| {
                    let c: Vec<f64> = coef[p].iter().map(|&v| sol.value(v)).collect();
                    self.denormalize(&c)
                })
                .collect(),
        )
    }
}

/// Samples of `f` on a tensor grid; each axis is `(lower, upper, count)`
/// and is spaced geometrically when `log_axes[d]` is set and the lower end
/// is positive.
pub fn tensor_samples<F: Fn(&[f64]) -> f64>(
    f: F,
    axes: &[(f64, f64, usize)],
    log_axes: &[bool],
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let grids: Vec<Vec<f64>> = axes
        .iter()
        .enumerate()
        .map(|(d, &(lo, hi, n))| {
            if log_axes.get(d).copied().unwrap_or(false) && lo > 0.0 && hi > lo {
                linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
            } else if hi > lo {
                linspace(lo, hi, n)
            } else {
                vec![lo]
            }
        })
        .collect();
    let mut points = vec![Vec::new()];
    for g in &grids {
        points = points
            .into_iter()
            .flat_map(|p| {
                g.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let values = points.iter().map(|p| f(p)).collect();
    (points, values)
}
