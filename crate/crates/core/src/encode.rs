//! Compiles piecewise-linear models into MILP constraint blocks.
//!
//! Non-convex pieces use a logarithmic disaggregated convex-combination
//! form: one weight per (piece, vertex), pieces numbered by a reflected
//! binary code, and one binary per code bit. Convex terms that the
//! objective pushes downward become plain `y >= line` cuts.

use std::fmt;

use henopt_milp::{LinExpr, MilpModel, ModelError, Relation, Var};

use crate::pwl::{build_simplex_surface, Plane, PlaneEnvelope, Pwl1D, PwlError, SimplexSurface};

#[derive(Debug)]
pub enum EncodeError {
    Model(ModelError),
    Pwl(PwlError),
    /// An input variable lacks finite bounds or leaves the model domain.
    Bounds(String),
    /// The block is used in a direction where its relaxation is not exact.
    Misuse(String),
    Degenerate(String),
}

impl fmt::Display for EncodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodeError::Model(e) => write!(f, "{e}"),
            EncodeError::Pwl(e) => write!(f, "{e}"),
            EncodeError::Bounds(m) => write!(f, "encoding error: {m}"),
            EncodeError::Misuse(m) => write!(f, "misuse: {m}"),
            EncodeError::Degenerate(m) => write!(f, "degenerate: {m}"),
        }
    }
}

impl std::error::Error for EncodeError {}

impl From<ModelError> for EncodeError {
    fn from(e: ModelError) -> Self {
        EncodeError::Model(e)
    }
}

impl From<PwlError> for EncodeError {
    fn from(e: PwlError) -> Self {
        EncodeError::Pwl(e)
    }
}

/// How the output of a block is driven by the rest of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The output only ever wants to be small (it enters a minimised
    /// objective with a non-negative weight, or the equivalent).
    Epigraph,
    /// The output may be pushed either way; it must equal the model.
    Exact,
}

#[derive(Debug, Clone)]
pub struct EncodedBlock {
    pub output_var: Var,
    pub input_vars: Vec<Var>,
    pub binaries_used: usize,
    pub binary_vars: Vec<Var>,
    pub lambda_vars: Vec<Var>,
    /// Piece index and vertex coordinates (inputs, then output) of every
    /// weight in `lambda_vars`.
    pub lambda_vertices: Vec<(usize, Vec<f64>)>,
    /// Code of each piece; the block selects the piece whose code equals the
    /// binary vector, least significant bit first.
    pub piece_codes: Vec<usize>,
}

impl EncodedBlock {
    fn linear(output_var: Var, input_vars: Vec<Var>) -> Self {
        EncodedBlock {
            output_var,
            input_vars,
            binaries_used: 0,
            binary_vars: Vec::new(),
            lambda_vars: Vec::new(),
            lambda_vertices: Vec::new(),
            piece_codes: Vec::new(),
        }
    }
}

pub fn code_bits(pieces: usize) -> usize {
    if pieces <= 1 {
        0
    } else {
        (usize::BITS - (pieces - 1).leading_zeros()) as usize
    }
}

pub fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// A piece is a list of vertices; each vertex lists input coordinates and
/// then the output value.
type Piece = Vec<Vec<f64>>;

/// Logarithmic convex-combination block over `pieces`, tying `inputs` and
/// `output` to the weighted vertices.
fn log_block(
    m: &mut MilpModel,
    name: &str,
    pieces: &[Piece],
    inputs: &[LinExpr],
    output: LinExpr,
) -> Result<(Vec<Var>, Vec<(usize, Vec<f64>)>, Vec<Var>, Vec<usize>), EncodeError> {
    let bits = code_bits(pieces.len());
    let codes: Vec<usize> = (0..pieces.len()).map(gray).collect();
    let mut lambdas = Vec::new();
    let mut verts = Vec::new();
    for (p, piece) in pieces.iter().enumerate() {
        for (v, vert) in piece.iter().enumerate() {
            lambdas.push(m.add_continuous(format!("{name}.l{p}_{v}"), 0.0, 1.0)?);
            verts.push((p, vert.clone()));
        }
    }
    let sum = LinExpr::sum(lambdas.iter().map(|&l| (l, 1.0)));
    m.add_constraint(format!("{name}.convex"), sum, Relation::Eq, 1.0)?;
    for (d, input) in inputs.iter().enumerate() {
        let mut e = input.clone();
        for (&l, (_, vert)) in lambdas.iter().zip(&verts) {
            e.add_term(l, -vert[d]);
        }
        m.add_constraint(format!("{name}.in{d}"), e, Relation::Eq, 0.0)?;
    }
    let mut e = output;
    let nd = inputs.len();
    for (&l, (_, vert)) in lambdas.iter().zip(&verts) {
        e.add_term(l, -vert[nd]);
    }
    m.add_constraint(format!("{name}.out"), e, Relation::Eq, 0.0)?;
    let mut binaries = Vec::with_capacity(bits);
    for b in 0..bits {
        let z = m.add_binary(format!("{name}.b{b}"))?;
        let mut e = LinExpr::term(z, -1.0);
        for (&l, (p, _)) in lambdas.iter().zip(&verts) {
            if codes[*p] >> b & 1 == 1 {
                e.add_term(l, 1.0);
            }
        }
        m.add_constraint(format!("{name}.bit{b}"), e, Relation::Eq, 0.0)?;
        binaries.push(z);
    }
    Ok((lambdas, verts, binaries, codes))
}

fn finite_bounds(m: &MilpModel, v: Var, what: &str) -> Result<(f64, f64), EncodeError> {
    let var = m.variable(v);
    if !(var.lower.is_finite() && var.upper.is_finite()) {
        return Err(EncodeError::Bounds(format!("{what} `{}` needs finite bounds", var.name)));
    }
    Ok((var.lower, var.upper))
}

fn check_within(m: &MilpModel, v: Var, lo: f64, hi: f64) -> Result<(), EncodeError> {
    let (a, b) = finite_bounds(m, v, "input")?;
    let tol = 1e-9 * (hi - lo).abs().max(1.0);
    if a < lo - tol || b > hi + tol {
        return Err(EncodeError::Bounds(format!(
            "input `{}` bounds [{a}, {b}] leave the model domain [{lo}, {hi}]",
            m.variable(v).name
        )));
    }
    Ok(())
}

/// `y = p(x)`, or `y >= p(x)` with no binaries when `p` is convex and the
/// direction allows it.
pub fn encode_pwl1d(
    m: &mut MilpModel,
    name: &str,
    p: &Pwl1D,
    x: Var,
    y: Var,
    direction: Direction,
) -> Result<EncodedBlock, EncodeError> {
    let (lo, hi) = p.domain();
    check_within(m, x, lo, hi)?;
    if p.segments() == 1 || (p.convex_flag() && direction == Direction::Epigraph) {
        let rel = if p.segments() == 1 { Relation::Eq } else { Relation::Ge };
        for (k, (slope, icpt)) in p.lines().into_iter().enumerate() {
            m.add_constraint(format!("{name}.line{k}"), y - slope * x, rel, icpt)?;
        }
        return Ok(EncodedBlock::linear(y, vec![x]));
    }
    let (bp, vals) = (p.breakpoints(), p.values());
    let pieces: Vec<Piece> =
        (0..p.segments()).map(|j| vec![vec![bp[j], vals[j]], vec![bp[j + 1], vals[j + 1]]]).collect();
    let (lambda_vars, lambda_vertices, binary_vars, piece_codes) =
        log_block(m, name, &pieces, &[LinExpr::from(x)], LinExpr::from(y))?;
    Ok(EncodedBlock {
        output_var: y,
        input_vars: vec![x],
        binaries_used: binary_vars.len(),
        binary_vars,
        lambda_vars,
        lambda_vertices,
        piece_codes,
    })
}

pub fn encode_simplex_surface(
    m: &mut MilpModel,
    name: &str,
    s: &SimplexSurface,
    x1: Var,
    x2: Var,
    y: Var,
) -> Result<EncodedBlock, EncodeError> {
    check_within(m, x1, s.grid_x[0], *s.grid_x.last().unwrap())?;
    check_within(m, x2, s.grid_y[0], *s.grid_y.last().unwrap())?;
    let mut pieces = Vec::with_capacity(s.simplex_count());
    for tri in &s.triangulation {
        let pts: Vec<(f64, f64, f64)> = tri.iter().map(|&n| s.node(n)).collect();
        let area = (pts[1].0 - pts[0].0) * (pts[2].1 - pts[0].1) - (pts[2].0 - pts[0].0) * (pts[1].1 - pts[0].1);
        if area.abs() <= 1e-14 * (1.0 + pts[0].0.abs() + pts[0].1.abs()) {
            return Err(EncodeError::Degenerate(format!("{name}: zero-area simplex {tri:?}")));
        }
        pieces.push(pts.into_iter().map(|(a, b, c)| vec![a, b, c]).collect());
    }
    let (lambda_vars, lambda_vertices, binary_vars, piece_codes) =
        log_block(m, name, &pieces, &[LinExpr::from(x1), LinExpr::from(x2)], LinExpr::from(y))?;
    Ok(EncodedBlock {
        output_var: y,
        input_vars: vec![x1, x2],
        binaries_used: binary_vars.len(),
        binary_vars,
        lambda_vars,
        lambda_vertices,
        piece_codes,
    })
}

fn dedup_planes(planes: &[Plane]) -> Vec<&Plane> {
    let mut out: Vec<&Plane> = Vec::new();
    for p in planes {
        let same = |q: &&Plane| {
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
            close(p.intercept, q.intercept)
                && p.coefficients.iter().zip(&q.coefficients).all(|(a, b)| close(*a, *b))
        };
        if !out.iter().any(same) {
            out.push(p);
        }
    }
    out
}

fn plane_expr(p: &Plane, inputs: &[Var]) -> LinExpr {
    LinExpr::sum(inputs.iter().zip(&p.coefficients).map(|(&v, &a)| (v, a)))
}

/// `y >= plane(inputs)` for every distinct plane of `e`.
pub fn encode_plane_envelope(
    m: &mut MilpModel,
    name: &str,
    e: &PlaneEnvelope,
    inputs: &[Var],
    y: Var,
    direction: Direction,
) -> Result<EncodedBlock, EncodeError> {
    if direction != Direction::Epigraph {
        return Err(EncodeError::Misuse(format!(
            "{name}: a plane envelope only bounds its output from below"
        )));
    }
    if inputs.len() != e.input_dim {
        return Err(EncodeError::Misuse(format!("{name}: {} inputs for a {}-D envelope", inputs.len(), e.input_dim)));
    }
    for (k, p) in dedup_planes(&e.planes).into_iter().enumerate() {
        m.add_constraint(format!("{name}.p{k}"), y - plane_expr(p, inputs), Relation::Ge, p.intercept)?;
    }
    Ok(EncodedBlock::linear(y, inputs.to_vec()))
}

/// Plane envelope that only binds when `on = 1`:
/// `y >= plane(inputs) - M (1 - on)` with `M` the plane's maximum over the
/// input bounds.
pub fn encode_switched_plane_envelope(
    m: &mut MilpModel,
    name: &str,
    e: &PlaneEnvelope,
    inputs: &[Var],
    y: Var,
    on: Var,
) -> Result<EncodedBlock, EncodeError> {
    if inputs.len() != e.input_dim {
        return Err(EncodeError::Misuse(format!("{name}: {} inputs for a {}-D envelope", inputs.len(), e.input_dim)));
    }
    let bounds: Vec<(f64, f64)> =
        inputs.iter().map(|&v| finite_bounds(m, v, "input")).collect::<Result<_, _>>()?;
    for (k, p) in dedup_planes(&e.planes).into_iter().enumerate() {
        let big = p.max_over_box(&bounds).max(0.0);
        let expr = y - plane_expr(p, inputs) - big * on;
        m.add_constraint(format!("{name}.p{k}"), expr, Relation::Ge, p.intercept - big)?;
    }
    Ok(EncodedBlock::linear(y, inputs.to_vec()))
}

/// `z = x * y` on the bounding box of `x` and `y`, exact at the grid nodes.
/// A fixed factor makes the product linear and adds no binaries.
pub fn encode_bilinear_product(
    m: &mut MilpModel,
    name: &str,
    x: Var,
    y: Var,
    z: Var,
    grid: (usize, usize),
) -> Result<EncodedBlock, EncodeError> {
    let (xl, xu) = finite_bounds(m, x, "factor")?;
    let (yl, yu) = finite_bounds(m, y, "factor")?;
    if xu <= xl || yu <= yl {
        let (fixed, other) = if xu <= xl { (xl, y) } else { (yl, x) };
        m.add_constraint(format!("{name}.fixed"), z - fixed * other, Relation::Eq, 0.0)?;
        return Ok(EncodedBlock::linear(z, vec![x, y]));
    }
    let s = build_simplex_surface(|a, b| a * b, (xl, xu), (yl, yu), grid.0, grid.1)?;
    encode_simplex_surface(m, name, &s, x, y, z)
}

/// Largest interpolation error of `x * y` on a uniform triangulated grid:
/// a quarter of the cell's `dx * dy`.
pub fn bilinear_error_bound(x: (f64, f64), y: (f64, f64), grid: (usize, usize)) -> f64 {
    let dx = (x.1 - x.0) / (grid.0 - 1) as f64;
    let dy = (y.1 - y.0) / (grid.1 - 1) as f64;
    dx * dy / 4.0
}

/// Logarithmic convex-combination weights over a fixed set of breakpoints of
/// one variable. Any function of that variable becomes a linear expression
/// in the weights, exact at the breakpoints.
#[derive(Debug, Clone)]
pub struct AxisBlock {
    pub var: Var,
    pub breakpoints: Vec<f64>,
    pub block: EncodedBlock,
}

impl AxisBlock {
    pub fn new(m: &mut MilpModel, name: &str, var: Var, breakpoints: Vec<f64>) -> Result<Self, EncodeError> {
        let p = Pwl1D::new(breakpoints.clone(), breakpoints.clone())?;
        let out = m.add_continuous(format!("{name}.copy"), p.min_value(), p.max_value())?;
        let block = if p.segments() == 1 {
            // a single segment still needs weights so that other curves can
            // be expressed through them
            let pieces = vec![vec![vec![breakpoints[0], breakpoints[0]], vec![breakpoints[1], breakpoints[1]]]];
            let (lambda_vars, lambda_vertices, binary_vars, piece_codes) =
                log_block(m, name, &pieces, &[LinExpr::from(var)], LinExpr::from(out))?;
            EncodedBlock {
                output_var: out,
                input_vars: vec![var],
                binaries_used: 0,
                binary_vars,
                lambda_vars,
                lambda_vertices,
                piece_codes,
            }
        } else {
            encode_pwl1d(m, name, &p, var, out, Direction::Exact)?
        };
        Ok(AxisBlock { var, breakpoints, block })
    }

    /// `g(var)` interpolated between the breakpoints.
    pub fn expr<G: Fn(f64) -> f64>(&self, g: G) -> LinExpr {
        LinExpr::sum(self.block.lambda_vars.iter().zip(&self.block.lambda_vertices).map(|(&l, (_, v))| (l, g(v[0]))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use henopt_milp::{Backend, HighsBackend, SolveOptions};

    fn exact() -> SolveOptions {
        SolveOptions::default().with_gap(1e-9)
    }

    #[test]
    fn bits_and_codes() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9, 18].map(code_bits), [0, 1, 2, 2, 3, 3, 4, 5]);
        for i in 0..31 {
            assert_eq!((gray(i) ^ gray(i + 1)).count_ones(), 1);
        }
    }

    #[test]
    fn convex_pwl_in_minimised_cost_needs_no_binaries() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 2.0).unwrap();
        let y = m.add_continuous("y", -10.0, 10.0).unwrap();
        let p = Pwl1D::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0]).unwrap();
        let b = encode_pwl1d(&mut m, "c", &p, x, y, Direction::Epigraph).unwrap();
        assert_eq!((b.binaries_used, m.num_binaries()), (0, 0));
        m.fix(x, 1.5).unwrap();
        m.set_objective(y).unwrap();
        let s = HighsBackend.solve(&m, &exact()).unwrap();
        assert!((s.value(y) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonconvex_three_segments_need_two_bits() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 3.0).unwrap();
        let y = m.add_continuous("y", -10.0, 10.0).unwrap();
        let p = Pwl1D::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 2.0, 1.0, 3.0]).unwrap();
        let b = encode_pwl1d(&mut m, "n", &p, x, y, Direction::Exact).unwrap();
        assert_eq!(b.binaries_used, 2);
        for x0 in [0.0, 0.4, 1.0, 1.7, 2.0, 2.9, 3.0] {
            for sense in [1.0, -1.0] {
                let mut mm = m.clone();
                mm.fix(x, x0).unwrap();
                mm.set_objective(sense * y).unwrap();
                let s = HighsBackend.solve(&mm, &exact()).unwrap();
                assert!((s.value(y) - p.eval(x0)).abs() < 1e-7, "x={x0}");
            }
        }
    }

    #[test]
    fn one_segment_is_an_equality() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 1.0).unwrap();
        let y = m.add_continuous("y", -10.0, 10.0).unwrap();
        let p = Pwl1D::linear(0.0, 1.0, 1.0, 3.0).unwrap();
        let b = encode_pwl1d(&mut m, "l", &p, x, y, Direction::Exact).unwrap();
        assert_eq!(b.binaries_used, 0);
        assert_eq!(m.num_constraints(), 1);
    }

    #[test]
    fn unbounded_input_is_rejected() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        let y = m.add_continuous("y", 0.0, 1.0).unwrap();
        let p = Pwl1D::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(encode_pwl1d(&mut m, "u", &p, x, y, Direction::Exact), Err(EncodeError::Bounds(_))));
    }

    #[test]
    fn surface_binaries() {
        for (n, bits) in [(4, 5), (3, 3)] {
            let s = build_simplex_surface(|a, b| a / b, (400.0, 700.0), (700.0, 1300.0), n, n).unwrap();
            let mut m = MilpModel::new();
            let a = m.add_continuous("a", 400.0, 700.0).unwrap();
            let b = m.add_continuous("b", 700.0, 1300.0).unwrap();
            let y = m.add_continuous("y", -1e3, 1e3).unwrap();
            let blk = encode_simplex_surface(&mut m, "s", &s, a, b, y).unwrap();
            assert_eq!(blk.binaries_used, bits);
            assert_eq!(m.num_binaries(), bits);
        }
    }

    #[test]
    fn vertex_exactness_with_fixed_code() {
        let s = build_simplex_surface(|a, b| a * a + b, (0.0, 1.0), (0.0, 2.0), 3, 3).unwrap();
        let mut m = MilpModel::new();
        let a = m.add_continuous("a", 0.0, 1.0).unwrap();
        let b = m.add_continuous("b", 0.0, 2.0).unwrap();
        let y = m.add_continuous("y", -10.0, 10.0).unwrap();
        let blk = encode_simplex_surface(&mut m, "s", &s, a, b, y).unwrap();
        for (k, (piece, vert)) in blk.lambda_vertices.iter().enumerate() {
            let mut mm = m.clone();
            for (bit, &z) in blk.binary_vars.iter().enumerate() {
                mm.fix(z, (blk.piece_codes[*piece] >> bit & 1) as f64).unwrap();
            }
            mm.fix(blk.lambda_vars[k], 1.0).unwrap();
            mm.set_objective(y).unwrap();
            let sol = HighsBackend.solve(&mm, &exact()).unwrap();
            assert!((sol.value(y) - vert[2]).abs() < 1e-9);
        }
    }

    #[test]
    fn envelope_direction_and_dedup() {
        let e = PlaneEnvelope {
            planes: vec![
                Plane { coefficients: vec![1.0, 0.0], intercept: 0.0 },
                Plane { coefficients: vec![1.0, 0.0], intercept: 0.0 },
                Plane { coefficients: vec![0.0, 1.0], intercept: -1.0 },
            ],
            input_dim: 2,
            max_underestimate_gap: 0.0,
            max_overestimate: 0.0,
        };
        let mut m = MilpModel::new();
        let a = m.add_continuous("a", 0.0, 1.0).unwrap();
        let b = m.add_continuous("b", 0.0, 1.0).unwrap();
        let y = m.add_continuous("y", -5.0, 5.0).unwrap();
        assert!(matches!(encode_plane_envelope(&mut m, "e", &e, &[a, b], y, Direction::Exact), Err(EncodeError::Misuse(_))));
        let blk = encode_plane_envelope(&mut m, "e", &e, &[a, b], y, Direction::Epigraph).unwrap();
        assert_eq!(blk.binaries_used, 0);
        assert_eq!(m.num_constraints(), 2);
    }

    #[test]
    fn single_affine_plane_pins_output() {
        let e = PlaneEnvelope {
            planes: vec![Plane { coefficients: vec![2.0], intercept: 1.0 }],
            input_dim: 1,
            max_underestimate_gap: 0.0,
            max_overestimate: 0.0,
        };
        let mut m = MilpModel::new();
        let a = m.add_continuous("a", 0.0, 1.0).unwrap();
        let y = m.add_continuous("y", -5.0, 5.0).unwrap();
        encode_plane_envelope(&mut m, "e", &e, &[a], y, Direction::Epigraph).unwrap();
        m.fix(a, 0.75).unwrap();
        m.set_objective(y).unwrap();
        let s = HighsBackend.solve(&m, &exact()).unwrap();
        assert!((s.value(y) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn bilinear_node_and_fixed_factor() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 1.0).unwrap();
        let y = m.add_continuous("y", 0.0, 1.0).unwrap();
        let z = m.add_continuous("z", -1.0, 2.0).unwrap();
        let blk = encode_bilinear_product(&mut m, "p", x, y, z, (3, 3)).unwrap();
        assert_eq!(blk.binaries_used, 3);
        m.fix(x, 0.5).unwrap();
        m.fix(y, 0.5).unwrap();
        for sense in [1.0, -1.0] {
            let mut mm = m.clone();
            mm.set_objective(sense * z).unwrap();
            let s = HighsBackend.solve(&mm, &exact()).unwrap();
            assert!((s.value(z) - 0.25).abs() < 1e-9);
        }

        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 3.0, 3.0).unwrap();
        let y = m.add_continuous("y", 0.0, 4.0).unwrap();
        let z = m.add_continuous("z", 0.0, 20.0).unwrap();
        let blk = encode_bilinear_product(&mut m, "p", x, y, z, (3, 3)).unwrap();
        assert_eq!(blk.binaries_used, 0);
        m.fix(y, 2.0).unwrap();
        m.set_objective(z).unwrap();
        let s = HighsBackend.solve(&m, &exact()).unwrap();
        assert!((s.value(z) - 6.0).abs() < 1e-9);
    }

    #[test]
    fn axis_expressions_are_exact_at_breakpoints() {
        let mut m = MilpModel::new();
        let u = m.add_continuous("u", 1.0, 2.0).unwrap();
        let axis = AxisBlock::new(&mut m, "ax", u, vec![1.0, 1.25, 1.5, 1.75, 2.0]).unwrap();
        assert_eq!(axis.block.binaries_used, 2);
        let g = |x: f64| x * x * x;
        for &u0 in &axis.breakpoints {
            let mut mm = m.clone();
            mm.fix(u, u0).unwrap();
            let gv = mm.add_continuous("g", -100.0, 100.0).unwrap();
            mm.add_constraint("gdef", axis.expr(g) - gv, Relation::Eq, 0.0).unwrap();
            mm.set_objective(gv).unwrap();
            let s = HighsBackend.solve(&mm, &exact()).unwrap();
            assert!((s.value(gv) - g(u0)).abs() < 1e-9);
        }
    }
}
