//! Independent routes used by the oracle tests and the acceptance run.

use henopt::area::{EnvelopeCache, EnvelopeSettings};
use henopt::encode::{encode_pwl1d, encode_simplex_surface, AxisBlock, Direction, EncodedBlock};
use henopt::hen::{build_hen, check_solution, HenOptions, OpMode};
use henopt::objectives::{build_objectives, RatioGrids};
use henopt::pwl::{build_simplex_surface, SimplexSurface};
use henopt_milp::backend::{solve_lp, LpOutcome};
use henopt_milp::{Backend, HighsBackend, LinExpr, MilpModel, SolveOptions, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Shipped {
    pub name: &'static str,
    pub model: MilpModel,
    pub block: EncodedBlock,
    /// Inputs, then the output.
    pub vars: Vec<Var>,
    /// Every vertex of every piece in the same coordinates.
    pub vertices: Vec<Vec<f64>>,
}

fn vertices_of(block: &EncodedBlock) -> Vec<Vec<f64>> {
    block.lambda_vertices.iter().map(|(_, c)| c.clone()).collect()
}

fn surface_block(name: &'static str, s: &SimplexSurface) -> Shipped {
    let mut m = MilpModel::new();
    let x1 = m.add_continuous("x1", s.grid_x[0], *s.grid_x.last().unwrap()).unwrap();
    let x2 = m.add_continuous("x2", s.grid_y[0], *s.grid_y.last().unwrap()).unwrap();
    let vals = s.node_values.iter().flatten();
    let lo = vals.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.copied().fold(f64::NEG_INFINITY, f64::max);
    let y = m.add_continuous("y", lo, hi).unwrap();
    let block = encode_simplex_surface(&mut m, name, s, x1, x2, y).unwrap();
    let vertices = vertices_of(&block);
    Shipped { name, model: m, block, vars: vec![x1, x2, y], vertices }
}

pub fn shipped() -> Vec<Shipped> {
    let c = super::reference_case();
    let (lo, hi) = (c.opvar.lower, c.opvar.upper);
    let perf = &c.performance;
    let mut out = Vec::new();

    // efficiency: 4 x 4 over (H_prod, P_el)
    let h = (perf.h_dot_prod.eval(lo), perf.h_dot_prod.eval(hi));
    let p = (0.9 * perf.p_sys.eval(lo), 1.1 * perf.p_sys.eval(hi));
    let s = build_simplex_surface(|a, b| a / b, h, p, 4, 4).unwrap();
    out.push(surface_block("eta", &s));

    // production cost: 3 x 3 over (TAC, m_prod)
    let mp = (perf.m_prod_total.eval(lo), perf.m_prod_total.eval(hi));
    let t = c.economics.t_full_load;
    let s = build_simplex_surface(|a, b| a / (t * b), (6.5e5, 1.6e6), mp, 3, 3).unwrap();
    out.push(surface_block("cprod", &s));

    // stage duty of a stream whose flow moves with u: 3 x 3 over (u, drop)
    let h9 = c.stream("H9").unwrap();
    let f = h9.f.clone();
    let s = build_simplex_surface(|u, d| f.at(u).unwrap() * d, (lo, hi), (0.0, 791.5), 3, 3).unwrap();
    out.push(surface_block("stage", &s));

    // free-flow stream: 5 x 5 over (F, drop)
    let s = build_simplex_surface(|a, b| a * b, (59.6, 94.4), (10.0, 800.0), 5, 5).unwrap();
    out.push(surface_block("cs", &s));

    // shared operating-variable axis carrying the system power curve
    let mut m = MilpModel::new();
    let u = m.add_continuous("u", lo, hi).unwrap();
    let mut bps = c.opvar.grid(7);
    bps.extend(perf.p_sys.breakpoints().iter().copied());
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let axis = AxisBlock::new(&mut m, "axis", u, bps.clone()).unwrap();
    let vertices = bps.iter().map(|&b| vec![b, perf.p_sys.eval(b)]).collect();
    let y = m.add_continuous("p", perf.p_sys.min_value(), perf.p_sys.max_value()).unwrap();
    let e = axis.expr(|x| perf.p_sys.eval(x)) - y;
    m.add_constraint("p.def", e, henopt_milp::Relation::Eq, 0.0).unwrap();
    out.push(Shipped { name: "axis", model: m, block: axis.block, vars: vec![u, y], vertices });

    // a non-convex one-dimensional curve in exact mode
    let mut m = MilpModel::new();
    let x = m.add_continuous("x", 0.0, 4.0).unwrap();
    let y = m.add_continuous("y", -2.0, 2.0).unwrap();
    let curve = henopt::pwl::Pwl1D::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0, 1.5, -1.0, 2.0, 0.5]).unwrap();
    let block = encode_pwl1d(&mut m, "curve", &curve, x, y, Direction::Exact).unwrap();
    let vertices = vertices_of(&block);
    out.push(Shipped { name: "curve", model: m, block, vars: vec![x, y], vertices });
    out
}

pub fn enumerate(s: &Shipped) -> Option<f64> {
    let lower0: Vec<f64> = s.model.variables().iter().map(|v| v.lower).collect();
    let upper0: Vec<f64> = s.model.variables().iter().map(|v| v.upper).collect();
    let bits = s.block.binary_vars.len();
    let mut best: Option<f64> = None;
    for code in 0..(1usize << bits) {
        let (mut lo, mut up) = (lower0.clone(), upper0.clone());
        for (b, v) in s.block.binary_vars.iter().enumerate() {
            let on = ((code >> b) & 1) as f64;
            lo[v.index()] = on;
            up[v.index()] = on;
        }
        if let LpOutcome::Optimal { objective, .. } = solve_lp(&s.model, &lo, &up) {
            best = Some(best.map_or(objective, |b: f64| b.min(objective)));
        }
    }
    best
}

/// The LP over one simplex is minimised at a vertex.
pub fn vertex_minimum(s: &Shipped, weights: &[f64]) -> f64 {
    s.vertices
        .iter()
        .map(|coords| coords.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

/// Worst relative mismatch over 20 random objectives per shipped block,
/// against both the code enumeration and the vertex minimum.
pub fn encoding_mismatch(seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SolveOptions::default().with_gap(1e-10);
    let mut worst = 0.0_f64;
    for mut s in shipped() {
        for k in 0..20 {
            // weights normalised by the variable ranges so no term vanishes
            let w: Vec<f64> = s
                .vars
                .iter()
                .map(|&v| {
                    let var = s.model.variable(v);
                    rng.gen_range(-1.0..1.0) / (var.upper - var.lower).max(1e-9)
                })
                .collect();
            s.model.set_objective(LinExpr::sum(s.vars.iter().copied().zip(w.iter().copied()))).unwrap();
            let milp = HighsBackend.solve(&s.model, &opts).map_err(|e| e.to_string())?;
            let milp = milp.objective.ok_or(format!("{} objective {k}: no MILP optimum", s.name))?;
            let lp = enumerate(&s).ok_or(format!("{}: no feasible code", s.name))?;
            let v = vertex_minimum(&s, &w);
            for (what, other) in [("enumeration", lp), ("vertices", v)] {
                let rel = (milp - other).abs() / milp.abs().max(other.abs()).max(1.0);
                if rel > 1e-6 {
                    return Err(format!("{} objective {k}: milp {milp} vs {what} {other}", s.name));
                }
                worst = worst.max(rel);
            }
        }
    }
    Ok(worst)
}

/// Worst relative gap between the MILP annual cost and the best enumerated
/// existence pattern over `n` random small networks.
pub fn network_mismatch(seed: u64, n: usize) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cache = EnvelopeCache::new(EnvelopeSettings::default());
    let mut worst = 0.0_f64;
    for instance in 0..n {
        let c = super::random_tiny_case(&mut rng);
        let mut m = MilpModel::new();
        let h = build_hen(&mut m, &c, OpMode::Fixed(0.5), &HenOptions::default(), &cache).map_err(|e| e.to_string())?;
        let obj = build_objectives(&mut m, &c, &h, None, RatioGrids::default()).map_err(|e| e.to_string())?;
        m.set_objective(obj.tac_var).unwrap();
        let z: Vec<_> = h.binaries().collect();
        if z.len() != m.num_binaries() {
            return Err(format!("instance {instance}: binaries beyond the existence variables"));
        }
        let sol = HighsBackend.solve(&m, &SolveOptions::default().with_gap(1e-10)).map_err(|e| e.to_string())?;
        let milp = sol.objective.ok_or(format!("instance {instance}: no MILP solution"))?;
        let v = check_solution(&sol, &h, &c);
        if !v.is_empty() {
            return Err(format!("instance {instance}: {v:?}"));
        }
        let lower: Vec<f64> = m.variables().iter().map(|v| v.lower).collect();
        let upper: Vec<f64> = m.variables().iter().map(|v| v.upper).collect();
        let mut best = f64::INFINITY;
        for pattern in 0..(1usize << z.len()) {
            let (mut lo, mut up) = (lower.clone(), upper.clone());
            for (b, v) in z.iter().enumerate() {
                let on = ((pattern >> b) & 1) as f64;
                lo[v.index()] = on;
                up[v.index()] = on;
            }
            if let LpOutcome::Optimal { objective, .. } = solve_lp(&m, &lo, &up) {
                best = best.min(objective);
            }
        }
        let rel = (milp - best).abs() / best.abs();
        if rel > 1e-6 {
            return Err(format!("instance {instance}: milp {milp} vs enumeration {best} over {} patterns", 1 << z.len()));
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}
