//! Small dense two-phase simplex with depth-first branch and bound.
//!
//! Meant for oracles and tests on models with at most a few hundred rows;
//! it is neither fast nor clever.

use std::time::Instant;

use super::Backend;
use crate::model::{MilpModel, Relation, VarKind};
use crate::solution::{Solution, SolveError, SolveOptions, SolveStatus};

const EPS: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
const INT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { objective: f64, values: Vec<f64> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.a[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for k in 0..w {
            self.a[r * w + k] /= p;
        }
        let prow: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f.abs() > 0.0 {
                for k in 0..w {
                    self.a[i * w + k] -= f * prow[k];
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns flagged in `allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        let ncols = self.width - 1;
        let mut in_basis = vec![false; ncols];
        for &b in &self.basis {
            in_basis[b] = true;
        }
        let mut stall = 0usize;
        let mut last_obj = f64::INFINITY;
        for _ in 0..200_000 {
            let obj: f64 = (0..self.rows).map(|i| cost[self.basis[i]] * self.rhs(i)).sum();
            if obj < last_obj - 1e-12 {
                stall = 0;
                last_obj = obj;
            } else {
                stall += 1;
            }
            let bland = stall > 50;
            let mut enter = None;
            let mut best = -EPS;
            for j in 0..ncols {
                if !allowed[j] || in_basis[j] {
                    continue;
                }
                let d = cost[j]
                    - (0..self.rows)
                        .map(|i| cost[self.basis[i]] * self.at(i, j))
                        .sum::<f64>();
                if d < best {
                    best = d;
                    enter = Some(j);
                    if bland {
                        break;
                    }
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<usize> = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.rows {
                let aic = self.at(i, c);
                if aic > EPS {
                    let q = self.rhs(i) / aic;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            q < ratio - 1e-12
                                || (q <= ratio + 1e-12 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        ratio = q;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else { return false };
            in_basis[self.basis[r]] = false;
            in_basis[c] = true;
            self.pivot(r, c);
        }
        true
    }
}

/// Solves the LP relaxation of `model` with variable bounds overridden by
/// `lower`/`upper`.
pub fn solve_lp(model: &MilpModel, lower: &[f64], upper: &[f64]) -> LpOutcome {
    let n = model.num_vars();
    // x_j = offset_j + sum(sign * p_k)
    let mut offset = vec![0.0; n];
    let mut map: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut np = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (lower[j], upper[j]);
        if l > u + FEAS_TOL {
            return LpOutcome::Infeasible;
        }
        if l.is_finite() {
            offset[j] = l;
            map[j].push((np, 1.0));
            if u.is_finite() {
                bound_rows.push((np, (u - l).max(0.0)));
            }
            np += 1;
        } else if u.is_finite() {
            offset[j] = u;
            map[j].push((np, -1.0));
            np += 1;
        } else {
            map[j].push((np, 1.0));
            map[j].push((np + 1, -1.0));
            np += 2;
        }
    }

    struct Row {
        coef: Vec<(usize, f64)>,
        rel: Relation,
        rhs: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for con in model.constraints() {
        let mut coef = Vec::new();
        let mut rhs = con.rhs;
        for &(v, a) in con.expr.terms() {
            rhs -= a * offset[v.index()];
            for &(p, s) in &map[v.index()] {
                coef.push((p, a * s));
            }
        }
        rows.push(Row {
            coef,
            rel: con.relation,
            rhs,
        });
    }
    for &(p, ub) in &bound_rows {
        rows.push(Row {
            coef: vec![(p, 1.0)],
            rel: Relation::Le,
            rhs: ub,
        });
    }
    for r in &mut rows {
        if r.rhs < 0.0 {
            r.rhs = -r.rhs;
            for c in &mut r.coef {
                c.1 = -c.1;
            }
            r.rel = match r.rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.rel != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.rel != Relation::Le).count();
    let ncols = np + n_slack + n_art;
    let width = ncols + 1;
    let mut t = Tableau {
        rows: m,
        width,
        a: vec![0.0; m * width],
        basis: vec![0; m],
    };
    let mut s = np;
    let mut art = np + n_slack;
    for (i, r) in rows.iter().enumerate() {
        for &(p, a) in &r.coef {
            t.a[i * width + p] += a;
        }
        t.a[i * width + ncols] = r.rhs;
        match r.rel {
            Relation::Le => {
                t.a[i * width + s] = 1.0;
                t.basis[i] = s;
                s += 1;
            }
            Relation::Ge => {
                t.a[i * width + s] = -1.0;
                s += 1;
                t.a[i * width + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
            Relation::Eq => {
                t.a[i * width + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
        }
    }

    let is_art = |c: usize| c >= np + n_slack;
    if n_art > 0 {
        let cost1: Vec<f64> = (0..ncols).map(|c| if is_art(c) { 1.0 } else { 0.0 }).collect();
        let allowed = vec![true; ncols];
        t.optimize(&cost1, &allowed);
        let infeas: f64 = (0..m)
            .filter(|&i| is_art(t.basis[i]))
            .map(|i| t.rhs(i))
            .sum();
        let scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return LpOutcome::Infeasible;
        }
        for i in 0..m {
            if is_art(t.basis[i]) {
                if let Some(c) = (0..np + n_slack).find(|&c| t.at(i, c).abs() > 1e-7) {
                    t.pivot(i, c);
                }
            }
        }
    }

    let mut cost2 = vec![0.0; ncols];
    for &(v, c) in model.objective().terms() {
        for &(p, sgn) in &map[v.index()] {
            cost2[p] += c * sgn;
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|c| !is_art(c)).collect();
    if !t.optimize(&cost2, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut p = vec![0.0; ncols];
    for i in 0..m {
        p[t.basis[i]] = t.rhs(i);
    }
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let x = offset[j] + map[j].iter().map(|&(k, s)| s * p[k]).sum::<f64>();
            x.clamp(lower[j], upper[j])
        })
        .collect();
    let objective = model.objective().eval(&values);
    LpOutcome::Optimal { objective, values }
}

/// Reference MILP solver.
#[derive(Clone, Debug)]
pub struct ReferenceBackend {
    pub node_limit: usize,
}

impl Default for ReferenceBackend {
    fn default() -> Self {
        ReferenceBackend {
            node_limit: 200_000,
        }
    }
}

impl Backend for ReferenceBackend {
    fn name(&self) -> &str {
        "reference"
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolveError> {
        let start = Instant::now();
        let lower: Vec<f64> = model.variables().iter().map(|v| v.lower).collect();
        let upper: Vec<f64> = model.variables().iter().map(|v| v.upper).collect();
        let ints: Vec<usize> = model
            .variables()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(j, _)| j)
            .collect();

        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut stack = vec![(lower, upper)];
        let mut nodes = 0usize;
        let mut open_bound = f64::INFINITY;
        let mut timed_out = false;
        while let Some((lo, up)) = stack.pop() {
            nodes += 1;
            if nodes > self.node_limit || start.elapsed().as_secs_f64() > opts.time_limit_s {
                timed_out = true;
                stack.push((lo, up));
                break;
            }
            let (obj, vals) = match solve_lp(model, &lo, &up) {
                LpOutcome::Optimal { objective, values } => (objective, values),
                LpOutcome::Infeasible => continue,
                LpOutcome::Unbounded => {
                    if ints.is_empty() {
                        return Err(SolveError::Backend("LP is unbounded".into()));
                    }
                    return Err(SolveError::Backend("relaxation is unbounded".into()));
                }
            };
            if let Some((inc, _)) = &best {
                if obj >= inc - opts.mip_gap * inc.abs().max(1e-9) - 1e-9 {
                    continue;
                }
            }
            let frac = ints
                .iter()
                .copied()
                .filter(|&j| (vals[j] - vals[j].round()).abs() > INT_TOL)
                .max_by(|&a, &b| {
                    let fa = (vals[a] - vals[a].round()).abs();
                    let fb = (vals[b] - vals[b].round()).abs();
                    fa.partial_cmp(&fb).unwrap()
                });
            match frac {
                None => {
                    let mut v = vals;
                    for &j in &ints {
                        v[j] = v[j].round();
                    }
                    let o = model.objective().eval(&v);
                    if best.as_ref().is_none_or(|(b, _)| o < *b) {
                        best = Some((o, v));
                    }
                }
                Some(j) => {
                    let mut lo0 = lo.clone();
                    let mut up0 = up.clone();
                    up0[j] = 0.0;
                    lo0[j] = lo0[j].min(0.0);
                    let mut lo1 = lo;
                    let up1 = up;
                    lo1[j] = 1.0;
                    // explore the rounding direction first
                    if vals[j] >= 0.5 {
                        stack.push((lo0, up0));
                        stack.push((lo1, up1));
                    } else {
                        stack.push((lo1, up1));
                        stack.push((lo0, up0));
                    }
                }
            }
        }
        if timed_out {
            for (lo, up) in &stack {
                if let LpOutcome::Optimal { objective, .. } = solve_lp(model, lo, up) {
                    open_bound = open_bound.min(objective);
                }
            }
        }
        let wall_time = start.elapsed();
        Ok(match best {
            None => Solution {
                status: if timed_out {
                    SolveStatus::TimeoutNoSolution
                } else {
                    SolveStatus::Infeasible
                },
                objective: None,
                gap: None,
                values: Vec::new(),
                wall_time,
            },
            Some((obj, values)) => {
                let gap = if timed_out && open_bound < obj {
                    (obj - open_bound) / obj.abs().max(1e-9)
                } else {
                    0.0
                };
                Solution {
                    status: if timed_out && gap > opts.mip_gap {
                        SolveStatus::TimeoutWithIncumbent
                    } else {
                        SolveStatus::OptimalWithinGap
                    },
                    objective: Some(obj),
                    gap: Some(gap),
                    values,
                    wall_time,
                }
            }
        })
    }
}
