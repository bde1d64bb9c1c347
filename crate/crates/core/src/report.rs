//! Output files: stream plots, the front as CSV, solve times, summaries.

use std::fmt::Write as _;

use crate::case::{CaseDefinition, StreamKind};
use crate::evaluate::Evaluation;
use crate::hen::{HenDesign, UtilityKind};
use crate::pareto::{ParetoPoint, WindowFate, WindowRecord};
use crate::problem::SolvedPoint;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT graph with one lane per stream (hot side first), an `hx*` node per
/// exchanger labelled with duty and area, utilities at the stream ends and
/// the solved outlet and flow of every free-flow stream.
pub fn export_stream_plot(d: &HenDesign, c: &CaseDefinition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph design {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [fontsize=10];");
    let _ = writeln!(out, "  label={};", quote(&format!("u = {:.4} V, {} exchangers", d.u, d.hex_count)));
    let order = |k: StreamKind| match k {
        StreamKind::Hot => 0,
        StreamKind::Cs => 1,
        StreamKind::Cold => 2,
    };
    let mut streams: Vec<_> = c.streams.iter().collect();
    streams.sort_by_key(|s| order(s.kind));

    let mut hx = 0usize;
    let mut nodes: Vec<(String, String)> = Vec::new();
    // (stream id, sort key, node name) for building the lanes
    let mut stops: Vec<(String, f64, String)> = Vec::new();
    for r in &d.matches {
        let name = format!("hx{hx}");
        hx += 1;
        let label = format!("{}/{} st {}\\n{:.2} kW\\n{:.2} m2", r.hot, r.cold, r.stage, r.duty, r.area);
        nodes.push((name.clone(), format!("shape=circle, label={}", quote(&label))));
        stops.push((r.hot.clone(), r.stage as f64, name.clone()));
        // cold streams run from the last stage to the first
        stops.push((r.cold.clone(), -(r.stage as f64), name));
    }
    for r in &d.utilities {
        let name = format!("hx{hx}");
        hx += 1;
        let tag = match r.kind {
            UtilityKind::Cold => "CU",
            UtilityKind::Hot => "HU",
        };
        let label = format!("{tag} {}\\n{:.2} kW\\n{:.2} m2", r.stream, r.duty, r.area);
        nodes.push((name.clone(), format!("shape=doublecircle, label={}", quote(&label))));
        stops.push((r.stream.clone(), f64::INFINITY, name));
    }
    for s in &streams {
        let mut label = format!("{} ({})", s.id, format!("{:?}", s.kind).to_lowercase());
        if let Some(cs) = d.cs.iter().find(|x| x.id == s.id) {
            let _ = write!(label, "\\nt_out {:.1} C, F {:.3} kW/K", cs.t_out, cs.f);
        }
        let _ = writeln!(out, "  {} [shape=box, label={}];", quote(&format!("{}_in", s.id)), quote(&label));
        let _ = writeln!(out, "  {} [shape=point];", quote(&format!("{}_out", s.id)));
    }
    for (n, attrs) in &nodes {
        let _ = writeln!(out, "  {n} [{attrs}];");
    }
    for s in &streams {
        let mut lane: Vec<&(String, f64, String)> = stops.iter().filter(|t| t.0 == s.id).collect();
        lane.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut prev = quote(&format!("{}_in", s.id));
        let color = if s.kind.is_hot_side() { "red" } else { "blue" };
        for t in lane {
            let _ = writeln!(out, "  {prev} -> {} [color={color}];", t.2);
            prev = t.2.clone();
        }
        let _ = writeln!(out, "  {prev} -> {} [color={color}];", quote(&format!("{}_out", s.id)));
    }
    let _ = writeln!(out, "}}");
    out
}

pub const PARETO_HEADER: [&str; 16] = [
    "point",
    "window",
    "eta_pct",
    "c_prod_eur_per_kg",
    "u_v",
    "n_hex",
    "sum_q_cu_kw",
    "sum_q_hu_kw",
    "sum_q_kw",
    "p_el_kw",
    "tac_eur_per_yr",
    "eta_model_pct",
    "c_prod_model_eur_per_kg",
    "mip_gap",
    "solve_s",
    "status",
];

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |g| format!("{g:.6}"))
}

pub fn pareto_csv(points: &[ParetoPoint<SolvedPoint>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PARETO_HEADER).unwrap();
    for (k, p) in points.iter().enumerate() {
        let e = &p.payload.evaluation;
        w.write_record([
            k.to_string(),
            p.window_index.map_or("corner".into(), |i| i.to_string()),
            format!("{:.4}", 100.0 * e.eta),
            format!("{:.5}", e.c_prod),
            format!("{:.5}", e.u),
            e.hex_count.to_string(),
            format!("{:.3}", e.sum_q_cu),
            format!("{:.3}", e.sum_q_hu),
            format!("{:.3}", e.sum_q),
            format!("{:.3}", e.p_el),
            format!("{:.1}", e.tac),
            format!("{:.4}", 100.0 * p.payload.eta_model),
            format!("{:.5}", p.payload.cprod_model),
            opt(p.mip_gap),
            format!("{:.3}", p.solve_seconds),
            p.status.label().to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Per-solve seconds and a closing mean row over the solved entries.
pub fn solver_time_report(records: &[WindowRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["solve", "band_lo", "band_hi", "status", "mip_gap", "seconds", "note"]).unwrap();
    let mut solved = Vec::new();
    for r in records {
        let (name, note) = match (&r.index, &r.fate) {
            (None, _) => ("corner_min_f2".to_string(), String::new()),
            (Some(i), WindowFate::Corner) => (format!("window_{i}"), "corner_min_f1".to_string()),
            (Some(i), WindowFate::Accepted) => (format!("window_{i}"), String::new()),
            (Some(i), WindowFate::Skipped(why)) => (format!("window_{i}"), format!("skipped: {why}")),
        };
        if !matches!(r.fate, WindowFate::Skipped(_)) {
            solved.push(r.seconds);
        }
        w.write_record([
            name,
            format!("{:.6}", r.band.0),
            format!("{:.6}", r.band.1),
            r.status.label().to_string(),
            opt(r.gap),
            format!("{:.3}", r.seconds),
            note,
        ])
        .unwrap();
    }
    let mean = if solved.is_empty() { String::new() } else { format!("{:.3}", solved.iter().sum::<f64>() / solved.len() as f64) };
    w.write_record(["mean", "", "", &format!("{} solved", solved.len()), "", &mean, ""]).unwrap();
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Table of the headline figures of one design.
pub fn design_table(title: &str, e: &Evaluation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let rows: [(&str, String); 13] = [
        ("u [V]", format!("{:.4}", e.u)),
        ("n_HEX", e.hex_count.to_string()),
        ("sum q_match [kW]", format!("{:.2}", e.sum_q)),
        ("sum q_cu [kW]", format!("{:.2}", e.sum_q_cu)),
        ("sum q_hu [kW]", format!("{:.2}", e.sum_q_hu)),
        ("P_el [kW]", format!("{:.2}", e.p_el)),
        ("H_prod [kW]", format!("{:.2}", e.h_dot)),
        ("eta [%]", format!("{:.3}", 100.0 * e.eta)),
        ("CAPEX_sys [EUR/yr]", format!("{:.0}", e.capex_sys)),
        ("CAPEX_HEN [EUR/yr]", format!("{:.0}", e.capex_hen)),
        ("OPEX [EUR/yr]", format!("{:.0}", e.opex)),
        ("TAC [EUR/yr]", format!("{:.0}", e.tac)),
        ("c_prod [EUR/kg]", format!("{:.4}", e.c_prod)),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "  {k:<20} {v:>12}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use henopt_milp::SolveStatus;

    fn rec(index: Option<usize>, seconds: f64, fate: WindowFate) -> WindowRecord {
        WindowRecord { index, band: (1.0, 2.0), status: SolveStatus::OptimalWithinGap, gap: Some(0.01), seconds, fate }
    }

    #[test]
    fn mean_row_of_one_point() {
        let t = solver_time_report(&[rec(None, 10.0, WindowFate::Accepted)]);
        let last = t.lines().last().unwrap();
        assert!(last.starts_with("mean,"));
        assert!(last.contains(",10.000,"));
    }

    #[test]
    fn all_skipped_has_no_mean() {
        let t = solver_time_report(&[rec(Some(0), 3.0, WindowFate::Skipped("infeasible".into()))]);
        assert!(t.contains("skipped: infeasible"));
        assert!(t.lines().last().unwrap().contains("0 solved"));
    }
}
