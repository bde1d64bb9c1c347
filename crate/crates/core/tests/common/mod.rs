#![allow(dead_code)]

pub mod oracles;
pub mod toy;

use std::path::{Path, PathBuf};

use henopt::case::{load_case, parse_case, CaseDefinition};
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn reference_case() -> CaseDefinition {
    load_case(&data("reference_case.json")).unwrap()
}

/// (id, kind, t_in, t_out, F) with constant parameters.
pub type StreamSpec = (String, &'static str, f64, f64, f64);

/// A case with constant streams, one stage and flat performance curves.
pub fn constant_case(streams: &[StreamSpec], dt_min: f64) -> CaseDefinition {
    let rows: Vec<String> = streams
        .iter()
        .map(|(id, kind, a, b, f)| {
            format!(
                r#"{{"id": "{id}", "kind": "{kind}", "t_in": {{"constant": {a}}}, "t_out": {{"constant": {b}}}, "f": {{"constant": {f}}}, "u_coeff": 0.5}}"#
            )
        })
        .collect();
    let text = format!(
        r#"{{
      "opvar": {{"name": "u", "lower": 0.0, "upper": 1.0}},
      "streams": [{}],
      "products": [{{"index": 1, "name": "p", "h_prod": 44.0, "rho_prod": 800.0, "mu_prod": 1.0}}],
      "economics": {{"t_full_load": 8000, "af_inv": 0.05, "af_op": 1, "c_sys": 1e6, "c_el": 20,
                    "c_feedstock": [["water", 3.54]], "c_f_hex": 1013.6, "c_v_hex": 61.8, "beta": 0.8,
                    "eps_hu": 1.05, "eps_cu": 0.05}},
      "performance": {{
        "p_sys": {{"breakpoints": [0, 1], "values": [100, 120]}},
        "m_prod_total": {{"breakpoints": [0, 1], "values": [10, 12]}},
        "h_dot_prod": {{"breakpoints": [0, 1], "values": [50, 60]}},
        "feed_flows": [{{"breakpoints": [0, 1], "values": [0.1, 0.2]}}]
      }},
      "hen_config": {{"n_stages": 1, "dt_min": {dt_min}}}
    }}"#,
        rows.join(",\n")
    );
    parse_case(&text).unwrap()
}

/// Up to two hot and two cold constant streams with overlapping ranges.
pub fn random_tiny_case<R: Rng>(rng: &mut R) -> CaseDefinition {
    let n_hot = rng.gen_range(1..=2);
    let n_cold = rng.gen_range(1..=2);
    let mut s: Vec<StreamSpec> = Vec::new();
    for i in 0..n_hot {
        let t_in = rng.gen_range(120.0..250.0_f64).round();
        let t_out = rng.gen_range(40.0..t_in - 40.0_f64).round();
        s.push((format!("H{}", i + 1), "hot", t_in, t_out, rng.gen_range(0.5..3.0_f64)));
    }
    for i in 0..n_cold {
        let t_in = rng.gen_range(20.0..80.0_f64).round();
        let t_out = rng.gen_range(t_in + 40.0..200.0_f64).round();
        s.push((format!("C{}", i + 1), "cold", t_in, t_out, rng.gen_range(0.5..3.0_f64)));
    }
    constant_case(&s, 10.0)
}
