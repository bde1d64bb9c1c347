//! Fixed-format MPS emission and a whitespace-tolerant MPS reader.
//!
//! Columns are written as `X0000001, X0000002, ...` and rows as
//! `R0000001, ...` in declaration order, so every name fits the 8-character
//! fixed-format field and a solver's column order maps straight back to
//! [`Var`](crate::Var) indices. The objective constant is written as the RHS
//! of the objective row with the usual sign (`offset = -rhs`).

use std::collections::HashMap;
use std::fmt::{self, Write};

use crate::model::{LinExpr, MilpModel, ModelError, Relation, Var, VarKind};

const OBJ_ROW: &str = "COST";

pub fn column_name(i: usize) -> String {
    format!("X{:07}", i + 1)
}

pub fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

/// Shortest decimal that parses back to exactly `x`.
fn num(x: f64) -> String {
    let plain = format!("{x}");
    let sci = format!("{x:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

fn entry(out: &mut String, a: &str, b: &str, c: &str) {
    let _ = writeln!(out, "    {a:<8}  {b:<8}  {c:>12}");
}

/// Serializes `model` as fixed-format MPS.
pub fn emit_mps(model: &MilpModel) -> String {
    emit_mps_named(model, "HENOPT")
}

pub fn emit_mps_named(model: &MilpModel, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for (i, c) in model.constraints().iter().enumerate() {
        let t = match c.relation {
            Relation::Le => 'L',
            Relation::Ge => 'G',
            Relation::Eq => 'E',
        };
        let _ = writeln!(out, " {t}  {}", row_name(i));
    }

    // column-major view of the rows
    let n = model.num_vars();
    let mut cols: Vec<Vec<(String, f64)>> = vec![Vec::new(); n];
    for &(v, c) in model.objective().terms() {
        cols[v.index()].push((OBJ_ROW.to_string(), c));
    }
    for (r, con) in model.constraints().iter().enumerate() {
        for &(v, c) in con.expr.terms() {
            cols[v.index()].push((row_name(r), c));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0usize;
    for (j, var) in model.variables().iter().enumerate() {
        let is_int = var.kind == VarKind::Binary;
        if is_int != in_int {
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    M{marker:07}  'MARKER'                 {tag}");
            marker += 1;
            in_int = is_int;
        }
        let cname = column_name(j);
        if cols[j].is_empty() {
            entry(&mut out, &cname, OBJ_ROW, "0");
        }
        for (row, c) in &cols[j] {
            entry(&mut out, &cname, row, &num(*c));
        }
    }
    if in_int {
        let _ = writeln!(out, "    M{marker:07}  'MARKER'                 'INTEND'");
    }

    out.push_str("RHS\n");
    let constant = model.objective().constant_part();
    if constant != 0.0 {
        entry(&mut out, "RHS", OBJ_ROW, &num(-constant));
    }
    for (i, c) in model.constraints().iter().enumerate() {
        if c.rhs != 0.0 {
            entry(&mut out, "RHS", &row_name(i), &num(c.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (j, var) in model.variables().iter().enumerate() {
        let cname = column_name(j);
        let mut bound = |kind: &str, value: Option<f64>| {
            let _ = match value {
                Some(v) => writeln!(out, " {kind} BND       {cname:<8}  {:>12}", num(v)),
                None => writeln!(out, " {kind} BND       {cname}"),
            };
        };
        let (lo, up) = (var.lower, var.upper);
        if var.kind == VarKind::Binary {
            if lo == up {
                bound("FX", Some(lo));
            } else {
                bound("UP", Some(up));
                if lo != 0.0 {
                    bound("LO", Some(lo));
                }
            }
            continue;
        }
        if lo == up {
            bound("FX", Some(lo));
        } else if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            bound("FR", None);
        } else {
            if lo == f64::NEG_INFINITY {
                bound("MI", None);
            } else if lo != 0.0 {
                bound("LO", Some(lo));
            }
            if up != f64::INFINITY {
                bound("UP", Some(up));
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for MpsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPS line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for MpsError {}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Ranges,
}

struct ColDraft {
    name: String,
    integer: bool,
    lower: f64,
    upper: f64,
    upper_set: bool,
}

/// Parses MPS text (fixed or free format with names free of spaces).
///
/// Integer columns must end up with bounds inside `[0, 1]`; general
/// integers are rejected since the model has no such kind.
pub fn parse_mps(text: &str) -> Result<MilpModel, MpsError> {
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut rows: Vec<(String, Relation)> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut cols: Vec<ColDraft> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut obj: Vec<(usize, f64)> = Vec::new();
    let mut rhs: HashMap<usize, f64> = HashMap::new();
    let mut obj_rhs = 0.0;
    let mut in_int = false;

    let err = |line: usize, message: String| MpsError { line, message };

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let tok: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            section = match tok[0] {
                "NAME" | "OBJSENSE" => Section::None,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "RANGES" => Section::Ranges,
                "ENDATA" => break,
                other => return Err(err(ln, format!("unknown section `{other}`"))),
            };
            continue;
        }
        let parse_num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(ln, format!("bad number `{s}`")))
        };
        match section {
            Section::None => {}
            Section::Ranges => return Err(err(ln, "RANGES are not supported".into())),
            Section::Rows => {
                if tok.len() < 2 {
                    return Err(err(ln, "row entry needs a type and a name".into()));
                }
                let rel = match tok[0] {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(tok[1].to_string());
                        }
                        continue;
                    }
                    "L" => Relation::Le,
                    "G" => Relation::Ge,
                    "E" => Relation::Eq,
                    t => return Err(err(ln, format!("unknown row type `{t}`"))),
                };
                if row_index.insert(tok[1].to_string(), rows.len()).is_some() {
                    return Err(err(ln, format!("duplicate row `{}`", tok[1])));
                }
                rows.push((tok[1].to_string(), rel));
            }
            Section::Columns => {
                if tok.len() >= 3 && tok[1] == "'MARKER'" {
                    in_int = match tok[2] {
                        "'INTORG'" => true,
                        "'INTEND'" => false,
                        m => return Err(err(ln, format!("unknown marker {m}"))),
                    };
                    continue;
                }
                if tok.len() != 3 && tok.len() != 5 {
                    return Err(err(ln, "column entry needs 3 or 5 fields".into()));
                }
                let j = match col_index.get(tok[0]) {
                    Some(&j) => j,
                    None => {
                        let j = cols.len();
                        col_index.insert(tok[0].to_string(), j);
                        cols.push(ColDraft {
                            name: tok[0].to_string(),
                            integer: in_int,
                            lower: 0.0,
                            upper: f64::INFINITY,
                            upper_set: false,
                        });
                        entries.push(Vec::new());
                        j
                    }
                };
                for pair in tok[1..].chunks(2) {
                    let value = parse_num(pair[1])?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        obj.push((j, value));
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| err(ln, format!("unknown row `{}`", pair[0])))?;
                        entries[j].push((r, value));
                    }
                }
            }
            Section::Rhs => {
                let fields = if tok.len() % 2 == 1 { &tok[1..] } else { &tok[..] };
                for pair in fields.chunks(2) {
                    if pair.len() != 2 {
                        return Err(err(ln, "dangling RHS field".into()));
                    }
                    let value = parse_num(pair[1])?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        obj_rhs = value;
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| err(ln, format!("unknown row `{}`", pair[0])))?;
                        rhs.insert(r, value);
                    }
                }
            }
            Section::Bounds => {
                if tok.len() < 3 {
                    return Err(err(ln, "bound entry too short".into()));
                }
                let kind = tok[0];
                let needs_value = !matches!(kind, "FR" | "MI" | "PL" | "BV");
                let (cname, value) = if needs_value {
                    if tok.len() < 4 {
                        return Err(err(ln, format!("bound {kind} needs a value")));
                    }
                    (tok[2], parse_num(tok[3])?)
                } else {
                    (tok[2], 0.0)
                };
                let j = *col_index
                    .get(cname)
                    .ok_or_else(|| err(ln, format!("unknown column `{cname}`")))?;
                let c = &mut cols[j];
                match kind {
                    "UP" => {
                        c.upper = value;
                        c.upper_set = true;
                    }
                    "LO" => c.lower = value,
                    "FX" => {
                        c.lower = value;
                        c.upper = value;
                        c.upper_set = true;
                    }
                    "FR" => {
                        c.lower = f64::NEG_INFINITY;
                        c.upper = f64::INFINITY;
                        c.upper_set = true;
                    }
                    "MI" => c.lower = f64::NEG_INFINITY,
                    "PL" => {
                        c.upper = f64::INFINITY;
                        c.upper_set = true;
                    }
                    "BV" => {
                        c.integer = true;
                        c.lower = 0.0;
                        c.upper = 1.0;
                        c.upper_set = true;
                    }
                    "LI" => {
                        c.integer = true;
                        c.lower = value;
                    }
                    "UI" => {
                        c.integer = true;
                        c.upper = value;
                        c.upper_set = true;
                    }
                    k => return Err(err(ln, format!("unknown bound type `{k}`"))),
                }
            }
        }
    }

    let mut model = MilpModel::new();
    let mut handles: Vec<Var> = Vec::with_capacity(cols.len());
    for c in &cols {
        let kind = if c.integer {
            let upper = if c.upper_set { c.upper } else { 1.0 };
            if c.lower < 0.0 || upper > 1.0 {
                return Err(err(
                    0,
                    format!("integer column `{}` is not binary", c.name),
                ));
            }
            VarKind::Binary
        } else {
            VarKind::Continuous
        };
        let upper = if c.integer && !c.upper_set { 1.0 } else { c.upper };
        let v = model
            .add_variable(c.name.clone(), kind, c.lower, upper)
            .map_err(|e| err(0, e.to_string()))?;
        handles.push(v);
    }
    let mut row_terms: Vec<LinExpr> = vec![LinExpr::new(); rows.len()];
    for (j, list) in entries.iter().enumerate() {
        for &(r, a) in list {
            row_terms[r].add_term(handles[j], a);
        }
    }
    for (r, ((name, rel), expr)) in rows.iter().zip(row_terms).enumerate() {
        let b = rhs.get(&r).copied().unwrap_or(0.0);
        model
            .add_constraint(name.clone(), expr, *rel, b)
            .map_err(|e: ModelError| err(0, e.to_string()))?;
    }
    let mut objective = LinExpr::sum(obj.iter().map(|&(j, a)| (handles[j], a)));
    objective.add_constant(-obj_rhs);
    model
        .set_objective(objective)
        .map_err(|e| err(0, e.to_string()))?;
    Ok(model)
}
