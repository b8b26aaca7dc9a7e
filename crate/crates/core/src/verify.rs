//! Cross-checks of the three sources of `m_{w_ν}^{w_γ}` over a box, and the
//! report formats.
//!
//! The three sources are the closed formulas, inversion of the
//! Kazhdan–Lusztig table, and the cell-module expansion of `t_γ · C_1`.
//! Theorem-level agreement decides the outcome; the difference-formula
//! audit is reported alongside without affecting it.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine::{format_vec, word_to_string, AffineElement, AffineWeyl};
use crate::cache::{Cache, CacheKey, CacheStats};
use crate::cell::Cell;
use crate::closed::{audit_corollaries, box_points, m_formula, CorollaryAudit};
use crate::error::{Error, Result};
use crate::hecke::{default_bound, reachable_length, KlTable};
use crate::module::{expand_translation, translation_length};
use crate::rootdata::CartanType;

/// Which sources to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Methods {
    pub formula: bool,
    pub hecke: bool,
    pub cellmod: bool,
}

impl Methods {
    pub const ALL: Self = Self { formula: true, hecke: true, cellmod: true };

    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.formula {
            v.push("formula");
        }
        if self.hecke {
            v.push("hecke");
        }
        if self.cellmod {
            v.push("cellmod");
        }
        v
    }
}

impl FromStr for Methods {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(Self::ALL);
        }
        let mut m = Self { formula: false, hecke: false, cellmod: false };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "formula" => m.formula = true,
                "hecke" => m.hecke = true,
                "cellmod" => m.cellmod = true,
                _ => return Err(Error::Invalid(format!("unknown method {part:?}"))),
            }
        }
        if m.names().is_empty() {
            return Err(Error::Invalid("no method selected".into()));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub kind: CartanType,
    /// Box radius; a negative radius gives the empty box.
    pub radius: i64,
    pub methods: Methods,
    /// Length bound of the Hecke table (default per type).
    pub hecke_bound: Option<usize>,
    /// Largest number of group elements the Hecke table may hold.
    pub max_elements: usize,
    /// Whether to run the difference-formula audit.
    pub audit: bool,
    /// Explicit points replacing the box; labels still follow `radius`.
    pub points: Option<Vec<Vec<i64>>>,
}

impl VerifyConfig {
    pub fn new(kind: CartanType, radius: i64) -> Self {
        Self {
            kind,
            radius,
            methods: Methods::ALL,
            hecke_bound: None,
            max_elements: usize::MAX,
            audit: true,
            points: None,
        }
    }
}

/// One `(γ, label)` comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub gamma: Vec<i64>,
    pub label: String,
    pub m_formula: Option<i64>,
    pub m_hecke: Option<i64>,
    pub m_cellmod: Option<i64>,
    pub agree: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub rows: usize,
    /// Rows with at least two available values.
    pub compared: usize,
    pub mismatches: usize,
    pub formula_errors: usize,
    /// Rows whose `w_γ` lies beyond the Hecke table.
    pub hecke_out_of_table: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeckeInfo {
    pub bound: usize,
    /// Length up to which the table is complete under the element budget.
    pub complete: usize,
    pub budget_exceeded: bool,
}

/// Deterministic verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub kind: String,
    pub radius: i64,
    pub methods: Vec<&'static str>,
    pub labels: Vec<String>,
    pub hecke: Option<HeckeInfo>,
    pub summary: Summary,
    pub passed: bool,
    pub rows: Vec<Row>,
    pub corollary_audit: Option<CorollaryAudit>,
}

/// Run statistics that vary between runs, kept out of the report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunInfo {
    pub timing_ms: BTreeMap<String, u128>,
    pub cache: CacheStats,
    pub threads: usize,
}

/// Cached form of a cell-module expansion, keyed by node words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionArtifact {
    pub c1: i64,
    pub coeffs: BTreeMap<String, i64>,
}

/// Cached form of `v ↦ m_v^{w}(1)`, keyed by canonical words of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeColumnArtifact {
    pub bound: usize,
    pub values: BTreeMap<String, i64>,
}

/// Labels compared for a type: the cell labels in the order of the closed
/// formulas.  In type C, the scalar labels come first, followed by the
/// `kε_i` with `|k| ≤ radius + 1`.
pub fn report_labels(cell: &mut Cell, radius: i64) -> Result<Vec<String>> {
    let kind = cell.group.kind();
    let theta = cell.group.sys.theta.clone();
    let base: Vec<String> = m_formula(kind, &theta)?
        .values
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    let CartanType::C(n) = kind else {
        return Ok(base);
    };
    let kmax = radius.max(0) + 1;
    cell.grow_to(crate::cell::bruhat_rank_type_c(n, kmax, n)? + 1);
    let mut out = base;
    for id in cell.ordered_ids() {
        let label = &cell.nodes[id].label;
        if out.contains(label) {
            continue;
        }
        if let Some((k, _)) = crate::closed::parse_k_eps(label) {
            if k.abs() <= kmax {
                out.push(label.clone());
            }
        }
    }
    Ok(out)
}

fn label_element(cell: &Cell, label: &str) -> Result<AffineElement> {
    if label == "1" {
        return Ok(cell.group.identity());
    }
    let id = cell
        .find_label(label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    Ok(cell.nodes[id].elt.clone())
}

fn cellmod_values(
    cell: &mut Cell,
    points: &[Vec<i64>],
    cache: &Cache,
) -> Result<Vec<ExpansionArtifact>> {
    let g = cell.group.clone();
    let kind = g.kind();
    let keys: Vec<CacheKey> = points
        .iter()
        .map(|p| {
            let t = g.translation(p)?;
            Ok(CacheKey::new(kind, "expansion", word_to_string(&g.reduced_word(&t))))
        })
        .collect::<Result<_>>()?;
    let cached: Vec<Option<ExpansionArtifact>> = keys.iter().map(|k| cache.get(k)).collect();
    let fresh: Vec<bool> = cached.iter().map(Option::is_none).collect();
    let mut need = 0;
    for (p, c) in points.iter().zip(&cached) {
        if c.is_none() {
            need = need.max(translation_length(cell, p)?);
        }
    }
    cell.grow_to(need + 2);
    let cell: &Cell = cell;
    let computed: Vec<Result<ExpansionArtifact>> = points
        .par_iter()
        .zip(cached.into_par_iter())
        .map(|(p, c)| match c {
            Some(a) => Ok(a),
            None => {
                let e = expand_translation(cell, p)?;
                Ok(ExpansionArtifact {
                    c1: e.c1,
                    coeffs: e
                        .coeffs
                        .iter()
                        .map(|(&id, &v)| (word_to_string(&cell.nodes[id].word), v))
                        .collect(),
                })
            }
        })
        .collect();
    let mut out = Vec::with_capacity(points.len());
    for ((k, a), fresh) in keys.iter().zip(computed).zip(fresh) {
        let a = a?;
        if fresh {
            cache.put(k, &a)?;
        }
        out.push(a);
    }
    Ok(out)
}

struct HeckeSide {
    info: HeckeInfo,
    columns: Vec<Option<HeckeColumnArtifact>>,
}

fn hecke_values(
    g: &AffineWeyl,
    points: &[Vec<i64>],
    bound: usize,
    max_elements: usize,
    cache: &Cache,
) -> Result<HeckeSide> {
    let kind = g.kind();
    let mut ws = Vec::with_capacity(points.len());
    for p in points {
        let w = g.w_nu(p)?;
        let key = CacheKey::new(kind, "hecke-column", format!("L{bound}:{}", word_to_string(&g.reduced_word(&w))));
        ws.push((w, key));
    }
    let complete = reachable_length(g, bound, max_elements);
    let mut columns: Vec<Option<HeckeColumnArtifact>> = ws
        .iter()
        .map(|(w, k)| if g.length(w) <= complete { cache.get(k) } else { None })
        .collect();
    let missing = ws
        .iter()
        .zip(&columns)
        .any(|((w, _), c)| c.is_none() && g.length(w) <= complete);
    let info = HeckeInfo { bound, complete, budget_exceeded: complete < bound };
    if missing {
        let table = KlTable::build_with_budget(g, bound, max_elements);
        debug_assert_eq!(table.complete, complete);
        for ((w, key), slot) in ws.iter().zip(columns.iter_mut()) {
            if slot.is_some() || g.length(w) > table.complete {
                continue;
            }
            let values = table
                .inverse_column_at_one(w)?
                .into_iter()
                .map(|(v, c)| (word_to_string(&g.reduced_word(&table.elements[v])), c))
                .collect();
            let art = HeckeColumnArtifact { bound, values };
            cache.put(key, &art)?;
            *slot = Some(art);
        }
    }
    Ok(HeckeSide { info, columns })
}

fn full_cell(g: AffineWeyl) -> Result<Cell> {
    match g.kind() {
        CartanType::C(_) => Ok(Cell::new(g, 4)),
        _ => Cell::full(g),
    }
}

/// Runs the comparison.  The second value holds timing and cache counters.
pub fn run_verify(config: &VerifyConfig, cache: &Cache) -> Result<(VerifyReport, RunInfo)> {
    let kind = config.kind;
    let g = AffineWeyl::new(kind)?;
    let mut cell = full_cell(g.clone())?;
    let mut run = RunInfo { threads: rayon::current_num_threads(), ..RunInfo::default() };
    let mut clock = Instant::now();
    let mut lap = |name: &str, run: &mut RunInfo| {
        run.timing_ms.insert(name.to_string(), clock.elapsed().as_millis());
        clock = Instant::now();
    };
    let points = match &config.points {
        Some(p) => {
            for x in p {
                g.sys.check_dim(x)?;
            }
            p.clone()
        }
        None if config.radius < 0 => Vec::new(),
        None => box_points(g.rank(), config.radius),
    };
    let labels = if points.is_empty() { Vec::new() } else { report_labels(&mut cell, config.radius)? };
    let m = config.methods;

    let formulas: Vec<Option<crate::closed::FormulaResult>> = if m.formula {
        points.par_iter().map(|p| m_formula(kind, p).ok()).collect()
    } else {
        vec![None; points.len()]
    };
    lap("formula", &mut run);
    let cellmod = if m.cellmod && !points.is_empty() {
        Some(cellmod_values(&mut cell, &points, cache)?)
    } else {
        None
    };
    lap("cellmod", &mut run);
    let bound = config.hecke_bound.unwrap_or_else(|| default_bound(kind));
    let hecke = if m.hecke && !points.is_empty() {
        Some(hecke_values(&g, &points, bound, config.max_elements, cache)?)
    } else {
        None
    };
    lap("hecke", &mut run);

    let mut elements = Vec::with_capacity(labels.len());
    for l in &labels {
        elements.push(label_element(&cell, l)?);
    }
    let words: Vec<String> = elements.iter().map(|e| word_to_string(&g.reduced_word(e))).collect();
    let mut rows = Vec::with_capacity(points.len() * labels.len());
    let mut summary = Summary::default();
    for (pi, p) in points.iter().enumerate() {
        for (li, label) in labels.iter().enumerate() {
            let mut row = Row {
                gamma: p.clone(),
                label: label.clone(),
                m_formula: None,
                m_hecke: None,
                m_cellmod: None,
                agree: true,
            };
            if m.formula {
                row.m_formula = formulas[pi].as_ref().and_then(|f| f.get(label).ok());
                if row.m_formula.is_none() {
                    summary.formula_errors += 1;
                    row.agree = false;
                }
            }
            if let Some(cm) = &cellmod {
                let a = &cm[pi];
                row.m_cellmod = Some(if label == "1" {
                    a.c1
                } else {
                    a.coeffs.get(&words[li]).copied().unwrap_or(0)
                });
            }
            if let Some(h) = &hecke {
                match &h.columns[pi] {
                    Some(col) => row.m_hecke = Some(col.values.get(&words[li]).copied().unwrap_or(0)),
                    None => summary.hecke_out_of_table += 1,
                }
            }
            let vals: Vec<i64> = [row.m_formula, row.m_hecke, row.m_cellmod].into_iter().flatten().collect();
            if vals.len() >= 2 {
                summary.compared += 1;
            }
            if vals.windows(2).any(|w| w[0] != w[1]) {
                row.agree = false;
            }
            if !row.agree {
                summary.mismatches += 1;
            }
            rows.push(row);
        }
    }
    summary.rows = rows.len();
    lap("compare", &mut run);

    let corollary_audit = if config.audit && config.radius >= 0 {
        Some(audit_corollaries(&mut cell, config.radius, 2 * kind.rank() * (config.radius as usize + 1))?)
    } else {
        None
    };
    lap("audit", &mut run);
    run.cache = cache.stats();
    let passed = summary.mismatches == 0 && summary.formula_errors == 0;
    let report = VerifyReport {
        schema: crate::cache::SCHEMA_VERSION,
        kind: kind.to_string(),
        radius: config.radius,
        methods: m.names(),
        labels,
        hecke: hecke.map(|h| h.info),
        summary,
        passed,
        rows,
        corollary_audit,
    };
    Ok((report, run))
}

/// Output format of [`emit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Invalid(format!("unknown format {s:?}"))),
        }
    }
}

/// Header of m-table CSV files.
pub const CSV_HEADER: [&str; 6] = ["gamma", "label", "m_formula", "m_hecke", "m_cellmod", "agree"];

fn opt(v: Option<i64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Rows as CSV with [`CSV_HEADER`].
pub fn rows_to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Invalid(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        w.write_record([
            format_vec(&r.gamma),
            r.label.clone(),
            opt(r.m_formula),
            opt(r.m_hecke),
            opt(r.m_cellmod),
            r.agree.to_string(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Renders a report: the full JSON report, or the m-table as CSV.
pub fn emit(format: Format, report: &VerifyReport) -> Result<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => rows_to_csv(&report.rows),
    }
}
