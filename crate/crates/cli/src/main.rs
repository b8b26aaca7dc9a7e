//! `subregkl`: command-line access to the subregular cell, the three sources
//! of inverse Kazhdan–Lusztig values, character numerators and
//! quasi-polynomial fits.
//!
//! Every numeric output is exact: integers, or rationals written `p/q`.
//! Exit status is 0 on success, 1 when a verification or check fails, and 2
//! on errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use subregkl::affine::{format_vec, parse_vec, parse_word, word_to_string, AffineWeyl};
use subregkl::cache::Cache;
use subregkl::cell::Cell;
use subregkl::character::{character_numerator, MSource, WeightMap};
use subregkl::closed::{box_points, corollary_findings};
use subregkl::module::kacmoody_cartan_check;
use subregkl::quasipoly::{oracle_samples, scan_minimal, shell_points, FitOutcome, HoldoutReport, ScanReport};
use subregkl::rootdata::CartanType;
use subregkl::verify::{emit, rows_to_csv, run_verify, to_json, Format, Methods, VerifyConfig};
use subregkl::weight::{format_rational, AffineWeight};

#[derive(Parser)]
#[command(name = "subregkl", version, about = "Inverse Kazhdan-Lusztig values on the subregular cell")]
struct Cli {
    /// Cache directory (overrides SUBREGKL_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cell enumeration.
    #[command(subcommand)]
    Cell(CellCommand),
    /// Inverse Kazhdan-Lusztig values.
    #[command(subcommand)]
    Kl(KlCommand),
    /// Truncated character numerator of an admissible weight.
    Char(CharArgs),
    /// Quasi-polynomial fit of one cell label.
    Quasipoly(QuasipolyArgs),
    /// Checks the Kac-Moody Cartan model of the cell module.
    CartanCheck(CartanArgs),
}

#[derive(Subcommand)]
enum CellCommand {
    /// Lists cell elements with their data and neighbours.
    List(CellListArgs),
}

#[derive(Subcommand)]
enum KlCommand {
    /// Prints the labelled values at one point.
    M(MArgs),
    /// Prints the value table over a box.
    Table(TableArgs),
    /// Cross-checks the three sources over a box and writes a report.
    Verify(VerifyArgs),
    /// Writes the difference-formula findings for the standard boxes.
    Findings(FindingsArgs),
}

#[derive(Args)]
struct CellListArgs {
    #[arg(long = "type")]
    kind: CartanType,
    /// Length window (default: the whole cell, or 12 in type C).
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct MArgs {
    #[arg(long = "type")]
    kind: CartanType,
    /// Coroot coordinates, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    /// Restricts the output to one label.
    #[arg(long)]
    label: Option<String>,
    /// `formula`, `hecke`, `cellmod`, a comma list, or `all`.
    #[arg(long, default_value = "all")]
    method: Methods,
    #[arg(long)]
    hecke_bound: Option<usize>,
}

#[derive(Args)]
struct BoxArgs {
    #[arg(long = "type")]
    kind: CartanType,
    /// Box radius; negative gives the empty box.
    #[arg(long = "box", allow_hyphen_values = true)]
    radius: i64,
    #[arg(long, default_value = "all")]
    methods: Methods,
    #[arg(long)]
    hecke_bound: Option<usize>,
    /// Largest number of group elements in the Hecke table.
    #[arg(long)]
    max_elements: Option<usize>,
}

impl BoxArgs {
    fn config(&self, audit: bool) -> VerifyConfig {
        let mut c = VerifyConfig::new(self.kind, self.radius);
        c.methods = self.methods;
        c.hecke_bound = self.hecke_bound;
        if let Some(m) = self.max_elements {
            c.max_elements = m;
        }
        c.audit = audit;
        c
    }
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    common: BoxArgs,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: BoxArgs,
    /// Report path; run statistics go to `<report>.run.json`.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Skips the difference-formula audit.
    #[arg(long)]
    no_audit: bool,
}

#[derive(Args)]
struct FindingsArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CharArgs {
    #[arg(long = "type")]
    kind: CartanType,
    /// The weight `λ`, e.g. `-1*L0`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Cell element, by label or reduced word.
    #[arg(long)]
    w: String,
    #[arg(long = "box")]
    radius: i64,
    /// `oracle`, `formula` or `corollary`.
    #[arg(long, default_value = "oracle")]
    source: MSource,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuasipolyArgs {
    #[arg(long = "type")]
    kind: CartanType,
    #[arg(long)]
    label: String,
    /// Radius of the training box.
    #[arg(long = "box")]
    radius: i64,
    /// Periods scanned are the divisors of this value.
    #[arg(long)]
    lmax: i64,
    #[arg(long)]
    dmax: u32,
    /// Radius of the holdout shell beyond the box.
    #[arg(long)]
    holdout: Option<i64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CartanArgs {
    #[arg(long = "type")]
    kind: CartanType,
    /// Length window of the cell (default: 12).
    #[arg(long, default_value_t = 12)]
    window: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let cache = match &cli.cache {
        Some(d) => Cache::at(d),
        None => Cache::from_env(),
    };
    match run(cli.command, &cache) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, cache: &Cache) -> Result<bool> {
    match command {
        Command::Cell(CellCommand::List(a)) => cell_list(a),
        Command::Kl(KlCommand::M(a)) => kl_m(a, cache),
        Command::Kl(KlCommand::Table(a)) => kl_table(a, cache),
        Command::Kl(KlCommand::Verify(a)) => kl_verify(a, cache),
        Command::Kl(KlCommand::Findings(a)) => findings(a),
        Command::Char(a) => char_cmd(a),
        Command::Quasipoly(a) => quasipoly(a),
        Command::CartanCheck(a) => cartan_check(a),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_cell(kind: CartanType, window: Option<usize>) -> Result<Cell> {
    let g = AffineWeyl::new(kind)?;
    Ok(match (kind, window) {
        (_, Some(w)) => Cell::new(g, w),
        (CartanType::C(_), None) => Cell::new(g, 12),
        (_, None) => Cell::full(g)?,
    })
}

#[derive(Serialize)]
struct CellRow {
    word: String,
    label: String,
    nu: Vec<i64>,
    mu: usize,
    length: usize,
    neighbors: Vec<String>,
}

fn cell_list(a: CellListArgs) -> Result<bool> {
    let cell = build_cell(a.kind, a.window)?;
    let ids = cell.ordered_ids();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, y) in cell.edges() {
        adj.entry(x).or_default().push(y);
        adj.entry(y).or_default().push(x);
    }
    let rows: Vec<CellRow> = ids
        .iter()
        .map(|&id| {
            let n = &cell.nodes[id];
            let mut nb: Vec<usize> = adj
                .get(&id)
                .map(|v| v.iter().copied().filter(|&j| cell.nodes[j].len <= cell.window()).collect())
                .unwrap_or_default();
            nb.sort_by(|&x, &y| {
                let (p, q) = (&cell.nodes[x], &cell.nodes[y]);
                p.len.cmp(&q.len).then_with(|| p.word.cmp(&q.word))
            });
            CellRow {
                word: word_to_string(&n.word),
                label: n.label.clone(),
                nu: n.nu.clone(),
                mu: n.mu,
                length: n.len,
                neighbors: nb.iter().map(|&j| word_to_string(&cell.nodes[j].word)).collect(),
            }
        })
        .collect();
    let text = match a.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["word", "label", "nu", "mu", "length", "neighbors"])?;
            for r in &rows {
                w.write_record([
                    r.word.clone(),
                    r.label.clone(),
                    format_vec(&r.nu),
                    r.mu.to_string(),
                    r.length.to_string(),
                    r.neighbors.join(" "),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    print!("{text}");
    Ok(true)
}

fn kl_m(a: MArgs, cache: &Cache) -> Result<bool> {
    let gamma = parse_vec(&a.gamma)?;
    let radius = gamma.iter().map(|x| x.abs()).max().unwrap_or(0);
    let mut config = VerifyConfig::new(a.kind, radius);
    config.methods = a.method;
    config.hecke_bound = a.hecke_bound;
    config.audit = false;
    config.points = Some(vec![gamma]);
    let (report, _) = run_verify(&config, cache)?;
    if let Some(l) = &a.label {
        if !report.labels.contains(l) {
            bail!("unknown label {l:?} for {}", a.kind);
        }
    }
    let show = |v: Option<i64>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
    let names = report.methods.clone();
    println!("label\t{}", names.join("\t"));
    for row in report.rows.iter().filter(|r| a.label.as_ref().map_or(true, |l| *l == r.label)) {
        let mut cols = Vec::new();
        for n in &names {
            cols.push(show(match *n {
                "formula" => row.m_formula,
                "hecke" => row.m_hecke,
                _ => row.m_cellmod,
            }));
        }
        println!("{}\t{}", row.label, cols.join("\t"));
    }
    Ok(report.passed)
}

fn kl_table(a: TableArgs, cache: &Cache) -> Result<bool> {
    let (report, _) = run_verify(&a.common.config(false), cache)?;
    let text = match a.format {
        Format::Csv => rows_to_csv(&report.rows)?,
        Format::Json => to_json(&report.rows)?,
    };
    write_or_print(a.out.as_deref(), &text)?;
    Ok(true)
}

fn sidecar(report: &Path) -> PathBuf {
    let mut s = report.as_os_str().to_owned();
    s.push(".run.json");
    PathBuf::from(s)
}

fn kl_verify(a: VerifyArgs, cache: &Cache) -> Result<bool> {
    let (report, run) = run_verify(&a.common.config(!a.no_audit), cache)?;
    let s = &report.summary;
    eprintln!(
        "{} box {}: {} rows, {} compared, {} mismatches, {} formula errors, {} beyond the Hecke table",
        report.kind, report.radius, s.rows, s.compared, s.mismatches, s.formula_errors, s.hecke_out_of_table
    );
    if let Some(audit) = &report.corollary_audit {
        eprintln!(
            "difference-formula audit: {} mismatches, {} at anchors",
            audit.mismatches.len(),
            audit.anchor_mismatches.len()
        );
    }
    match &a.report {
        Some(p) => {
            write_or_print(Some(p), &emit(a.format, &report)?)?;
            write_or_print(Some(&sidecar(p)), &to_json(&run)?)?;
        }
        None => print!("{}", emit(a.format, &report)?),
    }
    eprintln!("{}", if report.passed { "PASSED" } else { "FAILED" });
    Ok(report.passed)
}

fn findings(a: FindingsArgs) -> Result<bool> {
    let f = corollary_findings()?;
    write_or_print(a.out.as_deref(), &f.to_json()?)?;
    Ok(f.anchor_mismatches() == 0)
}

fn find_element(cell: &Cell, w: &str) -> Result<usize> {
    if let Some(id) = cell.find_label(w) {
        return Ok(id);
    }
    let word = parse_word(w)?;
    cell.find_word(&word)
        .or_else(|| cell.find(&cell.group.from_word(&word)))
        .ok_or_else(|| anyhow!("{w:?} is not a cell element within the window"))
}

#[derive(Serialize)]
struct WeightRow {
    lam: Vec<i64>,
    delta: String,
    coefficient: i64,
}

#[derive(Serialize)]
struct CharReport {
    kind: String,
    lambda: String,
    w: String,
    radius: i64,
    source: MSource,
    leading_weight: String,
    leading: Option<i64>,
    safe_weights: usize,
    unsafe_weights: usize,
    entries: Vec<WeightRow>,
}

fn weight_rows(map: &WeightMap) -> Vec<WeightRow> {
    map.entries
        .iter()
        .map(|(mu, &c)| WeightRow { lam: mu.lam.clone(), delta: format_rational(&mu.delta), coefficient: c })
        .collect()
}

fn char_cmd(a: CharArgs) -> Result<bool> {
    let g = AffineWeyl::new(a.kind)?;
    let lambda = AffineWeight::parse(g.rank(), &a.lambda)?;
    let mut cell = build_cell(a.kind, None)?;
    let id = find_element(&cell, &a.w)?;
    let map = character_numerator(&mut cell, &lambda, id, a.radius, a.source)?;
    let rows = weight_rows(&map);
    let text = match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = (0..=g.rank()).map(|i| format!("L{i}")).collect();
            header.push("delta".into());
            header.push("coefficient".into());
            w.write_record(&header)?;
            for r in &rows {
                let mut rec: Vec<String> = r.lam.iter().map(i64::to_string).collect();
                rec.push(r.delta.clone());
                rec.push(r.coefficient.to_string());
                w.write_record(&rec)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Json => to_json(&CharReport {
            kind: a.kind.to_string(),
            lambda: lambda.to_string(),
            w: cell.nodes[id].label.clone(),
            radius: a.radius,
            source: a.source,
            leading_weight: map.leading_weight.to_string(),
            leading: map.leading,
            safe_weights: map.safe_weights,
            unsafe_weights: map.unsafe_weights,
            entries: rows,
        })?,
    };
    write_or_print(a.out.as_deref(), &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct QuasipolyReport {
    kind: String,
    label: String,
    radius: i64,
    lmax: i64,
    dmax: u32,
    samples: usize,
    scan: ScanReport,
    fit: Option<FitOutcome>,
    holdout: Option<HoldoutReport>,
}

fn quasipoly(a: QuasipolyArgs) -> Result<bool> {
    if a.lmax < 1 {
        bail!("--lmax must be positive");
    }
    let mut cell = build_cell(a.kind, None)?;
    let id = cell
        .find_label(&a.label)
        .ok_or_else(|| anyhow!("unknown label {:?} for {}", a.label, a.kind))?;
    let rank = cell.group.rank();
    let samples = oracle_samples(&mut cell, id, &box_points(rank, a.radius))?;
    let scan = scan_minimal(&samples, a.lmax, a.dmax)?;
    let mut fit = None;
    let mut holdout = None;
    if let Some((l, d)) = scan.minimal {
        let outcome = subregkl::quasipoly::fit(&samples, l, d)?;
        if let (FitOutcome::Feasible(qp), Some(h)) = (&outcome, a.holdout) {
            if h > a.radius {
                let shell = oracle_samples(&mut cell, id, &shell_points(rank, a.radius + 1, h))?;
                holdout = Some(HoldoutReport {
                    period: l,
                    degree: d,
                    train_radius: a.radius,
                    holdout_radius: h,
                    outcome: outcome.tag(),
                    holdout_checked: shell.len(),
                    holdout_mismatches: qp.mismatches(&shell),
                });
            }
        }
        fit = Some(outcome);
    }
    eprintln!(
        "{} {}: minimal (period, degree) = {}",
        a.kind,
        a.label,
        scan.minimal.map_or_else(|| "none".to_string(), |(l, d)| format!("({l}, {d})"))
    );
    let report = QuasipolyReport {
        kind: a.kind.to_string(),
        label: a.label,
        radius: a.radius,
        lmax: a.lmax,
        dmax: a.dmax,
        samples: samples.len(),
        scan,
        fit,
        holdout,
    };
    write_or_print(a.report.as_deref(), &to_json(&report)?)?;
    Ok(true)
}

fn cartan_check(a: CartanArgs) -> Result<bool> {
    let cell = build_cell(a.kind, Some(a.window))?;
    let checks = kacmoody_cartan_check(&cell)?;
    let mut ok = true;
    for c in &checks {
        println!("s{}\t{} basis vectors\t{}", c.generator, c.checked, if c.passed { "ok" } else { "FAIL" });
        ok &= c.passed;
    }
    println!("{}", if ok { "PASSED" } else { "FAILED" });
    Ok(ok)
}

