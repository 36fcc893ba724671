//! The five subcommands. Each writes its files under the configured output
//! directory and returns the lines to print.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use weightlab_core::conformal::{bloch_norm_probe, chord_arc_scan, jensen_h1_probe, trace_curve, FourierSeries};
use weightlab_core::diagnostics::{bmo_norm, triadic_depth, DiagnosticsOptions, DiagnosticsReport};
use weightlab_core::riesz::{level_exponent, level_threshold};
use weightlab_core::welding::{build_welding, log_derivative_parts, quasisymmetry_constant};
use weightlab_core::{construct, grid_point, IntervalFamily, WeightBundle, WeightProvenance};

use crate::archive;
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Relative change below which two values in a `K` trend count as equal.
pub const TREND_RELATIVE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// `eps{ε}_K{K}_m{m}`, or `_G{grid}` when the grid is not `2·3^m`.
pub fn run_key(p: &WeightProvenance) -> String {
    let eps = p.epsilon.map_or("none".to_string(), |e| e.to_string());
    let grid = match grid_exponent(p.grid) {
        Some(m) => format!("m{m}"),
        None => format!("G{}", p.grid),
    };
    format!("eps{eps}_K{}_{grid}", p.terms())
}

pub fn grid_exponent(grid: usize) -> Option<u32> {
    (1..=16).find(|&m| 2 * 3usize.pow(m) == grid)
}

fn config_key(c: &ExperimentConfig) -> String {
    format!("eps{}_K{}_m{}", c.epsilon, c.terms, c.grid_exponent)
}

pub fn archive_path(c: &ExperimentConfig, t: f64) -> PathBuf {
    c.output_dir.join(format!("weight_{}_t{t}.csv", config_key(c)))
}

fn output_path(dir: &Path, kind: &str, w: &WeightBundle, ext: &str) -> PathBuf {
    dir.join(format!("{kind}_{}_t{}.{ext}", run_key(w.provenance()), w.t()))
}

pub fn build_weight(c: &ExperimentConfig) -> CliResult<Outcome> {
    let construction = construct(c.epsilon, c.terms, c.grid(), c.index_policy)?;
    let mut out = Outcome::default();
    out.lines.push(format!("epsilon={} K={} grid={}", c.epsilon, c.terms, c.grid()));
    out.lines.push(format!("{:>3} {:>8} {:>12} {:>5} {:>14} {}", "n", "p_n", "4^n", "N_n", "norm", "saturated"));
    for s in &construction.table {
        out.lines.push(format!(
            "{:>3} {:>8.5} {:>12} {:>5} {:>14.8} {}",
            s.level,
            level_exponent(s.level),
            level_threshold(s.level),
            s.index,
            s.norm,
            s.saturated
        ));
    }
    for t in c.archive_powers() {
        let path = archive_path(c, t);
        archive::save(&construction.power(t)?, &path)?;
        out.lines.push(format!("wrote {}", path.display()));
        out.files.push(path);
    }
    Ok(out)
}

/// The archives a command reads: the given one, or one per configured `t`.
fn inputs(c: &ExperimentConfig, given: Option<&Path>) -> CliResult<Vec<WeightBundle>> {
    match given {
        Some(p) => Ok(vec![archive::load(p)?]),
        None => c.t_values.iter().map(|&t| archive::load(&archive_path(c, t))).collect(),
    }
}

/// The base weight for welding and curves: the given archive or the `t = 1` one.
fn base(c: &ExperimentConfig, given: Option<&Path>) -> CliResult<WeightBundle> {
    match given {
        Some(p) => archive::load(p),
        None => archive::load(&archive_path(c, 1.0)),
    }
}

/// `base^t`, recorded with exponent `t·t_base`.
fn power(base: &WeightBundle, t: f64) -> CliResult<WeightBundle> {
    let values = if t == 1.0 { base.omega().clone() } else { base.omega().map(|v| v.powf(t))? };
    Ok(WeightBundle::new(values, base.t() * t, base.provenance().clone())?)
}

pub fn number(v: f64) -> Value {
    match serde_json::Number::from_f64(v) {
        Some(n) => Value::Number(n),
        None if v.is_nan() => Value::String("nan".into()),
        None if v > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

fn provenance_entries(w: &WeightBundle) -> Map<String, Value> {
    let p = w.provenance();
    let join = |v: Vec<String>| Value::String(v.join(","));
    let mut m = Map::new();
    m.insert("epsilon".into(), p.epsilon.map_or(Value::String("none".into()), number));
    m.insert("K".into(), Value::from(p.terms()));
    m.insert("grid".into(), Value::from(p.grid));
    m.insert("t".into(), number(w.t()));
    m.insert("indices".into(), join(p.selected_indices.iter().map(ToString::to_string).collect()));
    m.insert("saturated".into(), join(p.saturated.iter().map(ToString::to_string).collect()));
    m.insert("index_policy".into(), Value::String(p.index_policy.map_or("none", archive::policy_name).into()));
    m.insert("norm_convention".into(), Value::String(p.norm_convention.clone()));
    m
}

fn write_json(path: &Path, map: &Map<String, Value>) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(map).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn max_scale(c: &ExperimentConfig, grid: usize) -> u32 {
    c.scales().min(triadic_depth(grid))
}

/// Flat diagnostics record: provenance fields plus report entries.
pub fn diagnostics_record(w: &WeightBundle, c: &ExperimentConfig) -> CliResult<Map<String, Value>> {
    let options = DiagnosticsOptions {
        max_scale: Some(max_scale(c, w.grid_size())),
        p_values: c.p_values.clone(),
        deltas: c.delta_values.clone(),
        norm_exponents: c.norm_exponents.clone(),
        family: c.family,
        bmo_family: c.bmo_family,
    };
    let report = DiagnosticsReport::compute(w, &options)?;
    let mut m = provenance_entries(w);
    m.insert("family".into(), Value::String(report.family.name().into()));
    m.insert("bmo_family".into(), Value::String(report.bmo_family.name().into()));
    for (k, v) in report.entries() {
        m.insert(k, number(v));
    }
    Ok(m)
}

pub fn diagnose(c: &ExperimentConfig, given: Option<&Path>) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    for w in inputs(c, given)? {
        let record = diagnostics_record(&w, c)?;
        let path = output_path(&c.output_dir, "diagnostics", &w, "json");
        write_json(&path, &record)?;
        out.lines.push(format!("wrote {}", path.display()));
        out.files.push(path);
    }
    Ok(out)
}

pub fn welding(c: &ExperimentConfig, given: Option<&Path>) -> CliResult<Outcome> {
    let omega = base(c, given)?;
    let grid = omega.grid_size();
    let log_bmo = bmo_norm(&omega.omega().ln()?, IntervalFamily::Triadic)?;
    let mut out = Outcome::default();
    out.lines.push(format!("{:>8} {:>14} {:>14} {:>14}", "t", "qs", "bmo_log_h'", "total_mass"));
    for &t in &c.t_values {
        let map = build_welding(&omega, t)?;
        let powered = power(&omega, t)?;
        let qs = quasisymmetry_constant(&map, max_scale(c, grid))?;
        let (re, _) = log_derivative_parts(&map, &omega)?;
        let bmo = bmo_norm(&re, IntervalFamily::Triadic)?;

        let mut csv = String::new();
        let _ = writeln!(csv, "# t={}", powered.t());
        let _ = writeln!(csv, "# total_mass={}", map.total_mass());
        csv.push_str("x,g\n");
        for (k, g) in map.g_values().iter().enumerate() {
            let x = if k == grid { std::f64::consts::TAU } else { grid_point(k, grid) };
            let _ = writeln!(csv, "{x},{g}");
        }
        let csv_path = output_path(&c.output_dir, "welding", &powered, "csv");
        fs::create_dir_all(&c.output_dir).map_err(|e| CliError::io(&c.output_dir, e))?;
        write_text(&csv_path, &csv)?;

        let mut record = provenance_entries(&powered);
        record.insert("qs".into(), number(qs));
        record.insert("bmo_log_derivative".into(), number(bmo));
        record.insert("bmo_log_weight".into(), number(log_bmo));
        record.insert("total_mass".into(), number(map.total_mass()));
        record.insert("max_scale".into(), Value::from(max_scale(c, grid)));
        let json_path = output_path(&c.output_dir, "welding", &powered, "json");
        write_json(&json_path, &record)?;

        out.lines.push(format!("{:>8} {:>14.8} {:>14.8} {:>14.8}", powered.t(), qs, bmo, map.total_mass()));
        out.files.push(csv_path);
        out.files.push(json_path);
    }
    Ok(out)
}

pub fn curve(c: &ExperimentConfig, given: Option<&Path>) -> CliResult<Outcome> {
    let omega = base(c, given)?;
    let mut out = Outcome::default();
    out.lines.push(format!("{:>8} {:>14} {:>12} {:>12} {:>8}", "t", "chord_arc", "closure", "bloch", "jensen"));
    for &t in &c.t_values {
        let w = power(&omega, t)?;
        let trace = trace_curve(&w, c.tangent)?;
        let chord_arc = chord_arc_scan(&trace, c.pair_budget, c.seed);
        let bloch = bloch_norm_probe(&w, &c.radii, c.angles_per_radius)?;
        let jensen = jensen_h1_probe(&w, &c.radii, c.jensen_angles)?;

        let grid = w.grid_size();
        let mut csv = String::from("x,re,im,s\n");
        for (k, (z, s)) in trace.points.iter().zip(&trace.cumulative_length).enumerate() {
            let x = if k == grid { std::f64::consts::TAU } else { grid_point(k, grid) };
            let _ = writeln!(csv, "{x},{},{},{s}", z.re, z.im);
        }
        fs::create_dir_all(&c.output_dir).map_err(|e| CliError::io(&c.output_dir, e))?;
        let csv_path = output_path(&c.output_dir, "curve", &w, "csv");
        write_text(&csv_path, &csv)?;

        let series = FourierSeries::of(&w.omega().ln()?);
        let mut coefficients: Vec<(i64, usize)> = (0..series.len()).map(|j| (series.frequency(j), j)).collect();
        coefficients.sort();
        let mut table = String::from("# log weight\nk,re,im\n");
        for (k, j) in coefficients {
            let z = series.coefficients()[j];
            let _ = writeln!(table, "{k},{},{}", z.re, z.im);
        }
        let fourier_path = output_path(&c.output_dir, "fourier", &w, "csv");
        write_text(&fourier_path, &table)?;
        out.files.push(fourier_path);

        let mut record = provenance_entries(&w);
        record.insert("chord_arc".into(), number(chord_arc));
        record.insert("closure_defect".into(), number(trace.closure_defect));
        record.insert("closed".into(), Value::Bool(trace.closed));
        record.insert("length".into(), number(trace.length()));
        record.insert("tangent".into(), serde_json::to_value(c.tangent).expect("enum serialises"));
        record.insert("bloch".into(), number(bloch));
        record.insert("l1_norm".into(), number(jensen.l1_norm));
        record.insert("jensen_holds".into(), Value::Bool(jensen.jensen_holds));
        record.insert("h1_nondecreasing".into(), Value::Bool(jensen.h1_nondecreasing));
        record.insert("h1_bounded".into(), Value::Bool(jensen.h1_bounded));
        for probe in &jensen.probes {
            record.insert(format!("h1_mean.r{}", probe.r), number(probe.h1_mean));
            record.insert(format!("jensen_gap.r{}", probe.r), number(probe.min_jensen_gap));
        }
        let json_path = output_path(&c.output_dir, "curve", &w, "json");
        write_json(&json_path, &record)?;

        out.lines.push(format!(
            "{:>8} {:>14.8} {:>12.3e} {:>12.6} {:>8}",
            w.t(),
            chord_arc,
            trace.closure_defect,
            bloch,
            jensen.jensen_holds && jensen.h1_nondecreasing && jensen.h1_bounded
        ));
        out.files.push(csv_path);
        out.files.push(json_path);
    }
    Ok(out)
}

/// One row of the summary: a `(ε, K, G, t)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub epsilon: Option<f64>,
    pub terms: usize,
    pub grid: usize,
    pub t: f64,
    pub metrics: BTreeMap<String, Value>,
}

impl SummaryRow {
    pub fn key(&self) -> String {
        let eps = self.epsilon.map_or("none".to_string(), |e| e.to_string());
        format!("eps={eps},K={},G={},t={}", self.terms, self.grid, self.t)
    }
}

/// Whether a metric strictly increases with `K` at fixed `(ε, G, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trend {
    pub epsilon: Option<f64>,
    pub grid: usize,
    pub t: f64,
    pub metric: String,
    pub terms: Vec<usize>,
    pub values: Vec<f64>,
    pub increasing: bool,
}

/// `true` when every step rises by more than [`TREND_RELATIVE_FLOOR`] in relative terms.
pub fn strictly_increasing(values: &[f64]) -> bool {
    values.len() >= 2 && values.windows(2).all(|w| w[1] - w[0] > TREND_RELATIVE_FLOOR * w[0].abs())
}

const PROVENANCE_KEYS: [&str; 8] =
    ["epsilon", "K", "grid", "t", "indices", "saturated", "index_policy", "norm_convention"];

fn is_trend_metric(name: &str) -> bool {
    name.starts_with("ap.")
        || name.starts_with("rh.")
        || name == "a1"
        || name == "curve.chord_arc"
        || name == "welding.qs"
}

/// Reads every diagnostics, welding and curve record under `dir`.
pub fn collect(dir: &Path) -> CliResult<(Vec<SummaryRow>, Vec<Trend>)> {
    let entries = fs::read_dir(dir).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::missing(dir, "output directory"),
        _ => CliError::io(dir, e),
    })?;
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    let mut rows: BTreeMap<String, SummaryRow> = BTreeMap::new();
    for path in paths {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let prefix = match name.split('_').next() {
            Some(p @ ("diagnostics" | "welding" | "curve")) if name.ends_with(".json") => p,
            _ => continue,
        };
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let record: Map<String, Value> =
            serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        let bad = || CliError::validation(format!("{}: missing provenance fields", path.display()));
        let row = SummaryRow {
            epsilon: record.get("epsilon").and_then(Value::as_f64),
            terms: record.get("K").and_then(Value::as_u64).ok_or_else(bad)? as usize,
            grid: record.get("grid").and_then(Value::as_u64).ok_or_else(bad)? as usize,
            t: record.get("t").and_then(Value::as_f64).ok_or_else(bad)?,
            metrics: BTreeMap::new(),
        };
        let slot = rows.entry(row.key()).or_insert(row);
        for (k, v) in record {
            if PROVENANCE_KEYS.contains(&k.as_str()) {
                continue;
            }
            let key = if prefix == "diagnostics" { k } else { format!("{prefix}.{k}") };
            slot.metrics.insert(key, v);
        }
    }
    let rows: Vec<SummaryRow> = rows.into_values().collect();
    Ok((rows.clone(), trends(&rows)))
}

fn trends(rows: &[SummaryRow]) -> Vec<Trend> {
    let mut groups: BTreeMap<String, Vec<&SummaryRow>> = BTreeMap::new();
    for r in rows {
        let eps = r.epsilon.map_or("none".to_string(), |e| e.to_string());
        groups.entry(format!("{eps}|{}|{}", r.grid, r.t)).or_default().push(r);
    }
    let mut out = Vec::new();
    for group in groups.values_mut() {
        group.sort_by_key(|r| r.terms);
        if group.len() < 2 {
            continue;
        }
        let metrics: Vec<&String> = group[0].metrics.keys().filter(|k| is_trend_metric(k)).collect();
        for metric in metrics {
            let values: Option<Vec<f64>> =
                group.iter().map(|r| r.metrics.get(metric).and_then(Value::as_f64)).collect();
            let Some(values) = values else { continue };
            out.push(Trend {
                epsilon: group[0].epsilon,
                grid: group[0].grid,
                t: group[0].t,
                metric: metric.clone(),
                terms: group.iter().map(|r| r.terms).collect(),
                increasing: strictly_increasing(&values),
                values,
            });
        }
    }
    out
}

pub fn report(c: &ExperimentConfig) -> CliResult<Outcome> {
    let (rows, trends) = collect(&c.output_dir)?;
    if rows.is_empty() {
        return Err(CliError::missing(&c.output_dir, "diagnostics, welding or curve records"));
    }
    let mut table = Map::new();
    for r in &rows {
        table.insert(r.key(), Value::Object(r.metrics.clone().into_iter().collect()));
    }
    let mut trend_map = Map::new();
    let mut out = Outcome::default();
    for tr in &trends {
        let eps = tr.epsilon.map_or("none".to_string(), |e| e.to_string());
        let key = format!("eps={eps},G={},t={}:{}", tr.grid, tr.t, tr.metric);
        let mut entry = Map::new();
        entry.insert("K".into(), Value::from(tr.terms.clone()));
        entry.insert("values".into(), Value::Array(tr.values.iter().map(|&v| number(v)).collect()));
        entry.insert("increasing".into(), Value::Bool(tr.increasing));
        trend_map.insert(key.clone(), Value::Object(entry));
        out.lines.push(format!("{key} K={:?} increasing={}", tr.terms, tr.increasing));
    }
    let mut summary = Map::new();
    summary.insert("rows".into(), Value::Object(table));
    summary.insert("trends".into(), Value::Object(trend_map));
    summary.insert("trend_relative_floor".into(), number(TREND_RELATIVE_FLOOR));
    let path = c.output_dir.join("summary.json");
    write_json(&path, &summary)?;
    out.lines.insert(0, format!("{} rows, {} trends", rows.len(), trends.len()));
    out.lines.push(format!("wrote {}", path.display()));
    out.files.push(path);
    Ok(out)
}
