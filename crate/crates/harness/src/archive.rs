//! Weight archives: `# key=value` header lines followed by one sample per
//! line, printed in shortest round-trip form so a reload is bit-exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use weightlab_core::{IndexPolicy, SampledFunction, WeightBundle, WeightProvenance};

use crate::error::{CliError, CliResult};

pub const FORMAT: &str = "weightlab-weight/1";

pub fn render(w: &WeightBundle) -> String {
    let p = w.provenance();
    let mut out = String::new();
    let mut header = |k: &str, v: String| {
        let _ = writeln!(out, "# {k}={v}");
    };
    header("format", FORMAT.into());
    header("grid", w.grid_size().to_string());
    header("epsilon", p.epsilon.map_or("none".into(), |e| e.to_string()));
    header("K", p.terms().to_string());
    header("indices", join(&p.selected_indices));
    header("saturated", join(&p.saturated));
    header("t", w.t().to_string());
    header("policy", p.index_policy.map_or("none", policy_name).into());
    header("norm", p.norm_convention.clone());
    for v in w.omega().values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn save(w: &WeightBundle, path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, render(w)).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> CliResult<WeightBundle> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::missing(path, "weight archive"),
        _ => CliError::io(path, e),
    })?;
    parse(&text).map_err(|e| CliError::new(e.kind, format!("{}: {}", path.display(), e.message)))
}

pub fn parse(text: &str) -> CliResult<WeightBundle> {
    let mut header = BTreeMap::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .trim()
                .split_once('=')
                .ok_or_else(|| CliError::validation(format!("line {}: malformed header", n + 1)))?;
            header.insert(k.trim().to_string(), v.trim().to_string());
        } else {
            let v: f64 =
                line.parse().map_err(|_| CliError::validation(format!("line {}: not a number: {line}", n + 1)))?;
            values.push(v);
        }
    }
    let field = |k: &str| {
        header.get(k).map(String::as_str).ok_or_else(|| CliError::validation(format!("missing header field {k}")))
    };
    if field("format")? != FORMAT {
        return Err(CliError::validation(format!("unsupported format {}", field("format")?)));
    }
    let grid: usize = parse_field("grid", field("grid")?)?;
    if grid != values.len() {
        return Err(CliError::validation(format!("grid: header says {grid}, found {} samples", values.len())));
    }
    let epsilon = match field("epsilon")? {
        "none" => None,
        s => Some(parse_field("epsilon", s)?),
    };
    let selected_indices: Vec<usize> = split(field("indices")?, "indices")?;
    let saturated: Vec<bool> = split(field("saturated")?, "saturated")?;
    let terms: usize = parse_field("K", field("K")?)?;
    if selected_indices.len() != terms || saturated.len() != terms {
        return Err(CliError::validation(format!("K: header says {terms}, indices and saturated disagree")));
    }
    let index_policy = match field("policy")? {
        "none" => None,
        "strict" => Some(IndexPolicy::Strict),
        "saturate" => Some(IndexPolicy::Saturate),
        other => return Err(CliError::validation(format!("policy: unknown value {other}"))),
    };
    let provenance = WeightProvenance {
        epsilon,
        selected_indices,
        saturated,
        grid,
        index_policy,
        norm_convention: field("norm")?.to_string(),
    };
    let t: f64 = parse_field("t", field("t")?)?;
    Ok(WeightBundle::new(SampledFunction::new(values)?, t, provenance)?)
}

pub fn policy_name(p: IndexPolicy) -> &'static str {
    match p {
        IndexPolicy::Strict => "strict",
        IndexPolicy::Saturate => "saturate",
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn parse_field<T: std::str::FromStr>(name: &str, s: &str) -> CliResult<T> {
    s.parse().map_err(|_| CliError::validation(format!("{name}: cannot parse {s:?}")))
}

fn split<T: std::str::FromStr>(s: &str, name: &str) -> CliResult<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_field(name, x.trim())).collect()
}
