use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use hypgrpd_core::logscale::*;

use crate::report::{CmdResult, Failure, Report};
use crate::sources::read_json;

#[derive(Args, Debug)]
pub struct DeltaArgs {
    /// Log-scale JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Second log-scale on the same points; reports equivalence constants.
    #[arg(long)]
    pub compare: Option<PathBuf>,
}

pub fn delta(a: &DeltaArgs, seed: u64) -> CmdResult {
    let (v, input) = read_json(&a.input, "logscale")?;
    let ls = LogScale::from_json(&v)?;
    let mut result = json!({"points": ls.points(), "delta": delta_of(&ls), "min": ls.min_value(), "max": ls.max_value()});
    let mut rep = Report::new("logscale-delta", seed).input(input);
    if let Some(p) = &a.compare {
        let (v2, input2) = read_json(p, "compare")?;
        let other = LogScale::from_json(&v2)?;
        let e = equivalence_bounds(&ls, &other)?;
        result["equivalence"] = json!({
            "max_difference": e.max_difference,
            "lipschitz_k": e.lipschitz_k,
            "holder": e.holder.map(|(c, k)| json!({"c": c.to_string(), "k": k})),
        });
        rep = rep.input(input2);
    }
    Ok(rep.result(result))
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    /// Log-scale JSON file, or a metric table with --from-metric.
    #[arg(long)]
    pub input: PathBuf,
    /// δ used for the metric; defaults to max(δ(ℓ), 1).
    #[arg(long)]
    pub delta: Option<i64>,
    /// Read a metric table and output its log-scale instead.
    #[arg(long)]
    pub from_metric: bool,
}

pub fn metric(a: &MetricArgs, seed: u64) -> CmdResult {
    if a.from_metric {
        let (v, input) = read_json(&a.input, "metric")?;
        let m = MetricTable::from_json(&v)?;
        let ls = logscale_from_metric(&m);
        return Ok(Report::new("logscale-metric", seed).input(input).result(json!({"logscale": ls.to_json(), "delta": delta_of(&ls)})));
    }
    let (v, input) = read_json(&a.input, "logscale")?;
    let ls = LogScale::from_json(&v)?;
    let delta = match a.delta {
        Some(d) if d < 1 => return Err(Failure::input("--delta must be positive")),
        Some(d) => d,
        None => delta_of(&ls).max(1),
    };
    let m = metric_from_logscale(&ls, delta)?;
    let triangle = m.triangle_violation();
    let bounds = frink_bounds_hold(&ls, &m, delta);
    let result = json!({
        "delta": delta,
        "alpha": format!("2^(-1/{})", 2 * delta),
        "metric": m.to_json(),
        "triangle_violation": triangle.map(|(x, y, z)| vec![x, y, z]),
        "bounds_hold": bounds,
    });
    Ok(Report::new("logscale-metric", seed).input(input).budget("delta", delta).result(result).violation_if(triangle.is_some() || !bounds))
}

#[derive(Args, Debug)]
pub struct PasteArgs {
    /// JSON with "points", "charts" (log-scales on subsets) and "overlap_bound".
    #[arg(long)]
    pub input: PathBuf,
}

pub fn paste(a: &PasteArgs, seed: u64) -> CmdResult {
    let (v, input) = read_json(&a.input, "charts")?;
    let points: Vec<String> = serde_json::from_value(v.get("points").cloned().unwrap_or(Value::Null)).map_err(|e| Failure::input(format!("points: {e}")))?;
    let charts = v.get("charts").and_then(Value::as_array).ok_or_else(|| Failure::input("missing \"charts\" array"))?;
    let overlap = v.get("overlap_bound").and_then(Value::as_i64).unwrap_or(0);
    let mut cover = Vec::new();
    let mut locals = Vec::new();
    for c in charts {
        let ls = LogScale::from_json(c)?;
        let idx = ls
            .points()
            .iter()
            .map(|p| points.iter().position(|q| q == p).ok_or_else(|| Failure::input(format!("chart point {p} is not among the points"))))
            .collect::<Result<Vec<_>, _>>()?;
        cover.push(idx);
        locals.push(ls);
    }
    let p = paste_logscales(&points, &cover, &locals, overlap)?;
    let result = json!({
        "logscale": p.scale.to_json(),
        "delta": delta_of(&p.scale),
        "clamp_level": p.n,
        "overlap_delta": p.overlap_delta,
        "local_delta": p.local_delta,
        "lipschitz_bound": p.lipschitz_bound,
    });
    Ok(Report::new("paste", seed).input(input).budget("overlap_bound", overlap).result(result).violation_if(p.overlap_delta > overlap))
}
