use clap::Args;
use num_rational::Rational64;
use serde_json::json;

use hypgrpd_core::hypgraph::*;
use hypgrpd_core::CocycleGraph;

use crate::report::{CmdResult, Failure, Report};
use crate::sources::{vertex, vertex_list, GraphSource, LoadedGraph};

fn ratio(r: Rational64) -> String {
    r.to_string()
}

fn base_report(cmd: &str, seed: u64, g: &LoadedGraph) -> Report {
    let mut rep = Report::new(cmd, seed).input(g.input.clone()).truncated(g.truncated);
    if let Some(r) = g.ball_radius {
        rep = rep.budget("ball_radius", r);
    }
    rep
}

/// Scan radius: the explicit radius, else the ball radius, else the vertex count.
fn scan_radius(src: &GraphSource, g: &LoadedGraph) -> u32 {
    src.radius.or(g.ball_radius).unwrap_or(g.cg.len() as u32)
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Base vertex (index or label).
    #[arg(long, default_value = "0")]
    pub base: String,
}

pub fn delta(a: &DeltaArgs, seed: u64) -> CmdResult {
    let g = a.graph.load()?;
    let x0 = vertex(&g.cg, &a.base)?;
    let radius = scan_radius(&a.graph, &g);
    let d = four_point_delta(&g.cg.graph, x0, radius)?;
    let ball = g.cg.graph.ball(x0, radius).len();
    Ok(base_report("delta", seed, &g)
        .budget("radius", radius)
        .result(json!({"four_point_delta": ratio(d), "vertices": g.cg.len(), "ball_vertices": ball, "base": x0})))
}

#[derive(Args, Debug)]
pub struct ThinArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[arg(long, default_value = "0")]
    pub base: String,
    /// Sample this many triangles instead of scanning all of them.
    #[arg(long)]
    pub samples: Option<usize>,
}

pub fn thin(a: &ThinArgs, seed: u64) -> CmdResult {
    let g = a.graph.load()?;
    let x0 = vertex(&g.cg, &a.base)?;
    let radius = scan_radius(&a.graph, &g);
    let mode = match a.samples {
        Some(samples) => ThinMode::Sampled { samples, seed },
        None => ThinMode::Exhaustive,
    };
    let d = thin_triangle_delta(&g.cg.graph, x0, radius, mode)?;
    let mut rep = base_report("thin-delta", seed, &g).budget("radius", radius);
    if let Some(s) = a.samples {
        rep = rep.budget("samples", s);
    }
    Ok(rep.result(json!({"thin_triangle_delta": ratio(d), "mode": if a.samples.is_some() { "sampled" } else { "exhaustive" }})))
}

/// Descending path from `start` along the first out-neighbour.
fn auto_ray(cg: &CocycleGraph, start: usize, len: usize) -> Vec<usize> {
    let mut ray = vec![start];
    while ray.len() < len {
        match cg.graph.out_neighbors(*ray.last().unwrap()).first() {
            Some(&v) => ray.push(v),
            None => break,
        }
    }
    ray
}

#[derive(Args, Debug)]
pub struct BusemannArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Ray as comma separated vertices; by default a descending path from the base.
    #[arg(long)]
    pub ray: Option<String>,
    #[arg(long, default_value = "0")]
    pub base: String,
    /// Length of the automatic ray.
    #[arg(long, default_value_t = 12)]
    pub ray_len: usize,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Least number of ray vertices required.
    #[arg(long, default_value_t = 3)]
    pub min_len: usize,
}

pub fn busemann(a: &BusemannArgs, seed: u64) -> CmdResult {
    let g = a.graph.load()?;
    let ray = match &a.ray {
        Some(r) => vertex_list(&g.cg, r)?,
        None => auto_ray(&g.cg, vertex(&g.cg, &a.base)?, a.ray_len),
    };
    let (x, y) = (vertex(&g.cg, &a.x)?, vertex(&g.cg, &a.y)?);
    let (lo, hi) = busemann_estimate(&g.cg.graph, &ray, x, y, a.min_len)?;
    let truncated = ray.len() < a.ray_len && a.ray.is_none();
    Ok(base_report("busemann", seed, &g)
        .budget("ray_length", ray.len())
        .truncated(truncated)
        .result(json!({"ray": ray, "x": x, "y": y, "interval": [lo, hi], "cocycle": g.cg.lambda[x] - g.cg.lambda[y]})))
}

#[derive(Args, Debug)]
pub struct CriterionArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Δ1; defaults to Δ + η.
    #[arg(long)]
    pub delta1: Option<String>,
    /// Largest start distance.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Length of the directed paths.
    #[arg(long, default_value_t = 12)]
    pub horizon: usize,
}

pub fn criterion(a: &CriterionArgs, seed: u64) -> CmdResult {
    let g = a.graph.load()?;
    let cg = &g.cg;
    let delta1 = match &a.delta1 {
        Some(s) => parse_ratio(s)?,
        None => cg.delta + cg.eta,
    };
    let (lam, dprime) = directed_path_qg_constants(cg.delta, cg.eta)?;
    let qg = verify_directed_paths(cg, a.horizon)?;
    let rep = convergence_criterion(cg, delta1, a.m, a.horizon)?;
    let bad = !rep.violations.is_empty() || qg.is_some();
    let unsettled = rep.rho0.is_none();
    Ok(base_report("criterion", seed, &g)
        .budget("horizon", a.horizon)
        .budget("m", a.m)
        .truncated(rep.truncated_starts > 0)
        .violation_if(bad)
        .budget_exhausted_if(unsettled && !bad)
        .result(json!({
            "criterion": serde_json::to_value(&rep).expect("serializable"),
            "quasi_geodesic": {"lambda": ratio(lam), "delta_prime": ratio(dprime), "violation": qg.map(|v| json!({"path": v.path, "distance": v.distance}))},
        })))
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Merge index; defaults to k_m of the convergence criterion with m = 2.
    #[arg(long)]
    pub k: Option<u32>,
    /// Positive multiple of 4.
    #[arg(long, default_value_t = 4)]
    pub r: u32,
    #[arg(long)]
    pub delta2: Option<i64>,
    #[arg(long)]
    pub rho1: Option<u32>,
    /// Horizon of the criterion run that supplies k.
    #[arg(long, default_value_t = 9)]
    pub horizon: usize,
}

pub fn level(a: &LevelArgs, seed: u64) -> CmdResult {
    let g = a.graph.load()?;
    let cg = &g.cg;
    let delta1 = cg.delta + cg.eta;
    let k = match a.k {
        Some(k) => k,
        None => convergence_criterion(cg, delta1, 2, a.horizon)?.k_m.unwrap_or(0).max(1) as u32,
    };
    let delta2 = a.delta2.unwrap_or_else(|| (delta1 * Rational64::from_integer(k as i64 + 1)).floor().to_integer() + 1);
    if a.r == 0 {
        return Err(Failure::input("--r must be positive"));
    }
    let rho1 = a.rho1.unwrap_or_else(|| (Rational64::from_integer(4 * delta2) / (cg.eta * Rational64::from_integer(a.r as i64))).ceil().to_integer() as u32);
    let params = LevelParams { delta1, delta2, r: a.r, rho1, k };
    let lg = build_level_graph(cg, params)?;
    let check = check_level_graph(cg, &lg)?;
    let dot = {
        let mut gg = hypgrpd_core::Graph::with_labels(cg.graph.labels().to_vec());
        for (u, v) in lg.graph().edges() {
            gg.add_edge(u, v);
        }
        gg.to_dot("level_graph", Some(&lg.level))
    };
    Ok(base_report("level-graph", seed, &g)
        .budget("k", k)
        .violation_if(!check.all_ok())
        .result(json!({
            "params": serde_json::to_value(params).expect("serializable"),
            "horizontal_edges": lg.horizontal.len(),
            "vertical_edges": lg.vertical.len(),
            "levels": lg.level.iter().min().zip(lg.level.iter().max()).map(|(a, b)| [a, b]),
            "check": serde_json::to_value(&check).expect("serializable"),
        }))
        .dot(dot))
}
