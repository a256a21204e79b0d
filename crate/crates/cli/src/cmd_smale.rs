use clap::Args;
use serde_json::json;

use hypgrpd_core::hypgraph::four_point_delta;
use hypgrpd_core::selfsim::NucleusResult;
use hypgrpd_core::smale::sft::sample_biseqs;
use hypgrpd_core::smale::*;

use crate::report::{CmdResult, Failure, Report};
use crate::sources::{AdicSource, RecSource, SftSource};

#[derive(Args, Debug)]
pub struct SpliceArgs {
    #[command(flatten)]
    pub sft: SftSource,
    /// Two-sided sequence such as (0)1.0(01).
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// Preperiod bound of the sampled sequences.
    #[arg(long, default_value_t = 1)]
    pub max_pre: usize,
    /// Period bound of the sampled sequences.
    #[arg(long, default_value_t = 2)]
    pub max_period: usize,
}

pub fn splice_check(a: &SpliceArgs, seed: u64) -> CmdResult {
    let (s, input) = a.sft.load()?;
    if a.max_pre + a.max_period > 8 {
        return Err(Failure::input("max-pre + max-period is limited to 8"));
    }
    let mut result = json!({});
    if let (Some(x), Some(y)) = (&a.x, &a.y) {
        let (x, y) = (BiSeq::parse(&s, x)?, BiSeq::parse(&s, y)?);
        result["splice"] = json!(splice(&s, &x, &y)?.format(s.alphabet()));
    }
    let pts = sample_biseqs(&s, a.max_pre, a.max_period);
    let (mut triples, mut failures) = (0usize, Vec::new());
    for x in &pts {
        if splice(&s, x, x)? != *x {
            failures.push(json!({"axiom": "[x,x]=x", "x": x.format(s.alphabet())}));
        }
        for y in pts.iter().filter(|y| same_chart(&s, x, y)) {
            let xy = splice(&s, x, y)?;
            for z in pts.iter().filter(|z| same_chart(&s, x, z)) {
                let xz = splice(&s, x, z)?;
                triples += 1;
                let f = |ax: &str| json!({"axiom": ax, "x": x.format(s.alphabet()), "y": y.format(s.alphabet()), "z": z.format(s.alphabet())});
                if splice(&s, x, &splice(&s, y, z)?)? != xz {
                    failures.push(f("[x,[y,z]]=[x,z]"));
                }
                if splice(&s, &xy, z)? != xz {
                    failures.push(f("[[x,y],z]=[x,z]"));
                }
            }
        }
    }
    result["sequences"] = json!(pts.len());
    result["triples"] = json!(triples);
    result["failures"] = json!(failures.iter().take(10).collect::<Vec<_>>());
    Ok(Report::new("splice-check", seed)
        .input(input)
        .budget("max_pre", a.max_pre)
        .budget("max_period", a.max_period)
        .violation_if(!failures.is_empty())
        .result(result))
}

#[derive(Args, Debug)]
pub struct FriedArgs {
    #[command(flatten)]
    pub sft: SftSource,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
}

pub fn fried(a: &FriedArgs, seed: u64) -> CmdResult {
    let (s, input) = a.sft.load()?;
    let (x, y) = (BiSeq::parse(&s, &a.x)?, BiSeq::parse(&s, &a.y)?);
    let n = fried_logscale(&x, &y, a.horizon);
    Ok(Report::new("fried", seed)
        .input(input)
        .budget("horizon", a.horizon)
        .truncated(n == a.horizon)
        .result(json!({"logscale": n, "saturated": n == a.horizon})))
}

#[derive(Args, Debug)]
pub struct DualArgs {
    #[command(flatten)]
    pub sft: SftSource,
}

pub fn dual(a: &DualArgs, seed: u64) -> CmdResult {
    let (s, input) = a.sft.load()?;
    let d = s.dual();
    let mut result = d.to_json();
    result["self_dual"] = json!(d == s);
    result["involution"] = json!(d.dual() == s);
    Ok(Report::new("dual-sft", seed).input(input).violation_if(d.dual() != s).result(result))
}

#[derive(Args, Debug)]
pub struct DualityArgs {
    #[command(flatten)]
    pub sft: SftSource,
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
}

pub fn duality(a: &DualityArgs, seed: u64) -> CmdResult {
    let (s, input) = a.sft.load()?;
    if a.horizon == 0 || a.horizon > 24 {
        return Err(Failure::input("horizon must lie in 1..=24"));
    }
    let rep = duality_witness(&s, a.horizon);
    Ok(Report::new("duality-witness", seed)
        .input(input)
        .budget("horizon", a.horizon)
        .violation_if(!rep.passed)
        .result(serde_json::to_value(&rep).expect("serializable")))
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[command(flatten)]
    pub rec: RecSource,
    #[arg(long)]
    pub level: usize,
    /// Budget of the nucleus computation.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
}

pub fn limit_space(a: &LimitArgs, seed: u64) -> CmdResult {
    let (rec, input) = a.rec.load()?;
    if a.level > 14 {
        return Err(Failure::input("level is limited to 14"));
    }
    let rep = Report::new("limit-space", seed).input(input).budget("level", a.level).budget("budget", a.budget);
    let nuc = match rec.nucleus(a.budget) {
        NucleusResult::Nucleus(n) => n,
        NucleusResult::NotContracting { explored } => {
            return Ok(rep.budget_exhausted_if(true).truncated(true).result(json!({"contracting": null, "explored": explored})));
        }
    };
    let g = limit_space_gluing(&rec, &nuc, a.level);
    let edges: Vec<_> = g.edges.iter().map(|(&(u, v), names)| json!([g.words[u], g.words[v], names])).collect();
    let graph = g.graph();
    Ok(rep
        .result(json!({
            "words": g.words,
            "identifications": edges,
            "nucleus_size": g.nucleus_size,
            "connected": graph.is_connected(),
            "cycle_length": cycle_length(&graph),
        }))
        .dot(g.to_dot("gluing")))
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    #[command(flatten)]
    pub rec: RecSource,
    #[arg(long)]
    pub max_len: usize,
    /// Also compute the four-point δ around the root.
    #[arg(long)]
    pub delta: bool,
}

pub fn gamma(a: &GammaArgs, seed: u64) -> CmdResult {
    let (rec, input) = a.rec.load()?;
    if a.max_len > 14 {
        return Err(Failure::input("max-len is limited to 14"));
    }
    let cg = gamma_graph(&rec, a.max_len)?;
    let mut result = json!({"vertices": cg.len(), "arrows": cg.graph.arrows().len(), "edges": cg.graph.edge_count()});
    if a.delta {
        result["four_point_delta"] = json!(four_point_delta(&cg.graph, 0, a.max_len as u32)?.to_string());
    }
    Ok(Report::new("gamma-graph", seed).input(input).budget("max_len", a.max_len).truncated(true).result(result).dot(cg.to_dot("gamma")))
}

#[derive(Args, Debug)]
pub struct VershikArgs {
    #[command(flatten)]
    pub adic: AdicSource,
    /// Path prefix as edge labels, such as 31 for the default system.
    #[arg(long)]
    pub path: String,
    /// Number of successors to list.
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
}

pub fn vershik(a: &VershikArgs, seed: u64) -> CmdResult {
    let (ad, input) = a.adic.load()?;
    let mut p = ad.parse_path(&a.path)?;
    let mut orbit = Vec::new();
    let mut exhausted = false;
    for _ in 0..a.steps {
        match ad.vershik_map(&p) {
            Ok(q) => {
                orbit.push(ad.format_path(&q));
                p = q;
            }
            Err(hypgrpd_core::Error::Precondition(_)) => {
                exhausted = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Report::new("vershik", seed)
        .input(input)
        .budget("steps", a.steps)
        .budget("length", p.len())
        .truncated(exhausted)
        .budget_exhausted_if(exhausted)
        .result(json!({"path": a.path, "successors": orbit, "maximal_reached": exhausted})))
}

#[derive(Args, Debug)]
pub struct SubstitutionArgs {
    #[command(flatten)]
    pub adic: AdicSource,
    /// Seed tile word.
    #[arg(long, default_value = "A")]
    pub seed_tile: String,
    #[arg(long, default_value_t = 2)]
    pub iterations: usize,
}

pub fn substitution(a: &SubstitutionArgs, seed: u64) -> CmdResult {
    let (ad, input) = a.adic.load()?;
    let tiles = a.seed_tile.chars().map(|c| ad.vertex(&c.to_string())).collect::<Result<Vec<_>, _>>()?;
    let mut words = Vec::new();
    let mut len = tiles.len();
    for n in 0..=a.iterations {
        if len > 1 << 20 {
            return Err(Failure { code: 3, message: format!("word length exceeds 2^20 at iteration {n}") });
        }
        let w = ad.substitution_expand(&tiles, n);
        len = w.len() * ad.substitution().iter().map(Vec::len).max().unwrap_or(1);
        words.push(ad.tile_word(&w));
    }
    let nested = words.windows(2).all(|w| w[1].starts_with(&w[0]));
    let last = words.last().cloned().unwrap_or_default();
    let sub: Vec<String> = ad.substitution().iter().map(|img| ad.tile_word(img)).collect();
    Ok(Report::new("substitution", seed)
        .input(input)
        .budget("iterations", a.iterations)
        .result(json!({"seed": a.seed_tile, "substitution": sub, "word": last, "length": last.chars().count(), "prefix_nested": nested})))
}

#[derive(Args, Debug)]
pub struct TileArgs {
    #[command(flatten)]
    pub adic: AdicSource,
}

pub fn tiles(a: &TileArgs, seed: u64) -> CmdResult {
    let (ad, input) = a.adic.load()?;
    let m = ad.substitution_matrix();
    let t = tile_lengths(&m)?;
    Ok(Report::new("tile-lengths", seed).input(input).result(json!({"matrix": m, "tiles": ad.vertices(), "lengths": t})))
}

#[derive(Args, Debug)]
pub struct ItineraryArgs {
    #[command(flatten)]
    pub adic: AdicSource,
    /// Starting path prefix; the minimal path of --length by default.
    #[arg(long)]
    pub path: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub length: usize,
    /// Vershik steps; a tile is recorded whenever the first edge is minimal.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
}

pub fn itinerary(a: &ItineraryArgs, seed: u64) -> CmdResult {
    let (ad, input) = a.adic.load()?;
    let p = match &a.path {
        Some(s) => ad.parse_path(s)?,
        None => ad.minimal_path(a.length),
    };
    let it = ad.leaf_itinerary(&p, a.steps)?;
    let word = ad.tile_word(&it);
    // least n with the itinerary a factor of σⁿ of the first tile
    let mut factor_of = None;
    for n in 0..=24 {
        let w = ad.substitution_expand(&[0], n);
        if w.len() > 1 << 20 {
            break;
        }
        if ad.tile_word(&w).contains(&word) {
            factor_of = Some(n);
            break;
        }
    }
    let mut counts = std::collections::BTreeMap::new();
    for &v in &it {
        *counts.entry(ad.tile_symbol(v).to_string()).or_insert(0usize) += 1;
    }
    Ok(Report::new("itinerary", seed)
        .input(input)
        .budget("steps", a.steps)
        .budget("length", p.len())
        .violation_if(factor_of.is_none())
        .result(json!({"path": ad.format_path(&p), "tiles": word, "counts": counts, "factor_of_iterate": factor_of})))
}
