use std::collections::BTreeMap;

use clap::Args;
use serde_json::json;

use hypgrpd_core::germs::*;
use hypgrpd_core::hypgraph::parse_ratio;
use hypgrpd_core::{with_groupoid, EvPeriodicWord};

use crate::report::{CmdResult, Failure, InputRef, Report};
use crate::sources::SftSource;

fn preset(name: &str) -> Result<(GroupoidSpec, InputRef), Failure> {
    let spec = GroupoidSpec::preset(name).ok_or_else(|| Failure::input(format!("unknown preset {name}; expected one of {}", PRESETS.join(", "))))?;
    Ok((spec, InputRef::canonical("groupoid", format!("preset:{name}"), &json!({"preset": name}))))
}

#[derive(Args, Debug)]
pub struct CayleyArgs {
    /// doubling, dyadic-affine, golden-rotation or basilica-shift.
    #[arg(long)]
    pub preset: String,
    #[arg(long, default_value_t = 4)]
    pub radius: u32,
    /// Step budget for each germ equality test.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    /// Skip the degree cocycle check.
    #[arg(long)]
    pub no_check: bool,
}

pub fn cayley(a: &CayleyArgs, seed: u64) -> CmdResult {
    let (spec, input) = preset(&a.preset)?;
    let (labels, by_degree, truncated, check, dot) = with_groupoid!(spec, g => {
        let b = cayley_ball(&g, a.radius, a.budget)?;
        let check = if a.no_check { None } else { Some(degree_cocycle_check(&g, &b)?) };
        let mut by_degree: BTreeMap<i64, usize> = BTreeMap::new();
        for &l in &b.cocycle.lambda {
            *by_degree.entry(l).or_default() += 1;
        }
        (b.cocycle.graph.labels().to_vec(), by_degree, b.truncated, check, b.cocycle.to_dot("cayley"))
    });
    let failed = check.as_ref().is_some_and(|c| !c.passed());
    let by_degree: BTreeMap<String, usize> = by_degree.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Ok(Report::new("cayley", seed)
        .input(input)
        .budget("radius", a.radius)
        .budget("budget", a.budget)
        .truncated(truncated)
        .violation_if(failed)
        .result(json!({"size": labels.len(), "by_degree": by_degree, "germs": labels, "cocycle_check": check}))
        .dot(dot))
}

#[derive(Args, Debug)]
pub struct PreimageArgs {
    #[command(flatten)]
    pub sft: SftSource,
    /// Root point as an eventually periodic word.
    #[arg(long, default_value = "(0)")]
    pub point: String,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
}

pub fn preimage_tree(a: &PreimageArgs, seed: u64) -> CmdResult {
    let (s, input) = if a.sft.input.is_none() && a.sft.preset.is_none() && a.sft.prohibited.is_empty() && a.sft.matrix.is_none() {
        let s = hypgrpd_core::smale::SftSystem::full_shift(2);
        let i = InputRef::canonical("sft", "preset:full-2", &s.to_json());
        (s, i)
    } else {
        a.sft.load()?
    };
    if a.depth > 24 {
        return Err(Failure::input("depth is limited to 24"));
    }
    let t = EvPeriodicWord::parse(s.alphabet(), &a.point)?;
    let tree = tree_of_preimages(&s, &t, a.depth)?;
    let dot = tree.graph.to_dot("preimages", None);
    Ok(Report::new("preimage-tree", seed)
        .input(input)
        .budget("depth", a.depth)
        .result(serde_json::to_value(&tree).expect("serializable"))
        .dot(dot))
}

#[derive(Args, Debug)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub preset: String,
    #[arg(long, default_value_t = 5)]
    pub radius: u32,
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    /// Generator labels of the first ray, comma separated, from the unit (pre_0,pre_1 for doubling).
    #[arg(long, value_delimiter = ',')]
    pub ray1: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub ray2: Vec<String>,
}

pub fn boundary(a: &BoundaryArgs, seed: u64) -> CmdResult {
    let (spec, input) = preset(&a.preset)?;
    let res = with_groupoid!(spec, g => {
        let b = cayley_ball(&g, a.radius, a.budget)?;
        let follow = |labels: &[String]| {
            let labels: Vec<String> = labels.iter().filter(|l| !l.is_empty()).cloned().collect();
            b.follow(0, &labels).ok_or_else(|| Failure::input(format!("ray {} leaves the ball", labels.join(","))))
        };
        let (r1, r2) = (follow(&a.ray1)?, follow(&a.ray2)?);
        let s = boundary_scale(&b.cocycle, &r1, &r2)?;
        let witness = s.witness.map(|w| b.cocycle.graph.label(w).to_string());
        (s, witness)
    });
    let (s, witness) = res;
    Ok(Report::new("boundary-scale", seed)
        .input(input)
        .budget("radius", a.radius)
        .truncated(s.truncated)
        .result(json!({"scale": s.n, "witness": witness, "ray1": a.ray1, "ray2": a.ray2})))
}

#[derive(Args, Debug)]
pub struct RotationArgs {
    /// Trace b of θ² + bθ + 1 = 0; the golden ring when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub trace: Option<i128>,
    /// Interval as lo,hi with rational endpoints.
    #[arg(long, default_value = "0,3")]
    pub interval: String,
    #[arg(long, default_value_t = 8)]
    pub word_bound: u32,
    /// Translations only.
    #[arg(long)]
    pub no_scaling: bool,
}

pub fn rotation(a: &RotationArgs, seed: u64) -> CmdResult {
    let mut spec = match a.trace {
        Some(b) => QuadraticAffine::from_trace(b)?,
        None => QuadraticAffine::golden(),
    };
    if a.no_scaling {
        let t = spec.translations.clone();
        spec = spec.with_translations(t, false);
    }
    let (lo, hi) = a.interval.split_once(',').ok_or_else(|| Failure::input("interval must be lo,hi"))?;
    let (lo, hi) = (parse_ratio(lo)?, parse_ratio(hi)?);
    let rg = rotation_orbital_graph(&spec, lo, hi, a.word_bound)?;
    let desc = json!({"trace": a.trace, "scaling": !a.no_scaling});
    Ok(Report::new("rotation-graph", seed)
        .input(InputRef::canonical("groupoid", "flags", &desc))
        .budget("word_bound", a.word_bound)
        .truncated(rg.truncated > 0)
        .result(serde_json::to_value(&rg).expect("serializable"))
        .dot(rg.cocycle.to_dot("rotation")))
}
