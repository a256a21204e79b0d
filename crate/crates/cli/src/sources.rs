//! Loading of inputs: files, presets and inline flags.

use std::path::Path;

use clap::Args;
use serde_json::{json, Value};

use hypgrpd_core::germs::{cayley_ball, GroupoidSpec, PRESETS};
use hypgrpd_core::hypgraph::families;
use hypgrpd_core::smale::{AdicSystem, SftSystem};
use hypgrpd_core::{with_groupoid, CocycleGraph, WreathRecursion};

use crate::report::{Failure, InputRef};

pub fn read_json(path: &Path, role: &str) -> Result<(Value, InputRef), Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_slice(&bytes).map_err(|e| Failure::input(format!("{} is not valid JSON: {e}", path.display())))?;
    Ok((v, InputRef::new(role, path.display().to_string(), &bytes)))
}

/// Resolves a vertex given by index or label.
pub fn vertex(cg: &CocycleGraph, s: &str) -> Result<usize, Failure> {
    let labels = cg.graph.labels();
    if let Some(i) = labels.iter().position(|l| l == s) {
        return Ok(i);
    }
    match s.parse::<usize>() {
        Ok(i) if i < cg.len() => Ok(i),
        _ => Err(Failure::input(format!("unknown vertex {s}"))),
    }
}

pub fn vertex_list(cg: &CocycleGraph, s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',').map(|t| vertex(cg, t.trim())).collect()
}

#[derive(Args, Debug, Clone)]
pub struct GraphSource {
    /// Cocycle graph JSON file.
    #[arg(long, conflicts_with_all = ["preset", "family"])]
    pub input: Option<std::path::PathBuf>,
    /// Cayley ball of a preset groupoid: doubling, dyadic-affine, golden-rotation, basilica-shift.
    #[arg(long, conflicts_with = "family")]
    pub preset: Option<String>,
    /// Generated graph: path:N, cycle:N, grid:WxH, binary-tree:D, line:N.
    #[arg(long)]
    pub family: Option<String>,
    /// Radius of the Cayley ball, and of the scan around the base vertex.
    #[arg(long)]
    pub radius: Option<u32>,
    /// Step budget for germ equality while building a Cayley ball.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
}

pub struct LoadedGraph {
    pub cg: CocycleGraph,
    pub input: InputRef,
    /// Ball radius for presets, otherwise `None`.
    pub ball_radius: Option<u32>,
    pub truncated: bool,
}

pub const DEFAULT_BALL_RADIUS: u32 = 4;

impl GraphSource {
    pub fn load(&self) -> Result<LoadedGraph, Failure> {
        if let Some(p) = &self.input {
            let (v, input) = read_json(p, "graph")?;
            let cg = CocycleGraph::from_json(&v)?;
            return Ok(LoadedGraph { cg, input, ball_radius: None, truncated: false });
        }
        if let Some(name) = &self.preset {
            let spec = GroupoidSpec::preset(name).ok_or_else(|| Failure::input(format!("unknown preset {name}; expected one of {}", PRESETS.join(", "))))?;
            let radius = self.radius.unwrap_or(DEFAULT_BALL_RADIUS);
            let budget = self.budget;
            let ball = with_groupoid!(spec, g => {
                let b = cayley_ball(&g, radius, budget)?;
                (b.cocycle, b.truncated)
            });
            let desc = json!({"preset": name, "radius": radius});
            return Ok(LoadedGraph { cg: ball.0, input: InputRef::canonical("graph", format!("preset:{name}"), &desc), ball_radius: Some(radius), truncated: ball.1 });
        }
        if let Some(f) = &self.family {
            let cg = family(f)?;
            return Ok(LoadedGraph { cg, input: InputRef::canonical("graph", format!("family:{f}"), &json!({"family": f})), ball_radius: None, truncated: false });
        }
        Err(Failure::input("give one of --input, --preset or --family"))
    }
}

fn family(spec: &str) -> Result<CocycleGraph, Failure> {
    let (kind, arg) = spec.split_once(':').ok_or_else(|| Failure::input(format!("family {spec} must look like kind:N")))?;
    let num = |s: &str| s.parse::<usize>().map_err(|_| Failure::input(format!("bad size {s} in {spec}")));
    let flat = |g: hypgrpd_core::Graph| {
        let n = g.len();
        CocycleGraph::new(g, vec![0; n], num_rational::Rational64::from_integer(1), num_rational::Rational64::new(1, 3)).map_err(Failure::from)
    };
    match kind {
        "path" => flat(families::path(num(arg)?)),
        "cycle" => flat(families::cycle(num(arg)?)),
        "grid" => {
            let (w, h) = arg.split_once('x').ok_or_else(|| Failure::input(format!("grid size {arg} must be WxH")))?;
            flat(families::grid(num(w)?, num(h)?))
        }
        "binary-tree" => {
            let d = num(arg)?;
            if d > 16 {
                return Err(Failure::input("binary-tree depth is limited to 16"));
            }
            Ok(families::rooted_tree(&families::binary_tree_parents(d as u32)))
        }
        "line" => Ok(families::directed_line(num(arg)?)),
        _ => Err(Failure::input(format!("unknown family {kind}"))),
    }
}

#[derive(Args, Debug, Clone)]
pub struct RecSource {
    /// Wreath recursion JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<std::path::PathBuf>,
    /// adding-machine, basilica or trivial.
    #[arg(long)]
    pub preset: Option<String>,
}

impl RecSource {
    pub fn load(&self) -> Result<(WreathRecursion, InputRef), Failure> {
        if let Some(p) = &self.input {
            let (v, input) = read_json(p, "recursion")?;
            return Ok((WreathRecursion::from_json(&v)?, input));
        }
        let name = self.preset.as_deref().ok_or_else(|| Failure::input("give --input or --preset"))?;
        let rec = WreathRecursion::preset(name).ok_or_else(|| Failure::input(format!("unknown recursion preset {name}; expected adding-machine, basilica or trivial")))?;
        let input = InputRef::canonical("recursion", format!("preset:{name}"), &rec.to_json());
        Ok((rec, input))
    }
}

#[derive(Args, Debug, Clone)]
pub struct SftSource {
    /// SFT JSON file with "prohibited" or "matrix".
    #[arg(long, conflicts_with_all = ["preset", "prohibited", "matrix"])]
    pub input: Option<std::path::PathBuf>,
    /// full-2, full-3, golden-mean or free-group.
    #[arg(long, conflicts_with_all = ["prohibited", "matrix"])]
    pub preset: Option<String>,
    /// Prohibited words, comma separated or repeated.
    #[arg(long, value_delimiter = ',', conflicts_with = "matrix")]
    pub prohibited: Vec<String>,
    /// 0/1 transition matrix, rows separated by ';' and entries by ','.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Alphabet, comma separated; defaults to the letters in use.
    #[arg(long, value_delimiter = ',')]
    pub alphabet: Vec<String>,
}

impl SftSource {
    pub fn load(&self) -> Result<(SftSystem, InputRef), Failure> {
        let alphabet = (!self.alphabet.is_empty()).then(|| self.alphabet.clone());
        if let Some(p) = &self.input {
            let (v, input) = read_json(p, "sft")?;
            return Ok((SftSystem::from_json(&v)?, input));
        }
        let (s, source) = if let Some(name) = &self.preset {
            let s = match name.as_str() {
                "full-2" => SftSystem::full_shift(2),
                "full-3" => SftSystem::full_shift(3),
                "golden-mean" => SftSystem::golden_mean(),
                "free-group" => SftSystem::free_group(),
                _ => return Err(Failure::input(format!("unknown SFT preset {name}"))),
            };
            (s, format!("preset:{name}"))
        } else if let Some(m) = &self.matrix {
            let rows = m
                .split(';')
                .map(|r| r.split(',').map(|x| x.trim().parse::<u8>().map_err(|_| Failure::input(format!("bad matrix entry {x}")))).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            (SftSystem::from_matrix(alphabet, rows)?, "flags".to_string())
        } else if !self.prohibited.is_empty() {
            (SftSystem::from_prohibited_strs(alphabet, &self.prohibited)?, "flags".to_string())
        } else {
            return Err(Failure::input("give one of --input, --preset, --prohibited or --matrix"));
        };
        let input = InputRef::canonical("sft", source, &s.to_json());
        Ok((s, input))
    }
}

#[derive(Args, Debug, Clone)]
pub struct AdicSource {
    /// Ordered Bratteli diagram JSON file.
    #[arg(long)]
    pub input: Option<std::path::PathBuf>,
}

impl AdicSource {
    /// Without a file, the five-edge golden example.
    pub fn load(&self) -> Result<(AdicSystem, InputRef), Failure> {
        if let Some(p) = &self.input {
            let (v, input) = read_json(p, "adic")?;
            return Ok((AdicSystem::from_json(&v)?, input));
        }
        let a = AdicSystem::golden_example();
        let input = InputRef::canonical("adic", "preset:golden-example", &a.to_json());
        Ok((a, input))
    }
}
