use clap::Args;
use serde_json::json;

use hypgrpd_core::selfsim::NucleusResult;
use hypgrpd_core::EvPeriodicWord;

use crate::report::{CmdResult, Failure, Report};
use crate::sources::RecSource;

#[derive(Args, Debug)]
pub struct ActArgs {
    #[command(flatten)]
    pub rec: RecSource,
    /// Group element such as a*b^-1.
    #[arg(long)]
    pub element: String,
    /// Finite word, or an eventually periodic word such as 01(10).
    #[arg(long)]
    pub word: String,
    /// Period passes allowed for eventually periodic words.
    #[arg(long, default_value_t = 64)]
    pub passes: usize,
    /// Word-length budget for eventually periodic words.
    #[arg(long, default_value_t = 4096)]
    pub budget: usize,
}

pub fn act(a: &ActArgs, seed: u64) -> CmdResult {
    let (rec, input) = a.rec.load()?;
    let g = rec.parse_element(&a.element)?;
    let w = EvPeriodicWord::parse(rec.alphabet(), &a.word)?;
    let rep = Report::new("act", seed).input(input);
    if w.is_finite() {
        let (img, sec) = rec.act_with_section(&g, w.pre());
        return Ok(rep.result(json!({"element": rec.display(&g), "word": a.word, "image": rec.format_word(&img), "section": rec.display(&sec)})));
    }
    let (img, truncated) = rec.act_periodic(&g, &w, a.passes, a.budget);
    Ok(rep
        .budget("passes", a.passes)
        .budget("budget", a.budget)
        .truncated(truncated)
        .budget_exhausted_if(truncated)
        .result(json!({"element": rec.display(&g), "word": w.format(rec.alphabet()), "image": img.format(rec.alphabet())})))
}

#[derive(Args, Debug)]
pub struct SectionArgs {
    #[command(flatten)]
    pub rec: RecSource,
    #[arg(long)]
    pub element: String,
    /// Finite word v.
    #[arg(long)]
    pub word: String,
    /// Step budget for the triviality test of the section.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
}

pub fn section(a: &SectionArgs, seed: u64) -> CmdResult {
    let (rec, input) = a.rec.load()?;
    let g = rec.parse_element(&a.element)?;
    let v = rec.parse_word(&a.word)?;
    let (img, sec) = rec.act_with_section(&g, &v);
    let trivial = rec.is_trivial(&sec, a.budget);
    let verdict = match &trivial {
        hypgrpd_core::selfsim::Verdict::Yes => json!("yes"),
        hypgrpd_core::selfsim::Verdict::No(w) => json!({"no": rec.format_word(w)}),
        hypgrpd_core::selfsim::Verdict::Unknown => json!("unknown"),
    };
    Ok(Report::new("section", seed)
        .input(input)
        .budget("budget", a.budget)
        .result(json!({"element": rec.display(&g), "word": a.word, "image": rec.format_word(&img), "section": rec.display(&sec), "section_trivial": verdict})))
}

#[derive(Args, Debug)]
pub struct NucleusArgs {
    #[command(flatten)]
    pub rec: RecSource,
    /// Bound on the number of elements explored.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
}

pub fn nucleus(a: &NucleusArgs, seed: u64) -> CmdResult {
    let (rec, input) = a.rec.load()?;
    let rep = Report::new("nucleus", seed).input(input).budget("budget", a.budget);
    Ok(match rec.nucleus(a.budget) {
        NucleusResult::Nucleus(elems) => {
            let names: Vec<String> = elems.iter().map(|e| rec.display(e)).collect();
            rep.result(json!({"contracting": true, "size": names.len(), "elements": names}))
        }
        NucleusResult::NotContracting { explored } => rep.budget_exhausted_if(true).truncated(true).result(json!({"contracting": null, "explored": explored})),
    })
}

#[derive(Args, Debug)]
pub struct SchreierArgs {
    #[command(flatten)]
    pub rec: RecSource,
    /// Word length n.
    #[arg(long)]
    pub level: usize,
}

pub fn schreier(a: &SchreierArgs, seed: u64) -> CmdResult {
    let (rec, input) = a.rec.load()?;
    if rec.degree().checked_pow(a.level as u32).is_none_or(|n| n > 1 << 20) {
        return Err(Failure::input("level too large"));
    }
    let sg = rec.schreier_graph(a.level);
    let edges: Vec<_> = sg.edges.iter().map(|(u, v, s)| json!([sg.labels[*u], sg.labels[*v], s])).collect();
    Ok(Report::new("schreier", seed)
        .input(input)
        .budget("level", a.level)
        .result(json!({"vertices": sg.labels, "edges": edges, "connected": sg.is_connected()}))
        .dot(sg.to_dot("schreier")))
}
