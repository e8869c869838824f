//! `evaluate` and `compare`: metric reports over lexicon files.

use std::collections::HashMap;
use std::path::Path;

use anyhow::Context;

use lexinduce::evaluation::{
    auc_binary, class_mass_labels, kendall_tau, lexicon_tau_top, ternary_f1, top_subset, ClassDistribution,
    GoldLexicon, MetricReport, TopSetMode,
};
use lexinduce::{Label, Lexicon64};

use crate::artifact::open;

/// Which gold annotation to score against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EvalMode {
    /// Binary AUC on positive/negative gold words.
    Auc,
    /// Macro-F1 after class-mass labelling to the gold distribution.
    Ternary,
    /// Kendall τ-b against continuous gold valence.
    Tau,
    /// Every metric the gold file supports.
    All,
}

pub fn read_lexicon(path: &Path) -> anyhow::Result<Lexicon64> {
    Lexicon64::read(open(path)?).with_context(|| format!("reading lexicon {}", path.display()))
}

pub fn read_gold(path: &Path, neutral: Option<&Path>) -> anyhow::Result<GoldLexicon> {
    let mut gold = GoldLexicon::read(open(path)?).with_context(|| format!("reading gold {}", path.display()))?;
    if let Some(n) = neutral {
        let words: Vec<String> = std::io::BufRead::lines(open(n)?)
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .map(|w| w.trim().to_string())
            .filter(|w| !w.is_empty() && !w.starts_with('#'))
            .collect();
        gold.add_neutral(words).with_context(|| format!("reading neutral list {}", n.display()))?;
    }
    Ok(gold)
}

fn restrict(lex: &Lexicon64, keep: impl Fn(&str) -> bool) -> anyhow::Result<Lexicon64> {
    let (words, scores): (Vec<String>, Vec<f64>) =
        lex.words().iter().zip(lex.scores()).filter(|(w, _)| keep(w)).map(|(w, &s)| (w.clone(), s)).unzip();
    Ok(Lexicon64::new(words, scores)?)
}

pub fn auc_report(lex: &Lexicon64, gold: &GoldLexicon) -> anyhow::Result<MetricReport> {
    let n = lex.words().iter().filter(|w| gold.binary.contains_key(*w)).count();
    Ok(MetricReport { metric: "auc".into(), value: auc_binary(lex, gold)?, n, params: "gold=binary".into() })
}

/// Labels the gold-covered words by class mass, using the gold label
/// proportions over those words, then scores macro-F1.
pub fn ternary_report(lex: &Lexicon64, gold: &GoldLexicon) -> anyhow::Result<MetricReport> {
    let sub = restrict(lex, |w| gold.ternary.contains_key(w))?;
    let labels: Vec<Label> = sub.words().iter().map(|w| gold.ternary[w]).collect();
    let dist = ClassDistribution::from_labels(&labels)?;
    let labeled = class_mass_labels(&sub, &dist)?;
    Ok(MetricReport {
        metric: "ternary_f1".into(),
        value: ternary_f1(&labeled, gold)?,
        n: sub.len(),
        params: format!("class_mass={}/{}/{}", dist.positive, dist.neutral, dist.negative),
    })
}

pub fn tau_report(lex: &Lexicon64, gold: &GoldLexicon) -> anyhow::Result<MetricReport> {
    let n = lex.words().iter().filter(|w| gold.continuous.contains_key(*w)).count();
    Ok(MetricReport {
        metric: "kendall_tau".into(),
        value: kendall_tau(lex, &gold.continuous)?,
        n,
        params: "gold=continuous".into(),
    })
}

pub fn evaluate(lex: &Lexicon64, gold: &GoldLexicon, mode: EvalMode) -> anyhow::Result<Vec<MetricReport>> {
    Ok(match mode {
        EvalMode::Auc => vec![auc_report(lex, gold)?],
        EvalMode::Ternary => vec![ternary_report(lex, gold)?],
        EvalMode::Tau => vec![tau_report(lex, gold)?],
        EvalMode::All => {
            let mut out = Vec::new();
            if !gold.binary.is_empty() {
                out.push(auc_report(lex, gold)?);
            }
            if gold.ternary.values().any(|&l| l == Label::Neutral) {
                out.push(ternary_report(lex, gold)?);
            }
            if !gold.continuous.is_empty() {
                out.push(tau_report(lex, gold)?);
            }
            if out.is_empty() {
                anyhow::bail!("gold file has no usable annotations");
            }
            out
        }
    })
}

/// Kendall τ over all shared words and τ restricted to the top fraction.
pub fn compare(a: &Lexicon64, b: &Lexicon64, top_frac: f64, mode: TopSetMode) -> anyhow::Result<Vec<MetricReport>> {
    let other: HashMap<String, f64> = b.words().iter().cloned().zip(b.scores().iter().copied()).collect();
    let shared = a.words().iter().filter(|w| other.contains_key(*w)).count();
    let top = top_subset(a, b, top_frac, mode)?;
    Ok(vec![
        MetricReport {
            metric: "kendall_tau".into(),
            value: kendall_tau(a, &other)?,
            n: shared,
            params: "subset=shared".into(),
        },
        MetricReport {
            metric: "tau_top".into(),
            value: lexicon_tau_top(a, b, top_frac, mode)?,
            n: top.len(),
            params: format!("top_frac={top_frac} top_set={}", mode_name(mode)),
        },
    ])
}

fn mode_name(mode: TopSetMode) -> &'static str {
    match mode {
        TopSetMode::Union => "union",
        TopSetMode::Intersection => "intersection",
    }
}

pub fn render(reports: &[MetricReport]) -> String {
    let mut out = format!("{}\n", MetricReport::HEADER);
    for r in reports {
        out.push_str(&format!("{r}\n"));
    }
    out
}
