//! Scoring induced lexicons against gold resources and against each other.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::lexicon::{Label, Lexicon};
use crate::scalar::Scalar;

/// Gold annotations: binary polarity, ternary labels and continuous valence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoldLexicon {
    pub binary: HashMap<String, Label>,
    pub ternary: HashMap<String, Label>,
    pub continuous: HashMap<String, f64>,
}

impl GoldLexicon {
    /// Reads `word<TAB>value` lines where value is a label
    /// (`positive`/`neutral`/`negative`) or a decimal valence. Lines starting
    /// with `#` and a leading `word<TAB>…` header are skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut gold = Self::default();
        for (k, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = k + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(word), Some(value)) = (cols.next(), cols.next()) else {
                return Err(Error::parse(lineno, "expected word<TAB>label-or-valence"));
            };
            if lineno == 1 && word == "word" {
                continue;
            }
            let word = word.trim().to_string();
            if let Ok(label) = value.parse::<Label>() {
                gold.insert_label(word, label).map_err(|e| Error::parse(lineno, e.to_string()))?;
            } else if let Ok(v) = value.trim().parse::<f64>() {
                if !v.is_finite() {
                    return Err(Error::parse(lineno, "valence must be finite"));
                }
                if gold.continuous.insert(word.clone(), v).is_some() {
                    return Err(Error::parse(lineno, format!("duplicate valence for {word:?}")));
                }
            } else {
                return Err(Error::parse(lineno, format!("unrecognized gold value {value:?}")));
            }
        }
        Ok(gold)
    }

    pub fn insert_label(&mut self, word: String, label: Label) -> Result<()> {
        if let Some(prev) = self.ternary.get(&word) {
            if *prev != label {
                return Err(Error::invalid(format!("conflicting gold labels for {word:?}")));
            }
        }
        if label.is_polar() {
            self.binary.insert(word.clone(), label);
        }
        self.ternary.insert(word, label);
        Ok(())
    }

    /// Adds user-supplied neutral words to the ternary gold.
    pub fn add_neutral<S: Into<String>>(&mut self, words: impl IntoIterator<Item = S>) -> Result<()> {
        for w in words {
            self.insert_label(w.into(), Label::Neutral)?;
        }
        Ok(())
    }
}

/// Known proportions of positive, neutral and negative words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistribution {
    pub positive: f64,
    pub neutral: f64,
    pub negative: f64,
}

impl ClassDistribution {
    pub fn new(positive: f64, neutral: f64, negative: f64) -> Result<Self> {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if !(ok(positive) && ok(neutral) && ok(negative)) {
            return Err(Error::invalid("class fractions must lie in [0, 1]"));
        }
        if (positive + neutral + negative - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("class fractions must sum to 1"));
        }
        Ok(Self { positive, neutral, negative })
    }

    /// Empirical distribution of a label sample.
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Result<Self> {
        let mut counts = [0usize; 3];
        for l in labels {
            counts[class_index(*l)] += 1;
        }
        let n = counts.iter().sum::<usize>();
        if n == 0 {
            return Err(Error::Evaluation("cannot derive a class distribution from no labels".into()));
        }
        let f = |c: usize| c as f64 / n as f64;
        Self::new(f(counts[0]), f(counts[1]), f(counts[2]))
    }
}

fn class_index(l: Label) -> usize {
    match l {
        Label::Positive => 0,
        Label::Neutral => 1,
        Label::Negative => 2,
    }
}

/// Mann-Whitney AUC: probability that a positive outscores a negative, ties
/// counting one half.
pub fn auc(positive: &[f64], negative: &[f64]) -> Result<f64> {
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::Evaluation("AUC needs at least one positive and one negative".into()));
    }
    let mut all: Vec<(f64, bool)> =
        positive.iter().map(|&s| (s, true)).chain(negative.iter().map(|&s| (s, false))).collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    // Sum of mid-ranks (1-based) held by the positives.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid * all[i..j].iter().filter(|e| e.1).count() as f64;
        i = j;
    }
    let (np, nn) = (positive.len() as f64, negative.len() as f64);
    let u = rank_sum - np * (np + 1.0) / 2.0;
    Ok(u / (np * nn))
}

/// AUC of lexicon scores on the gold binary words the lexicon covers.
pub fn auc_binary<T: Scalar>(lexicon: &Lexicon<T>, gold: &GoldLexicon) -> Result<f64> {
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (w, &s) in lexicon.words().iter().zip(lexicon.scores()) {
        match gold.binary.get(w) {
            Some(Label::Positive) => pos.push(s.to_f64_lossy()),
            Some(Label::Negative) => neg.push(s.to_f64_lossy()),
            _ => {}
        }
    }
    auc(&pos, &neg)
}

/// Label counts `(positive, neutral, negative)` for `n` words. Uses largest
/// remainders so each count is within one of `n·fraction`; remainder ties go
/// to neutral first.
pub fn class_mass_counts(n: usize, dist: &ClassDistribution) -> (usize, usize, usize) {
    let quotas = [n as f64 * dist.neutral, n as f64 * dist.positive, n as f64 * dist.negative];
    let snap = |q: f64| if (q - q.round()).abs() < 1e-9 { q.round() } else { q };
    let mut seats: Vec<usize> = quotas.iter().map(|&q| snap(q).floor() as usize).collect();
    let mut left = n.saturating_sub(seats.iter().sum());
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = snap(quotas[a]) - snap(quotas[a]).floor();
        let rb = snap(quotas[b]) - snap(quotas[b]).floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &c in order.iter().cycle() {
        if left == 0 {
            break;
        }
        seats[c] += 1;
        left -= 1;
    }
    (seats[1], seats[0], seats[2])
}

/// Labels the highest-scoring words positive and the lowest negative in the
/// proportions of `dist`; ties at a cut go to the earlier word.
pub fn class_mass_labels<T: Scalar>(lexicon: &Lexicon<T>, dist: &ClassDistribution) -> Result<Lexicon<T>> {
    let n = lexicon.len();
    let (n_pos, _, n_neg) = class_mass_counts(n, dist);
    let scores = lexicon.scores();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut labels = vec![Label::Neutral; n];
    for &i in &order[..n_pos] {
        labels[i] = Label::Positive;
    }
    for &i in &order[n - n_neg..] {
        labels[i] = Label::Negative;
    }
    lexicon.clone().with_labels(labels)
}

/// Macro-averaged F1 over the three classes for `(predicted, gold)` pairs.
/// A class with no predictions and no gold members contributes 0.
pub fn macro_f1(pairs: &[(Label, Label)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Evaluation("no labelled words to score".into()));
    }
    let mut confusion = [[0usize; 3]; 3];
    for &(p, g) in pairs {
        confusion[class_index(p)][class_index(g)] += 1;
    }
    let mut total = 0.0;
    for c in 0..3 {
        let tp = confusion[c][c] as f64;
        let predicted = confusion[c].iter().sum::<usize>() as f64;
        let actual = (0..3).map(|p| confusion[p][c]).sum::<usize>() as f64;
        total += f1(tp, predicted, actual);
    }
    Ok(total / 3.0)
}

pub(crate) fn f1(tp: f64, predicted: f64, actual: f64) -> f64 {
    let precision = if predicted > 0.0 { tp / predicted } else { 0.0 };
    let recall = if actual > 0.0 { tp / actual } else { 0.0 };
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Macro-F1 of a labelled lexicon against the gold ternary labels.
pub fn ternary_f1<T: Scalar>(labeled: &Lexicon<T>, gold: &GoldLexicon) -> Result<f64> {
    let labels = labeled.labels().ok_or_else(|| Error::Evaluation("lexicon carries no labels".into()))?;
    let pairs: Vec<(Label, Label)> =
        labeled.words().iter().zip(labels).filter_map(|(w, &p)| gold.ternary.get(w).map(|&g| (p, g))).collect();
    if pairs.is_empty() {
        return Err(Error::Evaluation("lexicon and gold share no words".into()));
    }
    macro_f1(&pairs)
}

/// Kendall τ-b with tie correction, in O(n log n).
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid("Kendall tau inputs differ in length"));
    }
    let n = x.len() as u64;
    if n < 2 {
        return Err(Error::Evaluation("Kendall tau needs at least two words".into()));
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });
    let n0 = n * (n - 1) / 2;
    let tied_pairs = |eq: &dyn Fn(usize, usize) -> bool| -> u64 {
        let mut total = 0;
        let mut run = 1u64;
        for i in 1..pairs.len() {
            if eq(i - 1, i) {
                run += 1;
            } else {
                total += run * (run - 1) / 2;
                run = 1;
            }
        }
        total + run * (run - 1) / 2
    };
    let ties_x = tied_pairs(&|a, b| pairs[a].0 == pairs[b].0);
    let ties_xy = tied_pairs(&|a, b| pairs[a].0 == pairs[b].0 && pairs[a].1 == pairs[b].1);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_count(&mut ys);
    // `ys` is now sorted.
    let ties_y = {
        let mut total = 0u64;
        let mut run = 1u64;
        for i in 1..ys.len() {
            if ys[i] == ys[i - 1] {
                run += 1;
            } else {
                total += run * (run - 1) / 2;
                run = 1;
            }
        }
        total + run * (run - 1) / 2
    };
    let concordant_minus_discordant = n0 as i64 - ties_x as i64 - ties_y as i64 + ties_xy as i64 - 2 * swaps as i64;
    tau_b_from_counts(concordant_minus_discordant, n0 - ties_x, n0 - ties_y)
}

/// `(n_c − n_d) / sqrt((n₀ − n₁)(n₀ − n₂))`.
pub(crate) fn tau_b_from_counts(c_minus_d: i64, untied_x: u64, untied_y: u64) -> Result<f64> {
    if untied_x == 0 || untied_y == 0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(c_minus_d as f64 / ((untied_x as f64) * (untied_y as f64)).sqrt())
}

/// Stable merge sort returning the number of strict inversions.
fn merge_count(v: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid]) + merge_count(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            merged.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            merged.push(v[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.copy_from_slice(&merged);
    swaps
}

/// τ-b between lexicon scores and continuous gold valence on shared words.
pub fn kendall_tau<T: Scalar>(lexicon: &Lexicon<T>, gold_continuous: &HashMap<String, f64>) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = lexicon
        .words()
        .iter()
        .zip(lexicon.scores())
        .filter_map(|(w, &s)| gold_continuous.get(w).map(|&g| (s.to_f64_lossy(), g)))
        .unzip();
    kendall_tau_b(&x, &y)
}

/// How the two lexicons' top sets are combined in [`lexicon_tau_top`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopSetMode {
    #[default]
    Union,
    Intersection,
}

impl std::str::FromStr for TopSetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "union" => Ok(TopSetMode::Union),
            "intersection" => Ok(TopSetMode::Intersection),
            other => Err(Error::invalid(format!("unknown top-set mode {other:?}"))),
        }
    }
}

/// Shared words (in `a`'s order) among the `⌈top_frac·n⌉` largest |score|
/// of each lexicon, combined per `mode`.
pub fn top_subset<T: Scalar>(a: &Lexicon<T>, b: &Lexicon<T>, top_frac: f64, mode: TopSetMode) -> Result<Vec<String>> {
    if !(top_frac > 0.0 && top_frac <= 1.0) {
        return Err(Error::invalid(format!("top_frac must lie in (0, 1], got {top_frac}")));
    }
    let shared: Vec<(&String, f64, f64)> = a
        .words()
        .iter()
        .zip(a.scores())
        .filter_map(|(w, &sa)| b.score(w).map(|sb| (w, sa.to_f64_lossy(), sb.to_f64_lossy())))
        .collect();
    if shared.is_empty() {
        return Err(Error::Evaluation("lexicons share no words".into()));
    }
    let n = shared.len();
    let m = ((top_frac * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    let top = |pick: &dyn Fn(&(&String, f64, f64)) -> f64| -> BTreeSet<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| pick(&shared[j]).abs().partial_cmp(&pick(&shared[i]).abs()).unwrap().then(i.cmp(&j)));
        idx.into_iter().take(m).collect()
    };
    let top_a = top(&|e| e.1);
    let top_b = top(&|e| e.2);
    let keep: BTreeSet<usize> = match mode {
        TopSetMode::Union => top_a.union(&top_b).copied().collect(),
        TopSetMode::Intersection => top_a.intersection(&top_b).copied().collect(),
    };
    Ok(keep.into_iter().map(|i| shared[i].0.clone()).collect())
}

/// Kendall τ-b between two lexicons over their most sentiment-bearing
/// shared words.
pub fn lexicon_tau_top<T: Scalar>(a: &Lexicon<T>, b: &Lexicon<T>, top_frac: f64, mode: TopSetMode) -> Result<f64> {
    let subset = top_subset(a, b, top_frac, mode)?;
    if subset.len() < 2 {
        return Err(Error::Evaluation(format!("top subset has only {} word(s)", subset.len())));
    }
    let x: Vec<f64> = subset.iter().map(|w| a.score(w).unwrap().to_f64_lossy()).collect();
    let y: Vec<f64> = subset.iter().map(|w| b.score(w).unwrap().to_f64_lossy()).collect();
    kendall_tau_b(&x, &y)
}

/// Label changes between the averaged first and last epochs of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchReport {
    pub words: usize,
    /// Words polar in the head labelling.
    pub polar_in_head: usize,
    /// positive ↔ negative.
    pub full_switches: Vec<String>,
    /// Any label change, including to or from neutral.
    pub label_changes: Vec<String>,
}

impl SwitchReport {
    /// Share of head-polar words whose polarity flipped.
    pub fn full_switch_fraction(&self) -> f64 {
        if self.polar_in_head == 0 {
            0.0
        } else {
            self.full_switches.len() as f64 / self.polar_in_head as f64
        }
    }

    pub fn change_fraction(&self) -> f64 {
        self.label_changes.len() as f64 / self.words as f64
    }
}

/// Averages the first `head` and last `tail` lexicons over their shared
/// vocabulary, labels both averages by class mass and reports which words
/// changed label.
pub fn polarity_switch_report<T: Scalar>(
    lexicons: &[Lexicon<T>],
    dist: &ClassDistribution,
    head: usize,
    tail: usize,
) -> Result<SwitchReport> {
    if head == 0 || tail == 0 || head + tail > lexicons.len() {
        return Err(Error::Evaluation(format!(
            "need head ({head}) + tail ({tail}) ≤ {} epochs, both positive",
            lexicons.len()
        )));
    }
    let shared: Vec<String> =
        lexicons[0].words().iter().filter(|w| lexicons.iter().all(|l| l.position(w).is_some())).cloned().collect();
    if shared.is_empty() {
        return Err(Error::Evaluation("epochs share no words".into()));
    }
    let average = |range: &[Lexicon<T>]| -> Result<Lexicon<T>> {
        let k = T::from_usize_lossy(range.len());
        let scores = shared.iter().map(|w| range.iter().map(|l| l.score(w).unwrap()).sum::<T>() / k).collect();
        class_mass_labels(&Lexicon::new(shared.clone(), scores)?, dist)
    };
    let early = average(&lexicons[..head])?;
    let late = average(&lexicons[lexicons.len() - tail..])?;
    let (el, ll) = (early.labels().unwrap(), late.labels().unwrap());
    let mut report = SwitchReport {
        words: shared.len(),
        polar_in_head: el.iter().filter(|l| l.is_polar()).count(),
        full_switches: Vec::new(),
        label_changes: Vec::new(),
    };
    for (i, w) in shared.iter().enumerate() {
        if el[i] != ll[i] {
            report.label_changes.push(w.clone());
            if el[i].is_polar() && ll[i].is_polar() {
                report.full_switches.push(w.clone());
            }
        }
    }
    Ok(report)
}

/// One line of an evaluation report.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub metric: String,
    pub value: f64,
    pub n: usize,
    pub params: String,
}

impl MetricReport {
    pub const HEADER: &'static str = "metric\tvalue\tn\tparams";
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}", self.metric, self.value, self.n, self.params)
    }
}
