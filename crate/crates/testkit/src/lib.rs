//! Reference implementations and random instance generators for the test
//! suites. Everything here works on plain vectors and is written as the
//! most direct evaluation of each definition, independent of the library.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edge = (usize, usize, f64);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- generators

/// Lines of 1..=15 tokens `w0…w{vocab_size-1}`, skewed towards low ids, with
/// at most `max_tokens` tokens in total.
pub fn random_corpus(rng: &mut impl Rng, max_tokens: usize, vocab_size: usize) -> String {
    let mut out = String::new();
    let mut used = 0;
    while used < max_tokens {
        let len = rng.random_range(1..=15).min(max_tokens - used);
        let line: Vec<String> = (0..len)
            .map(|_| {
                let u: f64 = rng.random();
                format!("w{}", ((u * u) * vocab_size as f64) as usize)
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
        used += len;
    }
    out
}

/// Random `n × n` matrix with about `density·n²` non-zeros in (0, 1].
pub fn random_sparse(rng: &mut impl Rng, n: usize, density: f64) -> Vec<Edge> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.random::<f64>() < density {
                out.push((i, j, 1.0 - rng.random::<f64>()));
            }
        }
    }
    out
}

pub fn random_vectors(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

/// Random spanning tree plus `extra` random edges; weights in [0.1, 3).
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: usize) -> Vec<Edge> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for t in 1..n {
        let parent = order[rng.random_range(0..t)];
        let (a, b) = (parent.min(order[t]), parent.max(order[t]));
        edges.insert((a, b), rng.random_range(0.1..3.0));
    }
    let mut added = 0;
    let mut attempts = 0;
    while added < extra && attempts < 100 * (extra + 1) && n > 2 {
        attempts += 1;
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if let std::collections::btree_map::Entry::Vacant(e) = edges.entry(key) {
            e.insert(rng.random_range(0.1..3.0));
            added += 1;
        }
    }
    edges.into_iter().map(|((a, b), w)| (a, b, w)).collect()
}

/// Two `size`-cliques (nodes `0..size` and `size..2·size`) joined by one
/// edge between nodes `size-1` and `size`. All weights 1.
pub fn barbell(size: usize) -> Vec<Edge> {
    let mut edges = Vec::new();
    for base in [0, size] {
        for i in base..base + size {
            for j in i + 1..base + size {
                edges.push((i, j, 1.0));
            }
        }
    }
    edges.push((size - 1, size, 1.0));
    edges
}

/// Synthetic corpus with planted sentiment.
pub struct PlantedCorpus {
    pub text: String,
    pub positive_seeds: Vec<String>,
    pub negative_seeds: Vec<String>,
    pub planted_positive: Vec<String>,
    pub planted_negative: Vec<String>,
    pub neutral: Vec<String>,
}

/// Shape of a planted-sentiment corpus.
#[derive(Debug, Clone, Copy)]
pub struct PlantedParams {
    /// Probability that a sentiment token is drawn from the other cluster.
    pub cross: f64,
    /// Sentiment tokens per polar line, out of 12.
    pub sentiment_per_line: usize,
}

impl Default for PlantedParams {
    fn default() -> Self {
        Self { cross: 0.15, sentiment_per_line: 6 }
    }
}

/// Lines of 12 tokens are positive-context (40%), negative-context (40%) or
/// neutral. A polar line draws its sentiment tokens uniformly from its own
/// cluster (5 seeds and 20 planted words), each replaced by a word of the
/// other cluster with probability `cross`; the rest of the line, and all of
/// a neutral line, are uniform neutral words.
///
/// Sentiment density matters: with few sentiment tokens per line the
/// sentiment/neutral PMI sits near zero, the positive clamp turns its
/// sampling noise into spurious PPMI mass, and unweighted U rows at d = 50
/// over ~110 words are dominated by that noise.
pub fn planted_corpus(seed: u64, target_tokens: usize) -> PlantedCorpus {
    planted_corpus_with(seed, target_tokens, PlantedParams::default())
}

pub fn planted_corpus_with(seed: u64, target_tokens: usize, params: PlantedParams) -> PlantedCorpus {
    let PlantedParams { cross, sentiment_per_line } = params;
    assert!(sentiment_per_line <= 12);
    let mut rng = rng(seed);
    let names = |prefix: &str, n: usize| -> Vec<String> { (0..n).map(|i| format!("{prefix}{i}")).collect() };
    let pc = PlantedCorpus {
        text: String::new(),
        positive_seeds: names("goodseed", 5),
        negative_seeds: names("badseed", 5),
        planted_positive: names("plus", 20),
        planted_negative: names("minus", 20),
        neutral: names("noun", 60),
    };
    let positive: Vec<&String> = pc.positive_seeds.iter().chain(&pc.planted_positive).collect();
    let negative: Vec<&String> = pc.negative_seeds.iter().chain(&pc.planted_negative).collect();
    let mut text = String::new();
    let mut tokens = 0;
    while tokens < target_tokens {
        let kind: f64 = rng.random();
        let mut line: Vec<&str> = Vec::with_capacity(12);
        let polar = if kind < 0.8 { sentiment_per_line } else { 0 };
        let (own, other) = if kind < 0.4 { (&positive, &negative) } else { (&negative, &positive) };
        for _ in 0..polar {
            let side = if rng.random::<f64>() < cross { other } else { own };
            line.push(side.choose(&mut rng).unwrap());
        }
        for _ in polar..12 {
            line.push(pc.neutral.choose(&mut rng).unwrap());
        }
        line.shuffle(&mut rng);
        tokens += line.len();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    PlantedCorpus { text, ..pc }
}

// ------------------------------------------------------------------- oracles

/// Dense co-occurrence counts by enumerating every position pair at distance
/// `1..=window` on the same line.
pub fn brute_cooccurrence(text: &str, lowercase: bool, vocab: &[String], window: usize) -> Vec<Vec<f64>> {
    let index: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let n = vocab.len();
    let mut m = vec![vec![0.0; n]; n];
    for line in text.lines() {
        let toks: Vec<String> =
            line.split_whitespace().map(|t| if lowercase { t.to_lowercase() } else { t.to_string() }).collect();
        for a in 0..toks.len() {
            for b in 0..toks.len() {
                if a == b || a.abs_diff(b) > window {
                    continue;
                }
                if let (Some(&i), Some(&j)) = (index.get(toks[a].as_str()), index.get(toks[b].as_str())) {
                    m[i][j] += 1.0;
                }
            }
        }
    }
    m
}

/// `max(ln(p(i,j) / (p(i)·p_c(j))), 0)` over a dense count matrix.
pub fn dense_ppmi(counts: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
    let n = counts.len();
    let total: f64 = counts.iter().flatten().sum();
    let row: Vec<f64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..n).map(|j| (0..n).map(|i| counts[i][j]).sum()).collect();
    let col_c: Vec<f64> = col.iter().map(|&x| if x > 0.0 { x.powf(c) } else { 0.0 }).collect();
    let col_c_total: f64 = col_c.iter().sum();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if counts[i][j] > 0.0 {
                let pij = counts[i][j] / total;
                let pi = row[i] / total;
                let pj = col_c[j] / col_c_total;
                out[i][j] = (pij / (pi * pj)).ln().max(0.0);
            }
        }
    }
    out
}

pub fn dense_from_entries(n: usize, entries: &[Edge]) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for &(i, j, v) in entries {
        m[i][j] = v;
    }
    m
}

fn to_dmatrix(dense: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(dense.len(), dense[0].len(), |i, j| dense[i][j])
}

/// Singular values (descending) and left-singular vectors as the
/// eigendecomposition of `M·Mᵀ`.
pub fn gram_svd(dense: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = to_dmatrix(dense);
    let gram = &m * m.transpose();
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let sigma = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
    let vecs = order.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect();
    (sigma, vecs)
}

/// Largest principal angle (radians) between the spans of two sets of
/// orthonormal columns.
pub fn largest_principal_angle(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let n = a[0].len();
    let am = DMatrix::from_fn(n, a.len(), |i, j| a[j][i]);
    let bm = DMatrix::from_fn(n, b.len(), |i, j| b[j][i]);
    let residual = &bm - &am * (am.transpose() * &bm);
    let sin = residual.singular_values().max();
    sin.min(1.0).asin()
}

/// Largest entry of `|UᵀU − I|` for columns `u`.
pub fn orthonormality_error(columns: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, ca) in columns.iter().enumerate() {
        for (b, cb) in columns.iter().enumerate() {
            let dot: f64 = ca.iter().zip(cb).map(|(x, y)| x * y).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Neighbours of row `q` sorted by descending cosine, ties by index.
pub fn linear_scan_neighbors(rows: &[Vec<f64>], q: usize, k: usize) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> =
        (0..rows.len()).filter(|&j| j != q).map(|j| (j, cosine(&rows[q], &rows[j]))).collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Union-symmetrized kNN edges `(i < j) → arccos(−cos)` with zero weights
/// dropped.
pub fn knn_oracle(rows: &[Vec<f64>], k: usize) -> BTreeMap<(usize, usize), f64> {
    let mut out = BTreeMap::new();
    for i in 0..rows.len() {
        for (j, cos) in linear_scan_neighbors(rows, i, k) {
            let w = (-cos).acos();
            if w > 0.0 {
                out.insert((i.min(j), i.max(j)), w);
            }
        }
    }
    out
}

/// Solves `(I − β·D^{-1/2} E D^{-1/2}) p = (1 − β) s` densely.
pub fn dense_walk(n: usize, edges: &[Edge], seeds: &[usize], beta: f64) -> Vec<f64> {
    let mut e = DMatrix::<f64>::zeros(n, n);
    for &(i, j, w) in edges {
        e[(i, j)] = w;
        e[(j, i)] = w;
    }
    let deg: Vec<f64> = (0..n).map(|j| e.column(j).sum()).collect();
    let mut a = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            if e[(i, j)] != 0.0 {
                a[(i, j)] -= beta * e[(i, j)] / (deg[i].sqrt() * deg[j].sqrt());
            }
        }
    }
    let mut s = DVector::<f64>::zeros(n);
    for &q in seeds {
        s[q] = (1.0 - beta) / seeds.len() as f64;
    }
    let p = a.lu().solve(&s).expect("I - βT is nonsingular for β < 1");
    p.iter().copied().collect()
}

/// `max |y_u − Σ_v E(u,v)·y_v / deg(u)|` over unclamped, non-isolated `u`.
pub fn clamped_residual(n: usize, edges: &[Edge], y: &[f64], clamped: &[bool]) -> f64 {
    let mut acc = vec![0.0; n];
    let mut deg = vec![0.0; n];
    for &(i, j, w) in edges {
        acc[i] += w * y[j];
        acc[j] += w * y[i];
        deg[i] += w;
        deg[j] += w;
    }
    (0..n).filter(|&u| !clamped[u] && deg[u] > 0.0).map(|u| (y[u] - acc[u] / deg[u]).abs()).fold(0.0, f64::max)
}

/// Max over simple paths of at most `max_hops` edges from any source of the
/// product of edge weights, by exhaustive depth-first enumeration.
pub fn max_product_enum(n: usize, edges: &[Edge], sources: &[usize], max_hops: usize) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j, w) in edges {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    let mut best = vec![0.0f64; n];
    fn dfs(u: usize, prod: f64, hops: usize, adj: &[Vec<(usize, f64)>], on_path: &mut [bool], best: &mut [f64]) {
        best[u] = best[u].max(prod);
        if hops == 0 {
            return;
        }
        for &(v, w) in &adj[u] {
            if !on_path[v] {
                on_path[v] = true;
                dfs(v, prod * w, hops - 1, adj, on_path, best);
                on_path[v] = false;
            }
        }
    }
    for &s in sources {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        dfs(s, 1.0, max_hops, &adj, &mut on_path, &mut best);
    }
    best
}

/// `Σ_{s⁺} PMI(w, s) − Σ_{s⁻} PMI(w, s)` with unclamped smoothed PMI and
/// `absent` standing in for zero counts; `None` for words with no mass.
pub fn pmi_seed_sums(counts: &[Vec<f64>], pos: &[usize], neg: &[usize], c: f64, absent: f64) -> Vec<Option<f64>> {
    let n = counts.len();
    let total: f64 = counts.iter().flatten().sum();
    let row: Vec<f64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..n).map(|j| (0..n).map(|i| counts[i][j]).sum()).collect();
    let col_c_total: f64 = col.iter().filter(|&&x| x > 0.0).map(|x| x.powf(c)).sum();
    let pmi = |w: usize, s: usize| {
        let count = if counts[w][s] > 0.0 { counts[w][s] } else { absent };
        ((count / total) / ((row[w] / total) * (col[s].powf(c) / col_c_total))).ln()
    };
    (0..n)
        .map(|w| {
            (row[w] > 0.0)
                .then(|| pos.iter().map(|&s| pmi(w, s)).sum::<f64>() - neg.iter().map(|&s| pmi(w, s)).sum::<f64>())
        })
        .collect()
}

/// `(Σ[s⁺ > s⁻] + ½·Σ[s⁺ = s⁻]) / (n⁺·n⁻)` over all pairs.
pub fn auc_pairs(pos: &[f64], neg: &[f64]) -> f64 {
    let (mut greater, mut ties) = (0u64, 0u64);
    for &p in pos {
        for &q in neg {
            if p > q {
                greater += 1;
            } else if p == q {
                ties += 1;
            }
        }
    }
    (greater as f64 + 0.5 * ties as f64) / ((pos.len() * neg.len()) as f64)
}

/// τ-b from explicit pair enumeration; `None` when either side is all ties.
pub fn tau_b_pairs(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut untied_x, mut untied_y) = (0u64, 0u64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i].partial_cmp(&x[j]).unwrap();
            let dy = y[i].partial_cmp(&y[j]).unwrap();
            if dx.is_ne() {
                untied_x += 1;
            }
            if dy.is_ne() {
                untied_y += 1;
            }
            if dx.is_ne() && dy.is_ne() {
                if dx == dy {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    if untied_x == 0 || untied_y == 0 {
        return None;
    }
    Some((concordant - discordant) as f64 / ((untied_x as f64) * (untied_y as f64)).sqrt())
}

/// Macro-F1 over classes `0..3` from explicit per-class TP/FP/FN counts.
pub fn macro_f1_counts(pred: &[usize], gold: &[usize]) -> f64 {
    let mut sum = 0.0;
    for class in 0..3 {
        let (mut tp, mut fp, mut fneg) = (0u64, 0u64, 0u64);
        for (&p, &g) in pred.iter().zip(gold) {
            match (p == class, g == class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                _ => {}
            }
        }
        let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
        let recall = if tp + fneg > 0 { tp as f64 / (tp + fneg) as f64 } else { 0.0 };
        sum += if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    }
    sum / 3.0
}

/// Indices of the `⌈frac·n⌉` largest |values|, ties by index.
pub fn top_by_magnitude(values: &[f64], frac: f64) -> BTreeSet<usize> {
    let m = ((frac * values.len() as f64).ceil() as usize).clamp(1, values.len());
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].abs().partial_cmp(&values[a].abs()).unwrap().then(a.cmp(&b)));
    idx.into_iter().take(m).collect()
}

/// Population mean and variance.
pub fn moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}
