use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use lexinduce_testkit as kit;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/demo").join(name)
}

/// `word -> value` from a two-column TSV, skipping `#` lines and headers.
fn columns(name: &str, header: &str) -> Vec<(String, String)> {
    fs::read_to_string(fixture(name))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with(header) && !l.is_empty())
        .map(|l| {
            let mut c = l.split('\t');
            (c.next().unwrap().to_string(), c.next().unwrap().to_string())
        })
        .collect()
}

fn evaluate(gold: &str, mode: &str) -> HashMap<String, (f64, usize)> {
    let out = Command::new(env!("CARGO_BIN_EXE_lexinduce"))
        .args(["evaluate", fixture("lexicon.tsv").to_str().unwrap(), fixture(gold).to_str().unwrap(), "--mode", mode])
        .env_remove("LEXINDUCE_CONFIG")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            (c[0].to_string(), (c[1].parse().unwrap(), c[2].parse().unwrap()))
        })
        .collect()
}

#[test]
fn demo_evaluation_matches_brute_force_oracles() {
    let scores: HashMap<String, f64> =
        columns("lexicon.tsv", "word\t").into_iter().map(|(w, s)| (w, s.parse().unwrap())).collect();
    let labels = columns("gold.tsv", "word\t");
    let class = |l: &str| ["positive", "neutral", "negative"].iter().position(|&c| c == l).unwrap();

    let side =
        |c: usize| -> Vec<f64> { labels.iter().filter(|(_, l)| class(l) == c).map(|(w, _)| scores[w]).collect() };
    let auc = kit::auc_pairs(&side(0), &side(2));

    // Class mass with the gold proportions: rank by score, cut at the gold
    // class sizes (no ties straddle a cut in this fixture).
    let mut ranked: Vec<&(String, String)> = labels.iter().collect();
    ranked.sort_by(|a, b| scores[&b.0].partial_cmp(&scores[&a.0]).unwrap());
    let sizes = [0, 1, 2].map(|c| labels.iter().filter(|(_, l)| class(l) == c).count());
    let pred: Vec<usize> = (0..ranked.len())
        .map(|r| {
            if r < sizes[0] {
                0
            } else if r < sizes[0] + sizes[1] {
                1
            } else {
                2
            }
        })
        .collect();
    let gold: Vec<usize> = ranked.iter().map(|(_, l)| class(l)).collect();
    let f1 = kit::macro_f1_counts(&pred, &gold);

    let valence = columns("valence.tsv", "word\t");
    let xs: Vec<f64> = valence.iter().map(|(w, _)| scores[w]).collect();
    let ys: Vec<f64> = valence.iter().map(|(_, v)| v.parse().unwrap()).collect();
    let tau = kit::tau_b_pairs(&xs, &ys).unwrap();

    let got = evaluate("gold.tsv", "all");
    assert_eq!(got["auc"], (auc, 8));
    assert_eq!(got["ternary_f1"], (f1, 12));
    assert!(!got.contains_key("kendall_tau"));
    assert_eq!(evaluate("valence.tsv", "tau")["kendall_tau"], (tau, 12));
    // Values worked by hand: every positive outranks every negative; `sad`
    // and `place` swap neutral/negative, costing a quarter of each class.
    assert_eq!(auc, 1.0);
    assert!((f1 - (1.0 + 0.75 + 0.75) / 3.0).abs() < 1e-15);
}
