use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lexinduce::corpus::{SparseCountMatrix, Vocabulary};
use lexinduce::{load_embeddings, LexicalGraph64, Lexicon64, PpmiMatrix64};
use lexinduce_cli::artifact::{sha256_file, Meta};
use lexinduce_cli::config::PipelineConfig;
use lexinduce_cli::pipeline::{config_from_lexicon, Outcome, Stage, Workspace};
use tempfile::TempDir;

fn demo_source() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/demo")
}

/// A private copy of the demo corpus, seeds and config.
fn demo() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    for f in ["corpus.txt", "seeds.txt", "demo.conf"] {
        fs::copy(demo_source().join(f), dir.path().join(f)).unwrap();
    }
    let conf = dir.path().join("demo.conf");
    (dir, conf)
}

fn config(conf: &Path, overrides: &[(&str, &str)]) -> PipelineConfig {
    let mut c = PipelineConfig::from_file(conf).unwrap();
    for (k, v) in overrides {
        c.set(k, v, Path::new("")).unwrap();
    }
    c
}

fn bin(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lexinduce"));
    cmd.args(args).env_remove("LEXINDUCE_CONFIG");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn second_cooccur_is_a_fresh_no_op() {
    let (_dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[])).unwrap();
    ws.vocab().unwrap();
    assert_eq!(ws.cooccur().unwrap(), Outcome::Built);
    let before = fs::read(ws.path(Stage::Counts)).unwrap();
    assert_eq!(ws.cooccur().unwrap(), Outcome::Fresh);
    assert_eq!(fs::read(ws.path(Stage::Counts)).unwrap(), before);
    drop(ws);

    let c = conf.to_str().unwrap();
    let out = bin(&["-c", c, "cooccur"], &[]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("counts: fresh"), "{}", stderr(&out));
}

#[test]
fn editing_window_size_rebuilds_counts() {
    let (_dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[])).unwrap();
    ws.vocab().unwrap();
    ws.cooccur().unwrap();
    let old = fs::read(ws.path(Stage::Counts)).unwrap();
    drop(ws);

    let ws = Workspace::open(config(&conf, &[("window_size", "1")])).unwrap();
    assert_eq!(ws.vocab().unwrap(), Outcome::Fresh);
    assert_eq!(ws.cooccur().unwrap(), Outcome::Built);
    assert_ne!(fs::read(ws.path(Stage::Counts)).unwrap(), old);
    let meta = Meta::read(&Meta::sidecar(&ws.path(Stage::Counts))).unwrap();
    assert_eq!(meta.get("param.window_size"), Some("1"));
    let counts = SparseCountMatrix::read(fs::read(ws.path(Stage::Counts)).unwrap().as_slice()).unwrap();
    assert_eq!(counts.window_size(), 1);
}

#[test]
fn stale_upstream_is_an_error_naming_the_artifact() {
    let (_dir, conf) = demo();
    let c = conf.to_str().unwrap();
    assert!(bin(&["-c", c, "run"], &[]).status.success());

    let out = bin(&["-c", c, "--set", "window_size=2", "embed"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("stale artifact") && err.contains("counts.txt") && err.contains("window_size"), "{err}");

    // Tampering with an artifact is detected by its recorded checksum.
    let graph = conf.parent().unwrap().join("out/graph.txt");
    let mut text = fs::read_to_string(&graph).unwrap();
    text.push('\n');
    fs::write(&graph, text).unwrap();
    let out = bin(&["-c", c, "induce"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("graph.txt"), "{}", stderr(&out));
}

#[test]
fn method_without_its_artifact_is_reported() {
    let (_dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[("method", "bestpath")])).unwrap();
    ws.vocab().unwrap();
    ws.cooccur().unwrap();
    let err = format!("{:#}", ws.induce(false).unwrap_err());
    assert!(err.contains("bestpath") && err.contains("ppmi.txt"), "{err}");
    drop(ws);
    let ws = Workspace::open(config(&conf, &[("method", "pmi")])).unwrap();
    let lex = ws.induce(false).unwrap();
    assert_eq!(lex.meta("method"), Some("pmi"));
}

#[test]
fn demo_pipeline_artifacts_load_and_agree() {
    let (_dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[])).unwrap();
    ws.build_all().unwrap();

    let read = |s: Stage| fs::read(ws.path(s)).unwrap();
    let vocab = Vocabulary::read(read(Stage::Vocab).as_slice()).unwrap();
    let counts = SparseCountMatrix::read(read(Stage::Counts).as_slice()).unwrap();
    let ppmi = PpmiMatrix64::read(read(Stage::Ppmi).as_slice()).unwrap();
    let emb = load_embeddings::<f64, _>(read(Stage::Embeddings).as_slice(), Some(&vocab)).unwrap();
    let graph = LexicalGraph64::read(read(Stage::Graph).as_slice(), vocab.clone()).unwrap();
    assert!(emb.missing.is_empty() && emb.dropped.is_empty());
    assert_eq!(counts.dim(), vocab.len());
    assert_eq!(ppmi.dim(), vocab.len());
    assert_eq!(emb.embeddings.dim(), 8);
    assert_eq!(graph.len(), vocab.len());

    let inputs = [
        (Stage::Counts, "input.vocab", Stage::Vocab),
        (Stage::Ppmi, "input.counts", Stage::Counts),
        (Stage::Embeddings, "input.ppmi", Stage::Ppmi),
        (Stage::Graph, "input.embeddings", Stage::Embeddings),
    ];
    for (stage, key, upstream) in inputs {
        let meta = Meta::read(&Meta::sidecar(&ws.path(stage))).unwrap();
        assert_eq!(meta.get(key), Some(sha256_file(&ws.path(upstream)).unwrap().as_str()));
    }
    for stage in Stage::ALL {
        let meta = Meta::read(&Meta::sidecar(&ws.path(stage))).unwrap();
        assert_eq!(meta.get("vocab_checksum"), Some(vocab.checksum().as_str()), "{stage}");
        assert_eq!(meta.get("output"), Some(sha256_file(&ws.path(stage)).unwrap().as_str()));
    }
}

#[test]
fn dim_is_capped_below_vocabulary_size() {
    let (_dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[("dim", "500")])).unwrap();
    ws.build_all().unwrap();
    let vocab = ws.load_vocab().unwrap();
    assert_eq!(ws.load_embeddings().unwrap().dim(), vocab.len() - 1);
}

#[test]
fn sentprop_lexicon_is_standardized_and_bootstrap_adds_std() {
    let (_dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[])).unwrap();
    ws.build_all().unwrap();
    let lex = ws.induce(false).unwrap();
    let n = lex.len() as f64;
    let mean = lex.scores().iter().sum::<f64>() / n;
    let var = lex.scores().iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
    assert!(lex.std().is_none());
    assert_eq!(lex.meta("method"), Some("sentprop"));

    let boot = ws.induce(true).unwrap();
    assert_eq!(boot.std().unwrap().len(), boot.len());
    assert_eq!(boot.meta("bootstrap_runs"), Some("10"));
    let bad = Workspace::open(config(&conf, &[("method", "clamped"), ("out_dir", "elsewhere")]));
    assert!(bad.unwrap().induce(true).is_err());
}

#[test]
fn reruns_are_byte_identical_across_directories_and_threads() {
    let (dir, conf) = demo();
    let c = conf.to_str().unwrap();
    let mut outputs = Vec::new();
    for (sub, threads) in [("a", "1"), ("b", "8"), ("c", "3")] {
        let out_dir = dir.path().join(sub);
        let lex = out_dir.join("lex.tsv");
        let o = bin(
            &["-c", c, "--out-dir", out_dir.to_str().unwrap(), "run", "--bootstrap", "--output", lex.to_str().unwrap()],
            &[("RAYON_NUM_THREADS", threads)],
        );
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read(&lex).unwrap());
        for stage in Stage::ALL {
            assert_eq!(
                fs::read(out_dir.join(stage.file_name())).unwrap(),
                fs::read(dir.path().join("a").join(stage.file_name())).unwrap()
            );
        }
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn lexicon_metadata_replays_the_run() {
    let (dir, conf) = demo();
    for bootstrapped in [false, true] {
        for method in ["sentprop", "clamped", "bestpath", "pmi"] {
            if bootstrapped && method != "sentprop" {
                continue;
            }
            let original = {
                let ws = Workspace::open(config(&conf, &[("method", method), ("k", "4")])).unwrap();
                ws.build_all().unwrap();
                let lex = ws.induce(bootstrapped).unwrap();
                let path = ws.default_lexicon_path(bootstrapped);
                ws.write_lexicon(&lex, &path).unwrap();
                fs::read(path).unwrap()
            };
            let lex = Lexicon64::read(original.as_slice()).unwrap();
            let replay_dir = dir.path().join(format!("replay-{method}-{bootstrapped}"));
            let replayed = config_from_lexicon(&lex, &replay_dir).unwrap();
            let ws = Workspace::open(replayed).unwrap();
            ws.build_all().unwrap();
            let again = ws.induce(lex.meta("command") == Some("bootstrap")).unwrap();
            let mut bytes = Vec::new();
            again.write(&mut bytes).unwrap();
            assert_eq!(bytes, original, "{method} bootstrapped={bootstrapped}");
        }
    }
}

#[test]
fn self_evaluation_and_negated_comparison() {
    let (dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[])).unwrap();
    ws.build_all().unwrap();
    let lex = ws.induce(false).unwrap();
    let lex_path = dir.path().join("lex.tsv");
    ws.write_lexicon(&lex, &lex_path).unwrap();
    let gold_path = dir.path().join("self.tsv");
    let gold: String = lex.words().iter().zip(lex.scores()).map(|(w, s)| format!("{w}\t{s}\n")).collect();
    fs::write(&gold_path, gold).unwrap();
    let neg_path = dir.path().join("neg.tsv");
    ws.write_lexicon(&lex.negated(), &neg_path).unwrap();
    drop(ws);

    let (l, g, n) = (lex_path.to_str().unwrap(), gold_path.to_str().unwrap(), neg_path.to_str().unwrap());
    let out = bin(&["evaluate", l, g, "--mode", "tau"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|line| line.starts_with("kendall_tau\t1\t")), "{text}");

    let report = dir.path().join("cmp.tsv");
    let out = bin(&["compare", l, n, "--report", report.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(report).unwrap();
    assert!(text.lines().any(|line| line.starts_with("tau_top\t-1\t")), "{text}");
}

#[test]
fn exit_codes_follow_the_error_class() {
    let (_dir, conf) = demo();
    let c = conf.to_str().unwrap();
    assert_eq!(bin(&["-c", c, "--set", "beta=2", "vocab"], &[]).status.code(), Some(1));
    assert_eq!(bin(&["-c", c, "--set", "colour=blue", "vocab"], &[]).status.code(), Some(1));
    assert_eq!(bin(&["no-such-command"], &[]).status.code(), Some(1));
    assert_eq!(bin(&["--help"], &[]).status.code(), Some(0));
    assert_eq!(bin(&["-c", c, "graph"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["-c", c, "--corpus", "/nonexistent/corpus.txt", "vocab"], &[]).status.code(), Some(2));
    assert!(bin(&["-c", c, "run"], &[]).status.success());
    let o = bin(&["-c", c, "--set", "max_iter=1", "--set", "tol=1e-300", "induce"], &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let lock = conf.parent().unwrap().join("out/.lock");
    fs::write(&lock, "1").unwrap();
    let o = bin(&["-c", c, "vocab"], &[]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("in use"), "{}", stderr(&o));
}

#[test]
fn config_comes_from_the_environment_and_flags_win() {
    let (_dir, conf) = demo();
    let c = conf.to_str().unwrap();
    let o = bin(&["show-config"], &[("LEXINDUCE_CONFIG", c)]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("k = 5\n") && text.contains("dim = 8\n"), "{text}");
    let o = bin(&["--set", "k=9", "--method", "pmi", "show-config"], &[("LEXINDUCE_CONFIG", c)]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("k = 9\n") && text.contains("method = pmi\n"), "{text}");
}

#[test]
fn neighbors_query_the_embedding_artifact() {
    let (_dir, conf) = demo();
    let c = conf.to_str().unwrap();
    assert!(bin(&["-c", c, "run"], &[]).status.success());
    let o = bin(&["-c", c, "neighbors", "good", "-n", "3"], &[]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert_eq!(bin(&["-c", c, "neighbors", "zebra"], &[]).status.code(), Some(2));
}

#[test]
fn external_embeddings_replace_the_svd_stage() {
    let (dir, conf) = demo();
    let ws = Workspace::open(config(&conf, &[])).unwrap();
    ws.build_all().unwrap();
    let vocab = ws.load_vocab().unwrap();
    let svd = fs::read_to_string(ws.path(Stage::Embeddings)).unwrap();
    drop(ws);

    // Drop one vocabulary word and add one foreign word.
    let mut rows: Vec<&str> = svd.lines().skip(1).collect();
    let dropped = rows.remove(3).split(' ').next().unwrap().to_string();
    let d = rows[0].split(' ').count() - 1;
    let foreign = format!("zzforeign {}", vec!["0.5"; d].join(" "));
    rows.push(&foreign);
    let external = dir.path().join("vectors.txt");
    fs::write(&external, format!("{} {d}\n{}\n", rows.len(), rows.join("\n"))).unwrap();

    let out = dir.path().join("ext");
    let c = config(&conf, &[("embeddings", external.to_str().unwrap()), ("out_dir", out.to_str().unwrap())]);
    let ws = Workspace::open(c.clone()).unwrap();
    ws.vocab().unwrap();
    assert_eq!(ws.embed().unwrap(), Outcome::Built);
    assert!(!ws.path(Stage::Ppmi).exists());
    let emb = ws.load_embeddings().unwrap();
    assert_eq!(emb.len(), vocab.len());
    assert!(emb.vector(&dropped).unwrap().iter().all(|&v| v == 0.0));
    assert_eq!(emb.zero_rows(), vec![vocab.get(&dropped).unwrap()]);
    let meta = Meta::read(&Meta::sidecar(&ws.path(Stage::Embeddings))).unwrap();
    assert_eq!(meta.get("input.external"), Some(sha256_file(&external).unwrap().as_str()));

    ws.graph().unwrap();
    assert_eq!(ws.load_graph().unwrap().isolated_nodes(), vec![vocab.get(&dropped).unwrap()]);
    let lex = ws.induce(false).unwrap();
    assert_eq!(lex.meta("config.embeddings"), Some(external.to_str().unwrap()));
    assert!(lex.unreachable().contains(&dropped));
    drop(ws);

    // Editing the vectors makes the imported artifact, and so the graph, stale.
    fs::write(&external, format!("{} {d}\n{}\n", rows.len() - 1, rows[..rows.len() - 1].join("\n"))).unwrap();
    let ws = Workspace::open(c.clone()).unwrap();
    let err = ws.require_fresh(Stage::Graph).unwrap_err().to_string();
    assert!(err.contains("embeddings.txt") && err.contains("input.external"), "{err}");
    assert_eq!(ws.embed().unwrap(), Outcome::Built);
    drop(ws);

    let mut c = c;
    c.method = "bestpath".parse().unwrap();
    let err = Workspace::open(c).unwrap().induce(false).unwrap_err();
    assert!(err.to_string().contains("external embeddings"), "{err}");
}
