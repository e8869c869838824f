mod common;

use lexinduce::embeddings::{cosine_similarity, load_embeddings, nearest_neighbors, truncated_svd};
use lexinduce::{build_vocabulary, count_cooccurrences, ppmi, svd_embed, Corpus, SvdParams};
use lexinduce_testkit as kit;

#[test]
fn ppmi_matches_dense_formula() {
    for seed in 0..8 {
        let mut rng = kit::rng(seed);
        let text = kit::random_corpus(&mut rng, 1000, 40);
        let corpus = Corpus::parse(&text, true);
        let vocab = build_vocabulary(&corpus, 1, None, None).unwrap();
        for (window, c) in [(1, 0.75), (2, 1.0), (4, 0.75)] {
            let counts = count_cooccurrences(&corpus, &vocab, window).unwrap();
            let p = ppmi::<f64>(&counts, c).unwrap();
            let oracle = kit::dense_ppmi(&kit::brute_cooccurrence(&text, true, vocab.words(), window), c);
            for (i, row) in oracle.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    assert!((p.get(i, j) - v).abs() < 1e-12, "({i},{j}): {} vs {v}", p.get(i, j));
                }
            }
            assert!(p.matrix().iter().all(|(_, _, v)| v > 0.0));
        }
    }
}

#[test]
fn svd_matches_gram_eigensolver() {
    for seed in 0..5 {
        let mut rng = kit::rng(seed);
        let entries = kit::random_sparse(&mut rng, 50, 0.1);
        let m = common::csr(50, &entries);
        let svd = truncated_svd(&m, 10, seed, &SvdParams::default()).unwrap();
        let (sigma, left) = kit::gram_svd(&kit::dense_from_entries(50, &entries));
        for k in 0..10 {
            let rel = (svd.singular_values[k] - sigma[k]).abs() / sigma[k];
            assert!(rel < 1e-6, "seed {seed} σ{k}: {} vs {}", svd.singular_values[k], sigma[k]);
        }
        let u = common::columns(&svd.u);
        assert!(kit::orthonormality_error(&u) < 1e-6);
        let angle = kit::largest_principal_angle(&u, &left[..10]);
        assert!(angle < 1e-4, "seed {seed}: subspace angle {angle}");
    }
}

#[test]
fn full_rank_reconstruction() {
    let mut rng = kit::rng(9);
    let entries = kit::random_sparse(&mut rng, 20, 0.3);
    let m = common::csr(20, &entries);
    let svd = truncated_svd(&m, 20, 1, &SvdParams::default()).unwrap();
    let dense = kit::dense_from_entries(20, &entries);
    let (mut err, mut norm) = (0.0, 0.0);
    for (i, row) in dense.iter().enumerate() {
        for (j, &target) in row.iter().enumerate() {
            let approx: f64 = (0..20).map(|k| svd.u.get(i, k) * svd.singular_values[k] * svd.v.get(j, k)).sum();
            err += (approx - target).powi(2);
            norm += target * target;
        }
    }
    assert!((err / norm).sqrt() < 1e-6);
}

#[test]
fn seeds_change_nothing_but_signs_and_rounding() {
    let mut rng = kit::rng(4);
    let entries = kit::random_sparse(&mut rng, 40, 0.15);
    let m = common::csr(40, &entries);
    let params = SvdParams::default();
    let a = truncated_svd(&m, 8, 1, &params).unwrap();
    let again = truncated_svd(&m, 8, 1, &params).unwrap();
    assert_eq!(a.u, again.u);
    let b = truncated_svd(&m, 8, 2, &params).unwrap();
    for (x, y) in a.singular_values.iter().zip(&b.singular_values) {
        assert!((x - y).abs() / x < 1e-6);
    }
    assert!(kit::largest_principal_angle(&common::columns(&a.u), &common::columns(&b.u)) < 1e-4);
}

#[test]
fn embeddings_from_corpus_are_orthonormal_columns() {
    let mut rng = kit::rng(12);
    let text = kit::random_corpus(&mut rng, 3000, 80);
    let corpus = Corpus::parse(&text, true);
    let vocab = build_vocabulary(&corpus, 1, None, None).unwrap();
    let p = ppmi::<f64>(&count_cooccurrences(&corpus, &vocab, 4).unwrap(), 0.75).unwrap();
    let emb = svd_embed(&p, &vocab, 12, 0, &SvdParams::default()).unwrap();
    assert_eq!((emb.len(), emb.dim()), (vocab.len(), 12));
    assert!(kit::orthonormality_error(&common::columns(emb.matrix())) < 1e-6);
}

#[test]
fn nearest_neighbors_match_linear_scan() {
    let mut rng = kit::rng(21);
    let rows = kit::random_vectors(&mut rng, 100, 10);
    let emb = common::embeddings(&rows);
    let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x * 3.5).collect()).collect();
    let emb_scaled = common::embeddings(&scaled);
    for q in (0..100).step_by(5) {
        let got = nearest_neighbors(&emb, &format!("w{q}"), 7).unwrap();
        let want = kit::linear_scan_neighbors(&rows, q, 7);
        assert_eq!(got.len(), want.len());
        for ((w, s), (j, c)) in got.iter().zip(&want) {
            assert_eq!(w, &format!("w{j}"));
            assert!((s - c).abs() < 1e-12);
        }
        let got_scaled = nearest_neighbors(&emb_scaled, &format!("w{q}"), 7).unwrap();
        let names = |v: &[(String, f64)]| v.iter().map(|e| e.0.clone()).collect::<Vec<_>>();
        assert_eq!(names(&got), names(&got_scaled));
    }
    let all = nearest_neighbors(&emb, "w0", 99).unwrap();
    assert_eq!(all.len(), 99);
    assert!(all.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn save_then_load_round_trips() {
    let mut rng = kit::rng(5);
    let rows = kit::random_vectors(&mut rng, 30, 6);
    let emb = common::embeddings(&rows);
    let mut buf = Vec::new();
    emb.write(&mut buf).unwrap();
    let back = load_embeddings::<f64, _>(buf.as_slice(), None).unwrap().embeddings;
    assert_eq!(back.vocab().words(), emb.vocab().words());
    for i in 0..30 {
        for (a, b) in back.row(i).iter().zip(emb.row(i)) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn cosine_is_scale_free() {
    let a = [0.3, -1.2, 2.0];
    let b = [1.0, 0.5, -0.1];
    let scaled: Vec<f64> = a.iter().map(|x| x * 7.0).collect();
    let x = cosine_similarity(&a, &b).unwrap();
    let y = cosine_similarity(&scaled, &b).unwrap();
    assert!((x - y).abs() < 1e-15);
}
