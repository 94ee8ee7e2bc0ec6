mod common;

use std::fs;

use common::{random_sparse, sparse};
use lcca_core::ingest::{
    read_libsvm, read_matrix_market, read_tokens, synth_correlated, tokens_to_indicators,
    write_libsvm, write_matrix_market, MarkovTokens, SharedLayout, SynthSpec, TokenDatasetSpec,
    TokenSource,
};
use lcca_core::linalg::gram_diagonal;
use lcca_core::{exact_cca, Error, ExactOptions};
use lcca_testkit::singular_values;

fn inline(tokens: &str) -> TokenDatasetSpec {
    TokenDatasetSpec::new(TokenSource::Inline(
        tokens.split_whitespace().map(String::from).collect(),
    ))
}

fn base_spec() -> SynthSpec {
    SynthSpec {
        n: 2000,
        p1: 20,
        p2: 20,
        k_shared: 0,
        planted_corrs: vec![],
        spectrum_decay: 0.0,
        density: 0.3,
        seed: 1,
        shared_layout: SharedLayout::Leading,
        design_coupling: 0.0,
    }
}

#[test]
fn matrix_market_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let m = random_sparse(seed, 37, 23, 0.2, 1.0);
        let path = dir.path().join(format!("m{seed}.mtx"));
        write_matrix_market(&path, &m).unwrap();
        assert_eq!(read_matrix_market(&path).unwrap(), m);
    }
}

#[test]
fn matrix_market_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mtx");
    fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
    )
    .unwrap();
    match read_matrix_market(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        read_matrix_market(dir.path().join("missing.mtx")),
        Err(Error::Io { .. })
    ));
}

#[test]
fn libsvm_ten_lines_match_hand_enumeration() {
    let text = "\
1 1:0.5 3:2
-1 2:1
0

1 qid:4 4:-3 1:1
2 5:7.25 # trailing comment
+1 3:1 3:1
1 1:1 2:1 3:1 4:1 5:1
0 4:0.125
-2 2:-1.5 5:2
";
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.svm");
    fs::write(&path, text).unwrap();
    let m = read_libsvm(&path, 5).unwrap();
    let expected = sparse(
        10,
        5,
        &[
            (0, 0, 0.5),
            (0, 2, 2.0),
            (1, 1, 1.0),
            (4, 3, -3.0),
            (4, 0, 1.0),
            (5, 4, 7.25),
            (6, 2, 2.0),
            (7, 0, 1.0),
            (7, 1, 1.0),
            (7, 2, 1.0),
            (7, 3, 1.0),
            (7, 4, 1.0),
            (8, 3, 0.125),
            (9, 1, -1.5),
            (9, 4, 2.0),
        ],
    );
    assert_eq!(m, expected);

    let out = dir.path().join("out.svm");
    write_libsvm(&out, &m).unwrap();
    assert_eq!(read_libsvm(&out, 5).unwrap(), m);
    assert!(read_libsvm(&path, 4).is_err());
}

#[test]
fn token_file_builds_indicators() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tokens.txt");
    fs::write(&path, "a b\na  c\n").unwrap();
    assert_eq!(read_tokens(&path).unwrap(), ["a", "b", "a", "c"]);
    let out = tokens_to_indicators(&TokenDatasetSpec::new(TokenSource::File(path))).unwrap();
    assert_eq!(out.x.shape(), (3, 3));
    assert_eq!(gram_diagonal(&out.x), vec![2.0, 1.0, 0.0]);
    assert_eq!(out.x_vocab, ["a", "b", "c"]);
}

#[test]
fn next_token_limit_retains_matching_bigrams() {
    // bigrams (a,b) (b,a) (a,b) (b,c); most frequent next token is b
    let spec = TokenDatasetSpec {
        y_vocab_limit: 1,
        ..inline("a b a b c")
    };
    let out = tokens_to_indicators(&spec).unwrap();
    assert_eq!(out.y_vocab, ["b"]);
    assert_eq!(out.x.n_rows(), 2);
    assert_eq!(gram_diagonal(&out.y), vec![2.0]);
}

#[test]
fn repeated_token_is_self_correlated() {
    let out = tokens_to_indicators(&inline("a a a")).unwrap();
    assert_eq!(out.x.n_rows(), 2);
    assert_eq!(out.x, out.y);
    let f = exact_cca(&out.x, &out.y, 1, ExactOptions::default()).unwrap();
    assert!((f.d[0] - 1.0).abs() < 1e-12);
}

#[test]
fn indicator_grams_are_diagonal_counts() {
    let source = TokenSource::Markov(MarkovTokens {
        length: 5000,
        vocab: 60,
        groups: 4,
        stickiness: 0.7,
        seed: 3,
    });
    let spec = TokenDatasetSpec {
        x_drop_top: 2,
        x_vocab_limit: 40,
        y_vocab_limit: 50,
        ..TokenDatasetSpec::new(source)
    };
    let out = tokens_to_indicators(&spec).unwrap();
    for m in [&out.x, &out.y] {
        assert!(m.values().iter().all(|&v| v == 1.0));
        for r in 0..m.n_rows() {
            assert_eq!(m.indptr()[r + 1] - m.indptr()[r], 1);
        }
        let g = m.gram();
        let diag = gram_diagonal(m);
        let counts: Vec<f64> = (0..m.n_cols())
            .map(|c| m.indices().iter().filter(|&&j| j == c).count() as f64)
            .collect();
        assert_eq!(diag, counts);
        for i in 0..m.n_cols() {
            for j in 0..m.n_cols() {
                if i != j {
                    assert_eq!(g[(i, j)], 0.0);
                }
            }
        }
    }
    assert_eq!(out.x.n_cols(), 40);
    assert_eq!(out.y.n_cols(), 50);
}

#[test]
fn nearly_perfect_planted_pair_is_recovered() {
    let spec = SynthSpec {
        k_shared: 1,
        planted_corrs: vec![0.999],
        density: 1.0,
        ..base_spec()
    };
    let inst = synth_correlated(&spec).unwrap();
    let f = exact_cca(&inst.x, &inst.y, 1, ExactOptions::default()).unwrap();
    assert!(f.d[0] >= 0.99, "{}", f.d[0]);
}

#[test]
fn planted_correlations_are_recovered_at_large_n() {
    let spec = SynthSpec {
        n: 20_000,
        k_shared: 3,
        planted_corrs: vec![0.9, 0.7, 0.5],
        spectrum_decay: 1.0,
        density: 0.5,
        shared_layout: SharedLayout::Spread,
        design_coupling: 0.5,
        ..base_spec()
    };
    let inst = synth_correlated(&spec).unwrap();
    let f = exact_cca(&inst.x, &inst.y, 4, ExactOptions::default()).unwrap();
    for (d, rho) in f.d.iter().zip(&inst.planted_corrs) {
        assert!((d - rho).abs() <= 0.03, "{:?}", f.d);
    }
    assert!(f.d[3] < 0.1);
}

#[test]
fn independent_sides_stay_inside_the_noise_envelope() {
    let spec = SynthSpec {
        n: 5000,
        ..base_spec()
    };
    let inst = synth_correlated(&spec).unwrap();
    let f = exact_cca(&inst.x, &inst.y, 1, ExactOptions::default()).unwrap();
    let envelope = 3.0 * ((spec.p1 * spec.p2) as f64 / spec.n as f64).sqrt();
    assert!(f.d[0] <= envelope, "{} > {envelope}", f.d[0]);
    // the leading sample correlation of independent blocks sits near
    // (sqrt(p1) + sqrt(p2)) / sqrt(n)
    assert!(f.d[0] <= 2.0 * (2.0 * 20f64.sqrt()) / 5000f64.sqrt());
}

#[test]
fn flat_and_steep_spectra() {
    let flat = synth_correlated(&base_spec()).unwrap();
    let s = singular_values(&flat.x.to_dense());
    assert!(s[0] / s[s.len() - 1] <= 3.0, "{s:?}");

    let steep = synth_correlated(&SynthSpec {
        spectrum_decay: 2.0,
        ..base_spec()
    })
    .unwrap();
    let s = singular_values(&steep.x.to_dense());
    assert!(s[0] / s[s.len() - 1] >= 100.0);
}

#[test]
fn infeasible_spec_is_rejected() {
    let spec = SynthSpec {
        k_shared: 21,
        planted_corrs: vec![0.5; 21],
        ..base_spec()
    };
    assert!(synth_correlated(&spec).is_err());
}
