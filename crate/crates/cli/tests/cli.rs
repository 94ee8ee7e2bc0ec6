use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lcca_cli::{compare, AlgoName, DataSource, MatrixFormat, RunConfig};
use lcca_core::ingest::{
    write_libsvm, write_matrix_market, MarkovTokens, SharedLayout, SynthSpec, TokenDatasetSpec,
    TokenSource,
};
use lcca_core::SparseMatrix;
use lcca_testkit::Gen;

fn lcca(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lcca"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env(lcca_cli::THREADS_ENV, t.to_string()),
        None => cmd.env_remove(lcca_cli::THREADS_ENV),
    };
    cmd.output().unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn random(seed: u64, n: usize, p: usize) -> SparseMatrix {
    SparseMatrix::from_triplets(n, p, Gen::new(seed).sparse(n, p, 0.2, 0.5)).unwrap()
}

fn correlations(dir: &Path) -> Vec<f64> {
    fs::read_to_string(dir.join("correlations.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

fn synth(dir: &Path, spec: &SynthSpec) -> PathBuf {
    let path = dir.join("synth.json");
    fs::write(&path, serde_json::to_string(spec).unwrap()).unwrap();
    path
}

fn ptb_like() -> SynthSpec {
    SynthSpec {
        n: 2000,
        p1: 300,
        p2: 150,
        k_shared: 10,
        planted_corrs: (0..10).map(|i| 0.9 - 0.05 * i as f64).collect(),
        spectrum_decay: 1.0,
        density: 0.05,
        seed: 3,
        shared_layout: SharedLayout::Spread,
        design_coupling: 0.0,
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lcca_on_table_shaped_synth_emits_twenty_correlations() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), &ptb_like());
    let out = dir.path().join("out");
    ok(&lcca(
        &[
            "run",
            "--algo",
            "lcca",
            "--synth-spec",
            s(&spec),
            "--t1",
            "5",
            "--t2",
            "7",
            "--kpc",
            "100",
            "--out",
            s(&out),
            "--trace",
            "--oracle-compare",
        ],
        None,
    ));
    let c = correlations(&out);
    assert_eq!(c.len(), 20);
    assert!(c.windows(2).all(|w| w[0] >= w[1]));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 6);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["t2"], 7);
    assert!(report["work"]["sparse_products"].as_u64().unwrap() > 0);
    assert!(report["wall_time_seconds"].as_f64().unwrap() > 0.0);
    let sum = report["captured_correlation_sum"].as_f64().unwrap();
    assert!(sum <= report["oracle"]["correlation_sum"].as_f64().unwrap() + 1e-6);
    assert!(report["oracle"]["dist_x"].as_f64().is_some());
}

#[test]
fn exact_on_identical_views_gives_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.mtx");
    write_matrix_market(&x, &random(1, 100, 12)).unwrap();
    let out = dir.path().join("out");
    ok(&lcca(
        &[
            "run",
            "--algo",
            "exact",
            "--x",
            s(&x),
            "--y",
            s(&x),
            "--kcca",
            "12",
            "--out",
            s(&out),
        ],
        None,
    ));
    let text = fs::read_to_string(out.join("correlations.csv")).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",1.00000000000e0"), "{line}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x.svm"), dir.path().join("y.svm"));
    write_libsvm(&x, &random(2, 400, 30)).unwrap();
    write_libsvm(&y, &random(3, 400, 20)).unwrap();
    let run = |name: &str, threads| {
        let out = dir.path().join(name);
        ok(&lcca(
            &[
                "run",
                "--algo",
                "gcca",
                "--x",
                s(&x),
                "--y",
                s(&y),
                "--format",
                "libsvm",
                "--x-cols",
                "30",
                "--y-cols",
                "20",
                "--kcca",
                "5",
                "--t1",
                "6",
                "--t2",
                "4",
                "--seed",
                "9",
                "--trace",
                "--out",
                s(&out),
            ],
            Some(threads),
        ));
        (
            fs::read(out.join("correlations.csv")).unwrap(),
            fs::read(out.join("trace.csv")).unwrap(),
        )
    };
    let a = run("a", 2);
    assert_eq!(a, run("b", 2));
    assert_eq!(a, run("c", 1));
}

#[test]
fn invalid_configs_fail_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), &ptb_like());
    let out = dir.path().join("out");
    let cases: [&[&str]; 3] = [
        &[
            "run",
            "--algo",
            "dcca",
            "--synth-spec",
            s(&spec),
            "--t1",
            "3",
            "--kpc",
            "5",
            "--out",
            s(&out),
        ],
        &[
            "run",
            "--algo",
            "lcca",
            "--synth-spec",
            s(&spec),
            "--t1",
            "3",
            "--out",
            s(&out),
        ],
        &[
            "run",
            "--algo",
            "exact",
            "--x",
            "/nonexistent.mtx",
            "--y",
            "/nonexistent.mtx",
            "--out",
            s(&out),
        ],
    ];
    for args in cases {
        let o = lcca(args, None);
        assert!(!o.status.success());
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    }
}

#[test]
fn rank_collapse_keeps_the_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    // two nonzero columns out of three: rank 2 < k_cca = 3
    let x =
        SparseMatrix::from_triplets(30, 3, (0..30).map(|i| (i, i % 2, 1.0 + i as f64))).unwrap();
    let (xp, yp) = (dir.path().join("x.mtx"), dir.path().join("y.mtx"));
    write_matrix_market(&xp, &x).unwrap();
    write_matrix_market(&yp, &random(4, 30, 5)).unwrap();
    let out = dir.path().join("out");
    let o = lcca(
        &[
            "run",
            "--algo",
            "dcca",
            "--x",
            s(&xp),
            "--y",
            s(&yp),
            "--kcca",
            "3",
            "--t1",
            "4",
            "--trace",
            "--out",
            s(&out),
        ],
        None,
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("collapsed"));
    assert!(fs::read_to_string(out.join("trace.csv"))
        .unwrap()
        .starts_with("iteration,"));
    assert!(!out.join("correlations.csv").exists());
}

#[test]
fn compare_matches_budgets_on_a_steep_spectrum() {
    let data = DataSource::Synth(SynthSpec {
        n: 3000,
        p1: 120,
        p2: 100,
        k_shared: 5,
        planted_corrs: vec![0.9, 0.85, 0.8, 0.75, 0.7],
        spectrum_decay: 1.5,
        density: 0.1,
        seed: 5,
        shared_layout: SharedLayout::Spread,
        design_coupling: 0.0,
    });
    let mut l = RunConfig::new(AlgoName::Lcca, data.clone());
    (l.k_cca, l.t1, l.t2, l.k_pc) = (5, Some(10), Some(10), Some(20));
    let mut g = RunConfig::new(AlgoName::Gcca, data);
    (g.k_cca, g.t1, g.t2) = (5, Some(10), Some(1));
    let table = compare(&[l, g], true).unwrap();
    assert_eq!(table.rows.len(), 2);
    let (lr, gr) = (&table.rows[0], &table.rows[1]);
    assert!(gr.work <= table.budget.unwrap());
    assert!(
        lr.correlation_sum >= gr.correlation_sum,
        "{}",
        table.to_text()
    );
    let csv = table.to_csv();
    assert!(
        csv.starts_with("algorithm,parameters,wall_seconds,work,correlation_sum,dist_x,dist_y,c1,")
    );
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn compare_exact_and_diagonal_on_indicators() {
    let data = DataSource::Tokens(TokenDatasetSpec::new(TokenSource::Markov(MarkovTokens {
        length: 10_000,
        vocab: 100,
        groups: 5,
        stickiness: 0.8,
        seed: 2,
    })));
    let mut e = RunConfig::new(AlgoName::Exact, data.clone());
    e.k_cca = 5;
    let mut d = RunConfig::new(AlgoName::Dcca, data);
    (d.k_cca, d.t1) = (5, Some(30));
    let table = compare(&[e.clone(), d], false).unwrap();
    assert!((table.rows[0].correlation_sum - table.rows[1].correlation_sum).abs() <= 1e-6);

    let single = compare(&[e], false).unwrap();
    assert_eq!(single.rows.len(), 1);
}

#[test]
fn compare_rejects_mixed_datasets() {
    let files = |x: &str| DataSource::Files {
        x: x.into(),
        y: "y.mtx".into(),
        format: MatrixFormat::Mtx,
        x_cols: None,
        y_cols: None,
    };
    let a = RunConfig::new(AlgoName::Exact, files("a.mtx"));
    let b = RunConfig::new(AlgoName::Exact, files("b.mtx"));
    assert!(compare(&[a.clone(), b], false).is_err());
    let mut c = a.clone();
    c.k_cca = 3;
    assert!(compare(&[a, c], false).is_err());
}

#[test]
fn compare_command_reads_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.mtx");
    let y = dir.path().join("y.mtx");
    write_matrix_market(&x, &random(6, 200, 15)).unwrap();
    write_matrix_market(&y, &random(7, 200, 10)).unwrap();
    let data = DataSource::Files {
        x,
        y,
        format: MatrixFormat::Mtx,
        x_cols: None,
        y_cols: None,
    };
    let mut paths = Vec::new();
    for (name, algo) in [("e", AlgoName::Exact), ("r", AlgoName::Rpcca)] {
        let mut c = RunConfig::new(algo, data.clone());
        c.k_cca = 4;
        c.oracle_compare = true;
        if algo == AlgoName::Rpcca {
            c.k_rpcca = Some(8);
        }
        let p = dir.path().join(format!("{name}.json"));
        fs::write(&p, serde_json::to_string(&c).unwrap()).unwrap();
        paths.push(p);
    }
    let csv = dir.path().join("table.csv");
    let o = lcca(
        &[
            "compare",
            s(&paths[0]),
            s(&paths[1]),
            "--match-budget",
            "--out",
            s(&csv),
        ],
        None,
    );
    ok(&o);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("exact") && stdout.contains("rpcca") && stdout.contains("oracle"));
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 3);
}

#[test]
fn run_accepts_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::new(
        AlgoName::Dcca,
        DataSource::Tokens(TokenDatasetSpec::new(TokenSource::Inline(
            "a b c a b c b a c a".split(' ').map(String::from).collect(),
        ))),
    );
    (c.k_cca, c.t1) = (2, Some(3));
    let p = dir.path().join("c.json");
    fs::write(&p, serde_json::to_string(&c).unwrap()).unwrap();
    let out = dir.path().join("out");
    ok(&lcca(&["run", "--config", s(&p), "--out", s(&out)], None));
    assert_eq!(correlations(&out).len(), 2);
}
