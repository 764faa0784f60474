//! End-to-end tests that drive the compiled `reco` binary over a synthetic
//! dataset: happy paths, determinism guarantees, and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reco_core::synth::{synthesize, SynthConfig};

fn run_in(out_root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reco"))
        .args(args)
        .env("RECO_OUT", out_root)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary should spawn")
}

fn assert_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Writes the synthetic rating log (and catalog) as plain TSV fixtures.
fn fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let data = synthesize(&SynthConfig {
        users: 60,
        items: 40,
        logs: 1500,
        factors: 4,
        seed: 7,
    })
    .expect("fixture synthesizes");
    let m = &data.logs;
    let mut text = String::new();
    for u in 0..m.n_users() as u32 {
        for e in m.user_row(u) {
            text.push_str(m.users().name(u));
            text.push('\t');
            text.push_str(m.items().name(e.other));
            text.push('\t');
            text.push_str(&e.rating.to_string());
            if let Some(d) = e.date {
                text.push('\t');
                text.push_str(&d.to_string());
            }
            text.push('\n');
        }
    }
    let ratings = dir.join("ratings.tsv");
    std::fs::write(&ratings, text).unwrap();
    let mut cat = String::new();
    let c = &data.catalog;
    for i in 0..c.items().len() as u32 {
        let item = c.items().name(i);
        for d in c.item_descriptors(i) {
            let (attr, value) = c
                .descriptors()
                .name(d.descriptor)
                .split_once('=')
                .expect("descriptor names are attribute=value");
            cat.push_str(&format!("{item}\t{attr}\t{value}\t{}\n", d.weight));
        }
    }
    let catalog = dir.join("catalog.tsv");
    std::fs::write(&catalog, cat).unwrap();
    (ratings, catalog)
}

fn p(path: &Path) -> String {
    path.display().to_string()
}

#[test]
fn ingest_reports_the_dataset_and_writes_canonical_logs() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, _) = fixture(dir.path());
    let stdout = assert_ok(&run_in(dir.path(), &["ingest", "--ratings", &p(&ratings)]));
    assert!(stdout.contains("logs: 1500"), "{stdout}");
    assert!(stdout.contains("users: 60"), "{stdout}");
    assert!(stdout.contains("items: 40"), "{stdout}");
    assert!(stdout.contains("fingerprint: "), "{stdout}");
    let canonical = dir.path().join("logs.tsv");
    assert!(canonical.exists());
    assert!(canonical.with_file_name("logs.tsv.meta.json").exists(), "sidecar metadata");
    // Ingesting the canonical file reproduces the same fingerprint: the
    // rewrite is lossless.
    let again = assert_ok(&run_in(dir.path(), &["ingest", "--ratings", &p(&canonical)]));
    let fp = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("fingerprint: "))
            .map(str::to_owned)
            .expect("fingerprint line")
    };
    assert_eq!(fp(&stdout), fp(&again));
}

#[test]
fn split_is_deterministic_and_conserves_every_log() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, _) = fixture(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_ok(&run_in(
            dir.path(),
            &[
                "split",
                "--ratings",
                &p(&ratings),
                "--test-fraction",
                "0.2",
                "--out-dir",
                &p(out),
            ],
        ));
    }
    for name in ["train.tsv", "test.tsv"] {
        let left = std::fs::read(a.join(name)).unwrap();
        let right = std::fs::read(b.join(name)).unwrap();
        assert_eq!(left, right, "{name} must be byte-identical across reruns");
    }
    let count = |path: PathBuf| {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .count()
    };
    assert_eq!(count(a.join("train.tsv")) + count(a.join("test.tsv")), 1500);
}

#[test]
fn trained_matrix_answers_similar_item_queries() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, _) = fixture(dir.path());
    assert_ok(&run_in(
        dir.path(),
        &["train-knn", "--train", &p(&ratings), "--k", "8", "--measure", "cosine"],
    ));
    let matrix = dir.path().join("knn-cosine-k8.tsv");
    assert!(matrix.exists());
    let stdout = assert_ok(&run_in(
        dir.path(),
        &["similar", "--matrix", &p(&matrix), "--item", "item0000", "--n", "5"],
    ));
    assert!(stdout.contains("neighbors of item0000"), "{stdout}");
    assert!(stdout.contains("1. item"), "a ranked neighbor list: {stdout}");
    let unknown = run_in(
        dir.path(),
        &["similar", "--matrix", &p(&matrix), "--item", "no-such-item"],
    );
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn evaluate_rejects_artifacts_from_other_data_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, _) = fixture(dir.path());
    assert_ok(&run_in(
        dir.path(),
        &["split", "--ratings", &p(&ratings), "--test-fraction", "0.2"],
    ));
    let train = dir.path().join("train.tsv");
    let test = dir.path().join("test.tsv");
    // Matrix built from the FULL log, evaluated against the train split.
    assert_ok(&run_in(dir.path(), &["train-knn", "--train", &p(&ratings), "--k", "8"]));
    let matrix = dir.path().join("knn-wpearson-k8.tsv");
    let mismatch = run_in(
        dir.path(),
        &[
            "evaluate",
            "--train",
            &p(&train),
            "--test",
            &p(&test),
            "--scorer",
            "knn",
            "--knn",
            &p(&matrix),
            "--tasks",
            "decide",
        ],
    );
    assert_eq!(mismatch.status.code(), Some(3), "fingerprint mismatch is exit 3");
    let stderr = String::from_utf8_lossy(&mismatch.stderr);
    assert!(stderr.contains("fingerprint"), "{stderr}");
    // --force downgrades the mismatch to a warning.
    let forced = run_in(
        dir.path(),
        &[
            "evaluate",
            "--train",
            &p(&train),
            "--test",
            &p(&test),
            "--scorer",
            "knn",
            "--knn",
            &p(&matrix),
            "--tasks",
            "decide",
            "--force",
        ],
    );
    assert_eq!(forced.status.code(), Some(0));
}

#[test]
fn malformed_input_exits_2_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "u1\ti1\t5\nu2\ti1\tnot-a-number\n").unwrap();
    let out = run_in(dir.path(), &["ingest", "--ratings", &p(&bad)]);
    assert_eq!(out.status.code(), Some(2), "parse failures are exit 2");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(":2:"), "must name the offending line: {stderr}");
}

#[test]
fn evaluation_artifacts_are_byte_identical_across_reruns_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, _) = fixture(dir.path());
    assert_ok(&run_in(
        dir.path(),
        &["split", "--ratings", &p(&ratings), "--test-fraction", "0.2"],
    ));
    let train = dir.path().join("train.tsv");
    let test = dir.path().join("test.tsv");
    assert_ok(&run_in(dir.path(), &["train-knn", "--train", &p(&train), "--k", "8"]));
    let matrix = dir.path().join("knn-wpearson-k8.tsv");
    let run_eval = |out_root: &Path, workers: &str| {
        assert_ok(&run_in(
            out_root,
            &[
                "evaluate",
                "--train",
                &p(&train),
                "--test",
                &p(&test),
                "--scorer",
                "knn",
                "--knn",
                &p(&matrix),
                "--tasks",
                "decide,compare,discover",
                "--label",
                "knn-run",
                "--workers",
                workers,
            ],
        ));
    };
    let one = dir.path().join("w1");
    let two = dir.path().join("w2");
    run_eval(&one, "1");
    run_eval(&two, "2");
    for name in ["knn-run-split.report.tsv", "knn-run-split.report.txt"] {
        let left = std::fs::read(one.join(name)).unwrap();
        let right = std::fs::read(two.join(name)).unwrap();
        assert_eq!(left, right, "{name} must not depend on worker count");
    }
    // Summaries over the same reports are reproducible too.
    let tsv = p(&one.join("knn-run-split.report.tsv"));
    let s1 = dir.path().join("s1");
    let s2 = dir.path().join("s2");
    assert_ok(&run_in(&s1, &["report", &tsv]));
    assert_ok(&run_in(&s2, &["report", &tsv]));
    assert_eq!(
        std::fs::read(s1.join("summary.txt")).unwrap(),
        std::fs::read(s2.join("summary.txt")).unwrap(),
    );
}

#[test]
fn coldstart_table_lists_every_requested_point() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, catalog) = fixture(dir.path());
    let stdout = assert_ok(&run_in(
        dir.path(),
        &[
            "coldstart",
            "--ratings",
            &p(&ratings),
            "--catalog",
            &p(&catalog),
            "--counts",
            "20,60",
            "--modes",
            "collaborative,thematic,hybrid-light",
            "--k",
            "8",
        ],
    ));
    let table = std::fs::read_to_string(dir.path().join("coldstart.tsv")).unwrap();
    let rows = table.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 2 * 3, "header plus counts x modes");
    for mode in ["collaborative", "thematic", "hybrid-light"] {
        assert!(stdout.contains(mode), "{stdout}");
    }
}
