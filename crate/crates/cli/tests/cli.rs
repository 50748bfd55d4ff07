use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_rfimp");

fn rfimp(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = rfimp(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = rfimp(args);
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn help_matches_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for sub in ["", "simulate", "train", "importance", "sweep", "bench"] {
        let args: Vec<&str> = if sub.is_empty() {
            vec!["--help"]
        } else {
            vec![sub, "--help"]
        };
        let text = ok(&args);
        let path = golden_dir().join(format!(
            "{}.txt",
            if sub.is_empty() { "rfimp" } else { sub }
        ));
        if update {
            fs::write(&path, &text).unwrap();
        }
        let want = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text, want,
            "help of {sub:?} changed; rerun with UPDATE_GOLDEN=1"
        );
        for line in text.lines().filter(|l| l.trim_start().starts_with("--")) {
            let parts: Vec<&str> = line.split("  ").filter(|s| !s.trim().is_empty()).collect();
            assert!(parts.len() >= 2, "{sub}: undocumented flag line {line:?}");
        }
    }
}

#[test]
fn simulate_writes_expected_shapes() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "strobl",
        "--n",
        "200",
        "--seed",
        "7",
        "--out",
        p(dir.path()),
    ]);
    let text = fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert_eq!(text.lines().count(), 201);
    assert_eq!(text.lines().next().unwrap(), "X1,X2,X3,X4,X5,y");
    let sidecar = fs::read_to_string(dir.path().join("data.json")).unwrap();
    assert!(sidecar.contains("\"relevant_set\""));

    ok(&[
        "simulate",
        "discrete-grid",
        "--n",
        "1000",
        "--p",
        "50",
        "--out",
        p(dir.path()),
        "--name",
        "grid",
    ]);
    let text = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(text.lines().count(), 1001);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 51);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path());
    assert_eq!(code(&["simulate", "bogus"]).0, 2);
    assert_eq!(
        code(&[
            "train",
            "--data",
            "/nonexistent.csv",
            "--task",
            "regression",
            "--out",
            out
        ])
        .0,
        1
    );
    assert_eq!(code(&["bench", "--trees", "zero"]).0, 2);
    ok(&["simulate", "strobl", "--n", "60", "--out", out]);
    let data = dir.path().join("data.csv");
    let (c, err) = code(&["train", "--data", p(&data), "--trees", "0", "--out", out]);
    assert_eq!(c, 2, "{err}");
    assert!(err.contains("n_trees"), "{err}");
    assert_eq!(code(&[]).0, 2);
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "# preset\ntrees = 10\nleaf = 3\n").unwrap();
    let (c, err) = code(&["bench", "--config", p(&conf)]);
    assert_eq!(c, 2);
    assert!(err.contains("bad.conf:3: unknown key \"leaf\""), "{err}");
    fs::write(&conf, "trees = ten\n").unwrap();
    let (c, err) = code(&["bench", "--config", p(&conf)]);
    assert_eq!(c, 2);
    assert!(err.contains("bad.conf:1:"), "{err}");
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path());
    ok(&["simulate", "strobl", "--n", "80", "--out", out]);
    let conf = dir.path().join("train.conf");
    fs::write(&conf, "trees = 5\nmtry = 2\nseed = 3\n").unwrap();
    let data = dir.path().join("data.csv");
    ok(&[
        "train",
        "--data",
        p(&data),
        "--config",
        p(&conf),
        "--trees",
        "3",
        "--out",
        out,
    ]);
    let forest = fs::read_to_string(dir.path().join("forest.json")).unwrap();
    assert!(forest.contains("\"n_trees\":3"), "flag should win");
    assert!(forest.contains("\"mtry\":2"));
    assert!(forest.contains("\"seed\":3"));
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn outputs_do_not_depend_on_workers() {
    let root = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        let dir = root.path().join(format!("w{workers}"));
        let d = p(&dir).to_owned();
        let w = ["--workers", workers, "--out", &d];
        ok(&[
            &[
                "simulate",
                "discrete-grid",
                "--n",
                "200",
                "--p",
                "10",
                "--seed",
                "4",
            ][..],
            &w,
        ]
        .concat());
        let data = dir.join("data.csv");
        ok(&[
            &[
                "train",
                "--data",
                p(&data),
                "--trees",
                "20",
                "--mtry",
                "3",
                "--seed",
                "9",
            ][..],
            &w,
        ]
        .concat());
        let forest = dir.join("forest.json");
        ok(&[
            &[
                "importance",
                "--forest",
                p(&forest),
                "--data",
                p(&data),
                "--methods",
                "mdi,mdi-oob,naive-oob,mda,split-count",
            ][..],
            &w,
        ]
        .concat());
        ok(&[
            &[
                "bench",
                "--generator",
                "strobl",
                "--n",
                "100",
                "--trees",
                "10",
                "--replicates",
                "3",
                "--methods",
                "mdi,mdi-oob",
            ][..],
            &w,
        ]
        .concat());
        ok(&[
            &[
                "sweep",
                "--grid",
                "1,5,20",
                "--n",
                "100",
                "--trees",
                "10",
                "--replicates",
                "2",
            ][..],
            &w,
        ]
        .concat());
        files(&dir)
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.len(), 8);
    assert_eq!(a, b);
    let again = run("1");
    assert_eq!(a, again);
}

#[test]
fn covariance_inbag_column_equals_mdi() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path());
    ok(&[
        "simulate",
        "discrete-grid",
        "--n",
        "300",
        "--p",
        "12",
        "--task",
        "regression",
        "--out",
        out,
    ]);
    let data = dir.path().join("data.csv");
    ok(&[
        "train",
        "--data",
        p(&data),
        "--trees",
        "15",
        "--mtry",
        "4",
        "--out",
        out,
    ]);
    let forest = dir.path().join("forest.json");
    ok(&[
        "importance",
        "--forest",
        p(&forest),
        "--data",
        p(&data),
        "--methods",
        "mdi,mdi-covariance-inbag",
        "--out",
        out,
    ]);
    let text = fs::read_to_string(dir.path().join("importance.csv")).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (a, b): (f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{line}");
    }
}

#[test]
fn subsample_one_has_no_oob_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path());
    ok(&["simulate", "strobl", "--n", "50", "--out", out]);
    let data = dir.path().join("data.csv");
    ok(&[
        "train",
        "--data",
        p(&data),
        "--trees",
        "3",
        "--sampling",
        "subsample:1",
        "--out",
        out,
    ]);
    let forest = dir.path().join("forest.json");
    let (c, err) = code(&[
        "importance",
        "--forest",
        p(&forest),
        "--data",
        p(&data),
        "--methods",
        "mdi-oob",
        "--out",
        out,
    ]);
    assert_eq!(c, 1);
    assert!(err.contains("out-of-bag"), "{err}");
}

#[test]
fn inverse_leaf_sweep_reports_fit() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "sweep",
        "--generator",
        "pure-noise",
        "--n",
        "300",
        "--p",
        "5",
        "--axis",
        "inverse-leaf",
        "--grid",
        "2,5,10,30",
        "--trees",
        "3",
        "--replicates",
        "2",
        "--out",
        p(dir.path()),
    ]);
    assert!(stdout.contains("pearson r"), "{stdout}");
    let svg = fs::read_to_string(dir.path().join("sweep.svg")).unwrap();
    assert!(svg.contains("1 / minimum leaf size"));
}

#[test]
fn presets_are_listed() {
    let text = ok(&["bench", "--list-presets"]);
    for name in [
        "table1_sim_deep_cls",
        "table1_sim_shallow_reg",
        "fig_mdi_depth",
        "inverse_leaf_probe",
    ] {
        assert!(text.contains(name));
    }
}

#[test]
fn csv_without_sidecar_needs_a_task() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("plain.csv");
    fs::write(&csv, "a,b,label\n0,1,no\n1,0,yes\n1,1,yes\n0,0,no\n").unwrap();
    let out = p(dir.path());
    assert_eq!(
        code(&[
            "train",
            "--data",
            p(&csv),
            "--response",
            "label",
            "--out",
            out
        ])
        .0,
        2
    );
    let (c, err) = code(&[
        "train",
        "--data",
        p(&csv),
        "--response",
        "label",
        "--task",
        "classification",
        "--out",
        out,
    ]);
    assert_eq!(c, 1, "{err}");
    assert!(err.contains("row 1") && err.contains("label"), "{err}");
}
