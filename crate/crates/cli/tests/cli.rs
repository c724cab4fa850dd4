use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ecfit_core::generate::NestedSpec;
use ecfit_core::BinaryMatrix;
use serde_json::Value;

fn ecfit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecfit"))
        .current_dir(dir)
        .env_remove("ECFIT_WORKSPACE")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = ecfit(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn manifest(path: &Path) -> Value {
    let mut s = path.as_os_str().to_os_string();
    s.push(".manifest.json");
    serde_json::from_str(&fs::read_to_string(PathBuf::from(s)).unwrap()).unwrap()
}

/// Export volumes, large where `m` has an entry.
fn export_csv(m: &BinaryMatrix) -> String {
    let mut s = String::from("country,product,value\n");
    for c in 0..m.n_countries() {
        for p in 0..m.n_products() {
            let v = if m.get(c, p) { 1000.0 } else { 1.0 };
            s += &format!("{},{},{v}\n", m.countries()[c], m.products()[p]);
        }
    }
    s
}

fn labelled(m: &BinaryMatrix) -> BinaryMatrix {
    let c = (0..m.n_countries()).map(|i| format!("C{i:02}")).collect();
    let p = (0..m.n_products()).map(|i| format!("P{i:03}")).collect();
    BinaryMatrix::from_pairs(c, p, m.entries().collect::<Vec<_>>()).unwrap()
}

#[test]
fn rca_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("t.csv"),
        "country,product,value\nA,x,4\nA,y,1\nB,x,1\nB,y,4\n",
    )
    .unwrap();
    ok(dir.path(), &["rca", "--in", "t.csv", "--out", "rca.csv"]);
    let text = fs::read_to_string(dir.path().join("rca.csv")).unwrap();
    assert!(text.contains("A,x,1.6"), "{text}");
    assert!(text.contains("A,y,0.4"), "{text}");
    ok(
        dir.path(),
        &["binarize", "--in", "rca.csv", "--out", "m.mtx"],
    );
    let m = BinaryMatrix::read(&dir.path().join("m.mtx")).unwrap();
    assert_eq!(m.to_dense(), vec![vec![1, 0], vec![0, 1]]);
    assert_eq!(m.countries(), ["A", "B"]);
    let man = manifest(&dir.path().join("m.mtx"));
    assert_eq!(man["config"]["threshold"], 1.0);
    assert_eq!(man["command"], "binarize");
}

#[test]
fn full_chain_with_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let m = labelled(&NestedSpec::new(12, 80).generate(4));
    fs::write(d.join("exports.csv"), export_csv(&m)).unwrap();
    ok(d, &["rca", "--in", "exports.csv", "--out", "rca.csv"]);
    ok(d, &["binarize", "--in", "rca.csv", "--out", "m.mtx"]);
    let bin = BinaryMatrix::read(&d.join("m.mtx")).unwrap();
    assert_eq!(bin.countries(), m.countries());
    assert_eq!(bin.products(), m.products());
    assert!(bin.nnz() > 0);

    ok(d, &["fit", "--matrix", "m.mtx", "--out", "state.txt"]);
    let man = manifest(&d.join("state.txt"));
    for key in [
        "variant",
        "delta",
        "tol",
        "max_iters",
        "convergence",
        "rank_patience",
        "prune",
    ] {
        assert!(man["config"].get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(man["config"]["variant"], "rescaled");
    assert_eq!(man["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    ok(
        d,
        &[
            "stability",
            "--matrix",
            "m.mtx",
            "--state",
            "state.txt",
            "--out",
            "stab.txt",
        ],
    );
    let stab = fs::read_to_string(d.join("stab.txt")).unwrap();
    assert!(stab.contains("certificate = true"), "{stab}");
    assert_eq!(stab.lines().skip_while(|l| *l != "[spectrum]").count(), 13);

    ok(
        d,
        &[
            "netefficiency",
            "--matrix",
            "m.mtx",
            "--state",
            "state.txt",
            "--out",
            "eff.tsv",
        ],
    );
    let eff = fs::read_to_string(d.join("eff.tsv")).unwrap();
    assert!(eff.starts_with("# inefficiency trend"));
    assert_eq!(eff.lines().count(), 2 + 12);

    ok(
        d,
        &[
            "approx",
            "--matrix",
            "m.mtx",
            "--order",
            "2",
            "--coproduction",
            "k.txt",
            "--out",
            "approx.txt",
        ],
    );
    let k = fs::read_to_string(d.join("k.txt")).unwrap();
    assert!(k.lines().any(|l| l.starts_with("0 0 ")));
    ok(
        d,
        &[
            "approx", "--matrix", "m.mtx", "--order", "mf", "--out", "mf.txt",
        ],
    );

    labelled(&NestedSpec::new(20, 200).generate(0))
        .write(&d.join("big.mtx"))
        .unwrap();
    ok(d, &["compare", "--matrix", "big.mtx", "--out", "cmp.tsv"]);
    let cmp = fs::read_to_string(d.join("cmp.tsv")).unwrap();
    assert!(cmp.contains("[fitness]") && cmp.contains("[complexity]"));
    assert!(
        cmp.starts_with("# fitness: original = a rescaled^b: a = "),
        "{cmp}"
    );
    ok(
        d,
        &[
            "compare",
            "--matrix",
            "m.mtx",
            "--original-convergence",
            "rank",
            "--out",
            "cmp2.tsv",
        ],
    );

    ok(
        d,
        &[
            "fit",
            "--matrix",
            "m.mtx",
            "--variant",
            "inhom",
            "--delta",
            "0.001",
            "--out",
            "inh.txt",
        ],
    );
    ok(
        d,
        &[
            "stability",
            "--matrix",
            "m.mtx",
            "--state",
            "inh.txt",
            "--out",
            "stab2.txt",
        ],
    );
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    labelled(&NestedSpec::new(10, 60).generate(1))
        .write(&d.join("m.mtx"))
        .unwrap();
    for out in ["a.txt", "b.txt"] {
        ok(d, &["fit", "--matrix", "m.mtx", "--out", out]);
    }
    assert_eq!(
        fs::read(d.join("a.txt")).unwrap(),
        fs::read(d.join("b.txt")).unwrap()
    );
    for out in ["n1.tsv", "n2.tsv"] {
        ok(
            d,
            &[
                "--seed",
                "7",
                "noise",
                "--matrix",
                "m.mtx",
                "--etas",
                "0,0.1,...,0.3",
                "--trials",
                "3",
                "--out",
                out,
            ],
        );
    }
    let n1 = fs::read_to_string(d.join("n1.tsv")).unwrap();
    assert_eq!(n1, fs::read_to_string(d.join("n2.tsv")).unwrap());
    assert!(n1.contains("\n0\t1\t0\t3\n"), "{n1}");
    assert_eq!(manifest(&d.join("n1.tsv"))["config"]["seed"], 7);
}

#[test]
fn error_categories_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.csv"), "country,product,value\nA,x,1\nA,y,abc\n").unwrap();
    let out = ecfit(d, &["rca", "--in", "bad.csv", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[parse]: line 3"), "{err}");

    fs::write(d.join("neg.csv"), "country,product,value\nA,x,-1\n").unwrap();
    assert_eq!(
        ecfit(d, &["rca", "--in", "neg.csv", "--out", "r.csv"])
            .status
            .code(),
        Some(4)
    );

    fs::write(d.join("empty.csv"), "country,product,value\n").unwrap();
    let out = ecfit(d, &["rca", "--in", "empty.csv", "--out", "r.csv"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no volumes"));

    BinaryMatrix::from_dense(&[vec![1, 0, 0], vec![1, 1, 0]])
        .write(&d.join("m.mtx"))
        .unwrap();
    assert_eq!(
        ecfit(d, &["noise", "--matrix", "m.mtx", "--out", "n.tsv"])
            .status
            .code(),
        Some(2)
    );
    let out = ecfit(
        d,
        &[
            "fit",
            "--matrix",
            "m.mtx",
            "--variant",
            "original",
            "--out",
            "o.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(5));
    ok(
        d,
        &[
            "fit",
            "--matrix",
            "m.mtx",
            "--variant",
            "original",
            "--prune",
            "--out",
            "o.txt",
        ],
    );
    let out = ecfit(
        d,
        &[
            "fit",
            "--matrix",
            "m.mtx",
            "--variant",
            "rescaled",
            "--delta=-1",
            "--out",
            "x.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(
        ecfit(d, &["fit", "--matrix", "missing.mtx", "--out", "x.txt"])
            .status
            .code(),
        Some(8)
    );
    assert!(!d.join("x.txt").exists());
}

#[test]
fn out_dir_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    BinaryMatrix::from_dense(&[vec![1, 1], vec![1, 0]])
        .write(&d.join("m.mtx"))
        .unwrap();
    let m = d.join("m.mtx");
    let run = |env: &Path, flag: Option<&Path>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ecfit"));
        cmd.current_dir(d)
            .env("ECFIT_WORKSPACE", env)
            .arg("--quiet");
        if let Some(f) = flag {
            cmd.arg("--out-dir").arg(f);
        }
        let out = cmd
            .args(["fit", "--matrix"])
            .arg(&m)
            .args(["--out", "s.txt"])
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stderr.is_empty());
    };
    run(&d.join("env"), None);
    assert!(d.join("env/s.txt").exists());
    run(&d.join("env2"), Some(&d.join("flag")));
    assert!(d.join("flag/s.txt").exists());
    assert!(!d.join("env2").exists());
}

fn series(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split('\t').map(String::from).collect())
        .collect()
}

#[test]
fn pipeline_identical_years_are_flat() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = export_csv(&labelled(&NestedSpec::new(10, 60).generate(2)));
    fs::write(d.join("2001.csv"), &csv).unwrap();
    fs::write(d.join("2002.csv"), &csv).unwrap();
    ok(d, &["--out-dir", "ws", "pipeline", "2001.csv", "2002.csv"]);
    let ws = d.join("ws");
    for f in ["rca.csv", "m.mtx", "state.txt", "efficiency.tsv"] {
        let a = fs::read(ws.join("2001").join(f)).unwrap();
        assert_eq!(a, fs::read(ws.join("2002").join(f)).unwrap(), "{f}");
        assert!(ws.join("2001").join(format!("{f}.manifest.json")).exists());
    }
    for name in ["fitness_series.tsv", "net_efficiency_series.tsv"] {
        let rows = series(&ws.join(name));
        assert_eq!(rows[0], ["country", "2001", "2002"]);
        assert_eq!(rows.len(), 11);
        assert!(rows[1..].iter().all(|r| r[1] == r[2]));
    }
    let years = fs::read_to_string(ws.join("years.tsv")).unwrap();
    assert_eq!(years.lines().filter(|l| l.contains("\tok\t")).count(), 2);
}

#[test]
fn pipeline_isolates_a_malformed_year() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = export_csv(&labelled(&NestedSpec::new(8, 40).generate(3)));
    fs::write(d.join("2001.csv"), &csv).unwrap();
    fs::write(d.join("2002.csv"), "country,product,value\nA,x,oops\n").unwrap();
    fs::write(d.join("2003.csv"), &csv).unwrap();
    let out = ecfit(
        d,
        &[
            "--out-dir",
            "ws",
            "pipeline",
            "2001.csv",
            "2002.csv",
            "2003.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(9));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[pipeline]: 1 of 3 years failed"));
    let ws = d.join("ws");
    assert!(ws.join("2001/efficiency.tsv").exists());
    assert!(ws.join("2003/efficiency.tsv").exists());
    let years = fs::read_to_string(ws.join("years.tsv")).unwrap();
    assert!(years.contains("2002\tfailed[parse]"), "{years}");
    let rows = series(&ws.join("fitness_series.tsv"));
    assert!(rows[1..].iter().all(|r| r[2] == "NA" && r[1] != "NA"));
}

#[test]
fn pipeline_fitness_grows_with_exclusive_products() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = NestedSpec::new(6, 30).generate(5);
    let extra = 6;
    let mut files = Vec::new();
    for (k, year) in ["2010", "2011", "2012"].iter().enumerate() {
        // country 0 gains products nobody else exports; overlaps unchanged
        let mut pairs: Vec<_> = base.entries().collect();
        pairs.extend((0..2 * k).map(|j| (0, 30 + j)));
        let m = labelled(&BinaryMatrix::from_index_pairs(6, 30 + extra, pairs).unwrap());
        let name = format!("{year}.mtx");
        m.write(&d.join(&name)).unwrap();
        files.push(name);
    }
    let mut args = vec!["--out-dir", "ws", "pipeline"];
    args.extend(files.iter().map(String::as_str));
    ok(d, &args);
    let rows = series(&d.join("ws/fitness_series.tsv"));
    let f: Vec<f64> = rows[1][1..].iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(rows[1][0], "C00");
    assert!(f[0] < f[1] && f[1] < f[2], "{f:?}");
}
