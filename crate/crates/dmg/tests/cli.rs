use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dmg::fields::read_vector;
use dmg_core::problems::{helmholtz_periodic_1d, Geometry, K_PI_OVER_3};
use serde_json::Value;
use tempfile::TempDir;

fn dmg(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmg"))
        .args(args)
        .env("DMG_OUTPUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn max_diff(a: &[dmg_core::Complex64], b: &[dmg_core::Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

const TORUS_32: &[&str] = &[
    "solve",
    "--problem",
    "helmholtz2d",
    "--N",
    "32",
    "--k",
    "pi/3",
    "--source",
    "two-frequency",
];

#[test]
fn torus_32_solves_and_matches_dense() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("mult"), tmp.path().join("dense"));
    let o = dmg(&a, &[TORUS_32, &["--method", "multiplicative"]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&a);
    assert!(r["relative_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(r["unknowns"], 1024);
    assert_eq!(r["passed"], true);
    assert!(r["levels_visited"].as_array().unwrap().len() > 1);

    assert_eq!(
        code(&dmg(&b, &[TORUS_32, &["--method", "dense"]].concat())),
        0
    );
    let g = Geometry::Torus { side: 32 };
    let (u, v) = (
        read_vector(&a.join("solution.csv"), g).unwrap(),
        read_vector(&b.join("solution.csv"), g).unwrap(),
    );
    assert!(max_diff(&u, &v) <= 1e-9);
}

#[test]
fn singular_laplacian_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = dmg(
        tmp.path(),
        &[
            "solve",
            "--problem",
            "helmholtz2d",
            "--k",
            "0",
            "--source",
            "point-patch",
        ],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn invalid_configurations_exit_4() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["solve", "--bogus"][..],
        &["solve", "--n0", "0"],
        &["solve", "--problem", "helmholtz2d", "--n", "8"],
        &["solve", "--problem", "helmholtz1d", "--n", "13"],
        &[
            "solve",
            "--problem",
            "helmholtz1d",
            "--source",
            "point-patch",
        ],
        &["solve", "--k", "pie"],
        &[
            "solve",
            "--method",
            "additive-multichannel",
            "--problem",
            "dirichlet1d",
            "--depth",
            "4",
        ],
        &["bench", "--method", "dense"],
        &[],
    ] {
        assert_eq!(code(&dmg(tmp.path(), args)), 4, "{args:?}");
    }
    assert_eq!(code(&dmg(tmp.path(), &["--help"])), 0);
}

#[test]
fn io_failures_exit_3() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("missing.mtx");
    assert_eq!(
        code(&dmg(
            tmp.path(),
            &["solve", "--matrix", missing.to_str().unwrap()]
        )),
        3
    );
    let bad = tmp.path().join("bad.mtx");
    fs::write(
        &bad,
        "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n",
    )
    .unwrap();
    let o = dmg(tmp.path(), &["solve", "--matrix", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let config = tmp.path().join("absent.json");
    assert_eq!(
        code(&dmg(tmp.path(), &["--config", config.to_str().unwrap()])),
        3
    );
}

#[test]
fn matrix_file_and_source_file() {
    let tmp = TempDir::new().unwrap();
    let p = helmholtz_periodic_1d(64, K_PI_OVER_3).unwrap();
    let mtx = tmp.path().join("ring.mtx");
    dmg::mtx::save(&mtx, p.matrix()).unwrap();
    let src = tmp.path().join("f.csv");
    fs::write(
        &src,
        (0..64).fold("i,re,im\n".to_string(), |s, i| {
            s + &format!("{i},{},{}\n", i % 5, -(i as f64) / 7.0)
        }),
    )
    .unwrap();

    let (a, b) = (tmp.path().join("file"), tmp.path().join("builtin"));
    let o = dmg(
        &a,
        &[
            "solve",
            "--matrix",
            mtx.to_str().unwrap(),
            "--source-file",
            src.to_str().unwrap(),
            "--method",
            "additive",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = dmg(
        &b,
        &[
            "solve",
            "--problem",
            "helmholtz1d",
            "--n",
            "64",
            "--source-file",
            src.to_str().unwrap(),
            "--method",
            "additive",
        ],
    );
    assert_eq!(code(&o), 0);
    let g = Geometry::Ring { n: 64 };
    let (u, v) = (
        read_vector(&a.join("solution.csv"), g).unwrap(),
        read_vector(&b.join("solution.csv"), g).unwrap(),
    );
    assert_eq!(u, v);
}

#[test]
fn config_file_is_equivalent_to_flags() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, r#"{"command": "solve", "problem": "helmholtz1d", "n": 128, "k": "pi/3", "method": "additive", "source": "unit-impulse"}"#).unwrap();
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    assert_eq!(code(&dmg(&a, &["--config", cfg.to_str().unwrap()])), 0);
    let flags = [
        "solve",
        "--problem",
        "helmholtz1d",
        "--n",
        "128",
        "--k",
        "pi/3",
        "--method",
        "additive",
        "--source",
        "unit-impulse",
    ];
    assert_eq!(code(&dmg(&b, &flags)), 0);
    assert_eq!(
        fs::read(a.join("solution.csv")).unwrap(),
        fs::read(b.join("solution.csv")).unwrap()
    );
    assert_eq!(report(&a)["multiplications"], report(&b)["multiplications"]);

    // flags win over the file
    assert_eq!(
        code(&dmg(
            &c,
            &[
                "--config",
                cfg.to_str().unwrap(),
                "solve",
                "--method",
                "multiplicative"
            ]
        )),
        0
    );
    assert_eq!(report(&c)["method"], "multiplicative");
    assert_eq!(report(&c)["unknowns"], 128);
}

#[test]
fn field_dumps_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = [
        "solve",
        "--N",
        "16",
        "--source",
        "point-patch",
        "--method",
        "additive-multichannel",
        "--depth",
        "3",
        "--dump-fields",
    ];
    assert_eq!(code(&dmg(&a, &args)), 0);
    assert_eq!(
        code(&dmg(&b, &[&args[..], &["--threads", "1"]].concat())),
        0
    );
    let mut names: Vec<String> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names.iter().filter(|n| n.starts_with("channel_")).count(),
        8
    );
    assert!(
        names.contains(&"channel_rrr.csv".to_string())
            && names.contains(&"channel_bbb.csv".to_string())
    );
    for n in names.iter().filter(|n| n.ends_with(".csv")) {
        assert_eq!(
            fs::read(a.join(n)).unwrap(),
            fs::read(b.join(n)).unwrap(),
            "{n}"
        );
    }
    let head = fs::read_to_string(a.join("channel_rrr.csv")).unwrap();
    assert!(head.starts_with("i,j,re,im\n"));
    assert!(report(&a)["zero_channels"].as_u64().unwrap() >= 4);

    let c = tmp.path().join("c");
    assert_eq!(
        code(&dmg(
            &c,
            &[
                "solve",
                "--problem",
                "helmholtz1d",
                "--n",
                "64",
                "--dump-fields"
            ]
        )),
        0
    );
    assert!(c.join("v0.csv").exists() && c.join("e0.csv").exists());
    assert!(fs::read_to_string(c.join("v0.csv"))
        .unwrap()
        .starts_with("i,re,im\n"));
}

#[test]
fn output_dir_flag_beats_environment() {
    let tmp = TempDir::new().unwrap();
    let flag = tmp.path().join("flag");
    let o = dmg(
        &tmp.path().join("env"),
        &["--output-dir", flag.to_str().unwrap(), "solve", "--N", "8"],
    );
    assert_eq!(code(&o), 0);
    assert!(flag.join("report.json").exists());
    assert!(!tmp.path().join("env").exists());
}

#[test]
fn verify_passes_and_detects_injected_faults() {
    let tmp = TempDir::new().unwrap();
    let o = dmg(tmp.path(), &["verify", "--suite", "all", "--n", "16"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let checks: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("verify.json")).unwrap()).unwrap();
    assert!(checks.as_array().unwrap().len() > 30);

    let o = dmg(
        tmp.path(),
        &["verify", "--suite", "aliasing", "--basis", "sine8"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rbhap/sine-8"));

    let o = dmg(
        tmp.path(),
        &["verify", "--suite", "twogrid", "--break-symbol", "1e-3"],
    );
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL twogrid    direct-conditions/multiplicative"));
    let o = dmg(
        tmp.path(),
        &["verify", "--suite", "filterbank", "--break-symbol", "1e-3"],
    );
    assert_eq!(code(&o), 1);
}

fn bench_rows(text: &str) -> Vec<(String, usize, u64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn bench_sweeps() {
    let tmp = TempDir::new().unwrap();
    let o = dmg(
        tmp.path(),
        &["bench", "--sizes", "256", "--method", "multiplicative"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("method,n,multiplications,wall_time,was_vcycle_fraction\n"));
    assert_eq!(bench_rows(&stdout(&o)).len(), 1);

    let csv = tmp.path().join("bench.csv");
    let o = dmg(tmp.path(), &["bench", "--output", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = bench_rows(&fs::read_to_string(&csv).unwrap());
    assert_eq!(rows.len(), 12);
    for w in rows.windows(2).filter(|w| w[0].0 == w[1].0) {
        assert!(w[1].2 > w[0].2);
    }
    let (m, a): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r.0 == "multiplicative");
    for (x, y) in m.iter().zip(&a) {
        assert_eq!(x.1, y.1);
        assert!(y.2 >= x.2);
    }
}
