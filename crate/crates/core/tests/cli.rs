use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_econ-complexity")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

/// Two countries: `c0` exports `p0`, `c1` exports both. RCA is
/// `[[1.5, 0.75], [0, 1.5]]`, so a threshold of 0.7 yields `[[1, 1], [0, 1]]`.
fn f1_trade(dir: &Path) -> PathBuf {
    let path = dir.join("f1.csv");
    fs::write(&path, "year,country,product,value\n2018,c0,p0,10\n2018,c1,p0,10\n2018,c1,p1,10\n").unwrap();
    path
}

struct Synth {
    dir: TempDir,
}

impl Synth {
    fn new(seed: u64, variables: usize) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[
            "synth",
            "--seed",
            &seed.to_string(),
            "--products",
            "80",
            "--countries",
            "20",
            "--epsilon",
            "0.05",
            "--variables",
            &variables.to_string(),
            "--out",
            &s(dir.path()),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        Synth { dir }
    }

    fn trade(&self) -> String {
        s(&self.dir.path().join("trade.csv"))
    }

    fn vars(&self) -> String {
        s(&self.dir.path().join("vars.csv"))
    }

    fn out(&self, name: &str) -> String {
        s(&self.dir.path().join(name))
    }

    fn products(&self) -> Vec<String> {
        fs::read_to_string(self.dir.path().join("difficulty.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().to_string())
            .collect()
    }
}

#[test]
fn f1_through_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let trade = f1_trade(dir.path());
    let out = run(&["ca", "--trade", &s(&trade), "--threshold", "0.7", "--out", &s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let eci = fs::read_to_string(dir.path().join("eci.csv")).unwrap();
    assert_eq!(eci, "country,axis1\nc0,-1.41421356237\nc1,0.707106781187\n");
    let rep = report(dir.path());
    let lambda = rep["eigenvalues"][0].as_f64().unwrap();
    assert!((lambda - 0.25).abs() < 1e-12);
    assert_eq!(rep["countries"], 2);
    assert_eq!(rep["products"], 2);
}

#[test]
fn default_threshold_splits_f1() {
    // at RCA > 1 the matrix is diagonal: each country alone with one product
    let dir = tempfile::tempdir().unwrap();
    let trade = f1_trade(dir.path());
    let out = run(&["ca", "--trade", &s(&trade), "--out", &s(dir.path())]);
    assert_eq!(code(&out), 7, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn argument_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = s(&dir.path().join("nope.csv"));
    let out = run(&["ca", "--trade", &missing, "--out", &s(dir.path())]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));
    assert_eq!(code(&run(&["ca", "--axes", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let trade = f1_trade(dir.path());
    assert_eq!(code(&run(&["cca", "--trade", &s(&trade), "--out", &s(dir.path())])), 2);
    assert_eq!(code(&run(&["synth", "--out", &s(dir.path())])), 2);
}

#[test]
fn malformed_trade_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "year,country,product,value\n2018,c0,p0,ten\n").unwrap();
    let out = run(&["ca", "--trade", &s(&bad), "--out", &s(dir.path())]);
    assert_eq!(code(&out), 4);
}

#[test]
fn disconnected_data_lists_components() {
    let dir = tempfile::tempdir().unwrap();
    let trade = dir.path().join("split.csv");
    fs::write(
        &trade,
        "year,country,product,value\n2018,a,p1,10\n2018,a,p2,10\n2018,b,p2,10\n2018,b,p3,10\n\
         2018,c,p3,10\n2018,d,p4,10\n2018,e,p5,10\n",
    )
    .unwrap();
    let out = run(&["ca", "--trade", &s(&trade), "--out", &s(dir.path())]);
    assert_eq!(code(&out), 7, "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("component 3"), "{err}");
    let out = run(&["ca", "--trade", &s(&trade), "--largest-component", "--out", &s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(dir.path());
    assert_eq!(rep["countries"], 3);
    assert_eq!(rep["pruned"]["dropped_countries"].as_array().unwrap().len(), 2);
}

#[test]
fn country_without_variables_is_dropped_and_reported() {
    let synth = Synth::new(5, 2);
    let vars = fs::read_to_string(synth.vars()).unwrap();
    let mut lines: Vec<&str> = vars.lines().collect();
    let removed = lines.remove(1).split(',').next().unwrap().to_string();
    let short = synth.out("short_vars.csv");
    fs::write(&short, lines.join("\n") + "\n").unwrap();
    let out_dir = synth.out("cca");
    let out = run(&["cca", "--trade", &synth.trade(), "--vars", &short, "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(Path::new(&out_dir));
    let dropped = rep["pruned"]["dropped_countries"].as_array().unwrap();
    assert!(dropped.iter().any(|d| d.to_string().contains(&removed)), "{dropped:?}");
    let e_std = fs::read_to_string(Path::new(&out_dir).join("e_std.csv")).unwrap();
    assert!(!e_std.contains(&format!("\n{removed},")));
}

#[test]
fn cca_writes_one_column_per_axis() {
    let synth = Synth::new(8, 5);
    let out_dir = synth.out("cca");
    let out = run(&["cca", "--trade", &synth.trade(), "--vars", &synth.vars(), "--axes", "3", "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dir = Path::new(&out_dir);
    for file in ["e_std.csv", "v.csv"] {
        let text = fs::read_to_string(dir.join(file)).unwrap();
        assert_eq!(text.lines().next().unwrap(), "country,cca1,cca2,cca3");
    }
    let u = fs::read_to_string(dir.join("u.csv")).unwrap();
    assert_eq!(u.lines().next().unwrap(), "product,cca1,cca2,cca3");
    let b = fs::read_to_string(dir.join("b.csv")).unwrap();
    assert_eq!(b.lines().next().unwrap(), "variable,axis,coefficient");
    // five variables plus the constant, three axes each
    assert_eq!(b.lines().count(), 1 + 6 * 3);
    assert_eq!(report(dir)["eigenvalues"].as_array().unwrap().len(), 3);
}

#[test]
fn too_many_axes_is_rejected() {
    let synth = Synth::new(8, 2);
    let out =
        run(&["cca", "--trade", &synth.trade(), "--vars", &synth.vars(), "--axes", "3", "--out", &synth.out("x")]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn biplot_axis_pair_and_caps() {
    let synth = Synth::new(9, 5);
    let out_dir = synth.out("biplot");
    let out = run(&[
        "biplot",
        "--trade",
        &synth.trade(),
        "--vars",
        &synth.vars(),
        "--axes",
        "5",
        "--axis-pair",
        "2,3",
        "--cap-axis",
        "3=0.1",
        "--out",
        &out_dir,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dir = Path::new(&out_dir);
    let rep = report(dir);
    let labels = rep["biplot"]["axis_labels"].as_array().unwrap();
    assert!(labels[0].as_str().unwrap().starts_with("CCA-2 ("));
    assert!(labels[1].as_str().unwrap().starts_with("CCA-3 ("));
    assert_eq!(rep["biplot"]["rays"], 5);
    assert!(!rep["biplot"]["clipped"].as_array().unwrap().is_empty());
    let svg = fs::read_to_string(dir.join("biplot.svg")).unwrap();
    assert!(svg.contains("data-clipped=\"true\""));
    let rays = fs::read_to_string(dir.join("biplot_rays.csv")).unwrap();
    assert_eq!(rays.lines().count(), 1 + 5);
}

#[test]
fn biplot_centroids_from_category_mapping() {
    let synth = Synth::new(10, 2);
    let lall = synth.out("lall.csv");
    let categories = ["PPm", "PPo", "RBa", "RBo", "LTt", "LTo", "MTa", "MTp", "MTe", "HTe", "HTo"];
    let mut text = String::from("product,category\n");
    for (i, p) in synth.products().iter().enumerate() {
        text += &format!("{p},{}\n", categories[i % 11]);
    }
    fs::write(&lall, text).unwrap();
    let out_dir = synth.out("biplot");
    let out = run(&["biplot", "--trade", &synth.trade(), "--vars", &synth.vars(), "--lall", &lall, "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(Path::new(&out_dir));
    assert_eq!(rep["biplot"]["centroids"], 11);
    assert_eq!(rep["biplot"]["products"], 0);
    assert!(rep["input_digests"]["lall"].is_string());
    let svg = fs::read_to_string(Path::new(&out_dir).join("biplot.svg")).unwrap();
    assert_eq!(svg.matches("class=\"centroid\"").count(), 11);
}

#[test]
fn biplot_without_mapping_leaves_many_products_unlabeled() {
    let synth = Synth::new(10, 1);
    let out_dir = synth.out("biplot");
    let out = run(&["biplot", "--trade", &synth.trade(), "--ordination", "ca", "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(Path::new(&out_dir));
    let products = rep["biplot"]["products"].as_u64().unwrap();
    assert!(products > 50);
    assert_eq!(rep["biplot"]["rays"], 0);
    let svg = fs::read_to_string(Path::new(&out_dir).join("biplot.svg")).unwrap();
    let labels = svg.matches("class=\"label\"").count() as u64;
    assert_eq!(labels, rep["biplot"]["countries"].as_u64().unwrap());
}

#[test]
fn unknown_category_exits_5() {
    let synth = Synth::new(10, 1);
    let lall = synth.out("lall.csv");
    fs::write(&lall, "product,category\nP0001,PPm\nP0002,XYZ\n").unwrap();
    let out = run(&["biplot", "--trade", &synth.trade(), "--lall", &lall, "--out", &synth.out("b")]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("XYZ"));
}

#[test]
fn validate_passes_on_clean_data() {
    let synth = Synth::new(12, 3);
    let out = run(&[
        "validate",
        "--trade",
        &synth.trade(),
        "--vars",
        &synth.vars(),
        "--method",
        "both",
        "--out",
        &synth.out("v"),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ok") && !text.contains("FAILED"));
}

#[test]
fn validate_fails_when_solvers_cannot_agree() {
    let synth = Synth::new(12, 3);
    let out = run(&[
        "validate",
        "--trade",
        &synth.trade(),
        "--vars",
        &synth.vars(),
        "--method",
        "both",
        "--tol",
        "1e-2",
        "--out",
        &synth.out("v"),
    ]);
    assert_eq!(code(&out), 11, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn flags_override_config_file() {
    let synth = Synth::new(13, 1);
    let config = synth.out("config.json");
    fs::write(&config, r#"{"axes": 3, "tol": 1e-9, "threshold": 1.0}"#).unwrap();
    let out_dir = synth.out("ca");
    let out = run(&["ca", "--trade", &synth.trade(), "--config", &config, "--tol", "1e-11", "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(Path::new(&out_dir));
    assert_eq!(rep["config"]["axes"], 3);
    assert_eq!(rep["config"]["tol"].as_f64(), Some(1e-11));
    assert_eq!(rep["config"]["max_iter"], 10000);

    fs::write(&config, r#"{"axez": 3}"#).unwrap();
    let out = run(&["ca", "--trade", &synth.trade(), "--config", &config, "--out", &out_dir]);
    assert_eq!(code(&out), 4);
}

#[test]
fn synth_is_deterministic_and_seeded() {
    let a = Synth::new(21, 2);
    let b = Synth::new(21, 2);
    let c = Synth::new(22, 2);
    for file in ["trade.csv", "vars.csv", "planted.csv", "synth.json"] {
        let read = |d: &Synth| fs::read(d.dir.path().join(file)).unwrap();
        assert_eq!(read(&a), read(&b), "{file}");
        if file == "trade.csv" {
            assert_ne!(read(&a), read(&c));
        }
    }
}

#[test]
fn reflections_table() {
    let synth = Synth::new(14, 1);
    let out_dir = synth.out("ca");
    let out = run(&["ca", "--trade", &synth.trade(), "--reflections", "3", "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(Path::new(&out_dir).join("reflections.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "entity,kind,step0,step1,step2,step3");
}
