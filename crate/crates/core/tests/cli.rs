use std::path::PathBuf;
use std::process::Command;

use reticular::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["retic".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("retic-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn classify_accepts_catalog_germ() {
    let (code, out, _) = run(&["classify", "--germ", "y^2;y^3", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap() == "¹(⁰A₁⁰A₂)", "{out}");
    assert!(out.contains("ascii: 1(0A1,0A2)"));
}

#[test]
fn classify_rejects_over_budget() {
    let (code, out, _) = run(&["classify", "--germ", "y^3;y^3;y^2", "--n", "2"]);
    assert_eq!(code, 1);
    assert!(out.contains("Reject: budget"), "{out}");
}

#[test]
fn json_output_echoes_config() {
    let (code, out, _) = run(&["--json", "classify", "--germ", "y^2; x*y + y^3", "--n", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["ascii"], "1(0A1,0C3+)");
    assert_eq!(v["config"]["n"], 2);
    assert_eq!(v["config"]["jet_cap"], 7);
    assert_eq!(v["config"]["dims"], serde_json::json!([[0, 1], [1, 1]]));
}

#[test]
fn parse_errors_exit_2_with_grammar() {
    let (code, _, err) = run(&["codim", "--germ", "y^^2"]);
    assert_eq!(code, 2);
    assert!(err.contains("germ grammar"), "{err}");
    let (code, _, _) = run(&["codim", "--germ", "y^2 + 1"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("classify"));
}

#[test]
fn codim_and_determine_reports() {
    let (code, out, _) = run(&["codim", "--germ", "y^2; x^2", "--n", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("mu = (1, 2)"), "{out}");
    let (code, out, _) = run(&["codim", "--germ", "y^2; x^2", "--order", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("--order 4"), "{out}");
    let (code, out, _) = run(&["determine", "--germ", "y^3", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("determinacy order: 3"), "{out}");
}

#[test]
fn germ_file_input() {
    let d = scratch("germfile");
    std::fs::create_dir_all(&d).unwrap();
    let f = d.join("g.txt");
    std::fs::write(&f, "# two sheets\ny^2\n\nx^2   # corner\n").unwrap();
    let (code, out, _) = run(&["classify", "--germ-file", f.to_str().unwrap(), "--n", "1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("1(0A1,0B2)"));
}

#[test]
fn unfold_prints_family_and_signs() {
    let (code, out, _) = run(&["unfold", "--germ", "y^2;y^2;y^2", "--n", "1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("family: y^2 + t - q - z; y^2 + q - z; y^2 - z"), "{out}");
    assert!(out.contains("signs: -"));
    let (code, out, _) = run(&["unfold", "--germ", "y^2;y^2;y^2", "--n", "1", "--signs", "+"]);
    assert_eq!(code, 1);
    assert!(out.contains("verification failed"), "{out}");
    let (code, _, _) = run(&["unfold", "--germ", "y^2;y^3", "--n", "1", "--signs", "++"]);
    assert_eq!(code, 2);
}

#[test]
fn catalog_export_and_verify() {
    let d = scratch("catalog");
    let (code, out, _) = run(&["catalog", "--n", "1", "--out", d.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 8);
    for f in ["catalog_n1.tsv", "catalog_n1.json", "report.txt", "manifest.toml"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let (code, _, _) = run(&["catalog", "--n", "1", "--verify"]);
    assert_eq!(code, 0);
    // One n=2 entry is not versal as listed; the verifier reports it.
    let (code, out, _) = run(&["catalog", "--n", "2", "--verify"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn front_writes_artifacts_and_manifest() {
    let d = scratch("front");
    let (code, out, err) =
        run(&["front", "--family", "1(0A1,0A2)", "--n", "1", "--grid", "201", "--out", d.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("crossings 1-2: 0"), "{out}");
    assert!(out.contains("crossings 1-2: 2"), "{out}");
    let mut names: Vec<String> =
        std::fs::read_dir(&d).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "1_A1_A2_p_filmstrip.svg",
            "1_A1_A2_p_t0.csv",
            "1_A1_A2_p_t0.svg",
            "1_A1_A2_p_t1.csv",
            "1_A1_A2_p_t1.svg",
            "1_A1_A2_p_t2.csv",
            "1_A1_A2_p_t2.svg",
            "manifest.toml",
            "report.txt"
        ]
    );
    let m: toml::Value = toml::from_str(&std::fs::read_to_string(d.join("manifest.toml")).unwrap()).unwrap();
    assert_eq!(m["config"]["grid"].as_integer(), Some(201));
    assert_eq!(m["summary"]["frames"].as_array().unwrap().len(), 3);
    assert!(m["summary"]["frames"][1]["unreliable"].as_bool().unwrap());
}

#[test]
fn front_usage_errors() {
    let (code, _, err) = run(&["front", "--family", "1(0A1,0A2)", "--n", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("--out"));
    let d = scratch("front-usage");
    let (code, _, err) = run(&["front", "--family", "1(0A1,0A2)", "--out", d.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) =
        run(&["front", "--family", "1(0B2,0B2)", "--n", "2", "--slice", "q7=0.1", "--out", d.to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _, _) =
        run(&["front", "--family", "1(0B2,0B2)", "--n", "2", "--slice", "q2", "--out", d.to_str().unwrap()]);
    assert_eq!(code, 2);
}

/// The echoed command reproduces the artifacts byte for byte.
#[test]
fn echoed_command_reproduces_run() {
    let d1 = scratch("echo1");
    let (code, out, _) = run(&[
        "front",
        "--expr",
        "y^2+t+q1-z; x^2+q2*x-z",
        "--slice",
        "q2=0.1",
        "--frames",
        "2",
        "--grid",
        "101",
        "--out",
        d1.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let m: toml::Value = toml::from_str(&std::fs::read_to_string(d1.join("manifest.toml")).unwrap()).unwrap();
    let d2 = scratch("echo2");
    let mut argv: Vec<String> =
        m["command"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let i = argv.iter().position(|a| a == "--out").unwrap();
    argv[i + 1] = d2.to_str().unwrap().to_string();
    let (mut o, mut e) = (Vec::new(), Vec::new());
    assert_eq!(run_with(&argv, &mut o, &mut e), 0, "{}", String::from_utf8_lossy(&e));
    for f in ["family_t0.csv", "family_t1.csv", "family_t0.svg", "family_filmstrip.svg"] {
        assert_eq!(std::fs::read(d1.join(f)).unwrap(), std::fs::read(d2.join(f)).unwrap(), "{f}");
    }
    assert!(out.lines().next().unwrap().starts_with("# retic front"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_retic");
    let o = Command::new(bin).args(["classify", "--germ", "y^2;y^3", "--n", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("¹(⁰A₁⁰A₂)"));
    let o = Command::new(bin).args(["classify", "--germ", "y^3;y^3;y^2", "--n", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(bin).args(["classify"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
