use std::process::{Command, Output};

fn modkernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modkernel"))
        .args(args)
        .env_remove("MODKERNEL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = modkernel(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    modkernel(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&stdout(&full)).expect("valid json")
}

#[test]
fn decompose_examples() {
    assert_eq!(stdout(&["decompose", "[[1,5],[0,1]]"]), "T^5\n");
    assert_eq!(stdout(&["decompose", "--gamma04", "[[-1,0],[4,-1]]"]), "V^1\n");
    assert_eq!(stdout(&["decompose", "[[0,-1],[1,0]]"]), "S\n");
    assert_eq!(stdout(&["decompose", "[[1, 0], [0, 1]]"]), "Id\n");
    assert_eq!(stdout(&["decompose", "S T S T S T"]), "Id\n");
}

#[test]
fn decompose_round_trips_through_words() {
    let word = stdout(&["decompose", "[[17,64],[64,241]]"]);
    let back = json(&["decompose", word.trim()]);
    assert_eq!(back["matrix"], serde_json::json!([[17, 64], [64, 241]]));
    assert_eq!(back["word"], word.trim());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["decompose", "[[1,2],[3,4]]"]), 2);
    assert_eq!(code(&["decompose", "T^x"]), 2);
    assert_eq!(code(&["decompose", "--gamma04", "[[0,-1],[1,0]]"]), 3);
    assert_eq!(code(&["rep", "--alpha", "0.125", "T"]), 2);
    assert_eq!(code(&["rep", "--alpha", "1/0", "T"]), 2);
    assert_eq!(code(&["gamma-d", "0"]), 2);
    assert_eq!(code(&["--cap", "100", "kernel-info", "--alpha", "1/3", "--verify"]), 4);
    assert_eq!(code(&["--max-modulus", "8", "congruence", "--alpha", "1/3"]), 5);
    assert_eq!(code(&["congruence", "--alpha", "2/5"]), 0);
}

#[test]
fn rep_examples() {
    let t = stdout(&["rep", "--alpha", "1/8", "T"]);
    let rows: Vec<Vec<&str>> = t.lines().map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(
        rows,
        vec![
            vec!["e(1/8)", "0", "0", "0", "0", "0"],
            vec!["0", "0", "e(0)", "0", "0", "0"],
            vec!["0", "0", "0", "e(0)", "0", "0"],
            vec!["0", "0", "0", "0", "e(0)", "0"],
            vec!["0", "e(0)", "0", "0", "0", "0"],
            vec!["0", "0", "0", "0", "0", "e(7/8)"],
        ]
    );
    let s = stdout(&["rep", "--alpha", "0", "S"]);
    for line in s.lines() {
        assert_eq!(line.split_whitespace().filter(|e| *e == "e(0)").count(), 1);
    }
    let d = json(&["rep", "--alpha", "1/3", "T^4"]);
    assert_eq!(d["perm"], serde_json::json!([1, 2, 3, 4, 5, 6]));
    assert_eq!(d["phases"], serde_json::json!(["1/3", "0", "0", "0", "0", "2/3"]));
}

#[test]
fn kernel_info_examples() {
    let r = json(&["kernel-info", "--alpha", "1/8", "--verify"]);
    assert_eq!(r["index"], 192);
    assert_eq!(r["genus"], 5);
    assert_eq!(r["cusps"], 24);
    assert_eq!(r["level"], 8);
    assert_eq!(r["free_generators"], 33);
    assert_eq!(r["cross_checks"]["group_order"], 192);
    let z = json(&["kernel-info", "--alpha", "0"]);
    let five: Vec<_> = ["index", "genus", "cusps", "level", "free_generators"]
        .iter()
        .map(|k| z[k].clone())
        .collect();
    assert_eq!(five, [24, 0, 6, 4, 5].map(serde_json::Value::from));
    assert!(z.get("cross_checks").is_none());
    let s = json(&["kernel-info", "--alpha", "1/7", "--verify"]);
    assert_eq!(s["index"], 8232);
    assert_eq!(s["cross_checks"]["diagonal_order"], 343);
    assert!(stdout(&["kernel-info", "--alpha", "1/8", "--verify"]).contains("checks          = pass"));
}

#[test]
fn congruence_examples() {
    let c = json(&["congruence", "--alpha", "1/4"]);
    assert_eq!(
        (c["congruent"].as_bool(), c["kernel"].as_str()),
        (Some(true), Some("Gamma(4)"))
    );
    let c = json(&["congruence", "--alpha", "1/8"]);
    assert_eq!(
        (c["congruent"].as_bool(), c["kernel"].as_str()),
        (Some(true), Some("Gamma(8)"))
    );
    let c = json(&["congruence", "--alpha", "2/5"]);
    assert_eq!(c["congruent"], false);
    assert_eq!(c["kernel"], "noncongruence");
    assert_eq!(c["level"], 20);
    let witness = &c["witness"];
    let word = witness["word"].as_str().unwrap();
    let evaluated = json(&["decompose", word]);
    assert_eq!(evaluated["matrix"], witness["matrix"]);
    let image = json(&["rep", "--alpha", "2/5", word]);
    assert_eq!(&image, &witness["image"]);
}

#[test]
fn scan_examples() {
    let congruent = |q: &str| -> Vec<String> {
        stdout(&["--format", "csv", "scan", "--max-den", q])
            .lines()
            .skip(1)
            .filter(|l| l.ends_with(",true"))
            .map(|l| l.split(',').next().unwrap().to_string())
            .collect()
    };
    assert_eq!(congruent("8"), ["0", "1/8", "1/4", "3/8", "1/2"]);
    assert_eq!(congruent("4"), ["0", "1/4", "1/2"]);
    let one = stdout(&["--format", "csv", "scan", "--max-den", "1"]);
    assert_eq!(
        one,
        "alpha,N,index,genus,cusps,level,free_generators,congruent\n0,1,24,0,6,4,5,true\n"
    );
    assert_eq!(code(&["scan", "--max-den", "0"]), 2);
}

#[test]
fn full_range_scan_is_symmetric() {
    let rows = json(&["scan", "--max-den", "9", "--full-range"]);
    let rows = rows.as_array().unwrap();
    let find = |a: &str| rows.iter().find(|r| r["alpha"] == a).cloned().unwrap();
    for r in rows {
        let a = r["alpha"].as_str().unwrap();
        if a == "0" {
            continue;
        }
        let (p, q): (i64, i64) = a
            .split_once('/')
            .map(|(p, q)| (p.parse().unwrap(), q.parse().unwrap()))
            .unwrap();
        let mirror = find(&format!("{}/{}", q - p, q));
        for k in ["N", "index", "genus", "cusps", "level", "free_generators", "congruent"] {
            assert_eq!(r[k], mirror[k], "{a} vs its mirror at {k}");
        }
    }
}

#[test]
fn gamma_d_examples() {
    let g = json(&["gamma-d", "8"]);
    assert_eq!(
        (
            g["known_congruent"].as_bool(),
            g["congruence_excluded_by_bound"].as_bool()
        ),
        (Some(true), Some(false))
    );
    let g = json(&["gamma-d", "22"]);
    assert_eq!(g["congruence_excluded_by_bound"], true);
    let g = json(&["gamma-d", "16"]);
    assert_eq!(
        (
            g["zograf_applicable"].as_bool(),
            g["congruence_excluded_by_bound"].as_bool()
        ),
        (Some(true), Some(false))
    );
}

#[test]
fn probe_depends_on_seed_only() {
    let a = stdout(&[
        "--seed",
        "7",
        "--format",
        "json",
        "probe",
        "--k",
        "3",
        "--samples",
        "40",
    ]);
    let b = stdout(&[
        "--seed",
        "7",
        "--format",
        "json",
        "probe",
        "--k",
        "3",
        "--samples",
        "40",
    ]);
    assert_eq!(a, b);
    let p: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(p["witness"]["commutator"], serde_json::json!([[17, 64], [64, 241]]));
    assert_eq!(p["witness_outside"], true);
    let k2: serde_json::Value =
        serde_json::from_str(&stdout(&["--format", "json", "probe", "--k", "2", "--samples", "200"])).unwrap();
    assert_eq!(k2["failures"], 0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let commands: [&[&str]; 5] = [
        &["--format", "json", "congruence", "--alpha", "1/3"],
        &["--format", "json", "congruence", "--alpha", "1/7"],
        &["--format", "csv", "scan", "--max-den", "10"],
        &["--format", "json", "kernel-info", "--alpha", "3/8", "--verify"],
        &["rep", "--alpha", "2/5", "S T^3 S T^-2"],
    ];
    for args in commands {
        assert_eq!(modkernel(args).stdout, modkernel(args).stdout, "{args:?}");
    }
}

#[test]
fn cache_does_not_change_output() {
    let dir = tempfile_dir();
    let d = dir.to_str().unwrap();
    let plain = stdout(&["--format", "json", "congruence", "--alpha", "1/5"]);
    let first = stdout(&["--cache-dir", d, "--format", "json", "congruence", "--alpha", "1/5"]);
    let second = stdout(&["--cache-dir", d, "--format", "json", "congruence", "--alpha", "1/5"]);
    assert_eq!(plain, first);
    assert_eq!(first, second);
    assert!(std::fs::read_dir(&dir).unwrap().count() >= 1);
    let via_env = Command::new(env!("CARGO_BIN_EXE_modkernel"))
        .args(["--format", "json", "congruence", "--alpha", "1/5"])
        .env("MODKERNEL_CACHE_DIR", d)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(via_env.stdout).unwrap(), plain);
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("modkernel-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
