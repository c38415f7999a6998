use std::path::PathBuf;
use std::process::{Command, Output};

fn trunclap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trunclap"))
        .args(args)
        .env_remove("TRUNCLAP_QUAD_TOL")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("trunclap-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

const EVAL: [&str; 13] = [
    "eval",
    "--op",
    "I+",
    "--k",
    "2",
    "--N",
    "3",
    "--s",
    "0.75",
    "--profile",
    "power:0.4",
    "--r",
    "1,2,5",
];

#[test]
fn eval_prints_a_table_with_error_estimates() {
    let o = trunclap(&EVAL);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("r  "));
    assert!(text.contains("error_estimate"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn eval_json_is_homogeneous_in_r() {
    let mut args = EVAL.to_vec();
    args.extend(["--format", "json"]);
    let o = trunclap(&args);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let res = v["results"].as_array().unwrap();
    assert_eq!(res.len(), 3);
    // I_k^+ of t^-γ scales like r^-(γ+2s).
    let (a, b) = (
        res[0]["value"].as_f64().unwrap(),
        res[1]["value"].as_f64().unwrap(),
    );
    assert!((b / a - 2f64.powf(-1.9)).abs() < 1e-8, "{a} {b}");
    assert!(res[0]["error_estimate"].as_f64().unwrap() < 1e-8);
}

#[test]
fn solve_gamma_bar_reports_root_below_one_half() {
    let o = trunclap(&[
        "solve",
        "--exponent",
        "gamma_bar",
        "--k",
        "2",
        "--s",
        "0.75",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let root = v["root"].as_f64().unwrap();
    assert!(root > 0.0 && root < 0.5);
    assert!((root - 0.155_150_765_83).abs() < 1e-9);
    assert!(v["residual"].is_number());
    assert!((v["p_star"].as_f64().unwrap() - (1.0 + 1.5 / root)).abs() < 1e-9);
}

#[test]
fn verify_paper_core_exits_zero() {
    let o = trunclap(&["verify", "--suite", "paper-core", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["robustness"]["stable"], true);
    assert!(v["results"].as_array().unwrap().len() >= 20);
}

#[test]
fn sweep_csv_has_the_fixed_columns() {
    let o = trunclap(&[
        "sweep",
        "--target",
        "constant_trends",
        "--s-grid",
        "0.9,0.99",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "kind,k,N,s,value,residual,p_star"
    );
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&trunclap(&["eval", "--op", "I+"])), 2);
    assert_eq!(code(&trunclap(&["frobnicate"])), 2);
    assert_eq!(
        code(&trunclap(&[
            "eval", "--op", "Q", "--k", "1", "--N", "2", "--s", "0.7"
        ])),
        2
    );
    assert_eq!(
        code(&trunclap(&[
            "solve",
            "--exponent",
            "gamma_bar",
            "--k",
            "2",
            "--s",
            "0.3"
        ])),
        2
    );
    let o = trunclap(&["constants", "--name", "c_hat", "--s", "0.75"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--gamma"));
}

#[test]
fn quadrature_budget_exhaustion_exits_three() {
    let mut args = EVAL.to_vec();
    args.extend([
        "--max-subdivisions",
        "1",
        "--rel-tol",
        "1e-15",
        "--abs-tol",
        "1e-18",
    ]);
    assert_eq!(code(&trunclap(&args)), 3);
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = [
        "verify", "--suite", "frames", "--format", "json", "--seed", "7",
    ];
    let a = trunclap(&args);
    let b = trunclap(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_values_are_overridden_by_flags() {
    let cfg = temp_file(
        "eval.toml",
        r#"
format = "json"

[eval]
op = "I+"
k = 2
N = 3
s = 0.75
profile = "power:0.4"
r = [1.0]
"#,
    );
    let path = cfg.to_str().unwrap();
    let base = json(&trunclap(&["eval", "--config", path]));
    assert_eq!(base["k"], 2);
    let o = trunclap(&["eval", "--config", path, "--k", "1", "--r", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["k"], 1);
    assert_eq!(v["results"][0]["r"], 2.0);
    let bad = temp_file("bad.toml", "colour = \"red\"\n");
    assert_eq!(
        code(&trunclap(&["eval", "--config", bad.to_str().unwrap()])),
        2
    );
    std::fs::remove_file(cfg).ok();
    std::fs::remove_file(bad).ok();
}

#[test]
fn config_scenarios_run_and_failures_exit_one() {
    let cfg = temp_file(
        "scen.toml",
        r#"
[verify]
suite = "config"
tighten = []

[[scenario]]
name = "gaussian_minus_negative"
op = "I-"
k = 1
N = 2
s = 0.75
profile = "gaussian:1"
claim = "nonpositive"
radii = [1.0, 2.0]

[[scenario]]
name = "gaussian_is_not_a_subsolution"
op = "I-"
k = 1
N = 2
s = 0.75
profile = "gaussian:1"
claim = "subsolution"
radii = [1.0]
expect_failure = true
"#,
    );
    let path = cfg.to_str().unwrap();
    let o = trunclap(&["verify", "--config", path, "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["results"].as_array().unwrap().len(), 2);
    let text = std::fs::read_to_string(&cfg)
        .unwrap()
        .replace("expect_failure = true", "");
    std::fs::write(&cfg, text).unwrap();
    assert_eq!(code(&trunclap(&["verify", "--config", path])), 1);
    std::fs::remove_file(cfg).ok();
}

#[test]
fn env_tolerance_is_applied_and_flags_win() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_trunclap"));
        c.args(EVAL).args(["--max-subdivisions", "3"]).args(extra);
        match env {
            Some(v) => c.env("TRUNCLAP_QUAD_TOL", v),
            None => c.env_remove("TRUNCLAP_QUAD_TOL"),
        };
        code(&c.output().unwrap())
    };
    assert_eq!(run(Some("1e-15"), &[]), 3);
    assert_eq!(
        run(Some("1e-15"), &["--rel-tol", "1e-6", "--abs-tol", "1e-8"]),
        0
    );
    assert_eq!(run(Some("abc"), &[]), 2);
}

#[test]
fn output_file_receives_the_report() {
    let out = std::env::temp_dir().join(format!("trunclap-{}-out.json", std::process::id()));
    let mut args = EVAL.to_vec();
    args.extend(["--format", "json", "-o", out.to_str().unwrap()]);
    let o = trunclap(&args);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
    std::fs::remove_file(out).ok();
}

#[test]
fn named_profiles_resolve_from_the_config_file() {
    let cfg = temp_file(
        "prof.toml",
        r#"
format = "json"

[[profile]]
id = "soft"
name = "gaussian"
params = [0.5]
scale = 2.0
flags = { gtilde_prime_nondecreasing = false, gtilde_prime_l1 = false, gtilde_second_convex = false }
"#,
    );
    let path = cfg.to_str().unwrap();
    let args = |p: &'static str| {
        [
            "eval",
            "--config",
            path,
            "--op",
            "I-",
            "--k",
            "1",
            "--N",
            "2",
            "--s",
            "0.7",
            "--profile",
            p,
            "--r",
            "1",
        ]
    };
    let named = json(&trunclap(&args("soft")));
    let plain = json(&trunclap(&args("gaussian:0.5")));
    let (a, b) = (
        named["results"][0]["value"].as_f64().unwrap(),
        plain["results"][0]["value"].as_f64().unwrap(),
    );
    assert!((a - 2.0 * b).abs() < 1e-6 * b.abs(), "{a} vs {b}");
    // Flags switched off force the frame optimizer.
    assert_eq!(named["results"][0]["method"], "frame_optimizer");
    std::fs::remove_file(cfg).ok();
}
