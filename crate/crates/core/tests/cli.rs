use std::process::{Command, Output};

use serde_json::Value;

fn stable_embed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stable-embed"))
        .args(args)
        .env_remove("STABLE_EMBED_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn counterexample_subcommand() {
    let v = json(&stable_embed(&["counterexample", "--r", "0.5", "--b", "1", "--i-max", "30"]));
    assert!((v["result"]["alpha_bruteforce"].as_f64().unwrap() - 0.40825).abs() < 5e-6);
    assert!((v["result"]["alpha_formula_lb"].as_f64().unwrap() - 0.33333).abs() < 5e-6);
}

#[test]
fn bounds_subcommand() {
    let v = json(&stable_embed(&["bounds", "--theorem", "1", "--s", "8", "--eps-s", "0.0076638", "--delta", "0.5", "--xi", "0.1"]));
    // eps_S rounded to five significant digits
    assert_eq!(v["result"]["m_required"], 498_816);
    let v = json(&stable_embed(&["bounds", "--sparse-k", "2", "--sparse-n", "64"]));
    assert_eq!(v["result"]["m_required"], 498_811);
    assert_eq!(v["config"]["inputs"]["s"], 8.0);
}

#[test]
fn haar_fourier_subcommand() {
    let v = json(&stable_embed(&["haar-fourier", "--n", "2", "--eps-star", "0.19"]));
    assert_eq!(v["result"]["d"], 3);
}

#[test]
fn exit_codes() {
    let out = stable_embed(&["haar-fourier", "--n", "16", "--eps-star", "0.05", "--d-max", "8"]);
    assert_eq!(out.status.code(), Some(3));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(rec["error"], "not_found");
    assert_eq!(rec["exit_code"], 3);

    let out = stable_embed(&["net", "--eps", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = stable_embed(&["rip-sweep", "--m-list", "32,16"]);
    assert_eq!(out.status.code(), Some(2));
    let out = stable_embed(&["bounds", "--theorem", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = stable_embed(&["rop", "--format", "xml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stable_embed(&["--help"]).status.success());
}

#[test]
fn seed_from_environment_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_stable-embed"))
        .args(["rop", "--m", "50", "--maps", "10"])
        .env("STABLE_EMBED_SEED", "123")
        .output()
        .unwrap();
    let from_env = json(&out);
    assert_eq!(from_env["seed"], 123);
    let from_flag = json(&stable_embed(&["rop", "--m", "50", "--maps", "10", "--seed", "123"]));
    assert_eq!(from_env, from_flag);
}

#[test]
fn reports_repeat_byte_for_byte() {
    let args = ["rip-sweep", "--n", "12", "--k", "2", "--m-list", "8,16", "--n-secants", "200", "--trials", "3", "--seed", "5"];
    let a = stable_embed(&args);
    let b = stable_embed(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut single = args.to_vec();
    single.extend(["--threads", "1"]);
    assert_eq!(stable_embed(&single).stdout, a.stdout);
}

#[test]
fn writes_files_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = stable_embed(&[
        "rip-sweep", "--m-list", "8,16,32", "--n-secants", "100", "--trials", "2", "--format", "csv", "--seed", "1",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["m", "delta_median", "delta_q1", "delta_q3", "trials", "p", "seed"]);
    assert_eq!(rdr.records().count(), 3);
}

#[test]
fn point_cloud_input_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    std::fs::write(&pts, "# dim=2\n1,0\n0,1\n-1,0\n0,-1\n").unwrap();
    let cfg = dir.path().join("net.toml");
    std::fs::write(&cfg, format!("model = \"cloud\"\npoints = {:?}\neps = 1.0\nseed = 3\n", pts.to_str().unwrap())).unwrap();
    let v = json(&stable_embed(&["net", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["seed"], 3);
    assert_eq!(v["result"]["n_points"], 4);
    assert_eq!(v["result"]["net"]["centers"].as_array().unwrap().len(), 4);
    let v = json(&stable_embed(&["net", "--config", cfg.to_str().unwrap(), "--eps", "1.5"]));
    assert_eq!(v["result"]["net"]["centers"].as_array().unwrap().len(), 2);
}
