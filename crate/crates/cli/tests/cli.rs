use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_neuroquant"));
    c.env_remove("NEUROQUANT_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

/// Data rows of a CSV report, header comments and column row stripped.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let header: Vec<&str> = text.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    rows(text).iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn negative_activation_energy_is_usage_error() {
    let o = run(&["rate-arrhenius", "--ea-ev", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "usage");
    assert_eq!(e["flag"], "ea-ev");
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = run(&["isotope", "--nope", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["flag"], "nope");
}

#[test]
fn dimension_cap_is_simulation_error() {
    let o = run(&["dicke-evolve", "--n", "3", "--modes", "3", "--cutoff", "20", "--dimension-cap", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "simulation");
}

#[test]
fn isotope_distances() {
    let o = run(&["isotope"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let r = rows(&text);
    assert_eq!(r.len(), 4);
    let protium: f64 = r.iter().find(|r| r[0] == "protium").unwrap()[2].parse().unwrap();
    assert!((protium - 0.0583).abs() < 5e-4, "{protium}");
}

#[test]
fn wkb_sweep_is_flat() {
    let o = run(&["sweep-temp", "--model", "wkb", "--n-points", "11"]);
    assert!(o.status.success());
    let k = column(&stdout(&o), "k_per_s");
    assert_eq!(k.len(), 11);
    assert!(k.iter().all(|v| v.to_bits() == k[0].to_bits()));
}

#[test]
fn thermal_sweep_recovers_activation_energy() {
    let o = run(&["sweep-temp", "--ea-ev", "0.42"]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("# result fitted-ea-ev:")).unwrap();
    let ea: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((ea - 0.42).abs() < 1e-9, "{ea}");
}

#[test]
fn resonant_single_emitter_follows_cos_squared() {
    let o = run(&["dicke-evolve", "--n", "1", "--resonant", "--g-mev", "1", "--t-final-ps", "2", "--dt-ps", "0.05"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let t = column(&text, "t_ps");
    let p = column(&text, "p_excited");
    let g = 1e-3 * 1.602176634e-19 / 1.054571817e-34;
    for (t, p) in t.iter().zip(&p) {
        let expect = (g * t * 1e-12).cos().powi(2);
        assert!((p - expect).abs() < 1e-6, "t={t} p={p} expect={expect}");
    }
}

#[test]
fn resonant_with_detuning_rejected() {
    let o = run(&["dicke-evolve", "--resonant", "--detuning-mev", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["flag"], "detuning-mev");
}

fn replay(dir: &Path, args: &[&str], ext: &str) {
    let first = dir.join(format!("first.{ext}"));
    let second = dir.join(format!("second.{ext}"));
    let mut a = args.to_vec();
    a.extend(["--out", first.to_str().unwrap()]);
    assert!(run(&a).status.success());
    let o = run(&[args[0], "--config", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn csv_output_replays_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    replay(dir.path(), &["exo-sim", "--n", "200", "--seed", "11", "--trains", "3", "--k-per-s", "512.5"], "csv");
}

#[test]
fn json_output_replays_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    replay(
        dir.path(),
        &["rate-wkb", "--particle", "deuterium", "--barrier", "parabolic", "--energy-ev", "0.01", "--format", "json"],
        "json",
    );
}

#[test]
fn toml_config_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "vc = 1e13\nea-ev = 0.4\ntemp-k = 300.0\n").unwrap();
    let o = run(&["rate-arrhenius", "--config", cfg.to_str().unwrap(), "--temp-k", "320"]);
    let text = stdout(&o);
    assert!(text.contains("\"temp-k\":320.0"));
    assert!(text.contains("\"ea-ev\":0.4"));
}

#[test]
fn unknown_config_key_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "vc = 1e13\nbogus = 1\n").unwrap();
    let o = run(&["rate-arrhenius", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["flag"], "bogus");
}

#[test]
fn config_for_other_subcommand_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iso.csv");
    assert!(run(&["isotope", "--out", out.to_str().unwrap()]).status.success());
    let o = run(&["rate-arrhenius", "--config", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_dir_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().arg("isotope").env("NEUROQUANT_OUT_DIR", dir.path()).output().unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("isotope.csv")).unwrap();
    assert!(text.starts_with("# neuroquant "));
}

#[test]
fn exo_sim_header_and_frequency() {
    let o = run(&["exo-sim", "--n", "4000", "--k-per-s", "1000", "--tau-ms", "0.5", "--seed", "3"]);
    let text = stdout(&o);
    assert!(text.contains("# seed: 3"));
    assert!(text.contains("# rng: ChaCha8"));
    let released = column(&text, "released");
    assert_eq!(released.len(), 4000);
    let p = 1.0 - (-0.5f64).exp();
    let f = released.iter().sum::<f64>() / 4000.0;
    assert!((f - p).abs() < 4.0 * (p * (1.0 - p) / 4000.0).sqrt());
}

#[test]
fn region_map_json_rows() {
    let o = run(&["region-map", "--preset", "suppressing", "--n-xi", "40", "--n-eta", "36", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let labels = v["data"]["labels"].as_array().unwrap();
    assert_eq!(labels.len(), 40);
    assert!(labels.iter().all(|r| r.as_str().unwrap().len() == 36));
    let c = &v["data"]["counts"];
    let total = c["R"].as_u64().unwrap() + c["C"].as_u64().unwrap() + c["I"].as_u64().unwrap();
    assert_eq!(total, 40 * 36);
}

#[test]
fn mixed_splitting_json() {
    let o = run(&["mixed-splitting", "--preset", "suppressing", "--n-xi", "64", "--n-eta", "40", "--n-max", "1", "--convergence", "false"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["subcommand"], "mixed-splitting");
    assert_eq!(v["data"]["doublets"].as_array().unwrap().len(), 2);
    assert!(v["data"]["convergence"].is_null());
}
