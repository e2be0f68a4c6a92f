//! Runs the `rsbench` binary on generated configs and reads its reports.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rsbench")
}

pub struct Run {
    pub code: i32,
    pub stderr: String,
}

/// Writes `config` to `<dir>/<cmd>.json`-style file and runs the command.
pub fn rsbench(cmd: &str, config: &Value, config_path: &Path, out: &Path, seed: Option<u64>) -> Run {
    fs::write(config_path, serde_json::to_vec_pretty(config).unwrap()).unwrap();
    let mut c = Command::new(bin());
    c.arg(cmd).arg("--config").arg(config_path).arg("--out").arg(out);
    if let Some(s) = seed {
        c.arg("--seed").arg(s.to_string());
    }
    let Output { status, stderr, .. } = c.output().expect("spawn rsbench");
    Run {
        code: status.code().unwrap_or(-1),
        stderr: String::from_utf8_lossy(&stderr).into_owned(),
    }
}

/// Runs a command that must succeed.
pub fn ok(cmd: &str, config: &Value, dir: &Path, name: &str) -> PathBuf {
    let out = dir.join(name);
    let run = rsbench(cmd, config, &dir.join(format!("{name}.json")), &out, None);
    assert_eq!(run.code, 0, "{cmd} failed: {}", run.stderr);
    out
}

/// Header and rows of a CSV report, every field as a string.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

pub fn f(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

pub fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

/// A small dataset that builds in well under a second.
pub fn small_gen_config(seed: u64) -> Value {
    serde_json::json!({
        "dim": 16, "n_items": 3000, "n_queries": 300, "n_train": 6000,
        "n_groups": 40, "power_exponent": 1.5, "singleton_fraction": 0.9,
        "content_spread": 0.35, "embedding_noise": 0.2,
        "tau_strict": 1.9, "tau_relaxed": 2.2, "seed": seed
    })
}
