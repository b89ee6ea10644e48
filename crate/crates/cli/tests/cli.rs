use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lextent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lextent"))
        .args(args)
        .env_remove("LEXTENT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const N_POSET: &str = "poset v1\nelements 4\n# a<c, b<c, b<d\ncover 0 2\ncover 1 2\ncover 1 3\n";

#[test]
fn count_chain_and_engines() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(
        dir.path(),
        "chain4.poset",
        "poset v1\nelements 4\ncover 0 1\ncover 1 2\ncover 2 3\n",
    );
    let o = lextent(&["count", &chain]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
    let n = write(dir.path(), "n.poset", N_POSET);
    for engine in ["auto", "general", "width2", "brute"] {
        let o = lextent(&["count", &n, "--engine", engine]);
        assert_eq!(stdout(&o), "5\n", "engine {engine}");
    }
}

#[test]
fn count_errors() {
    let dir = tempfile::tempdir().unwrap();
    let wide = write(dir.path(), "a3.poset", "poset v1\nelements 3\n");
    assert_eq!(lextent(&["count", &wide, "--engine", "width2"]).status.code(), Some(1));
    let big = write(dir.path(), "a30.poset", "poset v1\nelements 30\n");
    assert_eq!(lextent(&["count", &big, "--engine", "general"]).status.code(), Some(2));
    assert_eq!(lextent(&["count", &big, "--engine", "brute"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.poset", "poset v1\nelements 2\ncover 0 1\ncover 1 0\n");
    assert_eq!(lextent(&["count", &bad]).status.code(), Some(1));
    assert_eq!(lextent(&["count", "/nonexistent/file"]).status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(lextent(&[]).status.code(), Some(1));
    assert_eq!(lextent(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        lextent(&["--workers", "0", "spectrum", "--n", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(lextent(&["family"]).status.code(), Some(1));
    assert_eq!(lextent(&["family", "--path", "010"]).status.code(), Some(1));
    assert_eq!(lextent(&["construct", "--target", "0"]).status.code(), Some(1));
    assert_eq!(lextent(&["--help"]).status.code(), Some(0));
}

#[test]
fn construct_writes_a_verified_poset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("six.poset");
    let o = lextent(&["construct", "--target", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified ext = 6"));
    let o = lextent(&["count", out.to_str().unwrap()]);
    assert_eq!(stdout(&o), "6\n");

    let o = lextent(&["construct", "--target", "5", "--exact-size", "9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("elements 9\n"));
    assert!(stdout(&o).contains("verified ext = 5"));
}

#[test]
fn infeasible_exact_size() {
    let o = lextent(&["construct", "--target", "1000", "--exact-size", "5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn family_commands() {
    let o = lextent(&["family", "--path", "011"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("elements 4\n"));
    assert!(text.contains("entry 2/5\n"));
    assert!(text.contains("tree ext 3\n"));
    assert!(text.contains("counted ext 3\n"));
    let o = lextent(&["family", "--verify-depth", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn euclid_commands() {
    let o = lextent(&["euclid", "--n", "8"]);
    let text = stdout(&o);
    assert!(text.contains("best d 3\n"));
    assert!(text.contains("s_min 5\n"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = lextent(&[
        "euclid",
        "--report-theorem12",
        "--max-n",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("n,d,s_min,phi,normalizer,ratio,running_max_ratio,s_over_log_n\n"));
    assert_eq!(csv.lines().count(), 1 + 198);
    assert!(csv.contains("\n8,3,5,4,"));

    let o = lextent(&["euclid", "--report-lemma51", "--n", "5", "--M", "5"]);
    assert_eq!(stdout(&o), "n,m,tail,ratio\n5,5,1,0.621334935\n");
    assert_eq!(
        lextent(&["euclid", "--report-lemma51", "--n", "5", "--M", "6"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn spectrum_json_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("le3.json");
    let cache = dir.path().join("cache");
    let o = lextent(&[
        "spectrum",
        "--n",
        "3",
        "--json",
        json.to_str().unwrap(),
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("values 1 2 3 6\n"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["values"], serde_json::json!(["1", "2", "3", "6"]));
    assert_eq!(v["poset_count"], 7);
    assert_eq!(v["missing"], serde_json::json!([]));
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);

    let env_cache = dir.path().join("env-cache");
    let o = Command::new(env!("CARGO_BIN_EXE_lextent"))
        .args(["spectrum", "--n", "4"])
        .env("LEXTENT_CACHE_DIR", &env_cache)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_dir(&env_cache).unwrap().count(), 1);

    assert_eq!(lextent(&["spectrum", "--n", "8"]).status.code(), Some(2));
}

#[test]
fn width2_spectrum() {
    let o = lextent(&["spectrum", "--n", "4", "--width2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains(" 24"));
}

#[test]
fn verify_suite_passes() {
    let o = lextent(&["verify", "--suite", "paper", "--max-n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
}

#[test]
fn outputs_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let json = dir.path().join(format!("s{workers}.json"));
        let csv = dir.path().join(format!("t{workers}.csv"));
        lextent(&[
            "--workers",
            workers,
            "spectrum",
            "--n",
            "6",
            "--json",
            json.to_str().unwrap(),
        ]);
        lextent(&[
            "--workers",
            workers,
            "euclid",
            "--report-theorem12",
            "--max-n",
            "3000",
            "--out",
            csv.to_str().unwrap(),
        ]);
        let family = stdout(&lextent(&["--workers", workers, "family", "--verify-depth", "10"]));
        outputs.push((fs::read(json).unwrap(), fs::read(csv).unwrap(), family));
    }
    assert!(outputs[0] == outputs[1]);
}
