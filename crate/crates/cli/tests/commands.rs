use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value as Json;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Json {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

fn wefx(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_wefx")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wefx-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SINGLE: &str = r#"{"kind":"goods","agents":[{"id":"solo","weight":"1"}],"items":["g1","g2"],"values":[["1","2"]]}"#;
const PAIR: &str = r#"{"kind":"goods","agents":[{"id":"1","weight":"1"},{"id":"2","weight":"2"}],
    "items":["g1","g2","g3"],"values":[["3","1","1"],["1","2","1"]]}"#;
const ONE_ITEM: &str = r#"{"kind":"goods","agents":[{"id":"1","weight":"1"},{"id":"2","weight":"1"}],"items":["g"],"values":[["1"],["1"]]}"#;
// the chore round-robin output here is not 1WEF
const RR_COUNTER: &str = r#"{"kind":"chores","agents":[{"id":"1","weight":"2"},{"id":"2","weight":"3"}],
    "items":["b1","b2","b3","b4"],"values":[["1","1","0","1"],["2","1","0","2"]]}"#;

#[test]
fn repro_reports_nonexistence() {
    let r = wefx(&["repro", "--case", "wefx-n2"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let j = r.json();
    assert_eq!(j["exists"], false);
    assert!(j["best_factor_decimal"].as_str().unwrap().starts_with("0.786"));
    assert_eq!(j["allocations_scanned"], 16);
    for case in ["wefx-n3", "xwef-n2", "xwef-n3"] {
        assert_eq!(wefx(&["repro", "--case", case]).code, 3, "{case}");
    }
}

#[test]
fn repro_input_errors() {
    assert_eq!(wefx(&["repro", "--case", "nope"]).code, 2);
    let r = wefx(&["repro", "--case", "wefx-n2", "--alpha", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("alpha must lie strictly between 0 and 1"), "{}", r.stderr);
    assert_eq!(wefx(&["repro", "--case", "wefx-n3", "--alpha", "1/2"]).code, 2);
    assert_eq!(wefx(&["repro", "--case", "wefx-n2", "--alpha", "x"]).code, 2);
    assert_eq!(wefx(&["repro", "--case", "wefx-n3", "--budget", "100"]).code, 4);
}

#[test]
fn repro_output_is_independent_of_jobs() {
    for case in ["wefx-n2", "wefx-n3", "xwef-n2", "xwef-n3"] {
        let serial = wefx(&["repro", "--case", case]);
        let parallel = wefx(&["repro", "--case", case, "--jobs", "4"]);
        assert_eq!(serial.stdout, parallel.stdout, "{case}");
    }
}

#[test]
fn verify_exit_codes() {
    let dir = scratch("verify");
    let single = write(&dir, "single.json", SINGLE);
    let solo = write(&dir, "solo.json", r#"{"g1":"solo","g2":"solo"}"#);
    let r = wefx(&["verify", "--criterion", "wefx", "--in", &single, "--alloc", &solo]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["satisfied"], true);

    let pair = write(&dir, "pair.json", PAIR);
    let lopsided = write(&dir, "lopsided.json", r#"{"g1":"2","g2":"2","g3":"2"}"#);
    let r = wefx(&["verify", "--criterion", "wef1", "--in", &pair, "--alloc", &lopsided]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json()["worst_pair"], serde_json::json!(["1", "2"]));

    let r = wefx(&["verify", "--criterion", "xwef", "--in", &pair, "--alloc", &lopsided]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("does not apply to goods"));
    let partial = write(&dir, "partial.json", r#"{"g1":"2"}"#);
    assert_eq!(wefx(&["verify", "--criterion", "wef", "--in", &pair, "--alloc", &partial]).code, 2);
    assert_eq!(wefx(&["verify", "--criterion", "wefx", "--in", &pair, "--alloc", "/nonexistent/alloc.json"]).code, 2);
}

#[test]
fn allocate_exit_codes() {
    let dir = scratch("allocate");
    let pair = write(&dir, "pair.json", PAIR);
    let out = dir.join("alloc.json");
    let r = wefx(&["allocate", "--alg", "icyc", "--in", &pair, "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = r.json();
    assert_eq!(j["report"]["satisfied"], true);
    let written: Json = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, j["allocation"]);
    let r = wefx(&["verify", "--criterion", "wefx", "--in", &pair, "--alloc", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);

    let r = wefx(&["allocate", "--alg", "approx-wefx", "--in", &pair]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.json()["trace"]["case"].is_string());

    let r = wefx(&["allocate", "--alg", "chore-rr", "--in", &pair]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("algorithm requires chores"));

    let single = write(&dir, "single.json", SINGLE);
    let r = wefx(&["allocate", "--alg", "envy-cycle", "--in", &single]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["trace"]["mode"], "cardinal");
    // the rows of PAIR do not share a ranking
    let r = wefx(&["allocate", "--alg", "envy-cycle", "--in", &pair, "--mode", "ordinal"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert_eq!(wefx(&["allocate", "--alg", "envy-cycle", "--in", &pair, "--mode", "cardinal"]).code, 2);
    // icyc needs a unit-weight first agent
    let heavy = write(&dir, "heavy.json", &PAIR.replace(r#""weight":"1""#, r#""weight":"3""#));
    assert_eq!(wefx(&["allocate", "--alg", "icyc", "--in", &heavy]).code, 2);
}

#[test]
fn allocate_reports_theorem_violations() {
    let dir = scratch("violation");
    let chores = write(&dir, "chores.json", RR_COUNTER);
    let r = wefx(&["allocate", "--alg", "chore-rr", "--in", &chores]);
    assert_eq!(r.code, 5);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("theorem violation: chore round-robin is 1WEF"), "{}", r.stderr);
    assert!(r.stderr.contains("\"bundles\""));

    let goods = write(
        &dir,
        "goods.json",
        r#"{"kind":"goods","agents":[{"id":"1","weight":"4"},{"id":"2","weight":"2"}],
        "items":["g1","g2","g3","g4"],"values":[["1","1","0","0"],["6","4","3","1"]]}"#,
    );
    let r = wefx(&["allocate", "--alg", "envy-cycle", "--in", &goods]);
    assert_eq!(r.code, 5, "{}", r.stderr);
}

#[test]
fn search_exit_codes() {
    let dir = scratch("search");
    let single = write(&dir, "single.json", SINGLE);
    let r = wefx(&["search", "exists", "--in", &single]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["allocations_scanned"], 1);
    let pair = write(&dir, "pair.json", PAIR);
    let one = write(&dir, "one.json", ONE_ITEM);
    let r = wefx(&["search", "exists", "--criterion", "wef", "--in", &one]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json()["allocations_scanned"], 2);
    let r = wefx(&["search", "exists", "--criterion", "wef", "--in", &pair]);
    assert_eq!(r.code, 0);
    assert!(r.json()["witness"].is_object());
    let r = wefx(&["search", "best-factor", "--in", &pair]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["exists"], true);
    assert_eq!(wefx(&["search", "best-factor", "--criterion", "wef1", "--in", &pair]).code, 2);
    assert_eq!(wefx(&["search", "exists", "--criterion", "1wef", "--in", &pair]).code, 2);
    let r = wefx(&["search", "exists", "--in", &pair, "--budget", "7"]);
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("enumeration needs 8 allocations, budget is 7"), "{}", r.stderr);
}

#[test]
fn sweep_exit_codes() {
    let r = wefx(&["sweep", "--case", "xwef-n2", "--grid", "2/5,11/25,12/25", "--jobs", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let points = r.json()["points"].as_array().unwrap().clone();
    let decimals: Vec<&str> = points.iter().map(|p| p["best_factor_decimal"].as_str().unwrap()).collect();
    assert_eq!(decimals, ["1.078689", "1.271312", "1.083333"]);
    assert_eq!(wefx(&["sweep", "--case", "xwef-n2", "--grid", "1/2,1"]).code, 2);
    assert_eq!(wefx(&["sweep", "--case", "xwef-n2", "--grid", "1/2,,"]).code, 2);
    assert_eq!(wefx(&["sweep", "--case", "wefx-n3", "--grid", "1/2"]).code, 2);
}

#[test]
fn export_round_trips() {
    let dir = scratch("export");
    for case in ["wefx-n2", "wefx-n3", "xwef-n2", "xwef-n3"] {
        let path = dir.join(format!("{case}.json"));
        let r = wefx(&["export", "--case", case, "--out", path.to_str().unwrap()]);
        assert_eq!(r.code, 0);
        assert_eq!(serde_json::from_str::<Json>(&fs::read_to_string(&path).unwrap()).unwrap(), r.json());
        // the exported file drives the oracle to the same answer as repro
        let searched = wefx(&["search", "best-factor", "--in", path.to_str().unwrap()]);
        let repro = wefx(&["repro", "--case", case]);
        assert_eq!(searched.code, 3);
        assert_eq!(searched.json()["best_factor_exact"], repro.json()["best_factor_exact"]);
    }
    let r = wefx(&["export", "--case", "wefx-n2", "--alpha", "1/3"]);
    assert_eq!(r.json()["agents"][0]["weight"], "1/3");
}

#[test]
fn malformed_inputs() {
    let dir = scratch("malformed");
    let cases = [
        ("not json", "pair.json".to_string()),
        (&PAIR.replace(r#""weight":"2""#, r#""weight":"0""#)[..], "agents[1].weight".to_string()),
        (&PAIR.replace(r#""kind""#, r#""extra":1,"kind""#)[..], "extra: unknown key".to_string()),
        (&PAIR.replace(r#""3","1""#, r#""3","1/0""#)[..], "values[0][1]".to_string()),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = write(&dir, "pair.json", text);
        let r = wefx(&["search", "exists", "--in", &path]);
        assert_eq!(r.code, 2, "case {i}");
        assert!(r.stderr.contains(needle.as_str()), "case {i}: {}", r.stderr);
    }
    assert_eq!(wefx(&["search", "exists", "--in", "/nonexistent/x.json"]).code, 2);
}

#[test]
fn usage_errors() {
    assert_eq!(wefx(&[]).code, 1);
    assert_eq!(wefx(&["bogus"]).code, 1);
    assert_eq!(wefx(&["repro"]).code, 1);
    assert_eq!(wefx(&["allocate", "--alg", "magic", "--in", "x"]).code, 1);
    assert_eq!(wefx(&["verify", "--criterion", "efx", "--in", "x", "--alloc", "y"]).code, 1);
    assert_eq!(wefx(&["repro", "--case", "wefx-n2", "--jobs", "0"]).code, 1);
    let help = wefx(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("allocate"));
}
