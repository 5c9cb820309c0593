use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tubepoly::oracle::hamiltonian_census;
use tubepoly::TubeSpec;

fn tubepoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubepoly"))
        .args(args)
        .env_remove("TUBEPOLY_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = tubepoly(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn record(args: &[&str], dir: &Path, name: &str) -> Value {
    let path = dir.join(name);
    let mut full = args.to_vec();
    full.extend(["--record", path.to_str().unwrap()]);
    stdout(&full);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn growth_reproduces_tabulated_rates() {
    let dir = tempfile::tempdir().unwrap();
    let r = record(&["growth", "--tube", "2x1"], dir.path(), "g.json");
    let p = &r["payload"];
    assert_eq!(p["kind"], "growth");
    let kappa = p["kappa_h"]["value"].as_f64().unwrap();
    let next = p["next_largest"]["value"].as_f64().unwrap();
    assert!((kappa - 0.440750).abs() < 1e-6);
    assert!((next - 0.360063).abs() < 1e-6);
    assert!(p["kappa_h"]["tolerance"].as_f64().unwrap() < 1e-9);
    for c in p["components"].as_array().unwrap() {
        assert!(c["rate"]["tolerance"].is_number());
        assert!(c["lambda"]["tolerance"].is_number());
    }

    let r = record(&["growth", "--tube", "5x0"], dir.path(), "h.json");
    let kappa = r["payload"]["kappa_h"]["value"].as_f64().unwrap();
    assert!((kappa - 0.288670).abs() < 1e-6);

    let r = record(&["growth", "--tube", "1x0"], dir.path(), "i.json");
    assert_eq!(r["payload"]["kappa_h"]["value"].as_f64().unwrap(), 0.0);
    assert!(r["payload"]["next_largest"].is_null());
    assert!(r["metadata"].get("timestamp").is_none());
}

#[test]
fn swapped_tube_is_normalized_with_a_warning() {
    let out = tubepoly(&["growth", "--tube", "1x2"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("normalized to 2x1"), "{err}");
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("tube 2x1"));
}

#[test]
fn free_energy_grid_respects_the_bounds() {
    let text = stdout(&[
        "free-energy", "--tube", "2x1", "--f-min", "-10", "--f-max", "10", "--step", "0.5",
    ]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["f", "F", "lower", "upper"]);
    assert_eq!(rows.len(), 41);
    for row in &rows {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[2] <= v[1] + 1e-9 && v[1] <= v[3] + 1e-9, "{row:?}");
    }
}

#[test]
fn free_energy_of_the_thinnest_tube_is_half_the_force() {
    let text = stdout(&["free-energy", "--tube", "1x0", "--f-min", "-3", "--f-max", "3", "--step", "0.25"]);
    let (_, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 25);
    for row in rows {
        let f: f64 = row[0].parse().unwrap();
        let free: f64 = row[1].parse().unwrap();
        assert_eq!(free, f / 2.0);
    }
}

#[test]
fn enumerate_tables_round_trip() {
    let csv = stdout(&["enumerate", "--tube", "2x1", "--nmax", "16"]);
    let json = stdout(&["enumerate", "--tube", "2x1", "--nmax", "16", "--format", "json"]);
    let (header, rows) = parse_csv(&csv);
    let record: Value = serde_json::from_str(&json).unwrap();
    let table = &record["payload"];
    assert_eq!(table["class"], "all");
    let json_header: Vec<String> = serde_json::from_value(table["columns"].clone()).unwrap();
    let json_rows: Vec<Vec<String>> = serde_json::from_value(table["rows"].clone()).unwrap();
    assert_eq!(header, json_header);
    assert_eq!(rows, json_rows);
    // Counts stay exact decimal strings and reprint identically.
    for row in &rows {
        let n: u128 = row[2].parse().unwrap();
        assert_eq!(n.to_string(), row[2]);
    }
    let reprinted = format!(
        "{}\n{}",
        json_header.join(","),
        json_rows.iter().map(|r| r.join(",") + "\n").collect::<String>()
    );
    assert_eq!(reprinted, csv);
}

#[test]
fn thinnest_tube_has_one_polygon_per_span() {
    let (_, rows) = parse_csv(&stdout(&["enumerate", "--tube", "1x0", "--nmax", "12"]));
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row, &[(2 * i + 4).to_string(), (i + 1).to_string(), "1".to_string()]);
    }
}

#[test]
fn hamiltonian_table_matches_the_census() {
    let (header, rows) = parse_csv(&stdout(&[
        "enumerate", "--tube", "1x1", "--class", "hamiltonian", "--smax", "3",
    ]));
    assert_eq!(header, ["s", "n", "count"]);
    let census = hamiltonian_census(TubeSpec::new(1, 1).unwrap(), 3).unwrap();
    let counts: Vec<u64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(counts, census);
    let lengths: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(lengths, ["4", "8", "12", "16"]);
}

#[test]
fn verify_reports_the_conjecture_margin() {
    let dir = tempfile::tempdir().unwrap();
    let r = record(&["verify", "--tube", "2x1", "--suite", "conjecture"], dir.path(), "v.json");
    assert_eq!(r["payload"]["passed"], true);
    let dominant = r["payload"]["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["name"] == "dominant-component-is-hamiltonian")
        .unwrap()
        .clone();
    let margin = dominant["value"]["value"].as_f64().unwrap();
    assert!((margin - 0.080687).abs() < 2e-6);
}

#[test]
fn verify_suites_pass_on_small_tubes() {
    for tube in ["1x0", "2x1"] {
        let text = stdout(&["verify", "--tube", tube, "--suite", "all"]);
        assert!(!text.contains("FAIL"), "{text}");
        assert!(text.ends_with("all assertions passed\n"));
    }
    let text = stdout(&["verify", "--tube", "2x1", "--suite", "oracle-xcheck", "--nmax", "14"]);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| tubepoly(args).status.code().unwrap();
    assert_eq!(code(&["growth", "--tube", "2by1"]), 2);
    assert_eq!(code(&["growth"]), 2);
    assert_eq!(code(&["growth", "--tube", "0x0"]), 2);
    assert_eq!(code(&["growth", "--tube", "2x1", "--tolerance", "-1"]), 2);
    assert_eq!(code(&["free-energy", "--tube", "2x1", "--f-min", "1", "--f-max", "1", "--step", "1"]), 2);
    assert_eq!(code(&["enumerate", "--tube", "2x1", "--class", "hamiltonian"]), 2);
    assert_eq!(code(&["verify", "--tube", "2x1", "--suite", "nonsense"]), 2);
    assert_eq!(code(&["enumerate", "--tube", "2x2", "--class", "full-blocks", "--smax", "8"]), 3);
}

#[test]
fn cache_reload_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache_flag = cache.to_str().unwrap();
    let fresh = record(&["growth", "--tube", "3x0"], dir.path(), "a.json");
    let built = record(&["growth", "--tube", "3x0", "--cache-dir", cache_flag], dir.path(), "b.json");
    let loaded = record(&["growth", "--tube", "3x0", "--cache-dir", cache_flag], dir.path(), "c.json");
    assert_eq!(fresh, built);
    assert_eq!(built, loaded);
    let entries: Vec<_> = std::fs::read_dir(&cache).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries.len(), 1, "no temporary files left behind: {entries:?}");

    let out = Command::new(env!("CARGO_BIN_EXE_tubepoly"))
        .args(["growth", "--tube", "3x0"])
        .env("TUBEPOLY_CACHE_DIR", &cache)
        .output()
        .unwrap();
    assert!(out.status.success());

    let path = cache.join(&entries[0]);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("\"format_version\":1", "\"format_version\":0", 1)).unwrap();
    let out = tubepoly(&["growth", "--tube", "3x0", "--cache-dir", cache_flag]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));

    let (header, body) = text.split_once('\n').unwrap();
    std::fs::write(&path, format!("{header}\n{}", body.replacen("true", "false", 1))).unwrap();
    let out = tubepoly(&["growth", "--tube", "3x0", "--cache-dir", cache_flag]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest"));
}

#[test]
fn timestamp_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let r = record(&["growth", "--tube", "1x0", "--timestamp"], dir.path(), "t.json");
    assert!(r["metadata"]["timestamp"].as_u64().unwrap() > 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 4] = [
        &["growth", "--tube", "2x1"],
        &["free-energy", "--tube", "1x1", "--f-min", "-10", "--f-max", "10", "--step", "0.5"],
        &["enumerate", "--tube", "2x1", "--nmax", "14", "--format", "json"],
        &["verify", "--tube", "2x1", "--suite", "all"],
    ];
    for args in commands {
        let runs: Vec<(Vec<u8>, Vec<u8>)> = ["a.json", "b.json"]
            .iter()
            .map(|name| {
                let path = dir.path().join(name);
                let mut full = args.to_vec();
                full.extend(["--record", path.to_str().unwrap()]);
                let out = tubepoly(&full);
                assert!(out.status.success());
                (out.stdout, std::fs::read(path).unwrap())
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{args:?}");
    }
}
