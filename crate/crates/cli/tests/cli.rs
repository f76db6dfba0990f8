use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.fcidump"))
}

fn sidecar(name: &str) -> Value {
    let text = std::fs::read_to_string(fixture(name).with_extension("json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn esvqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esvqe")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = esvqe(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(jsonl: &str) -> Vec<Value> {
    jsonl.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn hf_row_matches_the_fixture_reference() {
    let h2 = fixture("h2_0.74");
    let out = run_ok(&["run", "--method", "hf", "--fcidump", path_str(&h2), "--format", "json-lines"]);
    let r = &rows(&out)[0];
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["system"], "h2");
    assert_eq!(r["geometry"], "0.74");
    assert!((r["e_method"].as_f64().unwrap() - sidecar("h2_0.74")["e_hf"].as_f64().unwrap()).abs() < 1e-8);
    assert!((r["e_fci"].as_f64().unwrap() - sidecar("h2_0.74")["e_fci"].as_f64().unwrap()).abs() < 1e-8);
}

#[test]
fn fci_rows_have_zero_error_on_every_fixture() {
    let names = ["h2_0.74", "h4_0.90", "h4_2.00", "lih_1.20", "h6_1.00", "h2pbc_2.00"];
    let paths: Vec<PathBuf> = names.iter().map(|n| fixture(n)).collect();
    let mut args = vec!["run", "--method", "fci", "--format", "csv"];
    for p in &paths {
        args.extend(["--fcidump", path_str(p)]);
    }
    let out = run_ok(&args);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let records: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), names.len());
    for (rec, name) in records.iter().zip(names) {
        assert_eq!(rec[col("abs_error")].parse::<f64>().unwrap(), 0.0, "{name}");
        assert_eq!(rec[col("wall_time_s")], *"");
        let want = sidecar(name)["geometry"].as_str().unwrap().to_string();
        assert_eq!(rec[col("geometry")], want, "rows keep input order");
    }
}

#[test]
fn es_vqe_on_h4_drops_about_half_the_pool() {
    let names = ["h4_0.90", "h4_1.20", "h4_1.60", "h4_2.00"];
    let paths: Vec<PathBuf> = names.iter().map(|n| fixture(n)).collect();
    let mut args = vec!["run", "--method", "es-vqe", "--pool", "uccsd", "--fci-target", "--format", "json-lines"];
    for p in &paths {
        args.extend(["--fcidump", path_str(p)]);
    }
    let out = rows(&run_ok(&args));
    for r in &out {
        let frac = r["n_selected"].as_f64().unwrap() / r["n_pool"].as_f64().unwrap();
        println!(
            "{} {}: {}/{} operators, error {:e}",
            r["system"],
            r["geometry"],
            r["n_selected"],
            r["n_pool"],
            r["abs_error"].as_f64().unwrap()
        );
        assert!(frac < 1.0);
    }
    let eq = &out[0];
    assert_eq!(eq["geometry"], "0.90");
    assert!(eq["abs_error"].as_f64().unwrap() <= 1.6e-3);
    let frac = eq["n_selected"].as_f64().unwrap() / eq["n_pool"].as_f64().unwrap();
    assert!((0.3..=0.7).contains(&frac), "{frac}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let h4 = fixture("h4_1.20");
    let run = |tag: &str| {
        let out = dir.path().join(format!("rows_{tag}.csv"));
        let traces = dir.path().join(format!("traces_{tag}"));
        run_ok(&[
            "run",
            "--method",
            "es-vqe",
            "--fcidump",
            path_str(&h4),
            "--out",
            path_str(&out),
            "--trace-dir",
            path_str(&traces),
        ]);
        let trace = std::fs::read(traces.join("h4_1.20.es-vqe.uccsd.jsonl")).unwrap();
        (std::fs::read(out).unwrap(), trace)
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn report_compares_methods_from_traces() {
    let dir = tempfile::tempdir().unwrap();
    let h2 = fixture("h2_0.74");
    for method in ["es-vqe", "adapt-vqe"] {
        run_ok(&[
            "run",
            "--method",
            method,
            "--fcidump",
            path_str(&h2),
            "--trace-dir",
            path_str(dir.path()),
            "--out",
            path_str(&dir.path().join("rows.csv")),
        ]);
    }
    let es = dir.path().join("h2_0.74.es-vqe.uccsd.jsonl");
    let adapt = dir.path().join("h2_0.74.adapt-vqe.uccsd.jsonl");

    let single = run_ok(&["report", "--format", "csv", path_str(&es)]);
    let lines: Vec<&str> = single.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "system,geometry,es-vqe[uccsd] abs_error,es-vqe[uccsd] n_operators,es-vqe[uccsd] n_pool");

    let both = run_ok(&["report", "--format", "csv", path_str(&es), path_str(&adapt)]);
    let mut reader = csv::Reader::from_reader(both.as_bytes());
    let rec = reader.records().next().unwrap().unwrap();
    assert_eq!(rec.len(), 8);
    for j in [2, 5] {
        assert!(rec[j].parse::<f64>().unwrap() < 1e-8);
    }
    // The numbers are the trace's own.
    let trace: Value = serde_json::from_str(std::fs::read_to_string(&es).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(rec[3].parse::<u64>().unwrap(), trace["n_operators"].as_u64().unwrap());

    let text = run_ok(&["report", path_str(&es), path_str(&adapt)]);
    assert!(text.starts_with("system"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn empty_report_is_an_empty_table() {
    assert_eq!(run_ok(&["report", "--format", "csv"]), "system,geometry\n");
}

#[test]
fn config_file_settings_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let h2 = fixture("h2_0.74");
    std::fs::write(&cfg, format!("fcidump = [{:?}]\nmethod = \"fci\"\nformat = \"json-lines\"\n", path_str(&h2)))
        .unwrap();
    let r = rows(&run_ok(&["run", "--config", path_str(&cfg)]));
    assert_eq!(r[0]["method"], "fci");
    let r = rows(&run_ok(&["run", "--config", path_str(&cfg), "--method", "hf"]));
    assert_eq!(r[0]["method"], "hf");
}

#[test]
fn timing_is_opt_in() {
    let h2 = fixture("h2_0.74");
    let r = rows(&run_ok(&["run", "--method", "hf", "--fcidump", path_str(&h2), "--format", "json-lines", "--timing"]));
    assert!(r[0]["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn failures_map_to_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let h2 = fixture("h2_0.74");
    let code = |args: &[&str]| esvqe(args).status.code().unwrap();

    assert_eq!(code(&["run", "--fcidump", path_str(&h2), "--eps-a", "0"]), 2);
    assert_eq!(code(&["run", "--fcidump", path_str(&h2), "--pool", "qcc+aux"]), 2);
    assert_eq!(code(&["run", "--method", "hf"]), 2);
    let bad_cfg = dir.path().join("bad.toml");
    std::fs::write(&bad_cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&["run", "--config", path_str(&bad_cfg)]), 2);

    assert_eq!(code(&["run", "--fcidump", path_str(&dir.path().join("missing.fcidump"))]), 3);
    let broken = dir.path().join("broken.fcidump");
    std::fs::write(&broken, "&FCI NORB=2,\n&END\n").unwrap();
    assert_eq!(code(&["run", "--fcidump", path_str(&broken)]), 3);

    let trace = dir.path().join("old.jsonl");
    std::fs::write(&trace, "{\"record\":\"header\",\"schema_version\":0}\n").unwrap();
    let out = esvqe(&["report", path_str(&trace)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema_version"));
}

#[test]
fn pools_lists_sizes_per_input() {
    let out = run_ok(&["pools", "--fcidump", path_str(&fixture("h4_0.90"))]);
    let line = out.lines().nth(1).unwrap();
    let cols: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(cols[..], ["h4", "0.90", "8", "14", "72", "848", "28", "144"]);
}
