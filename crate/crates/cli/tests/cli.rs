use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wavecomp(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavecomp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("WAVECOMP_OUT")
        .output()
        .unwrap()
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    if !dir.exists() {
        return BTreeMap::new();
    }
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn index(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join("result.json")).unwrap()).unwrap()
}

#[test]
fn same_seed_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert!(wavecomp(&["eraser", "--seed", "42"], &a).status.success());
    assert!(wavecomp(&["eraser", "--seed", "42"], &b).status.success());
    assert!(wavecomp(&["eraser", "--seed", "43"], &c).status.success());
    let (fa, fb, fc) = (files(&a), files(&b), files(&c));
    assert!(fa.len() > 3);
    assert_eq!(fa, fb);
    assert_ne!(fa["histogram_raw.csv"], fc["histogram_raw.csv"]);
}

#[test]
fn unsatisfiable_imaging_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "lens_to_image_m = 0.2\n").unwrap();
    let out = tmp.path().join("out");
    let o = wavecomp(&["afshar", "--config", cfg.to_str().unwrap()], &out);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("imaging condition"), "{}", stderr(&o));
    assert!(files(&out).is_empty());
}

#[test]
fn failed_runs_leave_prior_outputs_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert!(wavecomp(&["nodes"], &out).status.success());
    let before = files(&out);
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "focal_length_m = 0.5\n").unwrap();
    assert!(!wavecomp(&["nodes", "--config", cfg.to_str().unwrap()], &out).status.success());
    assert_eq!(files(&out), before);
}

#[test]
fn negative_slit_width_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "slit_width_um = -1\n").unwrap();
    let out = tmp.path().join("out");
    let o = wavecomp(&["eraser", "--config", cfg.to_str().unwrap()], &out);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("slit_width"), "{}", stderr(&o));
    assert!(files(&out).is_empty());
}

#[test]
fn unknown_and_mistyped_keys_are_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "n_pairs = 10\nslit_width = 40\n").unwrap();
    let o = wavecomp(&["eraser", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("slit_width") && err.contains("line 2"), "{err}");

    fs::write(&cfg, "n_pairs = \"many\"\n").unwrap();
    let o = wavecomp(&["eraser", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert!(!o.status.success());
    assert!(stderr(&o).contains("n_pairs"), "{}", stderr(&o));
}

#[test]
fn empty_config_echoes_every_default_and_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.toml");
    fs::write(&empty, "").unwrap();
    for sub in ["eraser", "afshar"] {
        let o = wavecomp(&[sub, "--config", empty.to_str().unwrap(), "--print-config"], tmp.path());
        assert!(o.status.success());
        let echo = String::from_utf8(o.stdout).unwrap();
        let no_config = wavecomp(&[sub, "--print-config"], tmp.path());
        assert_eq!(echo.as_bytes(), no_config.stdout);
        let again = tmp.path().join(format!("{sub}.toml"));
        fs::write(&again, &echo).unwrap();
        let o = wavecomp(&[sub, "--config", again.to_str().unwrap(), "--print-config"], tmp.path());
        assert_eq!(String::from_utf8(o.stdout).unwrap(), echo);
    }
    assert!(files(tmp.path()).keys().all(|k| k.ends_with(".toml")));
}

#[test]
fn delayed_choice_lists_one_csv_per_subensemble() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert!(wavecomp(&["delayed-choice", "--format", "csv"], &out).status.success());
    let idx = index(&out);
    let keys: Vec<&String> = idx.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["artifacts", "config", "seed", "version"]);
    assert_eq!(idx["seed"], 12345);
    let artifacts = idx["artifacts"].as_array().unwrap();
    for name in [
        "eraser_signal_v",
        "eraser_signal_h",
        "which_path_slit_a",
        "which_path_slit_b",
        "unmatched",
        "raw",
    ] {
        let entry = artifacts
            .iter()
            .find(|a| a["name"] == name && a["kind"] == "histogram")
            .unwrap_or_else(|| panic!("{name} missing"));
        let file = entry["file"].as_str().unwrap();
        let text = fs::read_to_string(out.join(file)).unwrap();
        assert!(text.starts_with("bin_center_m,counts\n"));
        assert_eq!(text.lines().count(), 401);
    }
    for a in artifacts {
        assert!(out.join(a["file"].as_str().unwrap()).exists());
    }
}

#[test]
fn json_format_embeds_the_result() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert!(wavecomp(&["afshar", "--format", "json"], &out).status.success());
    let data: serde_json::Value = serde_json::from_slice(&fs::read(out.join("afshar.json")).unwrap()).unwrap();
    assert!(data["scalars"]["power_intercepted_both"].as_f64().unwrap() < 0.02);
    assert_eq!(files(&out).len(), 2);
}

#[test]
fn fit_recovers_the_fringe_frequency_of_an_eraser_histogram() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert!(wavecomp(&["eraser"], &run).status.success());
    let input = run.join("histogram_coincidence_horizontal.csv");
    let out = tmp.path().join("fit");
    let o = wavecomp(&["fit", "--input", input.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit: serde_json::Value = serde_json::from_slice(&fs::read(out.join("fit.json")).unwrap()).unwrap();
    let b = fit["b"].as_f64().unwrap();
    let reference = std::f64::consts::PI * 250e-6 / (702e-9 * 0.5);
    assert!((b / reference - 1.0).abs() < 0.01, "{b}");

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "bin_center_m,counts\n0.0,-3\n").unwrap();
    let o = wavecomp(&["fit", "--input", bad.to_str().unwrap()], &tmp.path().join("none"));
    assert!(!o.status.success());
    assert!(!tmp.path().join("none").exists());
}

#[test]
fn nodes_are_emitted_as_json_records() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(wavecomp(&["nodes"], tmp.path()).status.success());
    let nodes: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("nodes.json")).unwrap()).unwrap();
    let positions = nodes["positions_m"].as_array().unwrap();
    assert!(positions.len() >= 10);
    let spacing = nodes["mean_spacing_m"].as_f64().unwrap();
    assert!((spacing / 702e-9 / 0.1 * 250e-6 - 1.0).abs() < 0.01);
}

#[test]
fn output_directory_defaults_to_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_wavecomp"))
        .arg("nodes")
        .env("WAVECOMP_OUT", tmp.path().join("env"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(tmp.path().join("env/result.json").exists());
}

#[test]
fn unknown_subcommands_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let o = wavecomp(&["interfere"], tmp.path());
    assert!(!o.status.success());
}
