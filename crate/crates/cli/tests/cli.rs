use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;
use waveleton_cli::config::{RunConfig, ScenarioKind};
use waveleton_cli::{execute, load_config, presets, CliError, RunManifest};

const BIN: &str = env!("CARGO_BIN_EXE_waveleton");

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn small_evolve(extra: &str) -> String {
    format!(
        r#"
scenario = "evolve"
name = "small"
potential = [0.0, 0.0, 0.5]
{extra}
[grid]
q = [-6.0, 6.0]
p = [-6.0, 6.0]
n_q = 32
n_p = 32

[integrator]
t_end = 0.5
snapshot_stride = 20
"#
    )
}

fn validation(err: CliError) -> (String, String) {
    match err {
        CliError::Validation { key, reason } => (key, reason),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn unknown_keys_report_their_line() {
    let err = RunConfig::parse("scenario = \"evolve\"\n\n[grid]\nn_q = 32\nspacing = 2\n").unwrap_err();
    match err {
        CliError::Parse { line, message } => {
            assert_eq!(line, 5, "{message}");
            assert!(message.contains("spacing"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(RunConfig::parse("scenario = evolve"), Err(CliError::Parse { line: 1, .. })));
}

#[test]
fn negative_mass_is_rejected_by_key() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.toml", &small_evolve("mass = -1.0"));
    assert_eq!(validation(load_config(&path).unwrap_err()), ("mass".into(), "must be positive".into()));
}

#[test]
fn non_finite_numbers_are_rejected() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.toml", &small_evolve("hbar = nan"));
    assert_eq!(validation(load_config(&path).unwrap_err()), ("hbar".into(), "must be finite".into()));
    let path = write_config(dir.path(), "d.toml", &small_evolve("").replace("[0.0, 0.0, 0.5]", "[0.0, inf]"));
    assert_eq!(validation(load_config(&path).unwrap_err()).0, "potential[1]");
}

#[test]
fn structural_checks() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (small_evolve("").replace("n_q = 32", "n_q = 30"), "grid.n_q"),
        (small_evolve("").replace("q = [-6.0, 6.0]", "q = [6.0, -6.0]"), "grid.q"),
        (small_evolve("[lindblad]\ngamma = 0.1\n"), "lindblad"),
        (small_evolve("[initial]\nkind = \"file\"\npath = \"missing.wgf1\"\n"), "initial.path"),
        (small_evolve("[[ensemble]]\nweight = 0.4\n[[ensemble]]\nweight = 0.4\nq0 = 1.0\n"), "ensemble"),
        ("scenario = \"synthesize\"\n[synthesize]\nsize = 64\ndepth = 7\n".to_string(), "synthesize.depth"),
        ("scenario = \"galerkin\"\n[galerkin]\nmodes = [8, 4]\n".to_string(), "galerkin.modes"),
        ("scenario = \"fock_model\"\n[fock]\nprofile = [0.0]\nweights = [0.5, 0.5]\n".to_string(), "fock.weights"),
        ("scenario = \"analyze\"\n".to_string(), "analyze"),
    ];
    for (k, (text, key)) in cases.iter().enumerate() {
        let path = write_config(dir.path(), &format!("c{k}.toml"), text);
        assert_eq!(validation(load_config(&path).unwrap_err()).0, *key, "case {k}");
    }
}

#[test]
fn defaults_are_filled_in_place() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.toml", &small_evolve("hbar = 0.5\nmass = 2.0"));
    let c = load_config(&path).unwrap();
    // ground-state widths sqrt(ħ/2mω) and sqrt(ħmω/2)
    assert!((c.initial.sigma_q.unwrap() - 0.125f64.sqrt()).abs() < 1e-15);
    assert!((c.initial.sigma_p.unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert_eq!(c.basis().family, "daubechies");
    let resolved = RunConfig::parse(&c.to_toml()).unwrap();
    assert_eq!(resolved, c);

    let path = write_config(dir.path(), "s.toml", "scenario = \"synthesize\"\n[synthesize]\nsize = 64\n");
    let s = load_config(&path).unwrap();
    assert_eq!(s.synthesize.unwrap().depth, Some(6));
    assert!(s.basis.is_none());
}

#[test]
fn demo_configs_expand_to_presets() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "d.toml", "scenario = \"demo\"\ndemo = \"waveleton\"\nname = \"mine\"\n");
    let c = load_config(&path).unwrap();
    assert_eq!(c.scenario, ScenarioKind::Synthesize);
    assert_eq!(c.name, "mine");
    let s = c.synthesize.unwrap();
    assert_eq!((s.size, s.width, s.depth, s.frozen_snapshots), (512, 16, Some(9), 3));
    assert_eq!((s.band_value, s.off_value), (5.0, 1.0));

    let path = write_config(dir.path(), "e.toml", "scenario = \"demo\"\ndemo = \"no-such\"\n");
    assert!(matches!(load_config(&path), Err(CliError::UnknownDemo(_))));
}

#[test]
fn every_preset_validates() {
    for name in presets::names().chain(presets::ALIASES.iter().map(|(a, _)| *a)) {
        let mut c = presets::preset(name).unwrap();
        c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn runs_are_deterministic_and_fully_listed() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.toml", &small_evolve(""));
    let c = load_config(&path).unwrap();
    let a = execute(&c, &dir.path().join("a")).unwrap();
    let b = execute(&c, &dir.path().join("b")).unwrap();
    for m in [(&a, "a"), (&b, "b")] {
        m.0.verify(&dir.path().join(m.1)).unwrap();
        assert_eq!(&RunManifest::load(&dir.path().join(m.1)).unwrap(), m.0);
    }
    assert_eq!(a.config_sha256, b.config_sha256);
    assert_eq!(a.files, b.files, "every artifact is byte-identical across runs");
    assert!(a.files.iter().any(|f| f.path == "snapshots/snap_0000.wgf1"));
    assert!(a.summary["mass_drift"].as_f64().unwrap() < 1e-12);
    let stale: Vec<_> = fs::read_dir(dir.path()).unwrap().filter_map(|e| e.ok()).filter(|e| e.file_name().to_string_lossy().starts_with('.')).collect();
    assert!(stale.is_empty(), "staging directories are removed");

    // a rerun replaces a previous run in place
    execute(&c, &dir.path().join("a")).unwrap().verify(&dir.path().join("a")).unwrap();
}

#[test]
fn seeded_random_synthesis_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let text = |seed: u64| format!("scenario = \"synthesize\"\nseed = {seed}\n[synthesize]\nsize = 64\nstructure = \"random\"\n");
    let digest = |seed: u64, out: &str| {
        let c = load_config(&write_config(dir.path(), &format!("{out}.toml"), &text(seed))).unwrap();
        let m = execute(&c, &dir.path().join(out)).unwrap();
        m.files.iter().find(|f| f.path == "field.wgf1").unwrap().sha256.clone()
    };
    assert_eq!(digest(7, "x"), digest(7, "y"));
    assert_ne!(digest(7, "x"), digest(8, "z"));
}

#[test]
fn ensembles_and_analysis_chain() {
    let dir = TempDir::new().unwrap();
    let mix = small_evolve("[[ensemble]]\nweight = 0.5\nq0 = -1.5\n[[ensemble]]\nweight = 0.5\nq0 = 1.5\n");
    let c = load_config(&write_config(dir.path(), "m.toml", &mix)).unwrap();
    let m = execute(&c, &dir.path().join("mix")).unwrap();
    let csv = fs::read_to_string(dir.path().join("mix/conservation.csv")).unwrap();
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[3].parse::<f64>().unwrap(), 0.0, "a mixture of Gaussians starts non-negative");
    // stencil ringing on the coarse 32² grid is the only source of negativity afterwards
    assert!(m.summary["negativity_volume"].as_f64().unwrap() < 1e-4);

    let analyze = "scenario = \"analyze\"\n[analyze]\ninputs = [\"mix/snapshots/snap_0000.wgf1\", \"mix/snapshots/snap_0001.wgf1\"]\n";
    let c = load_config(&write_config(dir.path(), "a.toml", analyze)).unwrap();
    let r = execute(&c, &dir.path().join("report")).unwrap();
    assert_eq!(r.summary["inputs"], 2);
    let text = fs::read_to_string(dir.path().join("report/report.txt")).unwrap();
    assert!(text.contains("stability_drift = ") && !text.contains("n/a"), "{text}");
}

#[test]
fn stationary_ground_state_barely_moves() {
    let dir = TempDir::new().unwrap();
    let c = load_config(&write_config(dir.path(), "c.toml", &small_evolve("").replace("32", "64"))).unwrap();
    let m = execute(&c, &dir.path().join("out")).unwrap();
    assert!(m.summary["relative_change"].as_f64().unwrap() <= 1e-4);
    let csv = fs::read_to_string(dir.path().join("out/conservation.csv")).unwrap();
    assert!(csv.starts_with("time,mass,energy,negativity_volume,purity\n"));
}

#[test]
fn fock_and_galerkin_scenarios_run() {
    let dir = TempDir::new().unwrap();
    let fock = small_evolve("").replace("\"evolve\"", "\"fock_model\"") + "\n[fock]\nu0 = 0.5\nprofile = [0.0, 0.0, 1.0]\nweights = [0.6, 0.8]\n";
    let c = load_config(&write_config(dir.path(), "f.toml", &fock)).unwrap();
    let m = execute(&c, &dir.path().join("fock")).unwrap();
    assert_eq!(m.summary["levels"], 2);
    assert!(m.summary["mixed_mass_drift"].as_f64().unwrap() < 1e-10);
    assert!(dir.path().join("fock/levels/1/snap_0000.wgf1").is_file());

    let galerkin = "scenario = \"galerkin\"\n[galerkin]\nmodes = [4, 8]\nquad_nodes = 128\n";
    let c = load_config(&write_config(dir.path(), "g.toml", galerkin)).unwrap();
    let m = execute(&c, &dir.path().join("galerkin")).unwrap();
    let diffs = m.summary["cutoff_differences"].as_array().unwrap();
    assert_eq!(diffs.len(), 1);
    assert!(m.summary["max_error"].as_f64().unwrap() < 0.05);
    m.verify(&dir.path().join("galerkin")).unwrap();
}

fn stderr_json(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_slice(out.stderr.trim_ascii()).unwrap_or_else(|_| panic!("{}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn invalid_configs_fail_without_output() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.toml", &small_evolve("mass = -1.0"));
    let out_dir = dir.path().join("out");
    let out = Command::new(BIN).arg("run").arg(&path).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    let err = stderr_json(&out);
    assert_eq!((err["error"].as_str(), err["key"].as_str()), (Some("validation"), Some("mass")));
    assert!(!out_dir.exists());

    let path = write_config(dir.path(), "p.toml", "scenario = \"evolve\"\nmass = \n");
    let out = Command::new(BIN).arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["line"], 2);
}

#[test]
fn core_failures_leave_no_partial_run() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.toml", &small_evolve("").replace("t_end = 0.5", "t_end = 0.5\ndt = 0.4"));
    let out_dir = dir.path().join("out");
    let out = Command::new(BIN).arg("run").arg(&path).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(32));
    assert_eq!(stderr_json(&out)["variant"], "StepTooLarge");
    assert!(!out_dir.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1, "only the config remains");
}

#[test]
fn foreign_directories_are_not_overwritten() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    fs::create_dir(&out_dir).unwrap();
    fs::write(out_dir.join("notes.txt"), "keep").unwrap();
    let c = load_config(&write_config(dir.path(), "c.toml", &small_evolve(""))).unwrap();
    assert!(matches!(execute(&c, &out_dir), Err(CliError::OutputExists(_))));
    assert_eq!(fs::read_to_string(out_dir.join("notes.txt")).unwrap(), "keep");
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.toml", &small_evolve(""));
    let out = Command::new(BIN).arg("run").arg(&path).env("WAVELETON_OUT", dir.path().join("runs")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("runs/small");
    RunManifest::load(&run).unwrap().verify(&run).unwrap();
}

#[test]
fn convert_filters_and_analyze_commands() {
    let dir = TempDir::new().unwrap();
    let c = load_config(&write_config(dir.path(), "c.toml", &small_evolve(""))).unwrap();
    execute(&c, &dir.path().join("run")).unwrap();
    let snap = dir.path().join("run/snapshots/snap_0000.wgf1");

    let csv = dir.path().join("s.csv");
    assert!(Command::new(BIN).args(["convert", "--to", "csv", "--out"]).arg(&csv).arg(&snap).status().unwrap().success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 32 * 32);

    let pgm = dir.path().join("s.pgm");
    assert!(Command::new(BIN).args(["convert", "--to", "pgm", "--out"]).arg(&pgm).arg(&snap).status().unwrap().success());
    assert!(fs::read(&pgm).unwrap().starts_with(b"P5\n32 32\n255\n"));
    assert!(fs::read_to_string(dir.path().join("s.pgm.txt")).unwrap().contains("mapping = linear"));

    let out = Command::new(BIN).args(["filters", "db", "2"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# daubechies 2 4\n"), "{text}");
    let out = Command::new(BIN).args(["filters", "db", "99"]).output().unwrap();
    assert_eq!(out.status.code(), Some(20));

    let out = Command::new(BIN).arg("analyze").arg(&snap).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("label = "));

    let out = Command::new(BIN).args(["demo", "nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
    let out = Command::new(BIN).args(["demo", "waveleton", "--print"]).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("structure = \"band\""));
}
