//! Scenario execution into a staging directory, renamed onto the output path only on success.
//!
//! Every file a run produces is listed in `manifest.json` with its size and SHA-256, so a
//! directory with a manifest is always complete.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use waveleton::dynamics::io::{encode_wgf1, field_csv, field_pgm, read_wgf1};
use waveleton::dynamics::{evolve, stability_bound, EvolveOptions, FieldKind, PhaseSpaceRhs, Trajectory};
use waveleton::ensembles::{mix, run_fock_model, wigner_from_wavefunction, Component, EnsembleSpec, FockModelSpec, WavefunctionGrid};
use waveleton::galerkin::{
    cutoff_check, decompose, reconstruct, synthesize_from_matrix, CoefficientMatrix, LiouvilleBenchmark,
};
use waveleton::pattern::{analyze, analyze_trajectory, PatternReport};
use waveleton::wavelet::build_filter_pair;
use waveleton::{PhaseSpaceGrid, PolynomialPotential, WaveletBasis, WignerField};

use crate::config::{Backend, FieldKindChoice, RunConfig, ScenarioKind, StateConfig, StateKind, StructureChoice};
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub name: String,
    pub seed: u64,
    /// SHA-256 of the resolved `config.toml`.
    pub config_sha256: String,
    pub started: String,
    pub finished: String,
    pub files: Vec<FileEntry>,
    pub summary: BTreeMap<String, Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn listing(dir: &Path, prefix: &str, out: &mut Vec<String>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = format!("{prefix}{}", entry.file_name().to_string_lossy());
        if entry.file_type()?.is_dir() {
            listing(&entry.path(), &format!("{name}/"), out)?;
        } else {
            out.push(name);
        }
    }
    Ok(())
}

impl RunManifest {
    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    /// Checks that the directory holds exactly the listed files with the listed digests.
    pub fn verify(&self, dir: &Path) -> Result<(), String> {
        let mut present = Vec::new();
        listing(dir, "", &mut present).map_err(|e| e.to_string())?;
        present.retain(|p| p != MANIFEST);
        present.sort();
        let mut listed: Vec<String> = self.files.iter().map(|f| f.path.clone()).collect();
        listed.sort();
        if present != listed {
            return Err(format!("directory holds {present:?}, manifest lists {listed:?}"));
        }
        for f in &self.files {
            let bytes = fs::read(dir.join(&f.path)).map_err(|e| format!("{}: {e}", f.path))?;
            if bytes.len() as u64 != f.bytes || sha256_hex(&bytes) != f.sha256 {
                return Err(format!("{} does not match its manifest entry", f.path));
            }
        }
        Ok(())
    }
}

/// Files written so far, relative to the staging root.
struct Staging {
    root: PathBuf,
    files: Vec<FileEntry>,
    csv: bool,
    pgm: bool,
}

impl Staging {
    fn write(&mut self, rel: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileEntry { path: rel.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) });
        Ok(())
    }

    /// `stem.wgf1` plus the optional CSV and PGM renderings.
    fn field(&mut self, stem: &str, w: &WignerField) -> CliResult<()> {
        self.write(&format!("{stem}.wgf1"), &encode_wgf1(w))?;
        if self.csv {
            self.write(&format!("{stem}.csv"), field_csv(w).as_bytes())?;
        }
        if self.pgm {
            let (image, sidecar) = field_pgm(w);
            self.write(&format!("{stem}.pgm"), &image)?;
            self.write(&format!("{stem}.pgm.txt"), sidecar.as_bytes())?;
        }
        Ok(())
    }
}

/// `--out`, then `output` from the config, then `$WAVELETON_OUT/<name>`, then `waveleton-out/<name>`.
pub fn output_dir(config: &RunConfig, flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = &config.output {
        return p.clone();
    }
    let root = std::env::var_os("WAVELETON_OUT").map_or_else(|| PathBuf::from("waveleton-out"), PathBuf::from);
    root.join(&config.name)
}

/// Runs a validated config and publishes its outputs at `out`.
///
/// An existing `out` is replaced only when it is empty or holds a previous manifest.
pub fn execute(config: &RunConfig, out: &Path) -> CliResult<RunManifest> {
    let started = chrono::Utc::now().to_rfc3339();
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let leaf = out.file_name().map_or_else(|| "run".into(), |n| n.to_string_lossy().into_owned());
    if out.exists() {
        let replaceable = out.is_dir()
            && (out.join(MANIFEST).is_file() || fs::read_dir(out).map_err(|e| CliError::io(out, e))?.next().is_none());
        if !replaceable {
            return Err(CliError::OutputExists(out.display().to_string()));
        }
    }
    fs::create_dir_all(&parent).map_err(|e| CliError::io(&parent, e))?;
    let root = parent.join(format!(".{leaf}.partial-{}", std::process::id()));
    if root.exists() {
        fs::remove_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
    }
    fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
    let mut staging = Staging { root: root.clone(), files: Vec::new(), csv: config.outputs.csv, pgm: config.outputs.pgm };
    let outcome = stage(config, &mut staging, started);
    let manifest = match outcome {
        Ok(m) => m,
        Err(e) => {
            let _ = fs::remove_dir_all(&root);
            return Err(e);
        }
    };
    if out.exists() {
        fs::remove_dir_all(out).map_err(|e| CliError::io(out, e))?;
    }
    fs::rename(&root, out).map_err(|e| CliError::io(out, e))?;
    Ok(manifest)
}

fn stage(config: &RunConfig, st: &mut Staging, started: String) -> CliResult<RunManifest> {
    let text = config.to_toml();
    st.write("config.toml", text.as_bytes())?;
    let summary = match config.scenario {
        ScenarioKind::Evolve => run_evolve(config, st)?,
        ScenarioKind::FockModel => run_fock(config, st)?,
        ScenarioKind::Galerkin => run_galerkin(config, st)?,
        ScenarioKind::Synthesize => run_synthesize(config, st)?,
        ScenarioKind::Analyze => run_analyze(config, st)?,
        ScenarioKind::Demo => unreachable!("demo configs are expanded at load time"),
    };
    let manifest = RunManifest {
        tool: "waveleton".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: config.scenario.name().into(),
        name: config.name.clone(),
        seed: config.seed,
        config_sha256: sha256_hex(text.as_bytes()),
        started,
        finished: chrono::Utc::now().to_rfc3339(),
        files: st.files.clone(),
        summary,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    let path = st.root.join(MANIFEST);
    fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
    Ok(manifest)
}

fn grid_of(config: &RunConfig) -> CliResult<PhaseSpaceGrid> {
    let g = &config.grid;
    Ok(PhaseSpaceGrid::new((g.q[0], g.q[1]), (g.p[0], g.p[1]), g.n_q, g.n_p)?)
}

fn state(config: &RunConfig, s: &StateConfig, grid: PhaseSpaceGrid) -> CliResult<WignerField> {
    let q = (grid.q_min, grid.q_max);
    let p_axis = (grid.p_min, grid.p_max, grid.n_p);
    let w = match s.kind {
        StateKind::Gaussian => WignerField::gaussian(
            grid,
            config.hbar,
            config.mass,
            s.q0,
            s.p0,
            s.sigma_q.expect("filled by validation"),
            s.sigma_p.expect("filled by validation"),
        )?,
        StateKind::Coherent => {
            let psi = WavefunctionGrid::coherent(q, grid.n_q, config.hbar, config.mass, s.omega, s.q0, s.p0)?;
            wigner_from_wavefunction(&psi, p_axis, config.hbar)?
        }
        StateKind::Cat => {
            let psi = WavefunctionGrid::even_cat(q, grid.n_q, config.hbar, config.mass, s.omega, s.q0)?;
            wigner_from_wavefunction(&psi, p_axis, config.hbar)?
        }
        StateKind::File => {
            let w = read_wgf1(s.path.as_deref().expect("checked by validation"), FieldKind::Distribution)?;
            if !w.grid.same_as(&grid) {
                return Err(waveleton::Error::GridMismatch("initial field file does not match [grid]".into()).into());
            }
            w
        }
    };
    Ok(w)
}

fn initial_field(config: &RunConfig, grid: PhaseSpaceGrid) -> CliResult<WignerField> {
    if config.ensemble.is_empty() {
        return state(config, &config.initial, grid);
    }
    let mut components = Vec::with_capacity(config.ensemble.len());
    for c in &config.ensemble {
        components.push((c.weight, Component::Field(state(config, c, grid)?)));
    }
    Ok(mix(&EnsembleSpec { components, p_axis: None })?)
}

fn phase_space_rhs(config: &RunConfig) -> CliResult<PhaseSpaceRhs> {
    Ok(match config.integrator.backend {
        Backend::FiniteDifference => PhaseSpaceRhs::finite_difference(),
        Backend::Wavelet => {
            let b = config.basis();
            PhaseSpaceRhs::wavelet(&WaveletBasis::new(config.family(), b.order)?)?
        }
    })
}

fn evolve_options(config: &RunConfig, w0: &WignerField, u: &PolynomialPotential) -> CliResult<EvolveOptions> {
    let rhs = phase_space_rhs(config)?;
    let kind = config.rhs_kind();
    let bound = stability_bound(w0, u, &kind, &rhs);
    let dt = config.integrator.dt.unwrap_or(if bound.is_finite() { bound } else { config.integrator.t_end.max(1.0) });
    Ok(EvolveOptions { t_end: config.integrator.t_end, dt, snapshot_stride: config.integrator.snapshot_stride, rhs })
}

fn relative_change(a: &WignerField, b: &WignerField) -> f64 {
    let mut d = b.values.clone();
    d -= &a.values;
    let base = a.values.iter().map(|v| v * v).sum::<f64>().sqrt();
    d.iter().map(|v| v * v).sum::<f64>().sqrt() / base
}

fn report_summary(r: &PatternReport, summary: &mut BTreeMap<String, Value>) {
    summary.insert("label".into(), json!(r.label.name()));
    summary.insert("participation_ratio".into(), json!(r.participation_ratio));
    summary.insert("top_mass".into(), json!(r.top_mass));
    summary.insert("shannon_entropy".into(), json!(r.shannon_entropy));
    summary.insert("negativity_volume".into(), json!(r.negativity_volume));
}

fn write_trajectory(st: &mut Staging, dir: &str, traj: &Trajectory) -> CliResult<()> {
    for (k, w) in traj.snapshots.iter().enumerate() {
        st.field(&format!("{dir}/snap_{k:04}"), w)?;
    }
    Ok(())
}

fn run_evolve(config: &RunConfig, st: &mut Staging) -> CliResult<BTreeMap<String, Value>> {
    let grid = grid_of(config)?;
    let w0 = initial_field(config, grid)?;
    let u = PolynomialPotential::new(config.potential.clone());
    let opts = evolve_options(config, &w0, &u)?;
    let kind = config.rhs_kind();
    let traj = evolve(&w0, &u, &kind, &opts)?;
    write_trajectory(st, "snapshots", &traj)?;

    let mut csv = String::from("time,mass,energy,negativity_volume,purity\n");
    for (k, w) in traj.snapshots.iter().enumerate() {
        let energy = traj.energy.as_ref().map_or_else(|| w.energy(&u), |e| e[k]);
        let neg = waveleton::pattern::negativity_volume(w);
        let _ = writeln!(csv, "{:.12e},{:.15e},{energy:.15e},{neg:.12e},{:.12e}", traj.times[k], traj.mass[k], w.purity());
    }
    st.write("conservation.csv", csv.as_bytes())?;

    let report = analyze_trajectory(&traj.snapshots, &traj.times, &config.thresholds.to_thresholds())?;
    let change = relative_change(&traj.snapshots[0], traj.last());
    let mut text = report.to_text();
    let _ = writeln!(text, "relative_change = {change:.12e}");
    st.write("report.txt", text.as_bytes())?;

    let mut summary = BTreeMap::new();
    summary.insert("steps".into(), json!(traj.steps));
    summary.insert("dt".into(), json!(traj.dt));
    summary.insert("snapshots".into(), json!(traj.snapshots.len()));
    summary.insert("mass_drift".into(), json!(traj.max_mass_drift()));
    summary.insert("relative_change".into(), json!(change));
    if let Some(e) = &traj.energy {
        let drift = e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max);
        summary.insert("energy_drift".into(), json!(drift));
    }
    report_summary(&report, &mut summary);
    Ok(summary)
}

fn run_fock(config: &RunConfig, st: &mut Staging) -> CliResult<BTreeMap<String, Value>> {
    let grid = grid_of(config)?;
    let fock = config.fock.as_ref().expect("checked by validation");
    let w0 = state(config, &config.initial, grid)?;
    let spec = FockModelSpec {
        u0: fock.u0,
        profile: PolynomialPotential::new(fock.profile.clone()),
        weights: fock.weights.clone(),
        initial: vec![w0.clone()],
    };
    // the tightest bound over levels: the top level has the steepest potential
    let top = spec.level_potential(fock.weights.len() - 1);
    let opts = evolve_options(config, &w0, &top)?;
    let run = run_fock_model(&spec, &opts)?;
    for (n, traj) in run.levels.iter().enumerate() {
        write_trajectory(st, &format!("levels/{n}"), traj)?;
    }
    let mut csv = String::from("time,mixed_mass\n");
    for (k, w) in run.mixed.iter().enumerate() {
        st.field(&format!("mixed/snap_{k:04}"), w)?;
        let _ = writeln!(csv, "{:.12e},{:.15e}", run.times[k], w.integral());
    }
    st.write("conservation.csv", csv.as_bytes())?;
    let report = analyze_trajectory(&run.mixed, &run.times, &config.thresholds.to_thresholds())?;
    st.write("report.txt", report.to_text().as_bytes())?;

    let mut summary = BTreeMap::new();
    summary.insert("levels".into(), json!(run.levels.len()));
    summary.insert("snapshots".into(), json!(run.times.len()));
    let drift = run.mixed.iter().map(|w| (w.integral() - 1.0).abs()).fold(0.0, f64::max);
    summary.insert("mixed_mass_drift".into(), json!(drift));
    report_summary(&report, &mut summary);
    Ok(summary)
}

fn run_galerkin(config: &RunConfig, st: &mut Staging) -> CliResult<BTreeMap<String, Value>> {
    let g = config.galerkin.as_ref().expect("filled by validation");
    let b = config.basis();
    let filters = build_filter_pair(config.family(), b.order)?;
    let mut history = Vec::new();
    let mut table = String::from("modes,unknowns,equations,condition,residual_norm,max_error\n");
    let mut worst = 0.0f64;
    let mut last = None;
    for &n in &g.modes {
        let bench = LiouvilleBenchmark {
            modes: n,
            time_modes: n,
            quad_nodes: g.quad_nodes,
            half_width: g.half_width,
            t_end: std::f64::consts::PI / g.omega,
            sigma_q: g.sigma_q,
            sigma_p: g.sigma_p,
            mass: config.mass,
            omega: g.omega,
        };
        let (catalog, system, solution) = bench.solve(filters.clone())?;
        let mid = g.quad_nodes / 2;
        let rec = reconstruct(&solution.coefficients, &catalog, 0, &[mid])?;
        let t = rec.times[0];
        let field = &rec.fields[0];
        let mut err = 0.0f64;
        for (i, &q) in rec.q_nodes.iter().enumerate() {
            for (j, &p) in rec.p_nodes.iter().enumerate() {
                err = err.max((field[[i, j]] - bench.exact(t, q, p)).abs());
            }
        }
        worst = worst.max(err);
        let _ = writeln!(
            table,
            "{n},{},{},{:.6e},{:.6e},{err:.6e}",
            system.unknowns, system.equations, solution.condition_estimate, solution.residual_norm
        );
        let h = 2.0 * g.half_width / g.quad_nodes as f64;
        let lo = -g.half_width - 0.5 * h;
        let grid = PhaseSpaceGrid::new((lo, lo + 2.0 * g.half_width), (lo, lo + 2.0 * g.half_width), g.quad_nodes, g.quad_nodes)?;
        let mut w = WignerField::new(grid, field.clone(), 0.0, config.mass, FieldKind::Distribution)?;
        w.time = t;
        st.field(&format!("fields/modes_{n:03}"), &w)?;
        history.push((n, field.iter().copied().collect::<Vec<f64>>()));
        last = Some((solution, catalog, mid));
    }
    st.write("galerkin.csv", table.as_bytes())?;
    let h = 2.0 * g.half_width / g.quad_nodes as f64;
    let cutoff = cutoff_check(&history, h * h, g.epsilon)?;
    st.write("cutoff.txt", cutoff.to_text().as_bytes())?;
    let (solution, catalog, mid) = last.expect("at least one resolution");
    let scales = decompose(&solution.coefficients, &catalog, 0, mid)?;
    st.write("scales.txt", scales.report().as_bytes())?;

    let mut summary = BTreeMap::new();
    summary.insert("resolutions".into(), json!(g.modes));
    summary.insert("max_error".into(), json!(worst));
    summary.insert("cutoff_differences".into(), json!(cutoff.differences));
    summary.insert("cutoff_monotone".into(), json!(cutoff.monotone));
    summary.insert("converged_at".into(), json!(cutoff.accepted));
    Ok(summary)
}

fn coefficient_matrix(config: &RunConfig) -> CliResult<CoefficientMatrix> {
    let s = config.synthesize.as_ref().expect("filled by validation");
    Ok(match s.structure {
        StructureChoice::Uniform => CoefficientMatrix::uniform(s.size, s.value)?,
        StructureChoice::Band => CoefficientMatrix::band(s.size, s.width, s.band_value, s.off_value, s.lower_triangular)?,
        StructureChoice::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            CoefficientMatrix::custom(Array2::from_shape_fn((s.size, s.size), |_| rng.random::<f64>()))?
        }
        StructureChoice::File => {
            let path = s.matrix.as_deref().expect("checked by validation");
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            let cm = if bytes.starts_with(b"WGF1") {
                CoefficientMatrix::from_wgf1(&bytes)?
            } else {
                CoefficientMatrix::from_csv(&String::from_utf8_lossy(&bytes))?
            };
            if cm.size() != s.size {
                return Err(waveleton::Error::ShapeMismatch(format!(
                    "matrix file is {}², synthesize.size is {}",
                    cm.size(),
                    s.size
                ))
                .into());
            }
            cm
        }
    })
}

/// Synthesised values as a pattern field on `[0, S]²`.
pub fn pattern_field(values: Array2<f64>) -> CliResult<WignerField> {
    let s = values.nrows() as f64;
    let grid = PhaseSpaceGrid::new((0.0, s), (0.0, s), values.nrows(), values.ncols())?;
    Ok(WignerField::new(grid, values, 0.0, 1.0, FieldKind::Pattern)?)
}

fn run_synthesize(config: &RunConfig, st: &mut Staging) -> CliResult<BTreeMap<String, Value>> {
    let s = config.synthesize.as_ref().expect("filled by validation");
    let depth = s.depth.expect("filled by validation");
    let filters = build_filter_pair(config.family(), config.basis().order)?;
    let cm = coefficient_matrix(config)?;
    st.write("coefficients.wgf1", &cm.to_wgf1())?;
    let field = pattern_field(synthesize_from_matrix(&cm, &filters, depth)?)?;
    st.field("field", &field)?;
    let t = config.thresholds.to_thresholds();
    let report = if s.frozen_snapshots >= 2 {
        let n = s.frozen_snapshots;
        let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        analyze_trajectory(&vec![field.clone(); n], &times, &t)?
    } else {
        analyze(&field, &t)?
    };
    st.write("report.txt", report.to_text().as_bytes())?;
    let mut summary = BTreeMap::new();
    summary.insert("size".into(), json!(s.size));
    summary.insert("depth".into(), json!(depth));
    report_summary(&report, &mut summary);
    Ok(summary)
}

fn run_analyze(config: &RunConfig, st: &mut Staging) -> CliResult<BTreeMap<String, Value>> {
    let a = config.analyze.as_ref().expect("checked by validation");
    let kind = match a.kind {
        FieldKindChoice::Distribution => FieldKind::Distribution,
        FieldKindChoice::Pattern => FieldKind::Pattern,
    };
    let mut named = Vec::with_capacity(a.inputs.len());
    for p in &a.inputs {
        let name = p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        named.push((name, read_wgf1(p, kind)?));
    }
    named.sort_by(|x, y| x.1.time.total_cmp(&y.1.time));
    let fields: Vec<WignerField> = named.iter().map(|(_, w)| w.clone()).collect();
    let t = config.thresholds.to_thresholds();
    let report = if fields.len() == 1 {
        analyze(&fields[0], &t)?
    } else {
        let times: Vec<f64> = fields.iter().map(|w| w.time).collect();
        analyze_trajectory(&fields, &times, &t)?
    };
    st.write("report.txt", report.to_text().as_bytes())?;
    let mut csv = format!("{}\n", PatternReport::CSV_HEADER);
    for (name, w) in &named {
        let _ = writeln!(csv, "{}", analyze(w, &t)?.csv_row(name));
    }
    st.write("fields.csv", csv.as_bytes())?;
    let mut summary = BTreeMap::new();
    summary.insert("inputs".into(), json!(a.inputs.len()));
    report_summary(&report, &mut summary);
    Ok(summary)
}
