//! Run configuration: one TOML document, top-level physics keys plus one table per concern.
//!
//! Loading fills every documented default in place, so the resolved config written next to
//! the run outputs is complete and its hash identifies the run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use waveleton::dynamics::{LindbladParams, RhsKind, Truncation};
use waveleton::pattern::Thresholds;
use waveleton::wavelet::{Family, MAX_ORDER};

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Evolve,
    FockModel,
    Galerkin,
    Synthesize,
    Analyze,
    Demo,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Evolve => "evolve",
            ScenarioKind::FockModel => "fock_model",
            ScenarioKind::Galerkin => "galerkin",
            ScenarioKind::Synthesize => "synthesize",
            ScenarioKind::Analyze => "analyze",
            ScenarioKind::Demo => "demo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    #[serde(default = "default_name")]
    pub name: String,
    /// Seeds the randomized coefficient fixtures; recorded in the manifest.
    #[serde(default)]
    pub seed: u64,
    /// Output directory; relative paths resolve against the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Preset name, only for `scenario = "demo"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo: Option<String>,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    /// Polynomial coefficients `c_k` of `U(q) = Σ c_k q^k`.
    #[serde(default)]
    pub potential: Vec<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub initial: StateConfig,
    /// Incoherent mixture replacing `initial` when non-empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ensemble: Vec<StateConfig>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub lindblad: LindbladConfig,
    /// Wavelet basis; the default depends on the scenario (see [`RunConfig::basis`]).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisConfig>,
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub galerkin: Option<GalerkinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesize: Option<SynthesizeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeConfig>,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn default_name() -> String {
    "run".into()
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub q: [f64; 2],
    pub p: [f64; 2],
    pub n_q: usize,
    pub n_p: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { q: [-8.0, 8.0], p: [-8.0, 8.0], n_q: 128, n_p: 128 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Normalised Gaussian in phase space; widths default to the oscillator ground state.
    #[default]
    Gaussian,
    /// Wigner transform of the displaced oscillator ground state.
    Coherent,
    /// Wigner transform of the even cat `ψ_{+q0} + ψ_{−q0}`.
    Cat,
    /// A WGF1 file on the configured grid.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(default)]
    pub kind: StateKind,
    /// Mixture weight; only meaningful inside `[[ensemble]]`.
    #[serde(default = "one")]
    pub weight: f64,
    #[serde(default)]
    pub q0: f64,
    #[serde(default)]
    pub p0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_p: Option<f64>,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for StateConfig {
    fn default() -> Self {
        Self { kind: StateKind::Gaussian, weight: 1.0, q0: 0.0, p0: 0.0, sigma_q: None, sigma_p: None, omega: 1.0, path: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RhsChoice {
    #[default]
    Moyal,
    Liouville,
    Lindblad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Wavelet,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default)]
    pub rhs: RhsChoice,
    /// Moyal order `ℓ_max`; absent means the exact termination order of the potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default = "one")]
    pub t_end: f64,
    /// Absent means the pre-flight stability bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub backend: Backend,
}

fn default_stride() -> usize {
    100
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rhs: RhsChoice::Moyal, truncation: None, t_end: 1.0, dt: None, snapshot_stride: 100, backend: Backend::Wavelet }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub diffusion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub family: String,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub negativity: f64,
    pub localization: f64,
    pub stability: f64,
    pub participation: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        Self { negativity: t.negativity, localization: t.localization, stability: t.stability, participation: t.participation }
    }
}

impl ThresholdConfig {
    pub fn to_thresholds(&self) -> Thresholds {
        Thresholds {
            negativity: self.negativity,
            localization: self.localization,
            stability: self.stability,
            participation: self.participation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockConfig {
    #[serde(default = "one")]
    pub u0: f64,
    /// Coefficients of the profile `g(x)`; level `n` sees `U0 · n · g(x)`.
    pub profile: Vec<f64>,
    /// Amplitudes `w_n` for `n = 0..=N_max`, with `Σ w_n² = 1`.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalerkinConfig {
    /// Resolutions `N` per axis for the cutoff sequence.
    #[serde(default = "default_modes")]
    pub modes: Vec<usize>,
    #[serde(default = "default_quad_nodes")]
    pub quad_nodes: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_sigma_q")]
    pub sigma_q: f64,
    #[serde(default = "default_sigma_p")]
    pub sigma_p: f64,
    #[serde(default = "one")]
    pub omega: f64,
    /// Cutoff tolerance on `‖W^{N+1} − W^N‖`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_modes() -> Vec<usize> {
    vec![4, 8, 16]
}
fn default_quad_nodes() -> usize {
    512
}
fn default_half_width() -> f64 {
    5.0
}
fn default_sigma_q() -> f64 {
    1.3
}
fn default_sigma_p() -> f64 {
    1.1
}
fn default_epsilon() -> f64 {
    1e-2
}

impl Default for GalerkinConfig {
    fn default() -> Self {
        Self {
            modes: default_modes(),
            quad_nodes: default_quad_nodes(),
            half_width: default_half_width(),
            sigma_q: default_sigma_q(),
            sigma_p: default_sigma_p(),
            omega: 1.0,
            epsilon: default_epsilon(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StructureChoice {
    #[default]
    Uniform,
    Band,
    /// Independent uniform draws in `[0, 1)` from `seed`.
    Random,
    /// A CSV or WGF1 matrix from `matrix`.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeConfig {
    #[serde(default = "default_size")]
    pub size: usize,
    #[serde(default)]
    pub structure: StructureChoice,
    #[serde(default = "one")]
    pub value: f64,
    #[serde(default = "default_band_value")]
    pub band_value: f64,
    #[serde(default = "one")]
    pub off_value: f64,
    #[serde(default = "default_width")]
    pub width: usize,
    #[serde(default)]
    pub lower_triangular: bool,
    /// Dilation cap; absent means the full depth `log2(size)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    /// With two or more, the field is analysed as that many identical snapshots over unit time.
    #[serde(default)]
    pub frozen_snapshots: usize,
}

fn default_size() -> usize {
    512
}
fn default_band_value() -> f64 {
    5.0
}
fn default_width() -> usize {
    waveleton::galerkin::DEFAULT_BAND_WIDTH
}

impl Default for SynthesizeConfig {
    fn default() -> Self {
        Self {
            size: default_size(),
            structure: StructureChoice::Uniform,
            value: 1.0,
            band_value: default_band_value(),
            off_value: 1.0,
            width: default_width(),
            lower_triangular: false,
            depth: None,
            matrix: None,
            frozen_snapshots: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FieldKindChoice {
    #[default]
    Distribution,
    Pattern,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// WGF1 snapshots; two or more are analysed as a trajectory ordered by their times.
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub kind: FieldKindChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub csv: bool,
    #[serde(default = "yes")]
    pub pgm: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: false, pgm: true }
    }
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Validation { key: key.into(), reason: reason.into() }
}

fn finite(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, "must be finite"))
    }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    finite(key, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(key, "must be positive"))
    }
}

fn non_negative(key: &str, v: f64) -> Result<(), CliError> {
    finite(key, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(key, "must be non-negative"))
    }
}

fn dyadic(key: &str, n: usize) -> Result<(), CliError> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(invalid(key, "must be a power of two"))
    }
}

fn existing(key: &str, path: &Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) if p.is_file() => Ok(()),
        Some(p) => Err(invalid(key, format!("file {} does not exist", p.display()))),
        None => Err(invalid(key, "is required")),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl RunConfig {
    /// Parses TOML text; syntax and schema errors carry the offending line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialise")
    }

    /// Basis for the scenario: daubechies-3 stencils for dynamics, symmlet-8 otherwise.
    pub fn basis(&self) -> BasisConfig {
        self.basis.clone().unwrap_or_else(|| match self.scenario {
            ScenarioKind::Evolve | ScenarioKind::FockModel => BasisConfig { family: "daubechies".into(), order: 3 },
            _ => BasisConfig { family: "symmlet".into(), order: 8 },
        })
    }

    pub fn family(&self) -> Family {
        self.basis().family.parse().expect("validated")
    }

    pub fn rhs_kind(&self) -> RhsKind {
        let t = self.integrator.truncation.map_or(Truncation::Auto, Truncation::Terms);
        match self.integrator.rhs {
            RhsChoice::Liouville => RhsKind::Liouville,
            RhsChoice::Moyal => RhsKind::Moyal(t),
            RhsChoice::Lindblad => RhsKind::Lindblad(
                t,
                LindbladParams { gamma: self.lindblad.gamma, diffusion: self.lindblad.diffusion },
            ),
        }
    }

    /// Resolves relative input paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p.as_mut() {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.initial.path);
        self.ensemble.iter_mut().for_each(|c| fix(&mut c.path));
        if let Some(s) = self.synthesize.as_mut() {
            fix(&mut s.matrix);
        }
        if let Some(a) = self.analyze.as_mut() {
            for p in a.inputs.iter_mut().filter(|p| p.is_relative()) {
                *p = base.join(&*p);
            }
        }
    }

    /// Expands a demo preset, keeping the caller's `name`, `seed` and `output` if given.
    pub fn expand_demo(self) -> Result<Self, CliError> {
        if self.scenario != ScenarioKind::Demo {
            return Ok(self);
        }
        let name = self.demo.clone().ok_or_else(|| invalid("demo", "is required for scenario = \"demo\""))?;
        let mut preset = presets::preset(&name)?;
        if self.name != default_name() {
            preset.name = self.name;
        }
        if self.seed != 0 {
            preset.seed = self.seed;
        }
        if self.output.is_some() {
            preset.output = self.output;
        }
        Ok(preset)
    }

    /// Checks every field and fills the documented defaults in place.
    pub fn validate(&mut self) -> Result<(), CliError> {
        if self.scenario == ScenarioKind::Demo {
            return Err(invalid("scenario", "demo configs must be expanded before validation"));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid("name", "must be a non-empty file name"));
        }
        positive("hbar", self.hbar).or_else(|e| if self.hbar == 0.0 { Ok(()) } else { Err(e) })?;
        positive("mass", self.mass)?;
        for (k, c) in self.potential.iter().enumerate() {
            finite(&format!("potential[{k}]"), *c)?;
        }
        let basis = self.basis();
        let family: Family = basis.family.parse().map_err(|_| invalid("basis.family", "must be haar, daubechies or symmlet"))?;
        if family != Family::Haar && !(1..=MAX_ORDER).contains(&basis.order) {
            return Err(invalid("basis.order", format!("must lie in 1..={MAX_ORDER}")));
        }
        let t = &self.thresholds;
        for (k, v) in [
            ("thresholds.negativity", t.negativity),
            ("thresholds.localization", t.localization),
            ("thresholds.stability", t.stability),
            ("thresholds.participation", t.participation),
        ] {
            non_negative(k, v)?;
        }
        match self.scenario {
            ScenarioKind::Evolve => {
                self.validate_grid()?;
                self.validate_integrator()?;
                if self.ensemble.is_empty() {
                    if self.initial.weight != 1.0 {
                        return Err(invalid("initial.weight", "only applies to ensemble components"));
                    }
                    let mut s = self.initial.clone();
                    self.validate_state("initial", &mut s)?;
                    self.initial = s;
                } else {
                    let mut comps = std::mem::take(&mut self.ensemble);
                    let mut total = 0.0;
                    for (k, c) in comps.iter_mut().enumerate() {
                        non_negative(&format!("ensemble[{k}].weight"), c.weight)?;
                        total += c.weight;
                        self.validate_state(&format!("ensemble[{k}]"), c)?;
                    }
                    self.ensemble = comps;
                    if (total - 1.0).abs() > 1e-12 {
                        return Err(invalid("ensemble", format!("weights sum to {total}, expected 1")));
                    }
                }
            }
            ScenarioKind::FockModel => {
                self.validate_grid()?;
                self.validate_integrator()?;
                if self.integrator.rhs != RhsChoice::Moyal {
                    return Err(invalid("integrator.rhs", "the Fock model evolves every level with the Moyal equation"));
                }
                let mut s = self.initial.clone();
                self.validate_state("initial", &mut s)?;
                self.initial = s;
                let f = self.fock.as_ref().ok_or_else(|| invalid("fock", "section is required"))?;
                finite("fock.u0", f.u0)?;
                for (k, c) in f.profile.iter().enumerate() {
                    finite(&format!("fock.profile[{k}]"), *c)?;
                }
                if f.weights.is_empty() {
                    return Err(invalid("fock.weights", "needs at least one level"));
                }
                let total: f64 = f.weights.iter().map(|w| w * w).sum();
                if !total.is_finite() || (total - 1.0).abs() > 1e-12 {
                    return Err(invalid("fock.weights", format!("squared amplitudes sum to {total}, expected 1")));
                }
            }
            ScenarioKind::Galerkin => {
                let g = self.galerkin.get_or_insert_with(GalerkinConfig::default).clone();
                if g.modes.is_empty() {
                    return Err(invalid("galerkin.modes", "needs at least one resolution"));
                }
                for (k, &n) in g.modes.iter().enumerate() {
                    dyadic(&format!("galerkin.modes[{k}]"), n)?;
                    if n >= g.quad_nodes {
                        return Err(invalid(format!("galerkin.modes[{k}]"), "must be below galerkin.quad_nodes"));
                    }
                }
                if g.modes.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("galerkin.modes", "must increase"));
                }
                dyadic("galerkin.quad_nodes", g.quad_nodes)?;
                positive("galerkin.half_width", g.half_width)?;
                positive("galerkin.sigma_q", g.sigma_q)?;
                positive("galerkin.sigma_p", g.sigma_p)?;
                positive("galerkin.omega", g.omega)?;
                non_negative("galerkin.epsilon", g.epsilon)?;
            }
            ScenarioKind::Synthesize => {
                let s = self.synthesize.get_or_insert_with(SynthesizeConfig::default);
                dyadic("synthesize.size", s.size)?;
                let max = s.size.trailing_zeros() as usize;
                let depth = *s.depth.get_or_insert(max);
                if !(1..=max).contains(&depth) {
                    return Err(invalid("synthesize.depth", format!("must lie in 1..={max}")));
                }
                for (k, v) in [("synthesize.value", s.value), ("synthesize.band_value", s.band_value), ("synthesize.off_value", s.off_value)] {
                    finite(k, v)?;
                }
                if s.structure == StructureChoice::Band && s.width == 0 {
                    return Err(invalid("synthesize.width", "must be positive"));
                }
                if s.structure == StructureChoice::File {
                    existing("synthesize.matrix", &s.matrix)?;
                }
                if s.frozen_snapshots == 1 {
                    return Err(invalid("synthesize.frozen_snapshots", "must be 0 or at least 2"));
                }
            }
            ScenarioKind::Analyze => {
                let a = self.analyze.as_ref().ok_or_else(|| invalid("analyze", "section is required"))?;
                if a.inputs.is_empty() {
                    return Err(invalid("analyze.inputs", "needs at least one file"));
                }
                for (k, p) in a.inputs.iter().enumerate() {
                    existing(&format!("analyze.inputs[{k}]"), &Some(p.clone()))?;
                }
            }
            ScenarioKind::Demo => unreachable!("rejected above"),
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<(), CliError> {
        let g = &self.grid;
        for (k, v) in [("grid.q", g.q), ("grid.p", g.p)] {
            finite(k, v[0])?;
            finite(k, v[1])?;
            if v[1] <= v[0] {
                return Err(invalid(k, "must be an increasing pair"));
            }
        }
        dyadic("grid.n_q", g.n_q)?;
        dyadic("grid.n_p", g.n_p)
    }

    fn validate_integrator(&self) -> Result<(), CliError> {
        let i = &self.integrator;
        non_negative("integrator.t_end", i.t_end)?;
        if let Some(dt) = i.dt {
            positive("integrator.dt", dt)?;
        }
        if i.snapshot_stride == 0 {
            return Err(invalid("integrator.snapshot_stride", "must be at least 1"));
        }
        non_negative("lindblad.gamma", self.lindblad.gamma)?;
        non_negative("lindblad.diffusion", self.lindblad.diffusion)?;
        if i.rhs != RhsChoice::Lindblad && (self.lindblad.gamma != 0.0 || self.lindblad.diffusion != 0.0) {
            return Err(invalid("lindblad", "is only used with integrator.rhs = \"lindblad\""));
        }
        Ok(())
    }

    fn validate_state(&self, key: &str, s: &mut StateConfig) -> Result<(), CliError> {
        finite(&format!("{key}.q0"), s.q0)?;
        finite(&format!("{key}.p0"), s.p0)?;
        positive(&format!("{key}.omega"), s.omega)?;
        match s.kind {
            StateKind::Gaussian => {
                // oscillator ground-state widths, or unit widths in the classical limit
                let (dq, dp) = if self.hbar > 0.0 {
                    ((self.hbar / (2.0 * self.mass * s.omega)).sqrt(), (self.hbar * self.mass * s.omega / 2.0).sqrt())
                } else {
                    (1.0, 1.0)
                };
                positive(&format!("{key}.sigma_q"), *s.sigma_q.get_or_insert(dq))?;
                positive(&format!("{key}.sigma_p"), *s.sigma_p.get_or_insert(dp))?;
            }
            StateKind::Coherent | StateKind::Cat => {
                if self.hbar == 0.0 {
                    return Err(invalid(format!("{key}.kind"), "wavefunction states need hbar > 0"));
                }
                if self.grid.n_q < 8 {
                    return Err(invalid("grid.n_q", "wavefunction states need at least 8 points"));
                }
            }
            StateKind::File => existing(&format!("{key}.path"), &s.path)?,
        }
        Ok(())
    }
}

/// Reads, expands, resolves and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut config = RunConfig::parse(&text)?.expand_demo()?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    config.validate()?;
    Ok(config)
}
