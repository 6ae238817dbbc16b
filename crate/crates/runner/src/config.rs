//! Scenario configuration: TOML with strict key validation (unknown keys are
//! hard errors with a nearest-match suggestion), mandatory seeds, and
//! semantic checks that name the offending key.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use lte_core::hydro::{Boundary, EndCondition, HydroScenario, InitialData, OnsagerLaw};
use lte_core::models::{
    DoubleWellEntropyModel, FreeFermionChainModel, ParamagnetModel, QuadraticModel,
    SpinChainEdModel,
};
use lte_core::thermo::{Entropy, Pressure};

/// Configuration failure; the binary maps it to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub hydro: HydroConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: String,
    /// paramagnet level splitting
    pub epsilon: Option<f64>,
    /// free-fermion / spin-chain hopping or exchange
    pub hopping: Option<f64>,
    pub exchange: Option<f64>,
    pub anisotropy: Option<f64>,
    /// spin-chain sites
    pub sites: Option<usize>,
    /// double-well tabulation points
    pub points: Option<usize>,
    /// quadratic domain half width
    pub half_width: Option<f64>,
}

fn d_mode() -> String {
    "steady".into()
}
fn d_cells() -> usize {
    64
}
fn d_one() -> f64 {
    1.0
}
fn d_onsager() -> String {
    "constant".into()
}
fn d_boundary() -> String {
    "reservoir".into()
}
fn d_initial() -> String {
    "theta-uniform".into()
}
fn d_two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydroConfig {
    #[serde(default = "d_mode")]
    pub mode: String,
    #[serde(default = "d_cells")]
    pub cells: usize,
    #[serde(default = "d_one")]
    pub mobility: f64,
    #[serde(default = "d_onsager")]
    pub onsager: String,
    #[serde(default = "d_boundary")]
    pub boundary: String,
    pub theta_left: Option<Vec<f64>>,
    pub theta_right: Option<Vec<f64>>,
    #[serde(default = "d_initial")]
    pub initial: String,
    pub initial_theta: Option<Vec<f64>>,
    pub initial_q: Option<Vec<f64>>,
    pub mean: Option<Vec<f64>>,
    pub amplitude: Option<Vec<f64>>,
    pub wavenumber: Option<usize>,
    pub step_left: Option<Vec<f64>>,
    pub step_right: Option<Vec<f64>>,
    #[serde(default = "d_one")]
    pub t_final: f64,
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    #[serde(default = "d_two")]
    pub scaling_exponent: f64,
}

impl Default for HydroConfig {
    fn default() -> Self {
        HydroConfig {
            mode: "steady".into(),
            cells: 64,
            mobility: 1.0,
            onsager: "constant".into(),
            boundary: "reservoir".into(),
            theta_left: None,
            theta_right: None,
            initial: "theta-uniform".into(),
            initial_theta: None,
            initial_q: None,
            mean: None,
            amplitude: None,
            wavenumber: None,
            step_left: None,
            step_right: None,
            t_final: 1.0,
            checkpoints: vec![],
            scaling_exponent: 2.0,
        }
    }
}

fn d_points() -> Vec<(f64, f64)> {
    vec![(0.5, 1.0)]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    /// (x, t) probe points.
    #[serde(default = "d_points")]
    pub points: Vec<(f64, f64)>,
    #[serde(default)]
    pub meso: MesoConfig,
    #[serde(default)]
    pub quantum: QuantumConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            points: vec![(0.5, 1.0)],
            meso: MesoConfig::default(),
            quantum: QuantumConfig::default(),
            probe: ProbeConfig::default(),
        }
    }
}

fn d_samples() -> u64 {
    20_000
}
fn d_eps() -> Vec<f64> {
    vec![0.2, 0.1]
}
fn d_grid_cells() -> usize {
    400
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MesoConfig {
    #[serde(default = "d_samples")]
    pub samples: u64,
    #[serde(default = "d_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "d_grid_cells")]
    pub grid_cells: usize,
}

impl Default for MesoConfig {
    fn default() -> Self {
        MesoConfig { samples: 20_000, eps: vec![0.2, 0.1], grid_cells: 400 }
    }
}

fn d_sites() -> Vec<usize> {
    vec![200, 400]
}
fn d_window() -> usize {
    11
}
fn d_kms_sites() -> usize {
    4
}
fn d_kms_taus() -> Vec<f64> {
    vec![0.0, 0.7, 2.3]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumConfig {
    #[serde(default = "d_sites")]
    pub sites: Vec<usize>,
    #[serde(default = "d_window")]
    pub window: usize,
    #[serde(default = "d_kms_sites")]
    pub kms_sites: usize,
    #[serde(default = "d_kms_taus")]
    pub kms_taus: Vec<f64>,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        QuantumConfig { sites: vec![200, 400], window: 11, kms_sites: 4, kms_taus: vec![0.0, 0.7, 2.3] }
    }
}

fn d_tau_max() -> f64 {
    30.0
}
fn d_probe_points() -> usize {
    61
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default = "d_one")]
    pub omega0: f64,
    #[serde(default = "d_one")]
    pub gamma0: f64,
    #[serde(default = "d_tau_max")]
    pub tau_max: f64,
    #[serde(default = "d_probe_points")]
    pub points: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { omega0: 1.0, gamma0: 1.0, tau_max: 30.0, points: 61 }
    }
}

fn d_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "d_dir")]
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

/// Allowed keys per table path for the strict pre-validation walk.
fn allowed_keys(path: &str) -> Option<&'static [&'static str]> {
    match path {
        "" => Some(&["seed", "model", "hydro", "checks", "output"]),
        "model" => Some(&[
            "kind", "epsilon", "hopping", "exchange", "anisotropy", "sites", "points",
            "half_width",
        ]),
        "hydro" => Some(&[
            "mode", "cells", "mobility", "onsager", "boundary", "theta_left", "theta_right",
            "initial", "initial_theta", "initial_q", "mean", "amplitude", "wavenumber",
            "step_left", "step_right", "t_final", "checkpoints", "scaling_exponent",
        ]),
        "checks" => Some(&["points", "meso", "quantum", "probe"]),
        "checks.meso" => Some(&["samples", "eps", "grid_cells"]),
        "checks.quantum" => Some(&["sites", "window", "kms_sites", "kms_taus"]),
        "checks.probe" => Some(&["omega0", "gamma0", "tau_max", "points"]),
        "output" => Some(&["dir"]),
        _ => None,
    }
}

fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let cost = if ca == cb { 0 } else { 1 };
            cur.push((prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

fn validate_keys(table: &toml::Table, path: &str) -> ConfigResult<()> {
    let allowed = match allowed_keys(path) {
        Some(a) => a,
        None => return Ok(()),
    };
    for (key, value) in table {
        if !allowed.contains(&key.as_str()) {
            let suggestion = allowed
                .iter()
                .map(|cand| (levenshtein(key, cand), cand))
                .min()
                .filter(|(d, _)| *d <= 3)
                .map(|(_, c)| format!("; did you mean `{c}`?"))
                .unwrap_or_default();
            let where_ = if path.is_empty() { String::new() } else { format!(" in [{path}]") };
            return err(format!("unknown key `{key}`{where_}{suggestion}"));
        }
        if let toml::Value::Table(sub) = value {
            let sub_path =
                if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
            validate_keys(sub, &sub_path)?;
        }
    }
    Ok(())
}

impl ScenarioConfig {
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> ConfigResult<Self> {
        let value: toml::Table = text
            .parse()
            .map_err(|e| ConfigError(format!("TOML syntax: {e}")))?;
        if !value.contains_key("seed") {
            return err("`seed` is mandatory (runs must be reproducible; no wall-clock seeding)");
        }
        validate_keys(&value, "")?;
        let cfg: ScenarioConfig = toml::Value::Table(value)
            .try_into()
            .map_err(|e| ConfigError(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    fn validate(&self) -> ConfigResult<()> {
        let dim = self.model_dim()?;
        // the microscopic models read theta_1 as an inverse temperature; the
        // toy entropies (quadratic, double-well) have control spaces that
        // pass through zero
        let beta_like = matches!(self.model.kind.as_str(), "paramagnet" | "free-fermion" | "spin-chain");
        let check_theta = |name: &str, theta: &Option<Vec<f64>>| -> ConfigResult<()> {
            if let Some(th) = theta {
                if th.len() != dim {
                    return err(format!(
                        "hydro.{name} has {} components but the model carries {dim}",
                        th.len()
                    ));
                }
                if !th.iter().all(|v| v.is_finite()) {
                    return err(format!("hydro.{name} must be finite"));
                }
                if beta_like && th[0] <= 0.0 {
                    return err(format!(
                        "hydro.{name}[0] = {} must be a positive inverse temperature",
                        th[0]
                    ));
                }
            }
            Ok(())
        };
        check_theta("theta_left", &self.hydro.theta_left)?;
        check_theta("theta_right", &self.hydro.theta_right)?;
        check_theta("initial_theta", &self.hydro.initial_theta)?;
        match self.hydro.mode.as_str() {
            "steady" | "transient" => {}
            other => return err(format!("hydro.mode `{other}` (expected steady | transient)")),
        }
        match self.hydro.onsager.as_str() {
            "constant" | "theta1" => {}
            other => return err(format!("hydro.onsager `{other}` (expected constant | theta1)")),
        }
        if self.hydro.mobility <= 0.0 {
            return err(format!("hydro.mobility = {} must be positive", self.hydro.mobility));
        }
        if self.hydro.cells < 2 {
            return err("hydro.cells must be at least 2");
        }
        for (i, &(x, t)) in self.checks.points.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return err(format!("checks.points[{i}].x = {x} outside [0, 1]"));
            }
            if t < 0.0 || t > self.hydro.t_final + 1e-12 {
                return err(format!(
                    "checks.points[{i}].t = {t} outside the run horizon [0, {}]",
                    self.hydro.t_final
                ));
            }
        }
        if self.checks.meso.samples < 1000 {
            return err("checks.meso.samples must be at least 1000");
        }
        let h = 1.0 / self.checks.meso.grid_cells as f64;
        for &e in &self.checks.meso.eps {
            if e < 10.0 * h {
                return err(format!(
                    "checks.meso.eps value {e} below the resolution floor 10/grid_cells = {}",
                    10.0 * h
                ));
            }
        }
        if self.checks.quantum.window.is_multiple_of(2) {
            return err("checks.quantum.window must be odd");
        }
        if self.checks.probe.tau_max <= 0.0 || self.checks.probe.points < 2 {
            return err("checks.probe needs tau_max > 0 and points >= 2");
        }
        Ok(())
    }

    fn model_dim(&self) -> ConfigResult<usize> {
        Ok(match self.model.kind.as_str() {
            "paramagnet" | "quadratic" | "double-well" => 1,
            "free-fermion" | "spin-chain" => 2,
            other => {
                return err(format!(
                    "model.kind `{other}` (expected paramagnet | quadratic | double-well | \
                     free-fermion | spin-chain)"
                ))
            }
        })
    }

    pub fn build_model(&self) -> ConfigResult<ModelHandle> {
        match self.model.kind.as_str() {
            "paramagnet" => {
                let eps = self.model.epsilon.unwrap_or(1.0);
                if eps <= 0.0 {
                    return err(format!("model.epsilon = {eps} must be positive"));
                }
                Ok(ModelHandle::Paramagnet(ParamagnetModel::new(eps)))
            }
            "quadratic" => {
                let hw = self.model.half_width.unwrap_or(3.0);
                Ok(ModelHandle::Quadratic(QuadraticModel { half_width: hw }))
            }
            "double-well" => {
                Ok(ModelHandle::DoubleWell(DoubleWellEntropyModel::new(
                    self.model.points.unwrap_or(401),
                )))
            }
            "free-fermion" => {
                let j = self.model.hopping.unwrap_or(1.0);
                if j <= 0.0 {
                    return err(format!("model.hopping = {j} must be positive"));
                }
                Ok(ModelHandle::FreeFermion(FreeFermionChainModel::new(j)))
            }
            "spin-chain" => {
                let sites = self.model.sites.unwrap_or(8);
                let j = self.model.exchange.unwrap_or(1.0);
                let delta = self.model.anisotropy.unwrap_or(0.0);
                SpinChainEdModel::new(sites, j, delta)
                    .map(ModelHandle::SpinChain)
                    .map_err(|e| ConfigError(format!("model: {e}")))
            }
            other => err(format!("model.kind `{other}`")),
        }
    }

    pub fn onsager(&self) -> OnsagerLaw {
        match self.hydro.onsager.as_str() {
            "theta1" => OnsagerLaw::Theta1Proportional { mobility: self.hydro.mobility },
            _ => OnsagerLaw::Constant { mobility: self.hydro.mobility },
        }
    }

    pub fn boundary(&self, dim: usize) -> ConfigResult<Boundary> {
        match self.hydro.boundary.as_str() {
            "periodic" => Ok(Boundary::Periodic),
            "no-flux" => Ok(Boundary::Ends {
                left: EndCondition::NoFlux,
                right: EndCondition::NoFlux,
            }),
            "reservoir" => {
                let default = || vec![1.0; dim];
                Ok(Boundary::Ends {
                    left: EndCondition::Reservoir(
                        self.hydro.theta_left.clone().unwrap_or_else(default),
                    ),
                    right: EndCondition::Reservoir(
                        self.hydro.theta_right.clone().unwrap_or_else(default),
                    ),
                })
            }
            other => err(format!(
                "hydro.boundary `{other}` (expected reservoir | no-flux | periodic)"
            )),
        }
    }

    pub fn initial(&self, dim: usize) -> ConfigResult<InitialData> {
        let need = |opt: &Option<Vec<f64>>, key: &str| -> ConfigResult<Vec<f64>> {
            match opt {
                Some(v) if v.len() == dim => Ok(v.clone()),
                Some(v) => err(format!("hydro.{key} has {} components, model needs {dim}", v.len())),
                None => err(format!("hydro.initial = `{}` requires hydro.{key}", self.hydro.initial)),
            }
        };
        match self.hydro.initial.as_str() {
            "uniform" => Ok(InitialData::Uniform { q: need(&self.hydro.initial_q, "initial_q")? }),
            "theta-uniform" => Ok(InitialData::ThetaUniform {
                theta: self.hydro.initial_theta.clone().unwrap_or_else(|| vec![1.0; dim]),
            }),
            "sine-mode" => Ok(InitialData::SineMode {
                mean: need(&self.hydro.mean, "mean")?,
                amplitude: need(&self.hydro.amplitude, "amplitude")?,
                wavenumber: self.hydro.wavenumber.unwrap_or(1),
            }),
            "step" => Ok(InitialData::Step {
                left: need(&self.hydro.step_left, "step_left")?,
                right: need(&self.hydro.step_right, "step_right")?,
                split: 0.5,
            }),
            "theta-linear" => {
                let (a, b) = match (&self.hydro.theta_left, &self.hydro.theta_right) {
                    (Some(a), Some(b)) => (a.clone(), b.clone()),
                    _ => return err("hydro.initial = `theta-linear` needs theta_left/theta_right"),
                };
                Ok(InitialData::ThetaLinear { from: a, to: b })
            }
            other => err(format!(
                "hydro.initial `{other}` (expected uniform | theta-uniform | sine-mode | step | theta-linear)"
            )),
        }
    }

    pub fn hydro_scenario(&self, model: &ModelHandle) -> ConfigResult<HydroScenario> {
        let entropy = model.entropy().ok_or_else(|| {
            ConfigError(format!(
                "model `{}` exposes no macroscopic entropy surface and cannot drive a hydro \
                 scenario; it serves the finite-volume quantum checks",
                self.model.kind
            ))
        })?;
        let dim = model.dim();
        Ok(HydroScenario {
            entropy,
            pressure: model.pressure(),
            onsager: self.onsager(),
            cells: self.hydro.cells,
            domain_length: 1.0,
            boundary: self.boundary(dim)?,
            initial: self.initial(dim)?,
            scaling_exponent: self.hydro.scaling_exponent,
            t_final: self.hydro.t_final,
            checkpoints: self.hydro.checkpoints.clone(),
        })
    }
}

/// A constructed catalog model with its thermodynamic surfaces.
pub enum ModelHandle {
    Paramagnet(ParamagnetModel),
    Quadratic(QuadraticModel),
    DoubleWell(DoubleWellEntropyModel),
    FreeFermion(FreeFermionChainModel),
    SpinChain(SpinChainEdModel),
}

impl ModelHandle {
    pub fn name(&self) -> &'static str {
        match self {
            ModelHandle::Paramagnet(_) => "paramagnet",
            ModelHandle::Quadratic(_) => "quadratic",
            ModelHandle::DoubleWell(_) => "double-well",
            ModelHandle::FreeFermion(_) => "free-fermion",
            ModelHandle::SpinChain(_) => "spin-chain",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelHandle::FreeFermion(_) | ModelHandle::SpinChain(_) => 2,
            _ => 1,
        }
    }

    pub fn entropy(&self) -> Option<Arc<dyn Entropy>> {
        match self {
            ModelHandle::Paramagnet(m) => Some(Arc::new(m.entropy())),
            ModelHandle::Quadratic(m) => Some(Arc::new(m.entropy())),
            ModelHandle::DoubleWell(m) => m.entropy().ok().map(|e| Arc::new(e) as _),
            ModelHandle::FreeFermion(m) => Some(Arc::new(m.entropy(1e-10))),
            ModelHandle::SpinChain(_) => None,
        }
    }

    pub fn pressure(&self) -> Arc<dyn Pressure> {
        match self {
            ModelHandle::Paramagnet(m) => Arc::new(m.pressure()),
            ModelHandle::Quadratic(m) => Arc::new(m.pressure()),
            ModelHandle::DoubleWell(m) => Arc::new(
                m.tabulated_pressure(501, 2.5).expect("double-well tabulation is well posed"),
            ),
            ModelHandle::FreeFermion(m) => Arc::new(m.pressure(1e-10)),
            ModelHandle::SpinChain(_) => unreachable!(
                "spin-chain scenarios are rejected before a pressure surface is requested"
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 42

[model]
kind = "paramagnet"

[hydro]
mode = "steady"
cells = 64
theta_left = [0.5]
theta_right = [1.5]
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = ScenarioConfig::from_str(MINIMAL).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.checks.meso.grid_cells, 400);
        assert_eq!(cfg.output.dir, "out");
        assert_eq!(cfg.hydro.mobility, 1.0);
    }

    #[test]
    fn unknown_key_suggests_fix() {
        let bad = MINIMAL.replace("[model]", "[modle]");
        let e = ScenarioConfig::from_str(&bad).unwrap_err();
        assert!(e.0.contains("unknown key `modle`"), "{e}");
        assert!(e.0.contains("did you mean `model`"), "{e}");
    }

    #[test]
    fn nested_unknown_key_caught() {
        let bad = format!("{MINIMAL}\n[checks.meso]\nsampels = 5000\n");
        let e = ScenarioConfig::from_str(&bad).unwrap_err();
        assert!(e.0.contains("unknown key `sampels` in [checks.meso]"), "{e}");
        assert!(e.0.contains("did you mean `samples`"), "{e}");
    }

    #[test]
    fn nonpositive_reservoir_rejected_by_name() {
        let bad = MINIMAL.replace("theta_left = [0.5]", "theta_left = [-0.5]");
        let e = ScenarioConfig::from_str(&bad).unwrap_err();
        assert!(e.0.contains("theta_left[0]"), "{e}");
    }

    #[test]
    fn missing_seed_rejected() {
        let bad = MINIMAL.replace("seed = 42", "");
        let e = ScenarioConfig::from_str(&bad).unwrap_err();
        assert!(e.0.contains("seed"), "{e}");
    }
}
