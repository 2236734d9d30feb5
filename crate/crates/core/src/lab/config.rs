use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{EvolutionConfig, KernelSpec};
use crate::error::{LabError, Result};
use crate::phasespace::{Grid1D, PhaseSpaceField, PhaseSpaceGrid};

/// Schatten exponent that serializes `∞` as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub fn label(&self) -> String {
        if self.0.is_infinite() {
            "inf".into()
        } else {
            format!("{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Self(v)),
            Raw::Int(v) => Ok(Self(v as f64)),
            Raw::Str(s) if s == "inf" => Ok(Self(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad exponent '{s}'"))),
        }
    }
}

/// What a run measures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ExperimentKind {
    HartreeVsVlasov,
    HfVsVlasov,
    HartreeVsHf,
    ClassicalStability,
    BoundCheck(String),
}

/// Names accepted by `bound_check:<name>`.
pub const CHECK_NAMES: [&str; 7] = [
    "gaussian_decomposition",
    "commutator_trace",
    "commutator_lp",
    "kinetic_interpolation",
    "weighted_weyl",
    "exchange_bound",
    "classical_stability",
];

impl FromStr for ExperimentKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hartree_vs_vlasov" => Self::HartreeVsVlasov,
            "hf_vs_vlasov" => Self::HfVsVlasov,
            "hartree_vs_hf" => Self::HartreeVsHf,
            "classical_stability" => Self::ClassicalStability,
            other => match other.strip_prefix("bound_check:") {
                Some(name) if CHECK_NAMES.contains(&name) => Self::BoundCheck(name.to_string()),
                _ => return Err(LabError::Config(format!("unknown experiment '{other}'"))),
            },
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HartreeVsVlasov => f.write_str("hartree_vs_vlasov"),
            Self::HfVsVlasov => f.write_str("hf_vs_vlasov"),
            Self::HartreeVsHf => f.write_str("hartree_vs_hf"),
            Self::ClassicalStability => f.write_str("classical_stability"),
            Self::BoundCheck(n) => write!(f, "bound_check:{n}"),
        }
    }
}

impl TryFrom<String> for ExperimentKind {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ExperimentKind> for String {
    fn from(k: ExperimentKind) -> String {
        k.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "one_usize")]
    pub d: usize,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub sign: f64,
    #[serde(default)]
    pub log: bool,
    /// Absolute softening length.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Softening length in grid cells; ignored when `delta` is set.
    #[serde(default)]
    pub delta_cells: Option<f64>,
}

impl KernelConfig {
    /// Kernel for a spatial grid, resolving `delta_cells` against its spacing.
    pub fn spec(&self, grid: &Grid1D) -> KernelSpec {
        let mut k = if self.log {
            KernelSpec::logarithmic(self.d, self.sign)
        } else {
            KernelSpec::power(self.d, self.a, self.sign)
        };
        if let Some(dl) = self.delta {
            k = k.with_delta(dl);
        } else if let Some(c) = self.delta_cells {
            k = k.with_delta(c * grid.spacing());
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length_x: f64,
    pub length_xi: f64,
    pub n_xi: usize,
    /// Spatial sizes, one per ladder point; derived from `phase_target` when absent.
    #[serde(default)]
    pub n_x: Option<Vec<usize>>,
    /// Target for `Δx·(L_ξ/2)/ℏ` when deriving spatial sizes.
    #[serde(default = "default_phase_target")]
    pub phase_target: f64,
}

impl GridConfig {
    pub fn n_for(&self, index: usize, hbar: f64) -> usize {
        if let Some(ns) = &self.n_x {
            return ns[index];
        }
        let need = self.length_x * 0.5 * self.length_xi / (hbar * self.phase_target);
        (need.ceil() as usize).next_power_of_two()
    }

    pub fn grid(&self, n_x: usize) -> Result<PhaseSpaceGrid> {
        PhaseSpaceGrid::one_d(n_x, self.length_x, self.n_xi, self.length_xi)
    }
}

/// Initial phase-space density, normalized to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Gaussian { center: [f64; 2], variance: f64 },
    DoubleBump { centers: [[f64; 2]; 2], variance: f64, weights: [f64; 2] },
}

impl InitialData {
    pub fn variance(&self) -> f64 {
        match self {
            Self::Gaussian { variance, .. } | Self::DoubleBump { variance, .. } => *variance,
        }
    }

    /// Pointwise value.
    pub fn value(&self, x: f64, xi: f64) -> f64 {
        let bump = |c: [f64; 2], v: f64| {
            (-((x - c[0]).powi(2) + (xi - c[1]).powi(2)) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v)
        };
        match self {
            Self::Gaussian { center, variance } => bump(*center, *variance),
            Self::DoubleBump { centers, variance, weights } => {
                let s = weights[0] + weights[1];
                (weights[0] * bump(centers[0], *variance) + weights[1] * bump(centers[1], *variance)) / s
            }
        }
    }

    pub fn sample(&self, grid: PhaseSpaceGrid) -> PhaseSpaceField {
        PhaseSpaceField::from_fn_1d(grid, |x, xi| self.value(x, xi))
    }

    /// Copy displaced by `shift` in position.
    pub fn shifted(&self, shift: f64) -> Self {
        match self.clone() {
            Self::Gaussian { center, variance } => Self::Gaussian { center: [center[0] + shift, center[1]], variance },
            Self::DoubleBump { centers, variance, weights } => Self::DoubleBump {
                centers: [[centers[0][0] + shift, centers[0][1]], [centers[1][0] + shift, centers[1][1]]],
                variance,
                weights,
            },
        }
    }
}

/// Acceptance band for a fitted slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeBand {
    pub target: f64,
    #[serde(default = "default_band")]
    pub band: f64,
}

/// Errors `C ℏ^s (1 + noise·N(0,1))` replacing the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub constant: f64,
    pub exponent: f64,
    #[serde(default)]
    pub noise: f64,
}

/// Parameters of `lab check` and of bound-check experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_z")]
    pub z_list: Vec<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "one")]
    pub p: f64,
    #[serde(default = "two")]
    pub n_weight: f64,
    #[serde(default = "two_u32")]
    pub n: u32,
    #[serde(default = "two_u32")]
    pub n1: u32,
    #[serde(default = "ten")]
    pub factor: f64,
    #[serde(default = "default_perturbations")]
    pub perturbations: Vec<f64>,
    #[serde(default)]
    pub lp: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "one_usize")]
    pub d: usize,
    pub hbar_ladder: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub norms_to_track: Vec<Exponent>,
    pub kernel: KernelConfig,
    pub grid: GridConfig,
    pub evolution: EvolutionParams,
    pub initial_data: InitialData,
    #[serde(default)]
    pub trace_band: Option<SlopeBand>,
    #[serde(default)]
    pub l2_band: Option<SlopeBand>,
    #[serde(default = "yes")]
    pub self_convergence: bool,
    /// Allowed change of the trace error under halving `n`, as a fraction of the error.
    #[serde(default = "default_grid_budget")]
    pub grid_budget: f64,
    #[serde(default = "default_memory")]
    pub memory_budget_mb: f64,
    #[serde(default)]
    pub synthetic: Option<SyntheticConfig>,
    #[serde(default)]
    pub check: CheckConfig,
}

/// Time stepping as configured; `ℏ` is supplied per ladder point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionParams {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_record")]
    pub record_every: usize,
}

impl EvolutionParams {
    pub fn at(&self, hbar: f64) -> EvolutionConfig {
        EvolutionConfig { dt: self.dt, t_final: self.t_final, hbar, record_every: self.record_every }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn ten() -> f64 {
    10.0
}
fn two_u32() -> u32 {
    2
}
fn one_usize() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn default_phase_target() -> f64 {
    1.25
}
fn default_band() -> f64 {
    0.25
}
fn default_grid_budget() -> f64 {
    0.25
}
fn default_record() -> usize {
    20
}
fn default_memory() -> f64 {
    4096.0
}
fn default_radii() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0, 4.0]
}
fn default_z() -> Vec<f64> {
    vec![-1.5, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5]
}
fn default_perturbations() -> Vec<f64> {
    vec![0.02, 0.05, 0.1]
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 1 || self.kernel.d != 1 {
            return Err(LabError::Dimension(format!("experiments run in d=1, got d={}", self.d)));
        }
        let l = &self.hbar_ladder;
        if l.is_empty() || l.iter().any(|h| !(*h > 0.0)) {
            return Err(LabError::Config("ħ ladder must be nonempty and positive".into()));
        }
        if l.windows(2).any(|w| w[1] >= w[0]) {
            return Err(LabError::Config("ħ ladder must be strictly decreasing".into()));
        }
        if self.initial_data.variance() < 0.5 * l[0] {
            return Err(LabError::Config(format!(
                "variance {} below ħ_max/2 = {}",
                self.initial_data.variance(),
                0.5 * l[0]
            )));
        }
        if let Some(ns) = &self.grid.n_x {
            if ns.len() != l.len() {
                return Err(LabError::Config("grid.n_x must have one entry per ladder point".into()));
            }
        }
        if !(self.grid.phase_target > 0.0) {
            return Err(LabError::Config("grid.phase_target must be positive".into()));
        }
        self.evolution.at(l[0]).validate()?;
        if self.norms_to_track.iter().any(|p| !(p.0 >= 1.0)) {
            return Err(LabError::Config("tracked norms need p ≥ 1".into()));
        }
        for (i, &h) in l.iter().enumerate() {
            let n = self.grid.n_for(i, h);
            self.grid.grid(n)?;
            let operators = match self.experiment {
                ExperimentKind::HartreeVsHf | ExperimentKind::HfVsVlasov => 12.0,
                _ => 8.0,
            };
            let mb = operators * (n * n) as f64 * 16.0 / 1048576.0;
            if mb > self.memory_budget_mb {
                return Err(LabError::Config(format!(
                    "ladder point ħ={h} needs about {mb:.0} MiB, above the {} MiB budget",
                    self.memory_budget_mb
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
experiment = "hartree_vs_vlasov"
hbar_ladder = [0.2, 0.1, 0.05]
[kernel]
a = 0.5
delta_cells = 2.0
[grid]
length_x = 8.0
length_xi = 8.0
n_xi = 64
[evolution]
dt = 0.01
t_final = 0.1
[initial_data]
kind = "gaussian"
center = [0.0, 0.0]
variance = 0.25
"#;

    #[test]
    fn parses_and_derives_sizes() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.grid.n_for(0, 0.2), 128);
        assert_eq!(c.grid.n_for(2, 0.05), 512);
        let again = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_increasing_ladder() {
        let t = BASE.replace("[0.2, 0.1, 0.05]", "[0.1, 0.2]");
        assert!(matches!(ExperimentConfig::from_toml(&t), Err(LabError::Config(_))));
    }

    #[test]
    fn rejects_narrow_data() {
        let t = BASE.replace("variance = 0.25", "variance = 0.05");
        assert!(matches!(ExperimentConfig::from_toml(&t), Err(LabError::Config(_))));
    }

    #[test]
    fn experiment_names_roundtrip() {
        for s in ["hf_vs_vlasov", "bound_check:commutator_trace", "classical_stability"] {
            assert_eq!(s.parse::<ExperimentKind>().unwrap().to_string(), s);
        }
        assert!("bound_check:nope".parse::<ExperimentKind>().is_err());
    }
}
