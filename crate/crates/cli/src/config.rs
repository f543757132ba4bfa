//! The JSON experiment document, its validation and its canonical hash.
//!
//! Laws appear with a `kind` tag and their raw parameters, for example
//! `{"kind": "two_point", "x_minus": -1, "x_plus": 1, "p_plus": 0.6}`.
//! Parsing only checks shape; [`ExperimentConfig::from_raw`] then checks
//! every value and reports the offending field.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sublin_core::nlexp::{AmbiguitySet, Distribution, DistributionKind};
use sublin_core::scenario::EstimateBudget;
use sublin_core::truncation::{default_y_grid, uniform_y_grid, validate_grid, JointAtom, JointLaw, JointPairs, SequenceModel};

use crate::error::{CliError, CliResult};

/// Replicates below this are too noisy to report.
pub const MIN_MC_REPS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: ModelSpec,
    pub epsilon: Vec<f64>,
    pub n_schedule: Vec<u64>,
    #[serde(default)]
    pub y_grid: GridSpec,
    #[serde(default)]
    pub psi_check: PsiCheckSpec,
    #[serde(default = "default_m_schedule")]
    pub m_schedule: Vec<f64>,
    #[serde(default = "default_t_schedule")]
    pub t_schedule: Vec<f64>,
    #[serde(default = "default_proof_levels")]
    pub proof_chain_n: Vec<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub budget: BudgetSpec,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

fn default_m_schedule() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}

fn default_t_schedule() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}

fn default_proof_levels() -> Vec<u64> {
    vec![1, 2, 5, 10, 100]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub coordinates: CoordinatesSpec,
    #[serde(default)]
    pub dependence: DependenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinatesSpec {
    /// One ambiguity set shared by every coordinate.
    Repeat(Vec<DistributionKind>),
    /// One ambiguity set per coordinate, in order.
    Explicit(Vec<Vec<DistributionKind>>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependenceSpec {
    #[default]
    Product,
    JointPairs(JointPairsSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointPairsSpec {
    /// Joint laws for every pair not listed in `pairs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Vec<Vec<JointAtom>>>,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub i: usize,
    pub k: usize,
    pub members: Vec<Vec<JointAtom>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpec {
    /// 129 points, geometric near 0 and uniform on `[0.05, 1]`.
    #[default]
    Default,
    /// `{1/m, 2/m, ..., 1}`.
    Uniform(usize),
    Explicit(Vec<f64>),
}

impl GridSpec {
    fn build(&self, field: &str) -> CliResult<Vec<f64>> {
        let grid = match self {
            GridSpec::Default => default_y_grid(),
            GridSpec::Uniform(0) => return Err(CliError::validation(field, "uniform grid needs at least one point")),
            GridSpec::Uniform(m) => uniform_y_grid(*m),
            GridSpec::Explicit(points) => points.clone(),
        };
        validate_grid(&grid).map_err(|e| CliError::validation(field, e.to_string()))?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiCheckSpec {
    #[serde(default = "default_psi_grid")]
    pub grid: GridSpec,
    #[serde(default = "default_half")]
    pub tol: f64,
}

fn default_psi_grid() -> GridSpec {
    GridSpec::Uniform(16)
}

fn default_half() -> f64 {
    0.5
}

impl Default for PsiCheckSpec {
    fn default() -> Self {
        PsiCheckSpec {
            grid: default_psi_grid(),
            tol: default_half(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_ui_tol")]
    pub ui: f64,
    #[serde(default = "default_half")]
    pub kolmogorov: f64,
    #[serde(default = "default_cesaro_tol")]
    pub cesaro: f64,
}

fn default_ui_tol() -> f64 {
    0.05
}

fn default_cesaro_tol() -> f64 {
    0.05
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ui: default_ui_tol(),
            kolmogorov: default_half(),
            cesaro: default_cesaro_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub mc_reps: u64,
    #[serde(default = "default_restarts")]
    pub restarts: u32,
    #[serde(default = "default_passes")]
    pub max_passes: u32,
    /// Mandatory: runs never seed from the clock.
    pub seed: u64,
}

fn default_restarts() -> u32 {
    2
}

fn default_passes() -> u32 {
    4
}

impl BudgetSpec {
    pub fn estimate_budget(&self) -> EstimateBudget {
        EstimateBudget::new(self.mc_reps, self.restarts, self.max_passes, self.seed)
    }
}

/// A validated configuration with the model built.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub model: SequenceModel,
    pub y_grid: Vec<f64>,
    pub psi_grid: Vec<f64>,
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::from_raw(parse_config(&text)?)
}

/// Parses a document without checking values.
pub fn parse_config(text: &str) -> CliResult<RawConfig> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn strictly_increasing<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

fn check_schedule<T: PartialOrd + Copy>(field: &str, xs: &[T], positive: impl Fn(T) -> bool) -> CliResult<()> {
    if xs.is_empty() {
        return Err(CliError::validation(field, "must not be empty"));
    }
    if !xs.iter().all(|&x| positive(x)) {
        return Err(CliError::validation(field, "entries must be positive"));
    }
    if !strictly_increasing(xs) {
        return Err(CliError::validation(field, "must be strictly increasing"));
    }
    Ok(())
}

fn check_positive(field: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(field, "must be positive"))
    }
}

fn build_set(field: &str, kinds: &[DistributionKind]) -> CliResult<AmbiguitySet> {
    let members = kinds
        .iter()
        .enumerate()
        .map(|(j, kind)| {
            Distribution::new(kind.clone()).map_err(|e| CliError::validation(format!("{field}[{j}]"), e.to_string()))
        })
        .collect::<CliResult<Vec<_>>>()?;
    AmbiguitySet::new(members).map_err(|e| CliError::validation(field, e.to_string()))
}

fn build_laws(field: &str, members: &[Vec<JointAtom>]) -> CliResult<Vec<JointLaw>> {
    if members.is_empty() {
        return Err(CliError::validation(field, "needs at least one joint law"));
    }
    members
        .iter()
        .enumerate()
        .map(|(j, atoms)| {
            JointLaw::new(atoms.clone()).map_err(|e| CliError::validation(format!("{field}[{j}]"), e.to_string()))
        })
        .collect()
}

fn build_model(spec: &ModelSpec) -> CliResult<SequenceModel> {
    let model = match &spec.coordinates {
        CoordinatesSpec::Repeat(kinds) => SequenceModel::repeated(build_set("model.coordinates.repeat", kinds)?),
        CoordinatesSpec::Explicit(sets) => {
            let coords = sets
                .iter()
                .enumerate()
                .map(|(k, kinds)| build_set(&format!("model.coordinates.explicit[{k}]"), kinds))
                .collect::<CliResult<Vec<_>>>()?;
            SequenceModel::explicit(coords).map_err(|e| CliError::validation("model.coordinates", e.to_string()))?
        }
    };
    match &spec.dependence {
        DependenceSpec::Product => Ok(model),
        DependenceSpec::JointPairs(pairs) => {
            let mut joint = match &pairs.default {
                Some(members) => JointPairs::uniform(build_laws("model.dependence.joint_pairs.default", members)?),
                None => JointPairs::new(),
            };
            for (j, p) in pairs.pairs.iter().enumerate() {
                let field = format!("model.dependence.joint_pairs.pairs[{j}]");
                if p.i == 0 || p.k == 0 || p.i == p.k {
                    return Err(CliError::validation(field, "needs two distinct 1-based coordinates"));
                }
                joint = joint.with_pair(p.i, p.k, build_laws(&field, &p.members)?);
            }
            model
                .with_joint_pairs(joint)
                .map_err(|e| CliError::validation("model.dependence", e.to_string()))
        }
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig) -> CliResult<Self> {
        if raw.epsilon.is_empty() {
            return Err(CliError::validation("epsilon", "must not be empty"));
        }
        for &eps in &raw.epsilon {
            check_positive("epsilon", eps)?;
        }
        check_schedule("n_schedule", &raw.n_schedule, |n| n > 0)?;
        check_schedule("m_schedule", &raw.m_schedule, |m: f64| m > 0.0 && m.is_finite())?;
        check_schedule("t_schedule", &raw.t_schedule, |t: f64| t > 0.0 && t.is_finite())?;
        check_schedule("proof_chain_n", &raw.proof_chain_n, |n| n > 0)?;
        check_positive("psi_check.tol", raw.psi_check.tol)?;
        check_positive("tolerances.ui", raw.tolerances.ui)?;
        check_positive("tolerances.kolmogorov", raw.tolerances.kolmogorov)?;
        check_positive("tolerances.cesaro", raw.tolerances.cesaro)?;
        if raw.budget.mc_reps < MIN_MC_REPS {
            return Err(CliError::validation("budget.mc_reps", format!("must be at least {MIN_MC_REPS}")));
        }
        if raw.budget.max_passes == 0 {
            return Err(CliError::validation("budget.max_passes", "must be positive"));
        }
        if raw.jobs == Some(0) {
            return Err(CliError::validation("jobs", "must be positive"));
        }
        let model = build_model(&raw.model)?;
        if let Some(available) = model.available() {
            let largest = raw.n_schedule.iter().chain(&raw.proof_chain_n).max().copied().unwrap_or(0);
            if largest > available as u64 {
                return Err(CliError::validation(
                    "n_schedule",
                    format!("level {largest} exceeds the {available} explicit coordinates"),
                ));
            }
        }
        let y_grid = raw.y_grid.build("y_grid")?;
        let psi_grid = raw.psi_check.grid.build("psi_check.grid")?;
        Ok(ExperimentConfig {
            raw,
            model,
            y_grid,
            psi_grid,
        })
    }

    /// Replaces the seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.raw.budget.seed = seed;
        self
    }

    /// Shrinks the search budget tenfold: `mc_reps / 10` (at least
    /// [`MIN_MC_REPS`]) and `restarts / 10`; `max_passes` is unchanged.
    pub fn quick(mut self) -> Self {
        let b = &mut self.raw.budget;
        b.mc_reps = (b.mc_reps / 10).max(MIN_MC_REPS);
        b.restarts /= 10;
        self
    }

    pub fn with_output_dir(mut self, dir: PathBuf) -> Self {
        self.raw.output_dir = dir;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.raw.jobs = Some(jobs);
        self
    }

    pub fn budget(&self) -> EstimateBudget {
        self.raw.budget.estimate_budget()
    }

    /// Canonical bytes of everything that affects results: the effective
    /// document with sorted keys and no whitespace, leaving out the output
    /// directory and the job count.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut value = serde_json::to_value(&self.raw).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
            map.remove("jobs");
        }
        serde_json::to_vec(&value).expect("value serializes")
    }

    /// SHA-256 of [`canonical_bytes`](Self::canonical_bytes), in hex.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"coordinates": {"repeat": [{"kind": "uniform", "lo": 0, "hi": 1}]}},
        "epsilon": [0.1],
        "n_schedule": [10],
        "budget": {"mc_reps": 1000, "seed": 1}
    }"#;

    fn with(field: &str, value: serde_json::Value) -> String {
        let mut v: serde_json::Value = serde_json::from_str(MINIMAL).unwrap();
        v[field] = value;
        v.to_string()
    }

    fn validate(text: &str) -> CliResult<ExperimentConfig> {
        ExperimentConfig::from_raw(parse_config(text)?)
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = validate(MINIMAL).unwrap();
        assert_eq!(c.y_grid.len(), 129);
        assert_eq!(c.psi_grid, uniform_y_grid(16));
        assert_eq!(c.raw.proof_chain_n, vec![1, 2, 5, 10, 100]);
        assert_eq!(c.raw.budget.restarts, 2);
        assert!(c.model.is_product());
    }

    #[test]
    fn validation_errors_name_the_field() {
        match validate(&with("epsilon", serde_json::json!([0.0]))).unwrap_err() {
            CliError::Validation { field, reason } => {
                assert_eq!((field.as_str(), reason.as_str()), ("epsilon", "must be positive"));
            }
            other => panic!("{other}"),
        }
        let cases = [
            ("n_schedule", serde_json::json!([10, 5]), "n_schedule"),
            ("m_schedule", serde_json::json!([]), "m_schedule"),
            ("budget", serde_json::json!({"mc_reps": 10, "seed": 1}), "budget.mc_reps"),
            (
                "model",
                serde_json::json!({"coordinates": {"repeat": [{"kind": "normal", "mean": 0, "std_dev": -1}]}}),
                "model.coordinates.repeat[0]",
            ),
            (
                "model",
                serde_json::json!({"coordinates": {"explicit": [[{"kind": "cauchy", "location": 0, "scale": 1}]]}}),
                "n_schedule",
            ),
        ];
        for (key, value, want) in cases {
            match validate(&with(key, value)).unwrap_err() {
                CliError::Validation { field, .. } => assert_eq!(field, want),
                other => panic!("{other}"),
            }
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let broken = MINIMAL.replace("\"n_schedule\"", "n_schedule");
        match validate(&broken).unwrap_err() {
            CliError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
        let unseeded = MINIMAL.replace(", \"seed\": 1", "");
        assert!(matches!(validate(&unseeded).unwrap_err(), CliError::Parse { .. }));
    }

    #[test]
    fn hash_ignores_layout_but_not_values() {
        let a = validate(MINIMAL).unwrap();
        let compact: serde_json::Value = serde_json::from_str(MINIMAL).unwrap();
        let b = validate(&compact.to_string()).unwrap().with_output_dir("elsewhere".into()).with_jobs(3);
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), a.clone().with_seed(2).hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn quick_shrinks_budget() {
        let c = validate(MINIMAL).unwrap().quick();
        assert_eq!((c.raw.budget.mc_reps, c.raw.budget.restarts, c.raw.budget.max_passes), (100, 0, 4));
    }

    #[test]
    fn joint_pairs_parse() {
        let text = with(
            "model",
            serde_json::json!({
                "coordinates": {"repeat": [{"kind": "two_point", "x_minus": -1, "x_plus": 1, "p_plus": 0.5}]},
                "dependence": {"joint_pairs": {"default": [[
                    {"first": 1, "second": 1, "prob": 0.5},
                    {"first": -1, "second": -1, "prob": 0.5}
                ]]}}
            }),
        );
        let c = validate(&text).unwrap();
        assert!(!c.model.is_product());
        // marginal of the first coordinate no longer matches the coin
        let mut bad: serde_json::Value = serde_json::from_str(&text).unwrap();
        bad["model"]["dependence"]["joint_pairs"]["default"][0][0]["prob"] = serde_json::json!(0.75);
        bad["model"]["dependence"]["joint_pairs"]["default"][0][1]["prob"] = serde_json::json!(0.25);
        assert!(matches!(validate(&bad.to_string()).unwrap_err(), CliError::Validation { .. }));
    }
}
