//! Runs a validated configuration end to end and writes the output set.
//!
//! Stages run in order: hypothesis checks, truncated means, the convergence
//! experiment per epsilon, and the proof chain. Every file except
//! `manifest.json` depends only on the configuration, so repeated runs
//! reproduce them byte for byte. The manifest also carries timings.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use sublin_core::nlexp::Distribution;
use sublin_core::scenario::{
    convergence_experiment, proof_chain_check, write_convergence_csv, write_proof_chain_csv, ConvergenceReport,
    ProofChainReport,
};
use sublin_core::truncation::{
    cesaro_condition, check_psi_vanishes, check_uniform_integrability, kolmogorov_condition, mu_bounds, psi_profile,
    write_means_csv, write_psi_csv, CesaroReport, Coordinates, PsiVerdict, SequenceModel, UiVerdict,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult, EXIT_CONDITIONS, EXIT_OK};

pub const PSI_PROFILES: &str = "psi_profiles.csv";
pub const TRUNCATED_MEANS: &str = "truncated_means.csv";
pub const CONVERGENCE: &str = "convergence.csv";
pub const PROOF_CHAIN: &str = "proof_chain.csv";
pub const SUMMARY: &str = "summary.json";
pub const MANIFEST: &str = "manifest.json";

/// Every file a run may leave in its output directory.
pub const OUTPUT_FILES: [&str; 6] = [PSI_PROFILES, TRUNCATED_MEANS, CONVERGENCE, PROOF_CHAIN, SUMMARY, MANIFEST];

const PRODUCT_ONLY: &str = "path capacities are defined for product dependence only";

#[derive(Debug, Clone, Serialize)]
pub struct KolmogorovLine {
    /// First coordinate carrying this law.
    pub coordinate: usize,
    pub member: usize,
    pub law: String,
    pub pass: bool,
    /// `(t, t P(|X| > t))` at the largest scheduled `t`.
    pub last: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct Conditions {
    pub psi: PsiVerdict,
    pub psi_tol: f64,
    pub ui: UiVerdict,
    pub ui_tol: f64,
    pub kolmogorov: Vec<KolmogorovLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cesaro: Option<Vec<CesaroReport>>,
}

impl Conditions {
    pub fn all_pass(&self) -> bool {
        self.psi.pass
            && self.ui.pass
            && self.kolmogorov.iter().all(|k| k.pass)
            && self.cesaro.as_ref().is_none_or(|c| c.iter().all(|r| r.pass))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceLine {
    pub epsilon: f64,
    pub n: u64,
    pub v_upper_hat: f64,
    pub v_lower_hat: f64,
    pub v_band_hat: f64,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub config_sha256: String,
    pub model: String,
    pub seed: u64,
    pub conditions: Conditions,
    pub conditions_pass: bool,
    /// Estimates are maxima over the selections the search visited, so
    /// they may fall short of the true capacity.
    pub convergence: Vec<ConvergenceLine>,
    pub proof_chain_levels: Vec<u64>,
    pub proof_chain_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    ConditionsFailed,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    /// Absent for the manifest itself.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bytes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<StageFailure>,
    pub files: Vec<FileEntry>,
    pub timings: Vec<Timing>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub summary: Summary,
    pub output_dir: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.summary.conditions_pass {
            EXIT_OK
        } else {
            EXIT_CONDITIONS
        }
    }
}

/// Rejects an output directory holding anything but this tool's files,
/// creating it when missing.
fn prepare_output_dir(dir: &Path) -> CliResult<()> {
    let write_err = |source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(write_err)?;
    let mut foreign: Vec<String> = fs::read_dir(dir)
        .map_err(write_err)?
        .filter_map(|entry| entry.ok())
        .map(|entry| entry.file_name().to_string_lossy().into_owned())
        .filter(|name| !OUTPUT_FILES.contains(&name.as_str()))
        .collect();
    if !foreign.is_empty() {
        foreign.sort();
        return Err(CliError::ForeignFiles {
            dir: dir.to_path_buf(),
            names: foreign.join(", "),
        });
    }
    // stale outputs from an earlier run must not survive a failed one
    for name in OUTPUT_FILES {
        let path = dir.join(name);
        if path.exists() {
            fs::remove_file(&path).map_err(|source| CliError::Write { path, source })?;
        }
    }
    Ok(())
}

/// Output directory, written files and timings of one run.
struct Recorder {
    dir: PathBuf,
    files: Vec<FileEntry>,
    timings: Vec<Timing>,
    started: Instant,
}

impl Recorder {
    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Write { path, source })?;
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: Some(bytes.len() as u64),
            sha256: Some(hex::encode(Sha256::digest(bytes))),
        });
        Ok(())
    }

    fn write_csv(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> CliResult<()> {
        let mut buf = Vec::new();
        fill(&mut buf).map_err(|source| CliError::Write {
            path: self.dir.join(name),
            source,
        })?;
        self.write(name, &buf)
    }

    fn time<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            stage: stage.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    fn finish(mut self, config: &ExperimentConfig, status: RunStatus, error: Option<StageFailure>) -> CliResult<RunManifest> {
        self.files.push(FileEntry {
            path: MANIFEST.to_string(),
            bytes: None,
            sha256: None,
        });
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: config.hash(),
            seed: config.raw.budget.seed,
            status,
            error,
            files: self.files,
            timings: self.timings,
            total_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        let path = self.dir.join(MANIFEST);
        fs::write(&path, text).map_err(|source| CliError::Write { path, source })?;
        Ok(manifest)
    }
}

fn describe(model: &SequenceModel) -> String {
    let set = |amb: &sublin_core::AmbiguitySet| {
        amb.members().iter().map(Distribution::to_string).collect::<Vec<_>>().join(", ")
    };
    let coords = match model.coordinates() {
        Coordinates::Repeated(amb) => format!("every coordinate in {{{}}}", set(amb)),
        Coordinates::Explicit(list) => format!("{} explicit coordinates", list.len()),
    };
    if model.is_product() {
        format!("{coords}, product dependence")
    } else {
        format!("{coords}, pairwise joint laws")
    }
}

/// Distinct member laws with the first coordinate and index they occur at.
fn distinct_laws(model: &SequenceModel) -> Vec<(usize, usize, &Distribution)> {
    let sets: Vec<_> = match model.coordinates() {
        Coordinates::Repeated(amb) => vec![amb],
        Coordinates::Explicit(list) => list.iter().collect(),
    };
    let mut out: Vec<(usize, usize, &Distribution)> = Vec::new();
    for (k, amb) in sets.into_iter().enumerate() {
        for (m, d) in amb.members().iter().enumerate() {
            if !out.iter().any(|(_, _, seen)| *seen == d) {
                out.push((k + 1, m, d));
            }
        }
    }
    out
}

fn stage<T>(name: &'static str, result: sublin_core::Result<T>) -> CliResult<T> {
    result.map_err(|source| CliError::Stage { stage: name, source })
}

fn check_conditions(config: &ExperimentConfig, rec: &mut Recorder) -> CliResult<Conditions> {
    let raw = &config.raw;
    let model = &config.model;
    let profiles = rec.time("psi_profiles", || {
        raw.n_schedule
            .iter()
            .map(|&n| psi_profile(model, n, &config.y_grid))
            .collect::<sublin_core::Result<Vec<_>>>()
    });
    let profiles = stage("psi_profiles", profiles)?;
    rec.write_csv(PSI_PROFILES, |buf| write_psi_csv(buf, &profiles))?;

    let psi = stage(
        "psi_check",
        rec.time("psi_check", || check_psi_vanishes(model, &raw.n_schedule, &config.psi_grid, raw.psi_check.tol)),
    )?;
    let ui = stage(
        "uniform_integrability",
        check_uniform_integrability(&profiles, &raw.m_schedule, raw.tolerances.ui),
    )?;
    let kolmogorov = distinct_laws(model)
        .into_iter()
        .map(|(coordinate, member, d)| {
            let v = stage("kolmogorov", kolmogorov_condition(d, &raw.t_schedule, raw.tolerances.kolmogorov))?;
            Ok(KolmogorovLine {
                coordinate,
                member,
                law: d.to_string(),
                pass: v.pass,
                last: *v.values.last().expect("schedule is nonempty"),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let cesaro = if model.is_product() {
        None
    } else {
        let reports = raw
            .n_schedule
            .iter()
            .map(|&n| cesaro_condition(model, n, raw.tolerances.cesaro))
            .collect();
        Some(stage("cesaro", rec.time("cesaro", || reports))?)
    };
    Ok(Conditions {
        psi,
        psi_tol: raw.psi_check.tol,
        ui,
        ui_tol: raw.tolerances.ui,
        kolmogorov,
        cesaro,
    })
}

fn execute(config: &ExperimentConfig, rec: &mut Recorder) -> CliResult<Summary> {
    let raw = &config.raw;
    let model = &config.model;
    let conditions = check_conditions(config, rec)?;

    let means = rec.time("truncated_means", || {
        raw.n_schedule
            .iter()
            .map(|&n| mu_bounds(model, n))
            .collect::<sublin_core::Result<Vec<_>>>()
    });
    let means = stage("truncated_means", means)?;
    rec.write_csv(TRUNCATED_MEANS, |buf| write_means_csv(buf, &means))?;

    let budget = config.budget();
    let mut reports: Vec<ConvergenceReport> = Vec::new();
    let mut chain: Vec<ProofChainReport> = Vec::new();
    if model.is_product() {
        for &eps in &raw.epsilon {
            let report = rec.time(format!("convergence eps={eps}"), || {
                convergence_experiment(model, eps, &raw.n_schedule, &budget)
            });
            let mut report = stage("convergence", report)?;
            report.attach_verdicts(Some(conditions.psi.pass), Some(conditions.ui.pass));
            for row in &report.rows {
                rec.timings.push(Timing {
                    stage: format!("convergence eps={eps} n={}", row.n),
                    seconds: row.seconds,
                });
            }
            reports.push(report);
        }
        for &n in &raw.proof_chain_n {
            chain.push(stage("proof_chain", rec.time(format!("proof_chain n={n}"), || proof_chain_check(model, n)))?);
        }
    }
    rec.write_csv(CONVERGENCE, |buf| write_convergence_csv(buf, &reports))?;
    rec.write_csv(PROOF_CHAIN, |buf| write_proof_chain_csv(buf, &chain))?;

    let convergence = reports
        .iter()
        .flat_map(|r| &r.rows)
        .map(|row| ConvergenceLine {
            epsilon: row.epsilon,
            n: row.n,
            v_upper_hat: row.upper.value,
            v_lower_hat: row.lower.value,
            v_band_hat: row.band.value,
            budget_exhausted: row.budget_exhausted(),
        })
        .collect();
    let summary = Summary {
        name: raw.name.clone(),
        config_sha256: config.hash(),
        model: describe(model),
        seed: raw.budget.seed,
        conditions_pass: conditions.all_pass(),
        conditions,
        convergence,
        proof_chain_levels: chain.iter().map(|r| r.n).collect(),
        proof_chain_holds: chain.iter().all(ProofChainReport::all_hold),
        skipped: (!model.is_product()).then(|| format!("convergence and proof chain: {PRODUCT_ONLY}")),
    };
    let text = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    rec.write(SUMMARY, &text)?;
    Ok(summary)
}

/// Runs `config`, writing into its output directory. A failing stage is
/// recorded in the manifest before the error is returned.
pub fn run(config: &ExperimentConfig) -> CliResult<RunOutcome> {
    let dir = config.raw.output_dir.clone();
    prepare_output_dir(&dir)?;
    let mut rec = Recorder {
        dir: dir.clone(),
        files: Vec::new(),
        timings: Vec::new(),
        started: Instant::now(),
    };
    let result = match config.raw.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool builds");
            pool.install(|| execute(config, &mut rec))
        }
        None => execute(config, &mut rec),
    };
    match result {
        Ok(summary) => {
            let status = if summary.conditions_pass {
                RunStatus::Ok
            } else {
                RunStatus::ConditionsFailed
            };
            let manifest = rec.finish(config, status, None)?;
            Ok(RunOutcome {
                manifest,
                summary,
                output_dir: dir,
            })
        }
        Err(err) => {
            let failure = StageFailure {
                stage: match &err {
                    CliError::Stage { stage, .. } => stage.to_string(),
                    _ => "write".to_string(),
                },
                message: err.to_string(),
            };
            // the original error matters more than a failed manifest write
            let _ = rec.finish(config, RunStatus::Error, Some(failure));
            Err(err)
        }
    }
}
