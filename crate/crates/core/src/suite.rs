//! Suite orchestration: sample points, run every check, fold into a report.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, Example};
use crate::connection::AffineConnection;
use crate::dual::MAX_GENERATORS;
use crate::engine::DiffEngine;
use crate::field::Point;
use crate::verify::{self, CheckResult, PointContext, Sampling};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_C_VALUES: [f64; 3] = [-1.0, 0.0, 1.0];
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// The `a` in `∇^{aλ;1}` versus `∇^{λ;a}`.
pub const SCALING_FACTOR: f64 = 2.0;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown example '{0}' (see list-examples)")]
    UnknownExample(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffMode {
    Ad,
    Fd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub example: String,
    pub c_values: Vec<f64>,
    pub points: usize,
    pub seed: u64,
    pub mode: DiffMode,
    pub fd_step: f64,
    /// Random input tuples per check and point.
    pub samples: usize,
    pub negative_controls: bool,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            example: "r3-standard".into(),
            c_values: DEFAULT_C_VALUES.to_vec(),
            points: 20,
            seed: 0,
            mode: DiffMode::Ad,
            fd_step: DEFAULT_FD_STEP,
            samples: verify::DEFAULT_SAMPLES,
            negative_controls: false,
            tolerances: BTreeMap::new(),
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<Example, SuiteError> {
        let example = catalog::example(&self.example).ok_or_else(|| SuiteError::UnknownExample(self.example.clone()))?;
        if self.c_values.is_empty() {
            return Err(SuiteError::Config("c list must not be empty".into()));
        }
        if let Some(c) = self.c_values.iter().find(|c| !c.is_finite()) {
            return Err(SuiteError::Config(format!("c values must be finite, got {c}")));
        }
        if self.points == 0 {
            return Err(SuiteError::Config("point count must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(SuiteError::Config("sample count must be at least 1".into()));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(SuiteError::Config(format!("finite-difference step must be positive, got {}", self.fd_step)));
        }
        for (name, tol) in &self.tolerances {
            if verify::describe(name).is_none() {
                return Err(SuiteError::Config(format!("tolerance override for unknown check '{name}'")));
            }
            if !(*tol >= 0.0 && tol.is_finite()) {
                return Err(SuiteError::Config(format!("tolerance for '{name}' must be finite and nonnegative")));
            }
        }
        Ok(example)
    }

    pub fn engine(&self) -> DiffEngine {
        match self.mode {
            DiffMode::Ad => DiffEngine::Forward,
            DiffMode::Fd => DiffEngine::CentralDifference { step: self.fd_step },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleInfo {
    pub id: String,
    pub dim: usize,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionInfo {
    pub c: f64,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub mode: String,
    pub fd_step: Option<f64>,
    pub max_generators: usize,
    pub version: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub max_residual: f64,
    pub control: bool,
    /// For controls: points where the fault was noticed.
    pub detected: usize,
    /// For controls: points where the fault cannot change anything.
    pub inert: usize,
    /// Passing checks and discriminating controls.
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub checks: BTreeMap<String, CheckSummary>,
    pub failing_checks: Vec<String>,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    pub example: ExampleInfo,
    pub connections: Vec<ConnectionInfo>,
    pub engine: EngineInfo,
    pub points: Vec<Vec<f64>>,
    pub records: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}

fn connection_label(c: f64) -> String {
    if c == 0.0 {
        "contact triad connection".into()
    } else {
        "triad connection".into()
    }
}

/// Every check run at one point, in a fixed order.
pub fn point_checks(ctx: &PointContext, example: &Example, config: &RunConfig) -> Vec<CheckResult> {
    let mut out = ctx.levi_civita_lemmas();
    out.extend(ctx.levi_civita_frame_checks());
    out.extend(ctx.tmp1_lemmas());
    for &c in &config.c_values {
        out.extend(ctx.axioms(&AffineConnection::triad_connection(&ctx.triad, c), c));
        let (reeb, holomorphic) = ctx.cr_form(c);
        out.push(reeb);
        if c == 0.0 {
            out.push(holomorphic);
        }
        out.extend(ctx.family_lemmas(c));
        out.extend(ctx.frame_checks(c));
        out.push(ctx.explicit_formula(c));
        for map in &example.maps {
            out.push(ctx.naturality(map, c));
        }
    }
    if example.supports_scaling {
        out.push(ctx.scaling(SCALING_FACTOR));
    }
    if config.negative_controls {
        out.push(ctx.control_wrong_c());
        out.push(ctx.control_levi_civita());
        out.push(ctx.control_b1_sign_flip());
        out.push(ctx.cr_form(1.0).1);
        if example.supports_scaling {
            out.push(ctx.scaling_mismatch(SCALING_FACTOR));
        }
    }
    out
}

/// The `(name, c)` pairs [`point_checks`] produces, for points where evaluation fails.
pub fn planned_checks(example: &Example, config: &RunConfig) -> Vec<(&'static str, Option<f64>)> {
    let mut out: Vec<(&'static str, Option<f64>)> = Vec::new();
    let fixed = |names: &[&'static str], c: Option<f64>, out: &mut Vec<_>| {
        out.extend(names.iter().map(|n| (*n, c)));
    };
    fixed(
        &[
            "compatibility-identities",
            "lie-reeb-j-symmetric",
            "reeb-geodesic",
            "nabla-j-nijenhuis",
            "nijenhuis-reeb",
            "nijenhuis-j-relations",
            "nabla-j-xi-identity",
            "nabla-reeb-j",
            "lc-reeb-derivative",
            "structure-equation-levi-civita",
            "frame-orthonormal",
            "tmp1-j-linear",
            "p-metric-skew",
            "tmp1-hermitian",
            "tmp1-reeb-metric",
            "tmp1-torsion",
            "p-bracket-identity",
            "p-xi-projection",
        ],
        None,
        &mut out,
    );
    for &c in &config.c_values {
        let c = Some(c);
        fixed(&["axiom-1", "axiom-2", "axiom-3", "axiom-4", "axiom-5c", "axiom-6", "cr-reeb"], c, &mut out);
        if c == Some(0.0) {
            out.push(("cr-holomorphic", c));
        }
        fixed(
            &[
                "reeb-derivative-formula",
                "torsion-lambda-part",
                "torsion-xi-part",
                "reeb-preserves-dlambda",
                "torsion-type",
                "gamma-cross-check",
                "structure-equation",
                "skew-hermitian",
                "explicit-formula",
            ],
            c,
            &mut out,
        );
        out.extend(example.maps.iter().map(|_| ("naturality", c)));
    }
    if example.supports_scaling {
        out.push(("scaling", Some(SCALING_FACTOR)));
    }
    if config.negative_controls {
        out.push(("control-wrong-c", Some(0.0)));
        out.push(("control-levi-civita", Some(0.0)));
        out.push(("control-b1-sign-flip", None));
        out.push(("control-cr-defect", Some(1.0)));
        if example.supports_scaling {
            out.push(("control-scaling-mismatch", Some(SCALING_FACTOR)));
        }
    }
    out
}

/// Seeded points, uniform in the example's domain box.
pub fn sample_points(example: &Example, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| example.triad.domain().sample(&mut rng)).collect()
}

fn run_point(example: &Example, config: &RunConfig, index: usize, p: &Point) -> Vec<CheckResult> {
    let triad = example.triad.clone().with_engine(config.engine());
    let sampling = Sampling {
        seed: config.seed.wrapping_add(index as u64),
        samples: config.samples,
    };
    let mut records = match PointContext::new(&triad, p, sampling) {
        Ok(ctx) => point_checks(&ctx, example, config),
        Err(e) => planned_checks(example, config)
            .into_iter()
            .map(|(name, c)| {
                let mut r = CheckResult::failed(name, p, &e);
                r.c = c;
                r
            })
            .collect(),
    };
    for r in &mut records {
        r.point_index = index;
        if let Some(&tol) = config.tolerances.get(&r.name) {
            r.tolerance = tol;
            r.pass = r.residual <= tol;
        }
    }
    records
}

fn sort_key(a: &CheckResult, b: &CheckResult) -> std::cmp::Ordering {
    a.name
        .cmp(&b.name)
        .then(a.point_index.cmp(&b.point_index))
        .then(a.c.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.c.unwrap_or(f64::NEG_INFINITY)))
        .then(a.note.cmp(&b.note))
}

/// Per-check tallies. A control is satisfied when it is detected at some point,
/// or when the injected fault is inert at every point.
pub fn summarize(records: &[CheckResult]) -> Summary {
    let mut checks: BTreeMap<String, CheckSummary> = BTreeMap::new();
    for r in records {
        let s = checks.entry(r.name.clone()).or_default();
        s.records += 1;
        s.control = r.control;
        if r.error.is_some() {
            s.errors += 1;
        }
        if r.pass {
            s.passed += 1;
        } else {
            s.failed += 1;
        }
        if r.residual.is_nan() || r.residual > s.max_residual {
            s.max_residual = r.residual;
        }
        if r.control && r.detected() {
            s.detected += 1;
        }
        if r.control && r.inert() {
            s.inert += 1;
        }
    }
    for s in checks.values_mut() {
        s.ok = if s.control {
            s.errors == 0 && (s.detected > 0 || s.inert == s.records)
        } else {
            s.failed == 0
        };
    }
    let failing_checks: Vec<String> = checks.iter().filter(|(_, s)| !s.ok).map(|(k, _)| k.clone()).collect();
    Summary {
        records: records.len(),
        passed: records.iter().filter(|r| r.pass).count(),
        failed: records.iter().filter(|r| !r.pass).count(),
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        exit_code: if failing_checks.is_empty() { 0 } else { 1 },
        checks,
        failing_checks,
    }
}

pub fn run_suite(config: &RunConfig) -> Result<Report, SuiteError> {
    let example = config.validate()?;
    let points = sample_points(&example, config.points, config.seed);
    let per_point: Vec<Vec<CheckResult>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| run_point(&example, config, i, p))
        .collect();
    let mut records: Vec<CheckResult> = per_point.into_iter().flatten().collect();
    records.sort_by(sort_key);
    let summary = summarize(&records);
    let engine = config.engine();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        example: ExampleInfo {
            id: example.id.clone(),
            dim: example.dim(),
            description: example.description.clone(),
        },
        connections: config
            .c_values
            .iter()
            .map(|&c| ConnectionInfo { c, label: connection_label(c) })
            .collect(),
        engine: EngineInfo {
            mode: engine.label().into(),
            fd_step: match engine {
                DiffEngine::CentralDifference { step } => Some(step),
                DiffEngine::Forward => None,
            },
            max_generators: MAX_GENERATORS,
            version: env!("CARGO_PKG_VERSION").into(),
        },
        points: points.iter().map(|p| p.coords().to_vec()).collect(),
        records,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_matches_checks() {
        for id in ["r3-standard", "t3-tight", "r5-perturbed-j"] {
            let example = catalog::example(id).unwrap();
            let config = RunConfig {
                example: id.into(),
                negative_controls: true,
                c_values: vec![0.0, 0.5],
                ..RunConfig::default()
            };
            let p = &sample_points(&example, 1, 3)[0];
            let ctx = PointContext::new(&example.triad, p, Sampling::default()).unwrap();
            let actual: Vec<(String, Option<f64>)> =
                point_checks(&ctx, &example, &config).into_iter().map(|r| (r.name, r.c)).collect();
            let planned: Vec<(String, Option<f64>)> =
                planned_checks(&example, &config).into_iter().map(|(n, c)| (n.to_string(), c)).collect();
            assert_eq!(actual, planned, "{id}");
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            RunConfig { c_values: vec![], ..RunConfig::default() },
            RunConfig { points: 0, ..RunConfig::default() },
            RunConfig { c_values: vec![f64::NAN], ..RunConfig::default() },
            RunConfig { fd_step: 0.0, ..RunConfig::default() },
        ];
        for config in bad {
            assert!(matches!(run_suite(&config), Err(SuiteError::Config(_))));
        }
        let unknown = RunConfig { example: "nope".into(), ..RunConfig::default() };
        assert!(matches!(run_suite(&unknown), Err(SuiteError::UnknownExample(_))));
    }

    #[test]
    fn summary_counts_match_records() {
        let config = RunConfig { example: "t3-tight".into(), points: 2, c_values: vec![0.0], ..RunConfig::default() };
        let report = run_suite(&config).unwrap();
        let s = &report.summary;
        assert_eq!(s.records, report.records.len());
        assert_eq!(s.passed + s.failed, s.records);
        assert_eq!(s.checks.values().map(|c| c.records).sum::<usize>(), s.records);
        assert_eq!(s.exit_code, 0, "{:?}", s.failing_checks);
    }
}
