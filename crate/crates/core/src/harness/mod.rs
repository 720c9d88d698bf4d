//! Instance files, reports, and the classification and verification runs
//! behind the command-line tool.

pub mod anchors;
mod batch;
mod checks;
mod gen;

pub use batch::{run_batch, write_atomic, BatchError, BatchSummary, Mode};
pub use gen::{expected_verdict, gen_instances, Family};

use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::blaschke::BlaschkeProduct;
use crate::classify::{classify, detect_structure, ClassificationResult, ClassifyConfig, Verdict, Witnesses};
use crate::error::{Error, Result};
use crate::operators::{commutant_probe, CommutantProbeResult, MAX_PROBE_SIZE};
use crate::spaces::SpaceKind;

/// Default distance kept between the zeros and the unit circle.
pub const DEFAULT_DELTA: f64 = 1e-3;
/// Default tolerance on operator-norm reducing residuals.
pub const DEFAULT_TOL_RED: f64 = 1e-7;
/// Default commutant probe size.
pub const DEFAULT_PROBE_SIZE: usize = 24;

/// One Blaschke product as read from an instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub phase: f64,
    pub zeros: Vec<[f64; 2]>,
}

impl InstanceSpec {
    pub fn from_product(phi: &BlaschkeProduct, label: Option<String>) -> Self {
        Self { label, phase: phi.phase(), zeros: phi.zeros().iter().map(|z| [z.re, z.im]).collect() }
    }

    /// Check the invariants: finite data, at least one zero, and every zero
    /// at distance at least `delta` from the circle.
    pub fn validate(&self, delta: f64) -> Result<()> {
        if !self.phase.is_finite() {
            return Err(Error::input("phase is not a finite number"));
        }
        if self.zeros.is_empty() {
            return Err(Error::input("at least one zero is required"));
        }
        for (i, [re, im]) in self.zeros.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::input(format!("zero {i} is not finite")));
            }
            let m = re.hypot(*im);
            if m > 1.0 - delta {
                return Err(Error::input(format!("zero {i} has modulus {m} > 1 - {delta}")));
            }
        }
        Ok(())
    }

    pub fn product(&self) -> Result<BlaschkeProduct> {
        BlaschkeProduct::new(self.phase, self.zeros.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }

    pub fn display_label(&self) -> String {
        self.label.clone().unwrap_or_else(|| format!("order {} instance", self.zeros.len()))
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Parse a single instance object, a JSON array of them, or one object per
/// line. Every instance is validated against `delta`; messages carry the
/// line where the offending instance starts.
pub fn parse_instances(text: &str, delta: f64) -> Result<Vec<InstanceSpec>> {
    let at = |line: usize, msg: String| Error::input(format!("line {line}: {msg}"));
    let trimmed = text.trim_start();
    let raw: Vec<&RawValue> = if trimmed.starts_with('[') {
        serde_json::from_str(text).map_err(|e| at(e.line(), e.to_string()))?
    } else {
        serde_json::Deserializer::from_str(text)
            .into_iter::<&RawValue>()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| at(e.line(), e.to_string()))?
    };
    if raw.is_empty() {
        return Err(Error::input("no instances found"));
    }
    let base = text.as_ptr() as usize;
    raw.into_iter()
        .map(|r| {
            let line = line_of(text, r.get().as_ptr() as usize - base);
            let spec: InstanceSpec =
                serde_json::from_str(r.get()).map_err(|e| at(line + e.line() - 1, e.to_string()))?;
            spec.validate(delta).map_err(|e| at(line, e.detail()))?;
            Ok(spec)
        })
        .collect()
}

/// Settings shared by every run; echoed into each report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessConfig {
    /// Fixed Taylor truncation for the identity checks; automatic when absent.
    pub truncation: Option<usize>,
    pub tol_red: f64,
    /// Attach a commutant probe to classification runs.
    pub probe: bool,
    pub probe_size: usize,
    pub probe_eps: f64,
    /// Circle quadrature nodes; `max(256, 8 N_eff)` when absent.
    pub quadrature: Option<usize>,
    pub delta: f64,
    pub seed: u64,
    pub core_levels: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            truncation: None,
            tol_red: DEFAULT_TOL_RED,
            probe: false,
            probe_size: DEFAULT_PROBE_SIZE,
            probe_eps: 1e-8,
            quadrature: None,
            delta: DEFAULT_DELTA,
            seed: 0,
            core_levels: 6,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_red > 0.0) {
            return Err(Error::input("--tol must be positive"));
        }
        if self.probe_size == 0 || self.probe_size > MAX_PROBE_SIZE {
            return Err(Error::input(format!("--probe-size must lie in 1..={MAX_PROBE_SIZE}")));
        }
        if self.quadrature.is_some_and(|m| m < 16) {
            return Err(Error::input("--quadrature needs at least 16 nodes"));
        }
        if self.truncation.is_some_and(|n| n < 8) {
            return Err(Error::input("--truncation must be at least 8"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::input("delta must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Outcome of one numerical check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub paper_anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Wall time; kept out of the serialized report so that reports are
    /// byte-identical across runs.
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl CheckRecord {
    pub fn new(check_id: impl Into<String>, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            check_id: check_id.into(),
            paper_anchor: anchor.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            runtime_ms: 0.0,
        }
    }

    /// Part of the id before any `[subject]` suffix.
    pub fn base_id(&self) -> &str {
        self.check_id.split('[').next().unwrap_or(&self.check_id)
    }
}

/// Run `f` and wrap its residual in a record with the elapsed time.
pub(crate) fn timed(
    check_id: impl Into<String>,
    anchor: &str,
    tolerance: f64,
    f: impl FnOnce() -> Result<f64>,
) -> Result<CheckRecord> {
    let start = Instant::now();
    let residual = f()?;
    let mut rec = CheckRecord::new(check_id, anchor, residual, tolerance);
    rec.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rec)
}

const GENERATOR_COEFFS: usize = 16;

/// Serialized view of an emitted subspace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspaceRecord {
    pub label: String,
    /// First coefficients of each generator.
    pub generators: Vec<Vec<C64>>,
    pub section_dim: usize,
    pub truncation: usize,
    pub invariance_residual: f64,
    pub adjoint_residual: f64,
    pub wandering_dim: usize,
    pub expected_wandering_dim: usize,
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub instance: InstanceSpec,
    pub order: usize,
    pub verdict: Verdict,
    pub witnesses: Witnesses,
    pub subspaces: Vec<SubspaceRecord>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<CommutantProbeResult>,
    pub config: HarnessConfig,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check_id == id)
    }

    /// Single-line JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn subspace_records(result: &ClassificationResult) -> Vec<SubspaceRecord> {
    result
        .subspaces
        .iter()
        .map(|s| SubspaceRecord {
            label: s.basis.label().to_string(),
            generators: s
                .basis
                .generators()
                .iter()
                .map(|g| (0..GENERATOR_COEFFS).map(|k| g.series().coeff(k)).collect())
                .collect(),
            section_dim: s.basis.dim(),
            truncation: s.basis.truncation(),
            invariance_residual: s.residual.invariance,
            adjoint_residual: s.residual.adjoint,
            wandering_dim: s.wandering.dim,
            expected_wandering_dim: s.expected_wandering,
            minimal: s.minimal,
        })
        .collect()
}

/// Number of commuting projections expected from the verdict, when known.
pub fn expected_commutant_dimension(verdict: Verdict, order: usize) -> Option<usize> {
    match verdict {
        Verdict::CaseI | Verdict::ReducibleZn => Some(order),
        Verdict::CaseIi | Verdict::CaseIii => Some(2),
        Verdict::CaseIv | Verdict::CaseV | Verdict::Irreducible => Some(1),
        Verdict::ReduciblePartial | Verdict::Undetermined => None,
    }
}

fn probe_check(
    phi: &BlaschkeProduct,
    verdict: Verdict,
    cfg: &HarnessConfig,
) -> Result<(CommutantProbeResult, Option<CheckRecord>)> {
    let start = Instant::now();
    let probe = commutant_probe(phi, SpaceKind::Dirichlet, cfg.probe_size, cfg.probe_eps)?;
    // An inconclusive probe is reported but never counted either way.
    let rec = match expected_commutant_dimension(verdict, phi.order()) {
        Some(d) if !probe.inconclusive => {
            let mut r = CheckRecord::new(
                "commutant_dimension",
                anchors::MINIMAL_ORTHOGONAL,
                probe.estimated_dimension.abs_diff(d) as f64,
                0.0,
            );
            r.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            Some(r)
        }
        _ => None,
    };
    Ok((probe, rec))
}

fn prepare(spec: &InstanceSpec, cfg: &HarnessConfig) -> Result<BlaschkeProduct> {
    cfg.validate()?;
    spec.validate(cfg.delta)?;
    spec.product()
}

/// Classification with witnesses, emitted subspaces and their checks.
pub fn run_classify(spec: &InstanceSpec, cfg: &HarnessConfig) -> Result<Report> {
    let phi = prepare(spec, cfg)?;
    let ccfg = ClassifyConfig { space: SpaceKind::Dirichlet, core_levels: cfg.core_levels };
    let result = classify(&phi, &ccfg)?;
    let mut checks = checks::classification_checks(&phi, &result, cfg)?;
    let probe = if cfg.probe {
        let (p, rec) = probe_check(&phi, result.verdict(), cfg)?;
        checks.extend(rec);
        Some(p)
    } else {
        None
    };
    Ok(Report {
        instance: spec.clone(),
        order: phi.order(),
        verdict: result.verdict(),
        witnesses: result.structure.witnesses.clone(),
        subspaces: subspace_records(&result),
        checks,
        probe,
        config: cfg.clone(),
    })
}

/// Classification plus every applicable operator identity.
pub fn run_verify_suite(spec: &InstanceSpec, cfg: &HarnessConfig) -> Result<Report> {
    let mut report = run_classify(spec, cfg)?;
    let phi = spec.product()?;
    let mut checks = checks::identity_checks(&phi, cfg)?;
    checks.append(&mut report.checks);
    report.checks = checks;
    Ok(report)
}

/// Structural verdict and a commutant probe, without subspace sections.
pub fn run_probe(spec: &InstanceSpec, cfg: &HarnessConfig) -> Result<Report> {
    let phi = prepare(spec, cfg)?;
    let structure = detect_structure(&phi)?;
    let (probe, rec) = probe_check(&phi, structure.verdict, cfg)?;
    Ok(Report {
        instance: spec.clone(),
        order: phi.order(),
        verdict: structure.verdict,
        witnesses: structure.witnesses,
        subspaces: Vec::new(),
        checks: rec.into_iter().collect(),
        probe: Some(probe),
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_object_array_and_lines() {
        let one = r#"{"phase": 0.0, "zeros": [[0, 0], [0.5, 0]]}"#;
        assert_eq!(parse_instances(one, 1e-3).unwrap().len(), 1);
        let arr = format!("[{one},\n {one}]");
        assert_eq!(parse_instances(&arr, 1e-3).unwrap().len(), 2);
        let lines = format!("{one}\n\n{one}\n{one}\n");
        assert_eq!(parse_instances(&lines, 1e-3).unwrap().len(), 3);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "{\"phase\": 0, \"zeros\": [[0, 0]]}\n{\"phase\": 0, \"zeros\": [[0.9999, 0]]}\n";
        let err = parse_instances(text, 1e-3).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let text = "{\"phase\": 0, \"zeros\": [[0, 0]]}\n{\"phase\": 0, \"zeros\": }\n";
        let err = parse_instances(text, 1e-3).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_instances("[{\"phase\": 0,\n \"zeros\": []}]", 1e-3).unwrap_err().to_string();
        assert!(err.contains("line 1") && err.contains("at least one zero"), "{err}");
        assert!(parse_instances("{\"phase\": 0, \"zeros\": [[0, 0]], \"extra\": 1}", 1e-3).is_err());
        assert!(parse_instances("  ", 1e-3).is_err());
    }

    #[test]
    fn z_squared_report() {
        let spec = InstanceSpec { label: None, phase: std::f64::consts::PI * 0.0, zeros: vec![[0.0, 0.0]; 2] };
        let r = run_verify_suite(&spec, &HarnessConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ReducibleZn);
        assert_eq!(r.subspaces.len(), 2);
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
            assert!(anchors::ALL.contains(&c.paper_anchor.as_str()));
        }
    }

    #[test]
    fn off_origin_pairing_and_failed_orthogonality() {
        let spec = InstanceSpec { label: None, phase: 0.0, zeros: vec![[0.5, 0.0], [0.3, 0.0]] };
        let r = run_verify_suite(&spec, &HarnessConfig::default()).unwrap();
        let pairing = r.check("dirichlet_pairing_with_one").unwrap();
        assert!(pairing.passed);
        assert!(r.check("orthogonal_powers").is_none());
        assert!(r.check("powers_not_orthogonal").unwrap().passed);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}
