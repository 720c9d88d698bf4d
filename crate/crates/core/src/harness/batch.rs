//! Directory-level runs: one report per instance plus a summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{parse_instances, run_classify, run_verify_suite, HarnessConfig, InstanceSpec, Report};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Analyze,
    Verify,
}

/// Write `contents` next to `path` and rename it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchError {
    pub source: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BatchSummary {
    pub instances: usize,
    pub reports: usize,
    pub verdicts: BTreeMap<String, usize>,
    /// Largest residual seen per check id, ignoring per-subspace suffixes.
    pub max_residual: BTreeMap<String, f64>,
    pub failed_checks: BTreeMap<String, usize>,
    pub errors: Vec<BatchError>,
}

impl BatchSummary {
    /// 0 when everything passed, otherwise the most severe failure.
    pub fn exit_code(&self) -> i32 {
        let errors = self.errors.iter().map(|e| e.exit_code).max().unwrap_or(0);
        let checks = if self.failed_checks.is_empty() { 0 } else { 1 };
        errors.max(checks)
    }

    fn absorb(&mut self, report: &Report) {
        self.reports += 1;
        *self.verdicts.entry(report.verdict.name().to_string()).or_default() += 1;
        for c in &report.checks {
            let id = c.base_id().to_string();
            let slot = self.max_residual.entry(id.clone()).or_insert(0.0);
            // NaN residuals always count as the worst case.
            if c.residual.is_nan() || *slot < c.residual {
                *slot = if c.residual.is_nan() { f64::INFINITY } else { c.residual };
            }
            if !c.passed {
                *self.failed_checks.entry(id).or_default() += 1;
            }
        }
    }
}

fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json" || x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

struct Job {
    name: String,
    spec: InstanceSpec,
}

/// Run every instance found in the `.json`/`.jsonl` files of `input` and
/// write `<file>-<index>.json` reports and `summary.json` into `output`.
pub fn run_batch(input: &Path, output: &Path, cfg: &HarnessConfig, mode: Mode) -> Result<BatchSummary> {
    cfg.validate()?;
    if !input.is_dir() {
        return Err(Error::input(format!("{} is not a directory", input.display())));
    }
    fs::create_dir_all(output)?;
    let mut summary = BatchSummary::default();
    let mut jobs = Vec::new();
    for file in instance_files(input)? {
        let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let parsed = fs::read_to_string(&file).map_err(Error::from).and_then(|t| parse_instances(&t, cfg.delta));
        match parsed {
            Ok(specs) => {
                for (i, spec) in specs.into_iter().enumerate() {
                    jobs.push(Job { name: format!("{stem}-{i:04}"), spec });
                }
            }
            Err(e) => summary.errors.push(BatchError {
                source: file.display().to_string(),
                message: e.to_string(),
                exit_code: e.exit_code(),
            }),
        }
    }
    summary.instances = jobs.len();

    let results: Vec<(String, Result<Report>)> = jobs
        .par_iter()
        .map(|job| {
            let report = match mode {
                Mode::Analyze => run_classify(&job.spec, cfg),
                Mode::Verify => run_verify_suite(&job.spec, cfg),
            }
            .and_then(|r| {
                let mut text = r.to_json()?;
                text.push('\n');
                write_atomic(&output.join(format!("{}.json", job.name)), &text)?;
                Ok(r)
            });
            (job.name.clone(), report)
        })
        .collect();

    for (name, r) in results {
        match r {
            Ok(report) => summary.absorb(&report),
            Err(e) => summary.errors.push(BatchError { source: name, message: e.to_string(), exit_code: e.exit_code() }),
        }
    }
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    write_atomic(&output.join("summary.json"), &text)?;
    Ok(summary)
}
