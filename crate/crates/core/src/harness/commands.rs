//! The four commands behind the CLI, usable directly from Rust.

use std::path::{Path, PathBuf};

use crate::calibrate::calibrate;
use crate::control::{CalibrationResult, Method};
use crate::error::{Error, Result};
use crate::grid::HyperGrid;
use crate::harness::config::{EnvConfig, ExperimentConfig};
use crate::harness::coverage::{run_coverage, CoverageReport};
use crate::harness::experiment::{
    run_pilot, sample_batch, scheduler_grid, simulate_batch, with_workers, Batch, MethodSetup, PilotSummary,
};
use crate::harness::io::{load_risk_data, write_file, write_json, write_risk_matrix, RiskData};
use crate::harness::report::{files, write_reports, ReportOutcome};
use crate::seed::{derive_seed, stream};

/// Exit code for bad configs, specs or data.
pub const EXIT_VALIDATION: i32 = 3;
/// Exit code for missing or unreadable files.
pub const EXIT_IO: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_io() {
        EXIT_IO
    } else {
        EXIT_VALIDATION
    }
}

/// Data a calibration run works on.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub grid: HyperGrid,
    pub calibration: Batch,
    pub test: Option<Batch>,
    pub pilot: Option<PilotSummary>,
    pub units: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub dataset: Dataset,
    pub written: Vec<PathBuf>,
}

fn from_file(d: RiskData) -> Batch {
    Batch {
        risks: d.matrix,
        rewards: d.rewards,
    }
}

/// Generates (or loads) calibration and test data without calibrating.
pub fn build_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    cfg.validate()?;
    with_workers(cfg.workers, || match &cfg.env {
        EnvConfig::Synthetic { family } => {
            let grid = family.grid()?;
            let calibration = sample_batch(
                family,
                &grid,
                cfg.n_cal(),
                derive_seed(cfg.seed, stream::CALIBRATION, 0),
            )?;
            let test = match cfg.n_test() {
                0 => None,
                n => Some(sample_batch(family, &grid, n, derive_seed(cfg.seed, stream::TEST, 0))?),
            };
            Ok(Dataset {
                grid,
                calibration,
                test,
                pilot: None,
                units: None,
            })
        }
        EnvConfig::Scheduler(env) => {
            let grid = scheduler_grid(env)?;
            let pilot = run_pilot(cfg, &grid)?;
            let calibration = simulate_batch(env, &grid, cfg.seed, stream::CALIBRATION, 0, cfg.n_cal())?;
            let test = match cfg.n_test() {
                0 => None,
                n => Some(simulate_batch(env, &grid, cfg.seed, stream::TEST, 0, n)?),
            };
            Ok(Dataset {
                grid,
                calibration,
                test,
                pilot,
                units: Some("ms".into()),
            })
        }
        EnvConfig::File { risks, test } => {
            let data = load_risk_data(risks)?;
            let test = match test {
                Some(p) => {
                    let t = load_risk_data(p)?;
                    if t.grid != data.grid {
                        return Err(Error::SchemaMismatch(format!(
                            "{} and {} use different grids",
                            p.display(),
                            risks.display()
                        )));
                    }
                    Some(from_file(t))
                }
                None => None,
            };
            Ok(Dataset {
                grid: data.grid.clone(),
                units: data.units.clone(),
                calibration: from_file(data),
                test,
                pilot: None,
            })
        }
    })
}

fn write_dataset(cfg: &ExperimentConfig, d: &Dataset, include_calibration: bool) -> Result<Vec<PathBuf>> {
    let out = &cfg.output_dir;
    let mut written = Vec::new();
    let mut put = |name: &str, b: &Batch| -> Result<()> {
        let p = out.join(name);
        write_risk_matrix(&p, &b.risks, &d.grid, b.rewards.as_ref(), d.units.as_deref())?;
        written.push(p);
        Ok(())
    };
    if include_calibration {
        put(files::CALIBRATION, &d.calibration)?;
    }
    if let Some(t) = &d.test {
        put(files::TEST, t)?;
    }
    if let Some(p) = &d.pilot {
        let path = out.join(files::PILOT);
        write_json(&path, p)?;
        written.push(path);
    }
    Ok(written)
}

/// `simulate`: writes the calibration and test matrices (and pilot summary).
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<SimulateOutcome> {
    if matches!(cfg.env, EnvConfig::File { .. }) {
        return Err(Error::InvalidConfig(
            "simulate needs a synthetic or scheduler env".into(),
        ));
    }
    let dataset = build_dataset(cfg)?;
    let written = write_dataset(cfg, &dataset, true)?;
    Ok(SimulateOutcome { dataset, written })
}

#[derive(Debug, Clone)]
pub struct CalibrateOutcome {
    pub results: Vec<CalibrationResult>,
    pub summary: String,
    pub written: Vec<PathBuf>,
}

/// Calibrates every configured method on one dataset.
pub fn calibrate_dataset(cfg: &ExperimentConfig, d: &Dataset) -> Result<Vec<CalibrationResult>> {
    let risks = &d.calibration.risks;
    cfg.methods()
        .into_iter()
        .map(|m| {
            let setup = MethodSetup::new(cfg, m, d.grid.len(), risks.bounded_unit(), d.pilot.as_ref())?;
            let view = setup.view(risks)?;
            let mut r = calibrate(&view, &d.grid, &setup.spec, d.calibration.rewards.as_ref())?;
            r.seed = Some(cfg.seed);
            r.check_invariants()?;
            Ok(r)
        })
        .collect()
}

/// Human-readable summary of one result.
pub fn summarize(r: &CalibrationResult, grid: &HyperGrid) -> String {
    let s = &r.spec;
    let mut out = format!("method {}: alpha = {}, delta = {}", s.method, s.alpha, s.delta);
    if let (Method::Quantile, Some(q)) = (s.method, s.q) {
        out.push_str(&format!(", q = {q}"));
    }
    out.push_str(&format!(", n = {}, {:?}\n", r.n, s.fwer));
    match r.selected {
        None => out.push_str("no hyperparameter certified\n"),
        Some(id) => {
            out.push_str(&format!(
                "certified {} of {} hyperparameters\n",
                r.certified.len(),
                grid.len()
            ));
            let params = grid.get(id).map(|p| format!("{:?}", p.params)).unwrap_or_default();
            out.push_str(&format!("selected id {id} {params}\n"));
        }
    }
    out.push_str(&format!(
        "p-values: min {:e}, max {:e}\n",
        r.min_p_value(),
        r.max_p_value()
    ));
    out
}

/// `calibrate`: writes `result_<method>.json` per method plus `summary.txt`.
/// Generated environments also get their data files written.
pub fn cmd_calibrate(cfg: &ExperimentConfig) -> Result<CalibrateOutcome> {
    let dataset = build_dataset(cfg)?;
    let generated = !matches!(cfg.env, EnvConfig::File { .. });
    let mut written = write_dataset(cfg, &dataset, generated)?;
    let results = calibrate_dataset(cfg, &dataset)?;
    let mut summary = String::new();
    for r in &results {
        let p = cfg.output_dir.join(files::result(r.spec.method));
        write_json(&p, r)?;
        written.push(p);
        summary.push_str(&summarize(r, &dataset.grid));
    }
    let p = cfg.output_dir.join(files::SUMMARY);
    write_file(&p, summary.as_bytes())?;
    written.push(p);
    Ok(CalibrateOutcome {
        results,
        summary,
        written,
    })
}

/// `coverage`: writes `coverage.json`.
pub fn cmd_coverage(cfg: &ExperimentConfig) -> Result<(CoverageReport, PathBuf)> {
    let report = run_coverage(cfg)?;
    let p = cfg.output_dir.join(files::COVERAGE);
    write_json(&p, &report)?;
    Ok((report, p))
}

/// `report`: reads results from `dir` and writes figure data next to them.
pub fn cmd_report(dir: &Path) -> Result<ReportOutcome> {
    write_reports(dir, dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(dir: &Path, method: &str) -> ExperimentConfig {
        let mut cfg: ExperimentConfig = serde_json::from_str(&format!(
            r#"{{"spec": {{"alpha": 0.5, "delta": 0.1, "q": 0.1, "method": "{method}", "fwer": "bonferroni"}},
                "env": {{"kind": "synthetic", "family": {{"kind": "uniform_scale", "scales": [0.3, 0.5, 0.6, 2.0]}}}},
                "n_cal": 1500, "n_test": 20, "seed": 4}}"#
        ))
        .unwrap();
        cfg.output_dir = dir.to_path_buf();
        cfg
    }

    #[test]
    fn calibrate_writes_results_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = synthetic(dir.path(), "quantile");
        cfg.methods = vec![Method::Quantile, Method::Mean];
        // Scale 2 is not unit-bounded, so mean control must refuse.
        assert!(matches!(cmd_calibrate(&cfg), Err(Error::SchemaMismatch(_))));

        cfg.methods = vec![Method::Quantile];
        let out = cmd_calibrate(&cfg).unwrap();
        let r = &out.results[0];
        // True 0.9-quantiles: 0.27, 0.45, 0.54, 1.8.
        assert!(r.certified.iter().all(|&id| id <= 1));
        assert!(out.summary.contains("selected id"));
        assert!(dir.path().join("result_quantile.json").exists());
        assert!(dir.path().join("calibration.manifest.json").exists());
    }

    #[test]
    fn empty_certified_set_is_not_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = synthetic(dir.path(), "quantile");
        cfg.spec.alpha = 0.01;
        let out = cmd_calibrate(&cfg).unwrap();
        assert!(out.results[0].certified.is_empty());
        assert!(out.summary.contains("no hyperparameter certified"));
    }

    #[test]
    fn file_env_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = synthetic(dir.path(), "quantile");
        let sim = cmd_simulate(&cfg).unwrap();
        let mut file_cfg = cfg.clone();
        file_cfg.env = EnvConfig::File {
            risks: dir.path().join(files::CALIBRATION),
            test: Some(dir.path().join(files::TEST)),
        };
        file_cfg.output_dir = dir.path().join("again");
        let a = calibrate_dataset(&cfg, &sim.dataset).unwrap();
        let b = cmd_calibrate(&file_cfg).unwrap().results;
        assert_eq!(a, b);
        assert!(matches!(cmd_simulate(&file_cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn exit_codes_distinguish_io() {
        assert_eq!(exit_code(&Error::FileNotFound("x".into())), EXIT_IO);
        assert_eq!(exit_code(&Error::InvalidSpec("x".into())), EXIT_VALIDATION);
    }
}
