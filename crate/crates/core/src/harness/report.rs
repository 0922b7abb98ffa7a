//! Figure-ready CSV exports.
//!
//! `histogram.csv` holds the test-episode risk of each method's selected point,
//! one row per (method, episode). `violin.csv` holds the functionals of the
//! selection of every coverage trial, one row per (trial, method). Both start
//! with `#` comment lines describing the columns; the column order is fixed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::control::{CalibrationResult, Method};
use crate::error::{Error, Result};
use crate::harness::coverage::CoverageReport;
use crate::harness::io::{load_risk_matrix, read_json, write_file};
use crate::risk::RiskMatrix;

pub const HISTOGRAM_HEADER: &str = "episode,method,lambda_id,risk";
pub const VIOLIN_HEADER: &str = "trial,method,lambda_id,mean_risk,quantile_risk";

/// Standard file names inside an output directory.
pub mod files {
    pub const CALIBRATION: &str = "calibration.csv";
    pub const TEST: &str = "test.csv";
    pub const PILOT: &str = "pilot.json";
    pub const COVERAGE: &str = "coverage.json";
    pub const SUMMARY: &str = "summary.txt";
    pub const HISTOGRAM: &str = "histogram.csv";
    pub const VIOLIN: &str = "violin.csv";

    pub fn result(method: crate::control::Method) -> String {
        format!("result_{}.json", method.as_str())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders `histogram.csv`. Results without a selection contribute no rows.
pub fn histogram_csv(results: &[CalibrationResult], test: &RiskMatrix) -> Result<String> {
    let mut out = String::new();
    out.push_str("# test-episode risk of the hyperparameter each method selected\n");
    out.push_str("# episode: row of the test matrix; method: mean | quantile; lambda_id: selected grid id;\n");
    out.push_str("# risk: test matrix value in its native units\n");
    out.push_str(HISTOGRAM_HEADER);
    out.push('\n');
    for r in results {
        let Some(id) = r.selected else { continue };
        if id >= test.width() {
            return Err(Error::SchemaMismatch(format!(
                "selected id {id} is outside the test matrix of width {}",
                test.width()
            )));
        }
        for (i, row) in test.rows().iter().enumerate() {
            writeln!(out, "{i},{},{id},{}", r.spec.method, row[id]).expect("write to String");
        }
    }
    Ok(out)
}

/// Renders `violin.csv`, one row per coverage record.
pub fn violin_csv(report: &CoverageReport) -> String {
    let mut out = String::new();
    out.push_str("# functionals of the selected hyperparameter in every coverage trial\n");
    out.push_str("# trial: trial index; method: mean | quantile; lambda_id: selected grid id;\n");
    out.push_str(&format!(
        "# mean_risk, quantile_risk: {} mean and q-quantile risk of the selection (q = {});\n",
        if report.truth.source == "analytic" {
            "true"
        } else {
            "held-out"
        },
        opt(report.q)
    ));
    out.push_str("# the last three cells are empty when nothing was certified\n");
    out.push_str(VIOLIN_HEADER);
    out.push('\n');
    for r in &report.records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.trial,
            r.method,
            r.selected.map(|id| id.to_string()).unwrap_or_default(),
            opt(r.selected_mean),
            opt(r.selected_quantile)
        )
        .expect("write to String");
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportOutcome {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Builds whatever figure data the files in `dir` allow, writing into `out`.
///
/// Missing inputs produce warnings; only when nothing at all can be written is
/// it an error.
pub fn write_reports(dir: &Path, out: &Path) -> Result<ReportOutcome> {
    let mut outcome = ReportOutcome::default();
    let mut missing = Vec::new();

    let mut results = Vec::new();
    for m in [Method::Mean, Method::Quantile] {
        let p = dir.join(files::result(m));
        if p.exists() {
            let r: CalibrationResult = read_json(&p)?;
            if r.spec.method != m {
                return Err(Error::SchemaMismatch(format!(
                    "{} holds a {} result",
                    p.display(),
                    r.spec.method
                )));
            }
            if r.selected.is_none() {
                outcome
                    .warnings
                    .push(format!("{}: nothing certified, no histogram rows", p.display()));
            }
            results.push(r);
        } else {
            outcome.warnings.push(format!("{} not found", p.display()));
            missing.push(p);
        }
    }
    let test_path = dir.join(files::TEST);
    if !results.is_empty() {
        if test_path.exists() {
            let (test, _) = load_risk_matrix(&test_path)?;
            let p = out.join(files::HISTOGRAM);
            write_file(&p, histogram_csv(&results, &test)?.as_bytes())?;
            outcome.written.push(p);
        } else {
            outcome
                .warnings
                .push(format!("{} not found, histogram skipped", test_path.display()));
            missing.push(test_path);
        }
    }

    let cov_path = dir.join(files::COVERAGE);
    if cov_path.exists() {
        let report: CoverageReport = read_json(&cov_path)?;
        let p = out.join(files::VIOLIN);
        write_file(&p, violin_csv(&report).as_bytes())?;
        outcome.written.push(p);
    } else {
        outcome
            .warnings
            .push(format!("{} not found, violin data skipped", cov_path.display()));
        missing.push(cov_path);
    }

    if outcome.written.is_empty() {
        return Err(Error::FileNotFound(missing.swap_remove(0)));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::ControlSpec;

    fn result(method: Method, selected: Option<usize>) -> CalibrationResult {
        let spec = match method {
            Method::Mean => ControlSpec::mean(0.5, 0.1),
            Method::Quantile => ControlSpec::quantile(0.5, 0.1, 0.1),
        };
        CalibrationResult {
            p_values: vec![0.0, 1.0],
            certified: selected.into_iter().collect(),
            selected,
            spec,
            n: 10,
            seed: None,
        }
    }

    #[test]
    fn histogram_rows_per_episode_and_method() {
        let test = RiskMatrix::new(vec![vec![1.5, 2.0], vec![0.25, 3.0], vec![4.0, 5.0]], false).unwrap();
        let csv = histogram_csv(
            &[result(Method::Mean, Some(1)), result(Method::Quantile, Some(0))],
            &test,
        )
        .unwrap();
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], HISTOGRAM_HEADER);
        assert_eq!(
            &rows[1..],
            [
                "0,mean,1,2",
                "1,mean,1,3",
                "2,mean,1,5",
                "0,quantile,0,1.5",
                "1,quantile,0,0.25",
                "2,quantile,0,4"
            ]
        );

        let csv = histogram_csv(&[result(Method::Quantile, None)], &test).unwrap();
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1);
    }

    #[test]
    fn missing_inputs_warn_or_fail() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            write_reports(dir.path(), dir.path()),
            Err(Error::FileNotFound(_))
        ));

        let test = RiskMatrix::new(vec![vec![0.1, 0.2]], true).unwrap();
        let g = crate::grid::HyperGrid::scalar(&[1.0, 2.0]).unwrap();
        crate::harness::io::write_risk_matrix(&dir.path().join(files::TEST), &test, &g, None, None).unwrap();
        crate::harness::io::write_json(
            &dir.path().join(files::result(Method::Mean)),
            &result(Method::Mean, Some(1)),
        )
        .unwrap();
        let out = write_reports(dir.path(), dir.path()).unwrap();
        assert_eq!(out.written, vec![dir.path().join(files::HISTOGRAM)]);
        assert_eq!(out.warnings.len(), 2);
        let text = std::fs::read_to_string(dir.path().join(files::HISTOGRAM)).unwrap();
        assert!(text.ends_with("episode,method,lambda_id,risk\n0,mean,1,0.2\n"));
    }
}
