use std::fmt;

use serde::Serialize;

use super::{format_sig12, HarnessError, RunArtifact, StepRow};

/// Absolute differences at one step. A moment difference is absent when
/// either run has no observable at that step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDiff {
    pub step: usize,
    pub survival: f64,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub steps: Vec<StepDiff>,
    pub max_survival: f64,
    pub max_mean: f64,
    pub max_variance: f64,
}

impl ComparisonReport {
    pub fn is_zero(&self) -> bool {
        self.max_survival == 0.0 && self.max_mean == 0.0 && self.max_variance == 0.0
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_sig12).unwrap_or_default();
        let mut out = String::from("step,d_survival,d_mean,d_variance\n");
        for d in &self.steps {
            out.push_str(&format!(
                "{},{},{},{}\n",
                d.step,
                format_sig12(d.survival),
                opt(d.mean),
                opt(d.variance)
            ));
        }
        out
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "steps compared: {}", self.steps.len())?;
        writeln!(f, "max |d survival|: {}", format_sig12(self.max_survival))?;
        writeln!(f, "max |d mean|:     {}", format_sig12(self.max_mean))?;
        write!(f, "max |d variance|: {}", format_sig12(self.max_variance))
    }
}

pub fn compare_rows(a: &[StepRow], b: &[StepRow]) -> Result<ComparisonReport, HarnessError> {
    if a.len() != b.len() {
        return Err(HarnessError::HorizonMismatch {
            left: a.len().saturating_sub(1),
            right: b.len().saturating_sub(1),
        });
    }
    let diff = |x: Option<f64>, y: Option<f64>| Some((x? - y?).abs());
    let steps: Vec<StepDiff> = a
        .iter()
        .zip(b)
        .map(|(x, y)| StepDiff {
            step: x.step,
            survival: (x.survival - y.survival).abs(),
            mean: diff(x.mean, y.mean),
            variance: diff(x.variance, y.variance),
        })
        .collect();
    let max = |get: fn(&StepDiff) -> Option<f64>| steps.iter().filter_map(get).fold(0.0, f64::max);
    Ok(ComparisonReport {
        max_survival: max(|d| Some(d.survival)),
        max_mean: max(|d| d.mean),
        max_variance: max(|d| d.variance),
        steps,
    })
}

pub fn compare_runs(a: &RunArtifact, b: &RunArtifact) -> Result<ComparisonReport, HarnessError> {
    compare_rows(&a.rows, &b.rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::run_walk;
    use crate::lattice::WalkConfig;

    fn artifact(m: usize, r_sq: f64, steps: usize) -> RunArtifact {
        RunArtifact::from_trajectory(
            &run_walk(&WalkConfig::new(4, steps, m, r_sq).unwrap()).unwrap(),
        )
    }

    #[test]
    fn self_comparison_is_zero() {
        let a = artifact(3, 0.8, 50);
        let report = compare_runs(&a, &a).unwrap();
        assert!(report.is_zero());
        assert_eq!(report.steps.len(), 51);
    }

    #[test]
    fn horizon_mismatch() {
        let err = compare_runs(&artifact(2, 0.2, 10), &artifact(2, 0.2, 12)).unwrap_err();
        assert!(matches!(
            err,
            HarnessError::HorizonMismatch {
                left: 10,
                right: 12
            }
        ));
    }

    #[test]
    fn weak_leak_tracks_lossless_early_on() {
        let report = compare_runs(&artifact(2, 0.2, 40), &artifact(2, 0.0, 40)).unwrap();
        assert!(report.max_mean > 0.0);
        assert!(report.max_survival > 0.0);
        let strong = compare_runs(&artifact(2, 0.8, 40), &artifact(2, 0.0, 40)).unwrap();
        assert!(report.max_mean < strong.max_mean);
    }

    #[test]
    fn csv_has_one_line_per_step() {
        let a = artifact(2, 0.2, 5);
        let csv = compare_runs(&a, &a).unwrap().to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert_eq!(csv.lines().nth(1).unwrap(), "0,0,0,0");
    }
}
