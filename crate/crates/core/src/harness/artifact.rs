use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{format_sig12, r_sq_label, HarnessError, OutputFormat, TOOLKIT_VERSION};
use crate::dynamics::Trajectory;
use crate::lattice::WalkConfig;

const SURVIVAL_SLACK: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

/// One step of a serialized run. Observables are absent once the surviving
/// population has vanished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub step: usize,
    pub survival: f64,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub probabilities: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub version: String,
    pub config: WalkConfig,
    pub rows: Vec<StepRow>,
}

impl RunArtifact {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let rows = traj
            .records
            .iter()
            .map(|r| StepRow {
                step: r.step,
                survival: r.survival,
                mean: r.mean(),
                variance: r.variance(),
                probabilities: r
                    .observables
                    .as_ref()
                    .map(|o| o.distribution.probabilities.clone()),
            })
            .collect();
        RunArtifact {
            version: TOOLKIT_VERSION.to_string(),
            config: traj.config.clone(),
            rows,
        }
    }

    pub fn horizon(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// Base file name (without extension).
    pub fn stem(&self) -> String {
        format!(
            "run_r{}_m{}_n{}",
            r_sq_label(self.config.r_sq),
            self.config.input_mode,
            self.config.steps
        )
    }

    /// Checks the trajectory invariants on every row.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.rows.len() != self.config.steps + 1 {
            return Err(HarnessError::InvalidRow {
                step: self.rows.len(),
                reason: format!("expected {} rows", self.config.steps + 1),
            });
        }
        let x_max = self.config.half_width as f64 - 0.5;
        let modes = self.config.modes();
        let mut previous = 1.0;
        for (n, row) in self.rows.iter().enumerate() {
            let bad = |reason: String| HarnessError::InvalidRow {
                step: row.step,
                reason,
            };
            if row.step != n {
                return Err(bad(format!("step index {} at position {n}", row.step)));
            }
            if !(0.0..=1.0 + SURVIVAL_SLACK).contains(&row.survival) {
                return Err(bad(format!("survival {} outside [0, 1]", row.survival)));
            }
            if row.survival > previous + SURVIVAL_SLACK {
                return Err(bad(format!(
                    "survival rose from {previous} to {}",
                    row.survival
                )));
            }
            previous = row.survival;
            if let Some(v) = row.variance {
                if !(0.0..=x_max * x_max + SURVIVAL_SLACK).contains(&v) {
                    return Err(bad(format!("variance {v} outside [0, {}]", x_max * x_max)));
                }
            }
            if let Some(m) = row.mean {
                if m.abs() > x_max + SURVIVAL_SLACK {
                    return Err(bad(format!("mean {m} outside the lattice")));
                }
            }
            if let Some(p) = &row.probabilities {
                if p.len() != modes {
                    return Err(bad(format!("{} probabilities for {modes} modes", p.len())));
                }
                if p.iter().any(|&v| v < 0.0) {
                    return Err(bad("negative probability".into()));
                }
                let total: f64 = p.iter().sum();
                if self.config.renormalize && (total - 1.0).abs() > SUM_TOL {
                    return Err(bad(format!("probabilities sum to {total}")));
                }
            }
        }
        Ok(())
    }

    /// Long-form CSV: `step,survival,mean,variance,p1..p2M`.
    pub fn to_csv(&self) -> String {
        let modes = self.config.modes();
        let mut out = String::from("step,survival,mean,variance");
        for k in 1..=modes {
            out.push_str(&format!(",p{k}"));
        }
        out.push('\n');
        let opt = |v: Option<f64>| v.map(format_sig12).unwrap_or_default();
        for row in &self.rows {
            out.push_str(&row.step.to_string());
            out.push(',');
            out.push_str(&format_sig12(row.survival));
            out.push(',');
            out.push_str(&opt(row.mean));
            out.push(',');
            out.push_str(&opt(row.variance));
            for k in 0..modes {
                out.push(',');
                out.push_str(&opt(row.probabilities.as_ref().map(|p| p[k])));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    /// Validates and writes the artifact in each format under `dir`.
    pub fn write(
        &self,
        dir: &Path,
        formats: &[OutputFormat],
    ) -> Result<Vec<PathBuf>, HarnessError> {
        self.validate()?;
        let mut written = Vec::new();
        for format in formats {
            let (ext, body) = match format {
                OutputFormat::Csv => ("csv", self.to_csv()),
                OutputFormat::Json => ("json", self.to_json()),
            };
            let path = dir.join(format!("{}.{ext}", self.stem()));
            fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Writes every artifact; one failure does not stop the others.
pub fn write_artifacts(
    artifacts: &[RunArtifact],
    dir: &Path,
    formats: &[OutputFormat],
) -> Vec<Result<Vec<PathBuf>, HarnessError>> {
    if let Err(e) = fs::create_dir_all(dir) {
        let msg = e.to_string();
        return artifacts
            .iter()
            .map(|_| {
                Err(HarnessError::io(
                    dir,
                    std::io::Error::new(e.kind(), msg.clone()),
                ))
            })
            .collect();
    }
    artifacts.iter().map(|a| a.write(dir, formats)).collect()
}

/// Reads the rows of a long-form CSV written by [`RunArtifact::to_csv`].
pub fn read_rows_csv(path: &Path) -> Result<Vec<StepRow>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |reason: String| HarnessError::Csv {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let fixed = ["step", "survival", "mean", "variance"];
    if headers.len() < fixed.len() || headers.iter().zip(fixed).any(|(h, f)| h != f) {
        return Err(bad(format!(
            "unexpected header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let modes = headers.len() - fixed.len();

    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let cell = |k: usize| -> Result<Option<f64>, HarnessError> {
            let s = record.get(k).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<f64>()
                .map(Some)
                .map_err(|_| bad(format!("line {}: cannot parse {s:?}", line + 2)))
        };
        let step = record
            .get(0)
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| bad(format!("line {}: bad step", line + 2)))?;
        let survival =
            cell(1)?.ok_or_else(|| bad(format!("line {}: missing survival", line + 2)))?;
        let probabilities: Vec<Option<f64>> =
            (0..modes).map(|k| cell(4 + k)).collect::<Result<_, _>>()?;
        rows.push(StepRow {
            step,
            survival,
            mean: cell(2)?,
            variance: cell(3)?,
            probabilities: probabilities.into_iter().collect(),
        });
    }
    Ok(rows)
}
