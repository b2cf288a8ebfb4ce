//! Experiment specs, parameter sweeps and plot-ready artifacts.

mod artifact;
mod compare;
mod figures;
mod spec;
mod sweep;

pub use artifact::{read_rows_csv, write_artifacts, RunArtifact, StepRow};
pub use compare::{compare_rows, compare_runs, ComparisonReport, StepDiff};
pub use figures::{emit_figure_data, figure_panels, FigureId, Panel, Quantity};
pub use spec::{parse_spec, parse_spec_str, ExperimentSpec, OutputFormat, MAX_HORIZON};
pub use sweep::{run_sweep, run_sweep_serial, sweep_configs};

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::lattice::WalkError;
use crate::mesh::MeshError;

pub const TOOLKIT_VERSION: &str = concat!("leakwalk ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid spec: `{key}`: {reason}")]
    Spec { key: String, reason: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV {}: {reason}", path.display())]
    Csv { path: PathBuf, reason: String },
    #[error("figure {figure} is missing series for (r_sq, input): {missing}")]
    MissingSeries { figure: String, missing: String },
    #[error("step horizons differ: {left} vs {right}")]
    HorizonMismatch { left: usize, right: usize },
    #[error("row {step} violates trajectory invariants: {reason}")]
    InvalidRow { step: usize, reason: String },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl HarnessError {
    pub fn spec(key: &str, reason: impl Into<String>) -> Self {
        HarnessError::Spec {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } => 2,
            _ => 1,
        }
    }
}

/// Formats `x` with 12 significant digits, `%g` style: plain decimal for
/// exponents in `-5..12`, scientific otherwise, trailing zeros trimmed.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Compact label for an `r_sq` value, as used in file and column names.
pub fn r_sq_label(r_sq: f64) -> String {
    format!("{}", r_sq)
}
