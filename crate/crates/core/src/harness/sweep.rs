use rayon::prelude::*;

use super::{ExperimentSpec, HarnessError, RunArtifact};
use crate::dynamics::run_walk;
use crate::lattice::WalkConfig;

/// Points of the Cartesian sweep: `r_sq` outermost, then input, then horizon.
pub fn sweep_configs(spec: &ExperimentSpec) -> Result<Vec<WalkConfig>, HarnessError> {
    let mut out = Vec::with_capacity(spec.r_sq.len() * spec.inputs.len() * spec.horizons.len());
    for &r_sq in &spec.r_sq {
        for &m in &spec.inputs {
            for &n in &spec.horizons {
                let config = spec
                    .base
                    .clone()
                    .with_r_sq(r_sq)?
                    .with_input_mode(m)?
                    .with_steps(n);
                config.validate()?;
                out.push(config);
            }
        }
    }
    Ok(out)
}

fn run_one(config: &WalkConfig) -> Result<RunArtifact, HarnessError> {
    Ok(RunArtifact::from_trajectory(&run_walk(config)?))
}

/// Runs every sweep point in parallel; the result order is that of
/// [`sweep_configs`].
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<RunArtifact>, HarnessError> {
    sweep_configs(spec)?.par_iter().map(run_one).collect()
}

pub fn run_sweep_serial(spec: &ExperimentSpec) -> Result<Vec<RunArtifact>, HarnessError> {
    sweep_configs(spec)?.iter().map(run_one).collect()
}
