//! Evolution of a single excitation and its per-step observables.

mod extrema;

pub use extrema::{first_extremum_step, Extremum, ExtremumKind, SwingDetector};

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{step_operator, Position, StepOperator, WalkConfig, WalkError};

/// Survival below this is treated as total loss.
pub const SURVIVAL_FLOOR: f64 = 1e-300;

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Array1<Complex64>,
    pub step: usize,
}

impl StateVector {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Position-resolved probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub probabilities: Vec<f64>,
    pub positions: Vec<Position>,
    pub renormalized: bool,
}

impl Distribution {
    /// Raw squared moduli of `state`, optionally divided by their sum.
    pub fn from_state(state: &StateVector, config: &WalkConfig, renormalize: bool) -> Option<Self> {
        let mut probabilities = state.probabilities();
        if renormalize {
            let total: f64 = probabilities.iter().sum();
            if total <= SURVIVAL_FLOOR {
                return None;
            }
            probabilities.iter_mut().for_each(|p| *p /= total);
        }
        Some(Distribution {
            probabilities,
            positions: config.positions(),
            renormalized: renormalize,
        })
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    fn require_normalized(&self) -> Result<(), WalkError> {
        let total = self.total();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(WalkError::NotNormalized(total));
        }
        Ok(())
    }

    fn moment(&self, power: i32) -> f64 {
        self.probabilities
            .iter()
            .zip(&self.positions)
            .map(|(p, x)| p * x.value().powi(power))
            .sum()
    }
}

/// `<x> = sum p_i x_i` of a normalized distribution.
pub fn mean_position(dist: &Distribution) -> Result<f64, WalkError> {
    dist.require_normalized()?;
    Ok(dist.moment(1))
}

/// `<x^2> - <x>^2` of a normalized distribution, clamped at zero.
pub fn variance(dist: &Distribution) -> Result<f64, WalkError> {
    dist.require_normalized()?;
    let mean = dist.moment(1);
    Ok((dist.moment(2) - mean * mean).max(0.0))
}

/// Unit amplitude at the configured input mode.
pub fn initial_state(config: &WalkConfig) -> Result<StateVector, WalkError> {
    config.validate()?;
    let mut amplitudes = Array1::zeros(config.modes());
    amplitudes[config.input_mode - 1] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        amplitudes,
        step: 0,
    })
}

/// Dense application of `op` to `state`.
pub fn evolve_step(state: &StateVector, op: &StepOperator) -> Result<StateVector, WalkError> {
    Ok(StateVector {
        amplitudes: op.apply_dense(&state.amplitudes)?,
        step: state.step + 1,
    })
}

/// Observables of the surviving population at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub distribution: Distribution,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub amplitudes: Array1<Complex64>,
    pub survival: f64,
    /// Absent once the surviving population has vanished.
    pub observables: Option<Observables>,
}

impl StepRecord {
    pub fn mean(&self) -> Option<f64> {
        self.observables.as_ref().map(|o| o.mean)
    }

    pub fn variance(&self) -> Option<f64> {
        self.observables.as_ref().map(|o| o.variance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub config: WalkConfig,
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.records.len() - 1
    }

    pub fn record(&self, n: usize) -> Result<&StepRecord, WalkError> {
        self.records.get(n).ok_or(WalkError::StepOutOfRange {
            step: n,
            last: self.horizon(),
        })
    }

    /// First step whose observables are undefined, if any.
    pub fn degenerate_from(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.observables.is_none())
            .map(|r| r.step)
    }

    /// Mean position at every step; fails if the run became degenerate.
    pub fn means(&self) -> Result<Vec<f64>, WalkError> {
        self.series(StepRecord::mean)
    }

    pub fn variances(&self) -> Result<Vec<f64>, WalkError> {
        self.series(StepRecord::variance)
    }

    pub fn survivals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.survival).collect()
    }

    fn series(&self, pick: impl Fn(&StepRecord) -> Option<f64>) -> Result<Vec<f64>, WalkError> {
        self.records
            .iter()
            .map(|r| pick(r).ok_or(WalkError::DegenerateRun { step: r.step }))
            .collect()
    }
}

/// Squared norm of the raw amplitudes at step `n`.
pub fn survival(traj: &Trajectory, n: usize) -> Result<f64, WalkError> {
    traj.record(n).map(|r| r.survival)
}

fn make_record(state: &StateVector, config: &WalkConfig) -> StepRecord {
    let survival = state.norm_sqr();
    let observables = if survival > SURVIVAL_FLOOR {
        // Moments always refer to the surviving population; the stored
        // distribution follows the config.
        let normalized = Distribution::from_state(state, config, true).expect("positive survival");
        let mean = normalized.moment(1);
        let variance = (normalized.moment(2) - mean * mean).max(0.0);
        let distribution = if config.renormalize {
            normalized
        } else {
            Distribution::from_state(state, config, false).expect("raw distribution")
        };
        Some(Observables {
            distribution,
            mean,
            variance,
        })
    } else {
        None
    };
    StepRecord {
        step: state.step,
        amplitudes: state.amplitudes.clone(),
        survival,
        observables,
    }
}

/// Runs `config.steps` steps with the block-wise update.
pub fn run_walk(config: &WalkConfig) -> Result<Trajectory, WalkError> {
    let mut state = initial_state(config)?;
    let mut records = Vec::with_capacity(config.steps + 1);
    records.push(make_record(&state, config));
    let mut degenerate = false;
    for k in 1..=config.steps {
        let op = step_operator(k, config)?;
        op.apply_in_place(state.amplitudes.as_slice_mut().expect("contiguous"))?;
        state.step = k;
        let mut record = make_record(&state, config);
        degenerate |= record.observables.is_none();
        if degenerate {
            record.observables = None;
        }
        records.push(record);
    }
    Ok(Trajectory {
        config: config.clone(),
        records,
    })
}
