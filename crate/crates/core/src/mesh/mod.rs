//! Rectangular MZI mesh programs.
//!
//! Each MZI acting on adjacent modes `(i, i+1)` has the transfer matrix
//!
//! ```text
//! T(theta, phi) = [[e^{i phi} cos(theta), -sin(theta)],
//!                  [e^{i phi} sin(theta),  cos(theta)]]
//! ```
//!
//! so `theta = 0` is the bar state and `theta = pi/2` the cross state. A
//! program lists MZIs in the order light meets them; the realized matrix is
//! `D * T_K * ... * T_1` with `D = diag(e^{i alpha_k})` the output phases.

mod clements;
mod dilation;

pub use clements::{decompose, reconstruct};
pub use dilation::{compile_walk, dilate_walk, DilatedCircuit};

use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::WalkError;

/// Unitarity tolerance accepted by [`decompose`].
pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("matrix is not unitary: max |U^dag U - I| = {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid mesh program: {0}")]
    InvalidProgram(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// One tunable beam splitter of the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mzi {
    /// Upper mode (0-based); the MZI couples `i` and `i + 1`.
    pub i: usize,
    /// Internal phase controlling the splitting ratio.
    pub theta: f64,
    /// External phase on the upper input.
    pub phi: f64,
}

impl Mzi {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        [
            [e * c, Complex64::new(-s, 0.0)],
            [e * s, Complex64::new(c, 0.0)],
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProgram")]
pub struct MeshProgram {
    pub dimension: usize,
    pub mzis: Vec<Mzi>,
    pub output_phases: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProgram {
    dimension: usize,
    mzis: Vec<Mzi>,
    output_phases: Vec<f64>,
}

impl TryFrom<RawProgram> for MeshProgram {
    type Error = MeshError;

    fn try_from(raw: RawProgram) -> Result<Self, Self::Error> {
        MeshProgram::new(raw.dimension, raw.mzis, raw.output_phases)
    }
}

impl MeshProgram {
    pub fn new(
        dimension: usize,
        mzis: Vec<Mzi>,
        output_phases: Vec<f64>,
    ) -> Result<Self, MeshError> {
        if dimension == 0 {
            return Err(MeshError::InvalidProgram(
                "dimension must be positive".into(),
            ));
        }
        let expected = mzi_count(dimension);
        if mzis.len() != expected {
            return Err(MeshError::InvalidProgram(format!(
                "{} MZIs for dimension {dimension}, expected {expected}",
                mzis.len()
            )));
        }
        if output_phases.len() != dimension {
            return Err(MeshError::InvalidProgram(format!(
                "{} output phases for dimension {dimension}",
                output_phases.len()
            )));
        }
        for m in &mzis {
            if m.i + 1 >= dimension {
                return Err(MeshError::InvalidProgram(format!(
                    "MZI on modes ({}, {}) outside dimension {dimension}",
                    m.i,
                    m.i + 1
                )));
            }
            check_phase("theta", m.theta)?;
            check_phase("phi", m.phi)?;
        }
        for &a in &output_phases {
            check_phase("output phase", a)?;
        }
        Ok(MeshProgram {
            dimension,
            mzis,
            output_phases,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn check_phase(name: &str, value: f64) -> Result<(), MeshError> {
    if !(0.0..TAU).contains(&value) {
        return Err(MeshError::InvalidProgram(format!(
            "{name} {value} outside [0, 2pi)"
        )));
    }
    Ok(())
}

/// `d(d-1)/2`.
pub fn mzi_count(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// Wraps a phase into `[0, 2pi)`.
pub fn canonical_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Largest elementwise deviation of `U^dag U` from the identity.
pub fn unitarity_defect(u: &Array2<Complex64>) -> f64 {
    let g = adjoint(u).dot(u);
    g.indexed_iter()
        .map(|((i, j), z)| {
            let target = if i == j { 1.0 } else { 0.0 };
            (z - target).norm()
        })
        .fold(0.0, f64::max)
}

pub fn adjoint(u: &Array2<Complex64>) -> Array2<Complex64> {
    u.t().mapv(|z| z.conj())
}

/// `F = (1/d) Tr |U_th^dag U_exp|`, with `|.|` taken elementwise.
pub fn amplitude_fidelity(
    u_th: &Array2<Complex64>,
    u_exp: &Array2<Complex64>,
) -> Result<f64, MeshError> {
    for u in [u_th, u_exp] {
        if u.nrows() != u.ncols() {
            return Err(MeshError::NotSquare {
                rows: u.nrows(),
                cols: u.ncols(),
            });
        }
    }
    if u_th.nrows() != u_exp.nrows() {
        return Err(MeshError::DimensionMismatch {
            left: u_th.nrows(),
            right: u_exp.nrows(),
        });
    }
    let d = u_th.nrows();
    if d == 0 {
        return Err(MeshError::NotSquare { rows: 0, cols: 0 });
    }
    let trace: f64 = (0..d)
        .map(|k| {
            (0..d)
                .map(|j| u_th[[j, k]].conj() * u_exp[[j, k]])
                .sum::<Complex64>()
                .norm()
        })
        .sum();
    Ok(trace / d as f64)
}

/// Haar-random unitary: Gram-Schmidt on a complex Gaussian matrix, which
/// leaves the implicit triangular factor with a positive diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Array2<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    for k in 0..d {
        for j in 0..k {
            let (done, rest) = cols.split_at_mut(k);
            let q = &done[j];
            let proj: Complex64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, qa) in rest[0].iter_mut().zip(q) {
                *x -= proj * qa;
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[k].iter_mut().for_each(|z| *z /= norm);
    }
    Array2::from_shape_fn((d, d), |(i, j)| cols[j][i])
}
