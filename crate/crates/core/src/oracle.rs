//! Naive reference evolution used to cross-check the dynamics module.
//!
//! Nothing here touches the lattice operator builder: the beam-splitter
//! coefficients and the pairing pattern are re-derived inline and every step
//! is written as an explicit sum over the two amplitudes entering each block.

use num_complex::Complex64;

use crate::lattice::{LayerParity, LeakEdge, WalkConfig, WalkError};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub amplitudes: Vec<Complex64>,
    pub survival: f64,
}

/// Which block (if any) a 0-based mode belongs to in a given column, as the
/// 0-based upper mode of that block.
fn partner_block(mode: usize, modes: usize, full_column: bool) -> Option<usize> {
    if full_column {
        Some(mode - mode % 2)
    } else if mode == 0 || mode == modes - 1 {
        None
    } else {
        Some(if mode % 2 == 1 { mode } else { mode - 1 })
    }
}

/// `|Psi(n)>` by brute-force summation.
pub fn oracle_evolve(config: &WalkConfig, n: usize) -> Result<OracleResult, WalkError> {
    config.validate()?;
    let modes = 2 * config.half_width;
    let coin = [
        [0.5f64.sqrt(), 0.5f64.sqrt()],
        [-(0.5f64.sqrt()), 0.5f64.sqrt()],
    ];
    let edge_through = (1.0 - config.r_sq).sqrt();
    let leaky = if config.leak_edge == LeakEdge::Top {
        0
    } else {
        modes - 1
    };

    let mut psi = vec![Complex64::new(0.0, 0.0); modes];
    psi[config.input_mode - 1] = Complex64::new(1.0, 0.0);

    for step in 1..=n {
        let full_column = (step % 2 == 1) == (config.first_layer == LayerParity::Full);
        let mut next = vec![Complex64::new(0.0, 0.0); modes];
        for (out, slot) in next.iter_mut().enumerate() {
            match partner_block(out, modes, full_column) {
                Some(top) => {
                    let row = out - top;
                    let mut sum = Complex64::new(0.0, 0.0);
                    for col in 0..2 {
                        sum += psi[top + col] * coin[row][col];
                    }
                    *slot = sum;
                }
                None if out == leaky => *slot = psi[out] * edge_through,
                None => *slot = psi[out],
            }
        }
        psi = next;
    }

    let survival = psi.iter().map(|a| a.re * a.re + a.im * a.im).sum();
    Ok(OracleResult {
        amplitudes: psi,
        survival,
    })
}

/// Oracle states for steps `0..=config.steps`.
pub fn oracle_trajectory(config: &WalkConfig) -> Result<Vec<OracleResult>, WalkError> {
    (0..=config.steps)
        .map(|n| oracle_evolve(config, n))
        .collect()
}

/// Whether the oracle and [`crate::dynamics::run_walk`] agree at step `n`
/// elementwise and in survival, within `tol`.
pub fn oracle_matches_dynamics(config: &WalkConfig, n: usize, tol: f64) -> bool {
    let Ok(reference) = oracle_evolve(config, n) else {
        return false;
    };
    let Ok(traj) = crate::dynamics::run_walk(&config.clone().with_steps(n)) else {
        return false;
    };
    let record = &traj.records[n];
    record
        .amplitudes
        .iter()
        .zip(&reference.amplitudes)
        .all(|(a, b)| (a - b).norm() <= tol)
        && (record.survival - reference.survival).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_is_basis_vector() {
        let c = WalkConfig::new(4, 0, 5, 0.3).unwrap();
        let r = oracle_evolve(&c, 0).unwrap();
        assert_eq!(r.survival, 1.0);
        assert_eq!(r.amplitudes[4], Complex64::new(1.0, 0.0));
        assert_eq!(r.amplitudes.iter().filter(|a| a.norm() > 0.0).count(), 1);
    }

    #[test]
    fn one_balanced_step() {
        let c = WalkConfig::new(4, 1, 2, 0.5).unwrap();
        let r = oracle_evolve(&c, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.amplitudes[0] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((r.amplitudes[1] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!(r.amplitudes[2..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn lossless_preserves_norm() {
        for m in 1..=8 {
            let c = WalkConfig::new(4, 12, m, 0.0).unwrap();
            assert!((oracle_evolve(&c, 12).unwrap().survival - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_dynamics_examples() {
        for (r_sq, m) in [(0.2, 2), (0.8, 7), (1.0, 3)] {
            let c = WalkConfig::new(4, 12, m, r_sq).unwrap();
            assert!(oracle_matches_dynamics(&c, 12, 1e-10));
        }
    }

    #[test]
    fn rejects_invalid_config() {
        let mut c = WalkConfig::new(4, 3, 2, 0.2).unwrap();
        c.input_mode = 11;
        assert!(oracle_evolve(&c, 3).is_err());
        assert!(!oracle_matches_dynamics(&c, 3, 1e-10));
    }
}
