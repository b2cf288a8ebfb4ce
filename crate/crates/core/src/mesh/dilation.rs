use ndarray::{s, Array2};
use num_complex::Complex64;

use super::{decompose, MeshError, MeshProgram};
use crate::lattice::{bs_block, step_operator, LayerParity, WalkConfig, WalkError};

/// Unitary embedding of an `n`-step leaky walk.
///
/// Modes `0..2M` are the lattice, modes `2M..2M+L` the ancillas; ancilla `j`
/// receives whatever leaks at the `j`-th offset layer and is never touched
/// again, so with empty ancillas the lattice block is exactly the walk's
/// transfer matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedCircuit {
    pub total_modes: usize,
    pub unitary: Array2<Complex64>,
    pub lattice_modes: Vec<usize>,
    pub ancilla_modes: Vec<usize>,
}

impl DilatedCircuit {
    /// Top-left `2M x 2M` block.
    pub fn lattice_block(&self) -> Array2<Complex64> {
        let l = self.lattice_modes.len();
        self.unitary.slice(s![..l, ..l]).to_owned()
    }

    pub fn leak_events(&self) -> usize {
        self.ancilla_modes.len()
    }
}

pub fn dilate_walk(config: &WalkConfig, n: usize) -> Result<DilatedCircuit, WalkError> {
    config.validate()?;
    if n == 0 {
        return Err(WalkError::StepIndex);
    }
    let lattice = config.modes();
    let ancillas = config.offset_layers(n);
    let total = lattice + ancillas;
    let edge = config.leak_index();
    let leak = bs_block(config.r_sq)?;

    let mut acc = Array2::<Complex64>::eye(total);
    let mut next_ancilla = lattice;
    for k in 1..=n {
        let op = step_operator(k, config)?;
        let mut layer = Array2::<Complex64>::eye(total);
        layer
            .slice_mut(s![..lattice, ..lattice])
            .assign(op.matrix());
        if op.parity() == LayerParity::Offset {
            let [[t, r], [neg_r, t2]] = leak.entries();
            let a = next_ancilla;
            layer[[edge, edge]] = Complex64::new(t, 0.0);
            layer[[edge, a]] = Complex64::new(r, 0.0);
            layer[[a, edge]] = Complex64::new(neg_r, 0.0);
            layer[[a, a]] = Complex64::new(t2, 0.0);
            next_ancilla += 1;
        }
        acc = layer.dot(&acc);
    }

    Ok(DilatedCircuit {
        total_modes: total,
        unitary: acc,
        lattice_modes: (0..lattice).collect(),
        ancilla_modes: (lattice..total).collect(),
    })
}

/// Mesh program for the `n`-step walk. Lattice modes come first in the
/// program's mode order. A lossless walk needs no ancillas and compiles on
/// the `2M` lattice modes alone.
pub fn compile_walk(config: &WalkConfig, n: usize) -> Result<MeshProgram, MeshError> {
    let circuit = dilate_walk(config, n)?;
    if config.r_sq == 0.0 {
        decompose(&circuit.lattice_block())
    } else {
        decompose(&circuit.unitary)
    }
}
