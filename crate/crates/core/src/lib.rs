//! Discrete-time quantum walks on a finite photonic lattice with one
//! reflective and one leaky edge, and a compiler from walk transfer matrices
//! to rectangular MZI mesh programs.

pub mod dynamics;
pub mod harness;
pub mod lattice;
pub mod mesh;
pub mod oracle;

pub use dynamics::{run_walk, Trajectory};
pub use lattice::{LayerParity, LeakEdge, WalkConfig, WalkError};
