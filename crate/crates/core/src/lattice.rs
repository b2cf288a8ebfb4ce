//! Lattice data model and per-step evolution operators.
//!
//! The lattice has `2M` spatial modes, numbered `1..=2M`. Each step applies a
//! column of beam splitters: a *full* layer pairs `(1,2), (3,4), ..., (2M-1,2M)`,
//! an *offset* layer pairs `(2,3), ..., (2M-2,2M-1)` and leaves the two edge
//! modes unpaired. On offset layers the reflective edge passes through
//! unchanged while the leaky edge is coupled to a fresh external mode that is
//! discarded afterwards, which scales its amplitude by `sqrt(1 - r^2)`.

use std::fmt;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Transmissivity of the internal coin beam splitters.
pub const BALANCED: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("half width must be at least 2, got {0}")]
    HalfWidth(usize),
    #[error("input mode {mode} outside 1..={modes}")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("leak transmissivity r_sq = {0} outside [0, 1]")]
    Transmissivity(f64),
    #[error("step index must be at least 1")]
    StepIndex,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("step {step} outside recorded range 0..={last}")]
    StepOutOfRange { step: usize, last: usize },
    #[error("distribution is not normalized (sum = {0})")]
    NotNormalized(f64),
    #[error("survival underflow at step {step}: renormalized observables are undefined")]
    DegenerateRun { step: usize },
}

/// Which lattice edge leaks. The opposite edge is always hard-reflective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakEdge {
    /// Mode 1.
    Top,
    /// Mode 2M.
    Bottom,
}

/// Pairing pattern of a beam-splitter column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerParity {
    /// `M` blocks on `(1,2), (3,4), ...`.
    Full,
    /// `M - 1` blocks on `(2,3), (4,5), ...`; edge modes unpaired.
    Offset,
}

impl LayerParity {
    pub fn flipped(self) -> Self {
        match self {
            LayerParity::Full => LayerParity::Offset,
            LayerParity::Offset => LayerParity::Full,
        }
    }
}

impl fmt::Display for LayerParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayerParity::Full => "full",
            LayerParity::Offset => "offset",
        })
    }
}

/// Full description of one walk instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// `M`; the lattice has `2M` modes.
    pub half_width: usize,
    /// Number of steps `N`.
    pub steps: usize,
    /// Injection mode, 1-based.
    pub input_mode: usize,
    /// Squared transmissivity of the leaky boundary beam splitter.
    pub r_sq: f64,
    pub leak_edge: LeakEdge,
    /// Parity of the layer applied at step 1.
    pub first_layer: LayerParity,
    pub renormalize: bool,
}

impl WalkConfig {
    /// Config with the default conventions: leak at mode 1, full pairing
    /// first, renormalized observables.
    pub fn new(
        half_width: usize,
        steps: usize,
        input_mode: usize,
        r_sq: f64,
    ) -> Result<Self, WalkError> {
        let config = WalkConfig {
            half_width,
            steps,
            input_mode,
            r_sq,
            leak_edge: LeakEdge::Top,
            first_layer: LayerParity::Full,
            renormalize: true,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_leak_edge(mut self, edge: LeakEdge) -> Self {
        self.leak_edge = edge;
        self
    }

    pub fn with_first_layer(mut self, parity: LayerParity) -> Self {
        self.first_layer = parity;
        self
    }

    pub fn with_renormalize(mut self, renormalize: bool) -> Self {
        self.renormalize = renormalize;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_input_mode(mut self, mode: usize) -> Result<Self, WalkError> {
        self.input_mode = mode;
        self.validate()?;
        Ok(self)
    }

    pub fn with_r_sq(mut self, r_sq: f64) -> Result<Self, WalkError> {
        self.r_sq = r_sq;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        if self.half_width < 2 {
            return Err(WalkError::HalfWidth(self.half_width));
        }
        let modes = self.modes();
        if self.input_mode < 1 || self.input_mode > modes {
            return Err(WalkError::ModeOutOfRange {
                mode: self.input_mode,
                modes,
            });
        }
        if !(0.0..=1.0).contains(&self.r_sq) {
            return Err(WalkError::Transmissivity(self.r_sq));
        }
        Ok(())
    }

    /// Number of lattice modes, `2M`.
    pub fn modes(&self) -> usize {
        2 * self.half_width
    }

    /// 0-based index of the leaky edge mode.
    pub fn leak_index(&self) -> usize {
        match self.leak_edge {
            LeakEdge::Top => 0,
            LeakEdge::Bottom => self.modes() - 1,
        }
    }

    /// 0-based index of the reflective edge mode.
    pub fn reflect_index(&self) -> usize {
        match self.leak_edge {
            LeakEdge::Top => self.modes() - 1,
            LeakEdge::Bottom => 0,
        }
    }

    /// Parity of the layer applied at `step_index` (1-based).
    pub fn layer_parity(&self, step_index: usize) -> LayerParity {
        if step_index % 2 == 1 {
            self.first_layer
        } else {
            self.first_layer.flipped()
        }
    }

    /// Number of offset layers (leak events) among steps `1..=n`.
    pub fn offset_layers(&self, n: usize) -> usize {
        (1..=n)
            .filter(|&k| self.layer_parity(k) == LayerParity::Offset)
            .count()
    }

    /// Lattice coordinates of all modes, in mode order.
    pub fn positions(&self) -> Vec<Position> {
        (1..=self.modes())
            .map(|m| Position::of_mode(m, self.half_width))
            .collect()
    }
}

/// Half-integer lattice coordinate `x = -(M - 1/2) + (m - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Position(pub f64);

impl Position {
    fn of_mode(mode: usize, half_width: usize) -> Self {
        Position(-(half_width as f64 - 0.5) + (mode as f64 - 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Coordinate of 1-based mode `mode` on a lattice of half width `half_width`.
pub fn mode_to_position(mode: usize, half_width: usize) -> Result<Position, WalkError> {
    let modes = 2 * half_width;
    if mode < 1 || mode > modes {
        return Err(WalkError::ModeOutOfRange { mode, modes });
    }
    Ok(Position::of_mode(mode, half_width))
}

/// Real two-mode beam splitter `[[t, r], [-r, t]]` with `r = sqrt(r_sq)` and
/// `t = sqrt(1 - r_sq)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsBlock {
    r_sq: f64,
    t: f64,
    r: f64,
}

impl BsBlock {
    pub fn r_sq(&self) -> f64 {
        self.r_sq
    }

    /// Diagonal (through) amplitude.
    pub fn through(&self) -> f64 {
        self.t
    }

    /// Off-diagonal (cross) amplitude.
    pub fn cross(&self) -> f64 {
        self.r
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.t, self.r], [-self.r, self.t]]
    }

    pub fn matrix(&self) -> Array2<Complex64> {
        let e = self.entries();
        Array2::from_shape_fn((2, 2), |(i, j)| Complex64::new(e[i][j], 0.0))
    }

    pub fn determinant(&self) -> f64 {
        self.t * self.t + self.r * self.r
    }

    /// Acts on the amplitude pair `(upper, lower)`.
    #[inline]
    pub fn apply(&self, upper: Complex64, lower: Complex64) -> (Complex64, Complex64) {
        (
            upper * self.t + lower * self.r,
            lower * self.t - upper * self.r,
        )
    }
}

pub fn bs_block(r_sq: f64) -> Result<BsBlock, WalkError> {
    if !(0.0..=1.0).contains(&r_sq) {
        return Err(WalkError::Transmissivity(r_sq));
    }
    Ok(BsBlock {
        r_sq,
        t: (1.0 - r_sq).sqrt(),
        r: r_sq.sqrt(),
    })
}

/// One column of beam splitters, kept both as a dense matrix and as the list
/// of blocks it is made of.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOperator {
    parity: LayerParity,
    modes: usize,
    /// 0-based upper mode of each balanced block.
    pairs: Vec<usize>,
    coin: BsBlock,
    /// Leaky edge index and its surviving amplitude factor, on offset layers.
    leak: Option<(usize, f64)>,
    matrix: Array2<Complex64>,
}

impl StepOperator {
    pub fn parity(&self) -> LayerParity {
        self.parity
    }

    pub fn leak_applied(&self) -> bool {
        self.leak.is_some()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// 0-based `(upper, lower)` mode pairs of the balanced blocks.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&i| (i, i + 1))
    }

    /// Dense matrix-vector product.
    pub fn apply_dense(
        &self,
        amplitudes: &Array1<Complex64>,
    ) -> Result<Array1<Complex64>, WalkError> {
        self.check_len(amplitudes.len())?;
        Ok(self.matrix.dot(amplitudes))
    }

    /// Applies the blocks directly, without touching the dense matrix.
    pub fn apply_in_place(&self, amplitudes: &mut [Complex64]) -> Result<(), WalkError> {
        self.check_len(amplitudes.len())?;
        for &i in &self.pairs {
            let (a, b) = self.coin.apply(amplitudes[i], amplitudes[i + 1]);
            amplitudes[i] = a;
            amplitudes[i + 1] = b;
        }
        if let Some((edge, factor)) = self.leak {
            amplitudes[edge] *= factor;
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<(), WalkError> {
        if len != self.modes {
            return Err(WalkError::Dimension {
                expected: self.modes,
                got: len,
            });
        }
        Ok(())
    }
}

/// Operator for 1-based step `step_index` of the walk described by `config`.
pub fn step_operator(step_index: usize, config: &WalkConfig) -> Result<StepOperator, WalkError> {
    config.validate()?;
    if step_index == 0 {
        return Err(WalkError::StepIndex);
    }
    let modes = config.modes();
    let parity = config.layer_parity(step_index);
    let coin = bs_block(BALANCED)?;
    let (pairs, leak) = match parity {
        LayerParity::Full => ((0..modes).step_by(2).collect::<Vec<_>>(), None),
        LayerParity::Offset => {
            let edge = bs_block(config.r_sq)?;
            (
                (1..modes - 1).step_by(2).collect(),
                Some((config.leak_index(), edge.through())),
            )
        }
    };

    let mut matrix = Array2::<Complex64>::zeros((modes, modes));
    for &i in &pairs {
        let e = coin.entries();
        for (a, row) in e.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                matrix[[i + a, i + b]] = Complex64::new(v, 0.0);
            }
        }
    }
    if let Some((edge, factor)) = leak {
        matrix[[edge, edge]] = Complex64::new(factor, 0.0);
        let reflect = config.reflect_index();
        matrix[[reflect, reflect]] = Complex64::new(1.0, 0.0);
    }

    Ok(StepOperator {
        parity,
        modes,
        pairs,
        coin,
        leak,
        matrix,
    })
}

/// Ordered product `U(n) ... U(1)` of the first `n` step operators.
pub fn transfer_matrix(config: &WalkConfig, n: usize) -> Result<Array2<Complex64>, WalkError> {
    let mut acc = Array2::<Complex64>::eye(config.modes());
    for k in 1..=n {
        acc = step_operator(k, config)?.matrix().dot(&acc);
    }
    Ok(acc)
}
