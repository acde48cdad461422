//! 2D placement of the state graph (force-directed) and of the sequence graph
//! (stress majorization on the warping-distance matrix).

mod force;
mod stress;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;

pub use force::{force_directed_layout, matrix_force_layout};
pub use stress::{raw_stress, stress_mds_layout};

pub type Point = [f64; 2];

/// Node id -> fixed coordinates.
pub type Pins = BTreeMap<usize, Point>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ForceDirected,
    StressMds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutConfig {
    pub seed: u64,
    pub iterations: usize,
    pub width: f64,
    pub height: f64,
    /// Initial displacement cap; `None` means a tenth of the width.
    pub initial_step: Option<f64>,
    /// Per-iteration temperature decay factor.
    pub cooling: f64,
    pub algorithm: Algorithm,
    /// Relative stress change below which stress majorization stops.
    pub convergence_epsilon: f64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            seed: 0,
            iterations: 100,
            width: 1000.0,
            height: 1000.0,
            initial_step: None,
            cooling: 0.95,
            algorithm: Algorithm::ForceDirected,
            convergence_epsilon: 1e-9,
            exec: Exec::default(),
        }
    }
}

impl LayoutConfig {
    pub fn stress_mds() -> LayoutConfig {
        LayoutConfig { algorithm: Algorithm::StressMds, iterations: 300, ..Default::default() }
    }

    pub(crate) fn validate(&self) -> Result<(), LayoutError> {
        if self.iterations == 0 {
            return Err(LayoutError::Config("iterations must be at least 1".into()));
        }
        if self.convergence_epsilon.is_nan() || self.convergence_epsilon <= 0.0 {
            return Err(LayoutError::Config("convergence_epsilon must be positive".into()));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(LayoutError::Config("layout area must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LayoutError {
    #[error("invalid layout config: {0}")]
    Config(String),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("edge ({0}, {1}) references a missing node")]
    DanglingEdge(usize, usize),
    #[error("pin on node {0}, which does not exist")]
    DanglingPin(usize),
    #[error("distance matrix is malformed: {0}")]
    BadMatrix(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    /// Indexed by node.
    pub positions: Vec<Point>,
    pub pinned: Pins,
    /// Stress of the final layout (stress majorization only).
    pub final_stress: Option<f64>,
    /// Stress before the first and after every iteration (stress majorization only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stress_history: Vec<f64>,
    pub iterations_run: usize,
}

/// Seeded uniform positions over the layout area, pins applied.
pub(crate) fn initial_positions(n: usize, width: f64, height: f64, seed: u64, pins: &Pins) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<Point> =
        (0..n).map(|_| [rng.gen::<f64>() * width, rng.gen::<f64>() * height]).collect();
    for (&id, &p) in pins {
        positions[id] = p;
    }
    positions
}

pub(crate) fn check_pins(n: usize, pins: &Pins) -> Result<(), LayoutError> {
    match pins.keys().find(|&&id| id >= n) {
        Some(&id) => Err(LayoutError::DanglingPin(id)),
        None => Ok(()),
    }
}

/// Radius encoding for popularity: proportional to `sqrt(count)`, reaching
/// `max` at the largest count and clamped below at `min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusScale {
    pub min: f64,
    pub max: f64,
}

impl Default for RadiusScale {
    fn default() -> Self {
        RadiusScale { min: 3.0, max: 30.0 }
    }
}

impl RadiusScale {
    pub fn radius(&self, count: u64, max_count: u64) -> f64 {
        if max_count == 0 {
            return self.min;
        }
        let r = self.max * (count as f64 / max_count as f64).sqrt();
        r.clamp(self.min, self.max)
    }
}

pub fn node_radius(count: u64, max_count: u64) -> f64 {
    RadiusScale::default().radius(count, max_count)
}
