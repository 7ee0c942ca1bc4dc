//! Complex-valued coordinate MLP: linear layers, activation, per-sample
//! normalization onto the unit disc, and real-part readout.

mod checkpoint;
mod config;
mod kernel;
mod linalg;
mod model;
mod tape_route;
mod train;

use crate::activations::ActivationError;
use crate::numerics::{Complex, NumericsError};

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_FORMAT};
pub use config::{bounded_param, Bounds, InitScheme, NetworkConfig, ParamBounds};
pub use model::{init_network, normalize_layer, LayerTap, Network};
pub use tape_route::loss_on_tape;
pub use train::{train, train_observed, EpochRecord, TrainConfig, TrainRecord};

#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error("bounds need lo < hi, got ({lo}, {hi})")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error(transparent)]
    Activation(#[from] ActivationError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("{what}: expected {expected} values, got {got}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("coordinate ({row}, {col}) = {value} lies outside [-1, 1]")]
    CoordinateOutOfRange { row: usize, col: usize, value: f64 },
    #[error("mask selects no samples")]
    EmptyMask,
    #[error("non-finite activation in hidden layer {layer}, sample {row} (input {input})")]
    NonFinite { layer: usize, row: usize, input: Complex },
    #[error("training diverged at epoch {epoch}: {reason}")]
    Diverged {
        epoch: usize,
        reason: String,
        /// Parameters from the last epoch whose loss was finite.
        last_good: Box<Network>,
    },
    #[error("activation parameter left its bounds at epoch {epoch}: {name} = {value}")]
    BoundViolation { epoch: usize, name: String, value: f64 },
    #[error("invalid train config: {0}")]
    InvalidTrainConfig(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
