//! Restricted Boltzmann machines over ±1 units with energy `E(v, h) = −vᵀ J h`.

mod checkpoint;
mod gradient;
mod model;
mod reconstruct;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use gradient::{data_term, exact_gradient, exact_log_likelihood, exact_model_term, gradient, model_term};
pub use model::{logistic, Rbm, INIT_HALF_WIDTH};
pub use reconstruct::{reconstruct, validation_error, ReconstructMode};
pub use train::{train, EpochRecord, TrainAbort, TrainConfig, TrainHistory};
