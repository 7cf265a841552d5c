//! Datasets, loss and gradients, Adam, and training runs.

pub mod dataset;
pub mod gradient;
pub mod optim;
pub mod run;

pub use dataset::{gen_sinusoidal, load_csv_dataset, Dataset, MinMaxScaler, SinusoidalParams};
pub use gradient::{grad_loss, model_gradient, mse, predict, Engine, GradientMethod};
pub use optim::{adam_step, AdamConfig, AdamState};
pub use run::{
    estimate_p_star_mse, init_params, train_run, TrainConfig, TrainHistory, DEFAULT_EPOCHS,
    SCAN_STREAM, TRAIN_STREAM,
};
