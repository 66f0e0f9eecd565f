//! Lévy measures and the compound-Poisson jumps they drive.

mod measure;
mod sampling;
mod theta;

pub use measure::{JumpRange, LevyMeasure};
pub use sampling::{check_events, sample_jumps, JumpEvent};
pub use theta::{make_theta, NoiseCoefficients};
