//! Quantum channels, subsystem-measurement instruments, and their error
//! metrics, with a semidefinite-programming diamond-norm oracle for
//! independent verification.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the oracle and
//! the validation tolerances are tuned for.

pub mod channels;
pub mod error;
pub mod instruments;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};
pub use tolerance::Tolerances;

pub type CMatrix = linalg::ComplexMatrix<f64>;
pub type Density = linalg::DensityMatrix<f64>;
pub type Kraus = channels::KrausChannel<f64>;
pub type Choi = channels::ChoiMatrix<f64>;
pub type Stochastic = channels::StochasticChannel<f64>;
pub type Instrument = instruments::InstrumentImplementation<f64>;
pub type UniformModel = instruments::UniformStochasticModel<f64>;
pub type NonUniformModel = instruments::NonUniformStochasticModel<f64>;
