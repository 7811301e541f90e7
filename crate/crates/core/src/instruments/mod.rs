//! Subsystem measurements and their noisy implementations.
//!
//! Tensor factors are ordered (unmeasured E) ⊗ (measured D) ⊗ (outcome D)
//! throughout, and outcome arithmetic is mod `D`.
//!
//! Non-uniform models are normalized per outcome, `sum_{a,b} nu_{a,b,j} = 1`
//! for every `j`, and must in addition satisfy the trace-preservation
//! condition `sum_{a,b} nu_{a,b,k-b} = 1` for every input basis state `k`;
//! the two coincide when the report-flip weights do not depend on `j`.

mod implementation;
pub mod json;
mod models;
mod random;

pub use implementation::{born_probabilities, full_channel, ideal_instrument, InstrumentImplementation, SubsystemMeasurement};
pub use json::ErrorModel;
pub use models::{average_over_outcomes, expand_nonuniform, expand_uniform, NonUniformStochasticModel, UniformStochasticModel};
pub use random::{random_general_implementation, random_nonuniform_model, random_uniform_model};
