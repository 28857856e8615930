//! Dense double-precision tensors with reverse-mode differentiation, a
//! named parameter store with Adam updates, finite-difference gradient
//! verification and a text checkpoint format.
//!
//! Computations are built on a [`Graph`] tape: every primitive records its
//! inputs and enough context to run its adjoint, and [`Graph::backward`]
//! accumulates gradients for every node in one reverse sweep. Forward
//! values are checked for finiteness after every primitive; a NaN or
//! infinity is a hard error, never a silent poison value.

mod adam;
mod checkpoint;
mod error;
mod gradcheck;
mod graph;
mod params;
mod tensor;

pub use adam::AdamConfig;
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use error::NumericsError;
pub use gradcheck::{grad_check, GradCheckConfig, GradCheckReport, ParamGradReport};
pub use graph::{Axis, Graph, MlpVars, VarId};
pub use params::{bind_params, collect_gradients, Gradients, ParamBinding, ParamStore};
pub use tensor::Tensor;

pub type Result<T> = std::result::Result<T, NumericsError>;
