//! Operators `V~_w` applied to the identity, via jets on smooth fields and
//! reversed matrix products on linear ones.

mod engine;
mod field;
mod jet;
mod validate;

pub use engine::{VectorFieldSet, DEFAULT_BUDGET};
pub use field::{ConstantField, Field, FieldRegistry, TrigV2, SmoothField};
pub use jet::Jet;
pub use validate::{jet_derivative, jet_validate, JetReport, OrderCheck, FD_SLOPE_STEPS, FD_STEPS};
