//! Sampling of iterated integrals over one time step for time, Wiener and
//! compensated Poisson drivers.

mod compiled;
mod dump;
mod grid;
mod model;
mod path;
mod sample;
mod sampler;

pub use compiled::CompiledExpr;
pub use dump::{config_hash, read_dump, write_dump};
pub use model::{DriverModel, JumpModel};
pub use path::{oracle_fine_grid, DriverPath};
pub use sample::{chen_aggregate, StepSample};
pub use sampler::{levy_area_fourier, sample_step, step_rng, DriverConfig};
