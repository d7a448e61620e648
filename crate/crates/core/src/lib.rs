//! Permanence analysis for discrete-time two-species maps
//! `x' = x f(x, y)`, `y' = y g(x, y)` with non-monotonic growth rates.

pub mod builtin;
pub mod checker;
pub mod config;
pub mod derivatives;
pub mod dissipativity;
pub mod error;
pub mod fixed_points;
pub mod grid;
pub mod lyapunov;
pub mod model;
pub mod orbit;
pub mod quadrature;
pub mod roots;
pub mod tail;
pub mod verifier;

pub use builtin::{BuiltinModel, ModelParams};
pub use config::ModelConfig;
pub use error::{Error, Result};
pub use model::{Axis, AxisView, GrowthModel, OriginClass, TailCaps};
