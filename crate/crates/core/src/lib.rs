//! Two-sided content platform with human and AI creators.
//!
//! - [`model`]: analytic supply, demand, utility and traffic primitives.
//! - [`equilibrium`]: market clearing and welfare accounting.
//! - [`abm`]: the seeded agent-based simulator.
//! - [`metrics`]: per-tick observables and shock summaries.
//! - [`experiments`]: baseline runs, sensitivity sweeps, policy grids and
//!   their CSV/SVG outputs.

pub mod abm;
pub mod calibration;
pub mod equilibrium;
pub mod experiments;
pub mod metrics;
pub mod model;

pub use abm::{SimConfig, SimState};
pub use metrics::MetricsRow;
pub use model::ModelParams;
