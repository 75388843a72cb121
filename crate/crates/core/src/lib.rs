//! Chua's circuit with an antiparallel semiconductor-diode nonlinearity.
//!
//! The crate covers the whole analysis chain of the dimensionless model
//! `x' = alpha(-x + y - u(x))`, `y' = x - y + z`, `z' = -beta y` with
//! `u(x) = g0 x + I0 sinh x`:
//!
//! * [`model`]: parameters, vector field, Jacobian, equilibria.
//! * [`dfan`]: Nyquist diagram, describing function, harmonic-balance
//!   limit cycles and the analytic region map.
//! * [`sim`]: RK4 / Dormand-Prince integration and Poincaré sections at `y = 0`.
//! * [`diagnostics`]: Lyapunov spectrum, dominant frequency, attractor labels.
//! * [`sweep`]: bifurcation diagrams and parameter-plane maps.
//! * [`circuitmap`]: component values to dimensionless parameters.

pub mod circuitmap;
pub mod diagnostics;
pub mod dfan;
pub mod error;
pub mod model;
pub mod ode;
pub mod sim;
pub mod special;
pub mod sweep;

pub use error::{ChuaError, Result};
pub use model::{ChuaParams, State};
