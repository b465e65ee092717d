//! Classical wave-optics toolkit for polarization-tagged two-slit erasers,
//! delayed-choice subensemble compilation and wire-grid (Afshar-style)
//! imaging.
//!
//! Everything here is non-quantum: Jones calculus for polarization, scalar
//! angular-spectrum diffraction on 1-D grids, classical pulse pairs with
//! definite polarization, and a detector that turns continuous intensity
//! into discrete clicks.
//!
//! The crate performs no IO. File formats, configuration parsing and the
//! command-line front end live in `wavecomp-cli`.

pub mod analysis;
pub mod detection;
mod error;
pub mod experiments;
pub mod polarization;
mod rng;
pub mod sources;
pub mod wavefield;

pub use error::{Error, Result};
pub use polarization::{JonesVector, PolarizerAngle};
pub use wavefield::{ApertureMask, Grid, ScalarField, VectorField};

/// Version string recorded in every experiment result.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
