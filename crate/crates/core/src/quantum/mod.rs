//! Wave functions on a periodic grid and their split-step evolution.

mod grid;
pub mod propagate;
pub mod snapshot;
mod spectral;
mod wavefunction;

pub use grid::Grid;
pub use propagate::{observe, observed_mass, propagate, propagate_with, Observation, Propagator, Tolerances};
pub use snapshot::{read_snapshot, write_snapshot};
pub use spectral::Spectral;
pub use wavefunction::{Moments, Packet, WaveFunction, ALIASING_TOL, BOUNDARY_TOL};
