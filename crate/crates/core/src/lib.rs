//! Numerical certification of semiclassical observability inequalities for
//! the Schrödinger equation: classical flow and occupation times, split-step
//! quantum propagation, Husimi/Wigner/Töplitz phase-space tools, discrete
//! optimal transport bounds, and certificates that compare a proven lower
//! bound with the mass observed in simulation.
//!
//! Everything numeric is generic over [`num::Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod certify;
pub mod classical;
pub mod cli;
pub mod error;
pub mod num;
pub mod phasespace;
pub mod potential;
pub mod quantum;
pub mod transport;

pub use certify::{CertificationReport, Verdict};
pub use error::{Error, Result};
pub use num::Real;

pub type PhasePoint<const D: usize> = classical::PhasePoint<f64, D>;
pub type PhaseBox<const D: usize> = classical::PhaseBox<f64, D>;
pub type CompactSet<const D: usize> = classical::CompactSet<f64, D>;
pub type Region<const D: usize> = classical::Region<f64, D>;
pub type Cutoff<const D: usize> = classical::Cutoff<f64, D>;
pub type Aabb<const D: usize> = potential::Aabb<f64, D>;
pub type Potential<const D: usize> = potential::Potential<f64, D>;
pub type Grid<const D: usize> = quantum::Grid<f64, D>;
pub type WaveFunction<const D: usize> = quantum::WaveFunction<f64, D>;
pub type PhaseGrid<const D: usize> = phasespace::PhaseGrid<f64, D>;
pub type PhaseField<const D: usize> = phasespace::PhaseField<f64, D>;
pub type ToeplitzState<const D: usize> = phasespace::ToeplitzState<f64, D>;
pub type AtomicMeasure<const D: usize> = transport::AtomicMeasure<f64, D>;
pub type CostParams = transport::CostParams<f64>;
