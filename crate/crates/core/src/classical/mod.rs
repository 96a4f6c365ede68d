//! Classical side: Hamiltonian flow `Φ_t`, occupation times, the geometric
//! constant `C[T, K, Ω]` and the geometric-condition check.

mod compact;
pub(crate) mod flow;
mod occupation;
mod region;

pub use compact::{CompactSet, PhaseBox};
pub use flow::{flow, VerletStepper};
pub use occupation::{
    check_gc, geometric_constant, occupation_time, trace_trajectory, GcReport, GeometricConstant,
    TrajectoryStats, Witness,
};
pub use region::{Cutoff, Region};

use crate::num::{vec, Real};

/// A point `(x, ξ)` of phase space `R^d × R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint<T, const D: usize> {
    pub x: [T; D],
    pub xi: [T; D],
}

impl<T: Real, const D: usize> PhasePoint<T, D> {
    pub fn new(x: [T; D], xi: [T; D]) -> Self {
        Self { x, xi }
    }

    /// Coordinate `k` of the `2D`-vector `(x, ξ)`.
    #[inline]
    pub fn coord(&self, k: usize) -> T {
        if k < D {
            self.x[k]
        } else {
            self.xi[k - D]
        }
    }

    pub fn is_finite(&self) -> bool {
        vec::is_finite(&self.x) && vec::is_finite(&self.xi)
    }

    /// `|x − x'|² + |ξ − ξ'|²`
    pub fn dist2(&self, other: &Self) -> T {
        vec::norm2(&vec::sub(&self.x, &other.x)) + vec::norm2(&vec::sub(&self.xi, &other.xi))
    }

    pub fn dist(&self, other: &Self) -> T {
        self.dist2(other).sqrt()
    }

    /// λ-weighted squared distance `λ²|x − x'|² + |ξ − ξ'|²`.
    pub fn weighted_dist2(&self, other: &Self, lambda: T) -> T {
        lambda * lambda * vec::norm2(&vec::sub(&self.x, &other.x))
            + vec::norm2(&vec::sub(&self.xi, &other.xi))
    }
}
