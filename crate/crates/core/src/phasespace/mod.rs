//! Phase-space pictures of wave functions: Wigner and Husimi transforms,
//! Husimi mass of a compact set, and Töplitz (anti-Wick) mixtures.

mod husimi;
mod toeplitz;
mod wigner;

pub use husimi::{coherent_tail_check, husimi, husimi_mass, husimi_mass_with, TailCheck};
pub use toeplitz::{atomize_uniform, toeplitz_observe, toeplitz_observed_mass, Atom, ToeplitzState};
pub use wigner::wigner;

use crate::error::{Error, Result};
use crate::num::{compensated_sum, Real};

/// Uniform sample points `lo, lo + step, …` along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<T> {
    pub lo: T,
    pub step: T,
    pub count: usize,
}

impl<T: Real> Axis<T> {
    pub fn new(lo: T, step: T, count: usize) -> Result<Self> {
        if count == 0 || !(step > T::zero()) || !lo.is_finite() || !step.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "axis needs a positive step and at least one point (lo={lo}, step={step}, count={count})"
            )));
        }
        Ok(Self { lo, step, count })
    }

    /// `count` points spanning `[lo, hi]` with both ends included.
    pub fn span(lo: T, hi: T, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return Err(Error::InvalidParameter(format!("bad axis span [{lo}, {hi}] with {count} points")));
        }
        Self::new(lo, (hi - lo) / T::from_usize_lossy(count - 1), count)
    }

    #[inline]
    pub fn at(&self, i: usize) -> T {
        self.lo + T::from_usize_lossy(i) * self.step
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.at(self.count - 1)
    }
}

/// Tensor lattice over a phase-space box. Flat index runs over position
/// axes first (axis 0 fastest), then momentum axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid<T, const D: usize> {
    pub x: [Axis<T>; D],
    pub xi: [Axis<T>; D],
}

impl<T: Real, const D: usize> PhaseGrid<T, D> {
    pub fn new(x: [Axis<T>; D], xi: [Axis<T>; D]) -> Self {
        Self { x, xi }
    }

    /// Same axis in every position direction and in every momentum direction.
    pub fn isotropic(x: Axis<T>, xi: Axis<T>) -> Self {
        Self { x: [x; D], xi: [xi; D] }
    }

    pub fn len(&self) -> usize {
        self.x.iter().chain(&self.xi).map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> T {
        self.x.iter().chain(&self.xi).map(|a| a.step).fold(T::one(), |a, b| a * b)
    }

    pub fn x_len(&self) -> usize {
        self.x.iter().map(|a| a.count).product()
    }

    pub fn xi_len(&self) -> usize {
        self.xi.iter().map(|a| a.count).product()
    }

    /// Indices of flat node `f` along each of the `2D` axes.
    pub fn multi_index(&self, mut f: usize) -> ([usize; D], [usize; D]) {
        let mut ix = [0; D];
        let mut ik = [0; D];
        for (i, a) in ix.iter_mut().zip(&self.x) {
            *i = f % a.count;
            f /= a.count;
        }
        for (i, a) in ik.iter_mut().zip(&self.xi) {
            *i = f % a.count;
            f /= a.count;
        }
        (ix, ik)
    }

    pub fn node(&self, f: usize) -> ([T; D], [T; D]) {
        let (ix, ik) = self.multi_index(f);
        (
            std::array::from_fn(|a| self.x[a].at(ix[a])),
            std::array::from_fn(|a| self.xi[a].at(ik[a])),
        )
    }

    pub fn max_abs_momentum(&self) -> T {
        self.xi
            .iter()
            .map(|a| a.lo.abs().max(a.hi().abs()))
            .fold(T::zero(), T::max)
    }
}

/// Real field on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField<T, const D: usize> {
    pub grid: PhaseGrid<T, D>,
    pub values: Vec<T>,
    pub hbar: T,
}

/// Husimi function sampled on a phase grid; nonnegative by construction.
pub type HusimiField<T, const D: usize> = PhaseField<T, D>;

impl<T: Real, const D: usize> PhaseField<T, D> {
    /// Riemann sum over the grid.
    pub fn integral(&self) -> T {
        compensated_sum(self.values.iter().copied()) * self.grid.cell_volume()
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Node with the largest value.
    pub fn argmax(&self) -> ([T; D], [T; D]) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        self.grid.node(best)
    }

    /// `∫ field dξ` at each position node, in position flat order.
    pub fn position_marginal(&self) -> Vec<T> {
        let nx = self.grid.x_len();
        let nk = self.grid.xi_len();
        let dxi = self.grid.xi.iter().map(|a| a.step).fold(T::one(), |a, b| a * b);
        (0..nx)
            .map(|i| compensated_sum((0..nk).map(|k| self.values[i + nx * k])) * dxi)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_ordering() {
        let g = PhaseGrid::<f64, 1>::new([Axis::new(-1.0, 0.5, 5).unwrap()], [Axis::new(0.0, 1.0, 3).unwrap()]);
        assert_eq!(g.len(), 15);
        assert_eq!(g.node(7), ([0.0], [1.0]));
        assert_eq!(g.cell_volume(), 0.5);
        assert_eq!(g.max_abs_momentum(), 2.0);
        assert!(Axis::span(1.0, 1.0, 3).is_err());
    }
}
