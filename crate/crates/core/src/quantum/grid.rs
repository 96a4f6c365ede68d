use crate::error::{Error, Result};
use crate::num::Real;

/// Uniform periodic lattice over `[−L/2, L/2)^D` with `n` points per axis.
/// Flat indices run with axis 0 fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T, const D: usize> {
    n: usize,
    length: T,
}

impl<T: Real, const D: usize> Grid<T, D> {
    pub fn new(n: usize, length: T) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidParameter(format!("box length must be positive, got {length}")));
        }
        Ok(Self { n, length })
    }

    /// Smallest power of two giving at least eight points per de Broglie
    /// wavelength `2πħ/p_max` on a box of the given length.
    pub fn points_for(length: T, hbar: T, p_max: T) -> usize {
        let wavelength = T::two() * T::PI() * hbar / p_max.abs().max(hbar);
        let need = (T::lit(8.0) * length / wavelength).ceil().to_usize().unwrap_or(2);
        need.max(2).next_power_of_two()
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(D as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.length / T::from_usize_lossy(self.n)
    }

    #[inline]
    pub fn cell_volume(&self) -> T {
        self.dx().powi(D as i32)
    }

    #[inline]
    pub fn coord(&self, j: usize) -> T {
        -self.length * T::half() + T::from_usize_lossy(j) * self.dx()
    }

    #[inline]
    pub fn multi_index(&self, mut flat: usize) -> [usize; D] {
        let mut idx = [0; D];
        for slot in idx.iter_mut() {
            *slot = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    #[inline]
    pub fn position(&self, flat: usize) -> [T; D] {
        let idx = self.multi_index(flat);
        std::array::from_fn(|a| self.coord(idx[a]))
    }

    /// Signed FFT mode number of index `j` in `[−n/2, n/2)`.
    #[inline]
    pub fn mode(&self, j: usize) -> isize {
        if j < self.n / 2 {
            j as isize
        } else {
            j as isize - self.n as isize
        }
    }

    #[inline]
    pub fn wavenumber(&self, j: usize) -> T {
        let m = self.mode(j);
        let k = T::two() * T::PI() / self.length;
        if m >= 0 {
            k * T::from_usize_lossy(m as usize)
        } else {
            -k * T::from_usize_lossy((-m) as usize)
        }
    }

    #[inline]
    pub fn wavevector(&self, flat: usize) -> [T; D] {
        let idx = self.multi_index(flat);
        std::array::from_fn(|a| self.wavenumber(idx[a]))
    }

    #[inline]
    pub fn k_nyquist(&self) -> T {
        T::PI() / self.dx()
    }

    /// Whether a flat index lies on the edge of the box along any axis.
    #[inline]
    pub fn is_edge(&self, flat: usize) -> bool {
        self.multi_index(flat).iter().any(|&j| j == 0 || j == self.n - 1)
    }

    /// Whether a mode lies in the outer quarter of the spectral band.
    #[inline]
    pub fn is_spectral_tail(&self, flat: usize) -> bool {
        let cut = (3 * self.n / 8) as isize;
        self.multi_index(flat).iter().any(|&j| self.mode(j).abs() >= cut)
    }

    /// Flat indices of the edge nodes.
    pub fn edge_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&f| self.is_edge(f)).collect()
    }
}
