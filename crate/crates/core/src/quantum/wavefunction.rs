use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{compensated_sum, vec, CompensatedSum, Real};
use crate::quantum::{Grid, Spectral};

/// Largest edge amplitude tolerated by constructors and the propagator.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Largest probability tolerated in the outer quarter of the spectral band.
pub const ALIASING_TOL: f64 = 1e-10;

/// A wave function sampled on a periodic [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction<T, const D: usize> {
    grid: Grid<T, D>,
    values: Vec<Complex<T>>,
    hbar: T,
}

/// One Gaussian packet of a superposition: amplitude, centre, momentum, width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet<T, const D: usize> {
    pub amplitude: Complex<T>,
    pub q: [T; D],
    pub p: [T; D],
    pub sigma: T,
}

impl<T: Real, const D: usize> WaveFunction<T, D> {
    pub fn from_values(grid: Grid<T, D>, values: Vec<Complex<T>>, hbar: T) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        check_hbar(hbar)?;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite {
                what: "wave function",
                location: "initial values".into(),
            });
        }
        Ok(Self { grid, values, hbar })
    }

    /// `|q,p⟩`, i.e. a Gaussian of width `√ħ`, renormalised on the grid.
    pub fn coherent(grid: Grid<T, D>, hbar: T, q: [T; D], p: [T; D]) -> Result<Self> {
        check_hbar(hbar)?;
        Self::gaussian(grid, hbar, q, p, hbar.sqrt())
    }

    /// `(πσ²)^{−d/4} e^{−|x−q|²/2σ²} e^{ip·(x−q)/ħ}`, renormalised on the grid.
    pub fn gaussian(grid: Grid<T, D>, hbar: T, q: [T; D], p: [T; D], sigma: T) -> Result<Self> {
        Self::superposition(
            grid,
            hbar,
            &[Packet {
                amplitude: Complex::new(T::one(), T::zero()),
                q,
                p,
                sigma,
            }],
        )
    }

    /// Normalised sum of Gaussian packets.
    pub fn superposition(grid: Grid<T, D>, hbar: T, packets: &[Packet<T, D>]) -> Result<Self> {
        check_hbar(hbar)?;
        if packets.is_empty() {
            return Err(Error::InvalidParameter("superposition needs at least one packet".into()));
        }
        for pk in packets {
            if !(pk.sigma > T::zero()) || !pk.sigma.is_finite() {
                return Err(Error::InvalidParameter(format!("packet width must be positive, got {}", pk.sigma)));
            }
        }
        let values = (0..grid.len())
            .map(|f| {
                let x = grid.position(f);
                packets.iter().fold(Complex::new(T::zero(), T::zero()), |acc, pk| {
                    acc + pk.amplitude * packet_value(&x, pk, hbar)
                })
            })
            .collect();
        let mut psi = Self::from_values(grid, values, hbar)?;
        psi.normalize()?;
        psi.check_boundary(T::lit(BOUNDARY_TOL))?;
        Ok(psi)
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T, D> {
        &self.grid
    }

    #[inline]
    pub fn hbar(&self) -> T {
        self.hbar
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub(crate) fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn norm2(&self) -> T {
        compensated_sum(self.values.iter().map(|v| v.norm_sqr())) * self.grid.cell_volume()
    }

    pub fn norm(&self) -> T {
        self.norm2().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Unnormalized(n.to_f64_lossy()));
        }
        let s = T::one() / n;
        for v in &mut self.values {
            *v = *v * s;
        }
        Ok(())
    }

    /// `⟨self|other⟩` by grid quadrature.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                found: other.grid.len(),
            });
        }
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (a, b) in self.values.iter().zip(&other.values) {
            let z = a.conj() * b;
            re.add(z.re);
            im.add(z.im);
        }
        let dv = self.grid.cell_volume();
        Ok(Complex::new(re.value() * dv, im.value() * dv))
    }

    /// `⟨q,p|ψ⟩` against the analytic (unnormalised-on-grid) coherent state.
    pub fn coherent_overlap(&self, q: &[T; D], p: &[T; D]) -> Complex<T> {
        let pk = Packet {
            amplitude: Complex::new(T::one(), T::zero()),
            q: *q,
            p: *p,
            sigma: self.hbar.sqrt(),
        };
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (f, v) in self.values.iter().enumerate() {
            let x = self.grid.position(f);
            let z = packet_value(&x, &pk, self.hbar).conj() * v;
            re.add(z.re);
            im.add(z.im);
        }
        let dv = self.grid.cell_volume();
        Complex::new(re.value() * dv, im.value() * dv)
    }

    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Largest modulus on the edge nodes of the box.
    pub fn boundary_amplitude(&self) -> T {
        let n = self.grid.points_per_axis();
        let mut worst = T::zero();
        for f in 0..self.values.len() {
            let idx = self.grid.multi_index(f);
            if idx.iter().any(|&j| j == 0 || j == n - 1) {
                worst = worst.max(self.values[f].norm());
            }
        }
        worst
    }

    pub fn check_boundary(&self, tol: T) -> Result<()> {
        let a = self.boundary_amplitude();
        if !(a < tol) {
            return Err(Error::BoundaryMass {
                amplitude: a.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Probability of each Fourier mode, in flat FFT order.
    pub fn momentum_density(&self, spectral: &Spectral<T, D>) -> Vec<T> {
        let mut buf = self.values.clone();
        spectral.forward(&mut buf);
        let p: Vec<T> = buf.iter().map(|v| v.norm_sqr()).collect();
        let total = compensated_sum(p.iter().copied());
        p.into_iter().map(|v| v / total).collect()
    }

    /// Probability carried by modes in the outer quarter of the band.
    pub fn spectral_tail(&self, spectral: &Spectral<T, D>) -> T {
        let p = self.momentum_density(spectral);
        compensated_sum((0..p.len()).filter(|&f| self.grid.is_spectral_tail(f)).map(|f| p[f]))
    }

    pub fn check_aliasing(&self, spectral: &Spectral<T, D>, tol: T) -> Result<()> {
        let tail = self.spectral_tail(spectral);
        if !(tail < tol) {
            return Err(Error::Aliasing {
                tail: tail.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub fn moments(&self) -> Moments<T, D> {
        Moments::of(self)
    }

    /// `Δ(ψ)`: root of the summed position and momentum variances.
    pub fn spread(&self) -> T {
        self.moments().spread()
    }

    /// `⟨ψ, (−ħ²Δ + λ²|y|²)ψ⟩`.
    pub fn second_moment(&self, lambda: T) -> T {
        let m = self.moments();
        lambda * lambda * m.second_x.iter().copied().sum::<T>() + m.second_p.iter().copied().sum::<T>()
    }

    /// `⟨ψ| λ²|x−y|² + |ξ−ħD_y|² |ψ⟩` for a fixed classical point `(x, ξ)`.
    pub fn cost_expectation(&self, x: &[T; D], xi: &[T; D], lambda: T) -> T {
        let m = self.moments();
        let mut s = T::zero();
        for a in 0..D {
            // ⟨(y−x)²⟩ = ⟨y²⟩ − 2x⟨y⟩ + x²
            let px = m.second_x[a] - T::two() * x[a] * m.mean_x[a] + x[a] * x[a];
            let pp = m.second_p[a] - T::two() * xi[a] * m.mean_p[a] + xi[a] * xi[a];
            s = s + lambda * lambda * px + pp;
        }
        s
    }
}

fn check_hbar<T: Real>(hbar: T) -> Result<()> {
    if !(hbar > T::zero()) || !hbar.is_finite() {
        return Err(Error::InvalidParameter(format!("ħ must be positive, got {hbar}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn packet_value<T: Real, const D: usize>(x: &[T; D], pk: &Packet<T, D>, hbar: T) -> Complex<T> {
    let d = vec::sub(x, &pk.q);
    let s2 = pk.sigma * pk.sigma;
    let amp = (T::PI() * s2).powf(-T::from_usize_lossy(D) / T::lit(4.0));
    let env = (-vec::norm2(&d) / (T::two() * s2)).exp();
    let phase = vec::dot(&pk.p, &d) / hbar;
    Complex::from_polar(amp * env, phase)
}

/// First and second moments of position and momentum, per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T, const D: usize> {
    pub mean_x: [T; D],
    pub second_x: [T; D],
    pub mean_p: [T; D],
    pub second_p: [T; D],
}

impl<T: Real, const D: usize> Moments<T, D> {
    pub fn of(psi: &WaveFunction<T, D>) -> Self {
        let grid = psi.grid();
        let rho = psi.density();
        let total = compensated_sum(rho.iter().copied());
        let spectral = Spectral::new(grid);
        let prob_k = psi.momentum_density(&spectral);
        let hbar = psi.hbar();

        let mut mean_x = [T::zero(); D];
        let mut second_x = [T::zero(); D];
        let mut mean_p = [T::zero(); D];
        let mut second_p = [T::zero(); D];
        for a in 0..D {
            let mut m1 = CompensatedSum::new();
            let mut m2 = CompensatedSum::new();
            let mut k1 = CompensatedSum::new();
            let mut k2 = CompensatedSum::new();
            for f in 0..rho.len() {
                let idx = grid.multi_index(f);
                let x = grid.coord(idx[a]);
                m1.add(rho[f] * x);
                m2.add(rho[f] * x * x);
                let p = hbar * grid.wavenumber(idx[a]);
                k1.add(prob_k[f] * p);
                k2.add(prob_k[f] * p * p);
            }
            mean_x[a] = m1.value() / total;
            second_x[a] = m2.value() / total;
            mean_p[a] = k1.value();
            second_p[a] = k2.value();
        }
        Self {
            mean_x,
            second_x,
            mean_p,
            second_p,
        }
    }

    pub fn var_x(&self, a: usize) -> T {
        (self.second_x[a] - self.mean_x[a] * self.mean_x[a]).max(T::zero())
    }

    pub fn var_p(&self, a: usize) -> T {
        (self.second_p[a] - self.mean_p[a] * self.mean_p[a]).max(T::zero())
    }

    pub fn spread(&self) -> T {
        (0..D).map(|a| self.var_x(a) + self.var_p(a)).sum::<T>().sqrt()
    }
}
