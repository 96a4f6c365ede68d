//! Strang split-step propagation of `iħ∂ₜψ = (−½ħ²Δ + V)ψ` on a periodic grid.

use num_complex::Complex;

use crate::classical::flow::uniform_steps;
use crate::classical::Cutoff;
use crate::error::{Error, Result};
use crate::num::{compensated_sum, Real};
use crate::potential::Potential;
use crate::quantum::wavefunction::{ALIASING_TOL, BOUNDARY_TOL};
use crate::quantum::{Grid, Spectral, WaveFunction};

/// Abort thresholds checked during a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub boundary: T,
    pub aliasing: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            boundary: T::lit(BOUNDARY_TOL),
            aliasing: T::lit(ALIASING_TOL),
        }
    }
}

pub struct Propagator<T: Real, const D: usize> {
    grid: Grid<T, D>,
    hbar: T,
    h: T,
    half_potential: Vec<Complex<T>>,
    kinetic: Vec<Complex<T>>,
    edges: Vec<usize>,
    spectral: Spectral<T, D>,
    tol: Tolerances<T>,
}

impl<T: Real, const D: usize> Propagator<T, D> {
    pub fn new(potential: &Potential<T, D>, grid: Grid<T, D>, hbar: T, h: T) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {h}")));
        }
        let half_potential = (0..grid.len())
            .map(|f| {
                let v = potential.eval(&grid.position(f))?;
                Ok(Complex::from_polar(T::one(), -v * h / (T::two() * hbar)))
            })
            .collect::<Result<Vec<_>>>()?;
        let kinetic = (0..grid.len())
            .map(|f| {
                let k = grid.wavevector(f);
                let k2: T = k.iter().map(|&c| c * c).sum();
                Complex::from_polar(T::one(), -hbar * k2 * h * T::half())
            })
            .collect();
        Ok(Self {
            grid,
            hbar,
            h,
            half_potential,
            kinetic,
            edges: grid.edge_indices(),
            spectral: Spectral::new(&grid),
            tol: Tolerances::default(),
        })
    }

    pub fn with_tolerances(mut self, tol: Tolerances<T>) -> Self {
        self.tol = tol;
        self
    }

    #[inline]
    pub fn step_size(&self) -> T {
        self.h
    }

    pub fn spectral(&self) -> &Spectral<T, D> {
        &self.spectral
    }

    /// One Strang step: half potential kick, free flight in Fourier space,
    /// half potential kick.
    pub fn step(&self, psi: &mut WaveFunction<T, D>) {
        let vals = psi.values_mut();
        for (v, ph) in vals.iter_mut().zip(&self.half_potential) {
            *v = *v * ph;
        }
        self.spectral.forward(vals);
        for (v, ph) in vals.iter_mut().zip(&self.kinetic) {
            *v = *v * ph;
        }
        self.spectral.inverse(vals);
        for (v, ph) in vals.iter_mut().zip(&self.half_potential) {
            *v = *v * ph;
        }
    }

    fn check_state(&self, psi: &WaveFunction<T, D>, t: T) -> Result<()> {
        let vals = psi.values();
        let mut worst = T::zero();
        for &f in &self.edges {
            let a = vals[f].norm();
            if !a.is_finite() {
                return Err(Error::NonFinite {
                    what: "wave function",
                    location: format!("t = {t}"),
                });
            }
            worst = worst.max(a);
        }
        if !(worst < self.tol.boundary) {
            return Err(Error::BoundaryMass {
                amplitude: worst.to_f64_lossy(),
                tolerance: self.tol.boundary.to_f64_lossy(),
            });
        }
        Ok(())
    }

    fn check_input(&self, psi: &WaveFunction<T, D>) -> Result<()> {
        if *psi.grid() != self.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                found: psi.grid().len(),
            });
        }
        if (psi.hbar() - self.hbar).abs() > T::epsilon() * self.hbar {
            return Err(Error::InvalidParameter(format!(
                "state built with ħ = {} but propagator uses ħ = {}",
                psi.hbar(),
                self.hbar
            )));
        }
        Ok(())
    }

    /// Runs `n` steps, calling `visit(k, t_k, ψ_k)` for `k = 0..=n`. The edge
    /// amplitude is monitored every step and the spectral tail at the end.
    pub fn evolve<F>(&self, psi_in: &WaveFunction<T, D>, n: usize, mut visit: F) -> Result<WaveFunction<T, D>>
    where
        F: FnMut(usize, T, &WaveFunction<T, D>) -> Result<()>,
    {
        self.check_input(psi_in)?;
        let mut psi = psi_in.clone();
        visit(0, T::zero(), &psi)?;
        for k in 1..=n {
            self.step(&mut psi);
            let t = self.h * T::from_usize_lossy(k);
            self.check_state(&psi, t)?;
            visit(k, t, &psi)?;
        }
        psi.check_aliasing(&self.spectral, self.tol.aliasing)?;
        Ok(psi)
    }
}

/// `ψ(t)` with steps no larger than `dt`.
pub fn propagate<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    psi: &WaveFunction<T, D>,
    t: T,
    dt: T,
) -> Result<WaveFunction<T, D>> {
    propagate_with(potential, psi, t, dt, Tolerances::default())
}

pub fn propagate_with<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    psi: &WaveFunction<T, D>,
    t: T,
    dt: T,
    tol: Tolerances<T>,
) -> Result<WaveFunction<T, D>> {
    let (n, h) = uniform_steps(t, dt)?;
    let prop = Propagator::new(potential, *psi.grid(), psi.hbar(), h)?.with_tolerances(tol);
    prop.evolve(psi, n, |_, _, _| Ok(()))
}

/// Time-integrated masses `∫₀ᵀ ∫ χ|ψ(t)|²` for several cutoffs at once.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<T> {
    /// Cell-fraction spatial quadrature (second order across jumps).
    pub masses: Vec<T>,
    /// Plain nodal quadrature `Σ χ(x_j)|ψ_j|²`, kept as an error indicator.
    pub nodal: Vec<T>,
    pub final_norm: T,
}

pub fn observe<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    psi_in: &WaveFunction<T, D>,
    horizon: T,
    dt: T,
    cutoffs: &[&Cutoff<T, D>],
    tol: Tolerances<T>,
) -> Result<Observation<T>> {
    let grid = *psi_in.grid();
    let (n, h) = uniform_steps(horizon, dt)?;
    let dx = grid.dx();
    let dv = grid.cell_volume();
    let weights: Vec<(Vec<T>, Vec<T>)> = cutoffs
        .iter()
        .map(|c| {
            (0..grid.len())
                .map(|f| {
                    let x = grid.position(f);
                    (c.cell_average(&x, dx), c.value(&x))
                })
                .unzip()
        })
        .collect();
    let mut masses = vec![T::zero(); cutoffs.len()];
    let mut nodal = vec![T::zero(); cutoffs.len()];
    if n == 0 {
        let final_norm = psi_in.norm();
        return Ok(Observation {
            masses,
            nodal,
            final_norm,
        });
    }
    let mut acc_cell: Vec<crate::num::CompensatedSum<T>> = vec![Default::default(); cutoffs.len()];
    let mut acc_node: Vec<crate::num::CompensatedSum<T>> = vec![Default::default(); cutoffs.len()];
    let prop = Propagator::new(potential, grid, psi_in.hbar(), h)?.with_tolerances(tol);
    let out = prop.evolve(psi_in, n, |k, _, psi| {
        let rho = psi.density();
        let w = if k == 0 || k == n { T::half() } else { T::one() };
        for (i, (wc, wn)) in weights.iter().enumerate() {
            let c = compensated_sum(rho.iter().zip(wc).map(|(r, a)| *r * *a));
            let m = compensated_sum(rho.iter().zip(wn).map(|(r, a)| *r * *a));
            acc_cell[i].add(w * c * dv * h);
            acc_node[i].add(w * m * dv * h);
        }
        Ok(())
    })?;
    for i in 0..cutoffs.len() {
        masses[i] = acc_cell[i].value().max(T::zero()).min(horizon);
        nodal[i] = acc_node[i].value().max(T::zero()).min(horizon);
    }
    Ok(Observation {
        masses,
        nodal,
        final_norm: out.norm(),
    })
}

/// `∫₀ᵀ ∫ χ(x)|ψ(t,x)|² dx dt` by the trapezoid rule in time.
pub fn observed_mass<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    psi_in: &WaveFunction<T, D>,
    horizon: T,
    chi: &Cutoff<T, D>,
    dt: T,
) -> Result<T> {
    Ok(observe(potential, psi_in, horizon, dt, &[chi], Tolerances::default())?.masses[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{flow, PhasePoint, Region};
    use crate::potential::Aabb;
    use std::f64::consts::PI;

    fn grid() -> Grid<f64, 1> {
        Grid::new(512, 16.0).unwrap()
    }

    #[test]
    fn norm_is_preserved() {
        let v = Potential::double_well(0.5, Aabb::centered(6.0));
        let psi = WaveFunction::coherent(grid(), 0.1, [0.5], [0.3]).unwrap();
        for (t, dt) in [(0.37, 0.01), (1.0, 0.003), (2.0, 0.05)] {
            let out = propagate(&v, &psi, t, dt).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_coherent_state_rotates() {
        let v = Potential::harmonic(1.0, Aabb::centered(6.0));
        let hbar = 0.1;
        let psi = WaveFunction::coherent(grid(), hbar, [1.0], [0.0]).unwrap();
        let out = propagate(&v, &psi, PI / 2.0, 1e-4).unwrap();
        let target = WaveFunction::coherent(grid(), hbar, [0.0], [-1.0]).unwrap();
        let ov = target.inner(&out).unwrap().norm();
        assert!(ov >= 1.0 - 1e-5, "overlap {ov}");
    }

    #[test]
    fn free_gaussian_spreads() {
        let v = Potential::free(Aabb::centered(6.0));
        let (hbar, sigma) = (0.1, 0.4);
        let psi = WaveFunction::gaussian(grid(), hbar, [0.0], [0.0], sigma).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let out = propagate(&v, &psi, t, 0.05).unwrap();
            let m = out.moments();
            let want = sigma * sigma / 2.0 + (hbar * t).powi(2) / (2.0 * sigma * sigma);
            assert!((m.var_x(0) - want).abs() < 1e-6, "{} vs {want}", m.var_x(0));
        }
    }

    #[test]
    fn second_order_in_time() {
        let v = Potential::double_well(0.5, Aabb::centered(6.0));
        let psi = WaveFunction::coherent(grid(), 0.1, [0.8], [0.2]).unwrap();
        let t = 1.0;
        let reference = propagate(&v, &psi, t, 0.1 / 64.0).unwrap();
        let err = |dt: f64| {
            let out = propagate(&v, &psi, t, dt).unwrap();
            let diff: Vec<_> = out.values().iter().zip(reference.values()).map(|(a, b)| a - b).collect();
            let d = WaveFunction::from_values(*out.grid(), diff, 0.1).unwrap();
            d.norm()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
    }

    #[test]
    fn ehrenfest_for_harmonic() {
        let v = Potential::harmonic(1.0, Aabb::centered(6.0));
        let hbar = 0.05;
        let psi = WaveFunction::coherent(grid(), hbar, [0.6], [-0.4]).unwrap();
        let prop = Propagator::new(&v, grid(), hbar, 2.0 * PI / 2000.0).unwrap();
        prop.evolve(&psi, 2000, |k, t, s| {
            if k % 250 == 0 {
                let m = s.moments();
                let c = flow(&v, PhasePoint::new([0.6], [-0.4]), t, 1e-3).unwrap();
                assert!((m.mean_x[0] - c.x[0]).abs() < 1e-4, "t={t}");
                assert!((m.mean_p[0] - c.xi[0]).abs() < 1e-4, "t={t}");
            }
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn trivial_cutoffs() {
        let v = Potential::harmonic(1.0, Aabb::centered(6.0));
        let psi = WaveFunction::coherent(grid(), 0.1, [0.5], [0.0]).unwrap();
        assert!((observed_mass(&v, &psi, 1.3, &Cutoff::One, 0.01).unwrap() - 1.3).abs() < 1e-10);
        assert_eq!(observed_mass(&v, &psi, 1.3, &Cutoff::Zero, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn semiclassical_occupation_for_free_packet() {
        let v = Potential::free(Aabb::centered(6.0));
        let chi = Cutoff::Indicator(Region::open_box([0.5], [1.5]));
        let psi = WaveFunction::coherent(grid(), 0.05, [0.0], [1.0]).unwrap();
        let m = observed_mass(&v, &psi, 2.0, &chi, 0.01).unwrap();
        assert!((m - 1.0).abs() < 5e-2, "{m}");
        // refinement: twice the points, a tenth of the step
        let fine = Grid::new(1024, 16.0).unwrap();
        let psi_f = WaveFunction::coherent(fine, 0.05, [0.0], [1.0]).unwrap();
        let mf = observed_mass(&v, &psi_f, 2.0, &chi, 0.001).unwrap();
        assert!((m - mf).abs() < 1e-4, "{m} vs {mf}");
    }

    #[test]
    fn aborts_when_packet_reaches_edge() {
        let v = Potential::free(Aabb::centered(6.0));
        let small = Grid::new(256, 8.0).unwrap();
        let psi = WaveFunction::coherent(small, 0.05, [0.0], [2.0]).unwrap();
        assert!(matches!(propagate(&v, &psi, 3.0, 0.01), Err(Error::BoundaryMass { .. })));
    }
}
