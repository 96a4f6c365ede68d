use rayon::prelude::*;

use crate::classical::{CompactSet, Cutoff, PhasePoint};
use crate::error::{Error, Result};
use crate::num::{compensated_sum, vec, Real};
use crate::potential::Potential;
use crate::quantum::{observe, Grid, Observation, Tolerances, WaveFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T, const D: usize> {
    pub q: [T; D],
    pub p: [T; D],
    pub weight: T,
}

impl<T: Real, const D: usize> Atom<T, D> {
    pub fn point(&self) -> PhasePoint<T, D> {
        PhasePoint::new(self.q, self.p)
    }
}

/// `∬ |q,p⟩⟨q,p| μ(dq dp)` for an atomic probability measure `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzState<T, const D: usize> {
    atoms: Vec<Atom<T, D>>,
    hbar: T,
}

impl<T: Real, const D: usize> ToeplitzState<T, D> {
    /// Accepts weights summing to one within `1e−12` (relative to the
    /// precision of `T`) and rescales them exactly.
    pub fn from_density(atoms: Vec<Atom<T, D>>, hbar: T) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("Töplitz state needs at least one atom".into()));
        }
        if !(hbar > T::zero()) {
            return Err(Error::InvalidParameter(format!("ħ must be positive, got {hbar}")));
        }
        for a in &atoms {
            if !(a.weight >= T::zero()) || !a.weight.is_finite() {
                return Err(Error::NegativeWeight(a.weight.to_f64_lossy()));
            }
            if !vec::is_finite(&a.q) || !vec::is_finite(&a.p) {
                return Err(Error::NonFinite {
                    what: "atom",
                    location: format!("{:?}", vec::to_f64(&a.q)),
                });
            }
        }
        let total = compensated_sum(atoms.iter().map(|a| a.weight));
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        if (total - T::one()).abs() > tol {
            return Err(Error::Unnormalized(total.to_f64_lossy()));
        }
        let atoms = atoms
            .into_iter()
            .map(|a| Atom {
                weight: a.weight / total,
                ..a
            })
            .collect();
        Ok(Self { atoms, hbar })
    }

    pub fn atoms(&self) -> &[Atom<T, D>] {
        &self.atoms
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn trace(&self) -> T {
        compensated_sum(self.atoms.iter().map(|a| a.weight))
    }

    pub fn check_inside(&self, k: &CompactSet<T, D>) -> Result<()> {
        for a in &self.atoms {
            if !k.contains(&a.point()) {
                return Err(Error::AtomOutsideSet(format!(
                    "q={:?} p={:?}",
                    vec::to_f64(&a.q),
                    vec::to_f64(&a.p)
                )));
            }
        }
        Ok(())
    }

    /// Coherent state of each atom on `grid`.
    pub fn pure_states(&self, grid: Grid<T, D>) -> Result<Vec<WaveFunction<T, D>>> {
        self.atoms
            .iter()
            .map(|a| WaveFunction::coherent(grid, self.hbar, a.q, a.p))
            .collect()
    }

    /// `Σ w_j ⟨q_j,p_j| A |q_j,p_j⟩` for a per-state functional `A`.
    pub fn expectation<F>(&self, grid: Grid<T, D>, f: F) -> Result<T>
    where
        F: Fn(&WaveFunction<T, D>) -> T,
    {
        let states = self.pure_states(grid)?;
        Ok(compensated_sum(self.atoms.iter().zip(&states).map(|(a, s)| a.weight * f(s))))
    }
}

/// Midpoint atomisation of `1_K/|K|` with `m` cells per phase axis in every
/// box. Cells whose centre lies in an earlier box are dropped.
pub fn atomize_uniform<T: Real, const D: usize>(k: &CompactSet<T, D>, m: usize, hbar: T) -> Result<ToeplitzState<T, D>> {
    if m == 0 {
        return Err(Error::InvalidParameter("atomisation needs m ≥ 1".into()));
    }
    let mut atoms = Vec::new();
    for (bi, b) in k.boxes().iter().enumerate() {
        let steps: Vec<T> = (0..2 * D).map(|a| (b.hi(a) - b.lo(a)) / T::from_usize_lossy(m)).collect();
        let w: T = steps.iter().fold(T::one(), |acc, s| acc * *s);
        let total = m.pow(2 * D as u32);
        for mut f in 0..total {
            let mut pt = PhasePoint::new([T::zero(); D], [T::zero(); D]);
            for (a, s) in steps.iter().enumerate() {
                let i = f % m;
                f /= m;
                let c = b.lo(a) + (T::from_usize_lossy(i) + T::half()) * *s;
                if a < D {
                    pt.x[a] = c;
                } else {
                    pt.xi[a - D] = c;
                }
            }
            if k.boxes()[..bi].iter().any(|e| e.contains(&pt)) {
                continue;
            }
            atoms.push(Atom {
                q: pt.x,
                p: pt.xi,
                weight: w,
            });
        }
    }
    let total = compensated_sum(atoms.iter().map(|a| a.weight));
    if !(total > T::zero()) {
        return Err(Error::InvalidParameter("K has zero phase-space volume".into()));
    }
    for a in &mut atoms {
        a.weight = a.weight / total;
    }
    ToeplitzState::from_density(atoms, hbar)
}

/// Weighted sum over atoms of the pure-state observations; atoms run in
/// parallel and are reduced in atom order.
pub fn toeplitz_observe<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    state: &ToeplitzState<T, D>,
    grid: Grid<T, D>,
    horizon: T,
    dt: T,
    cutoffs: &[&Cutoff<T, D>],
    tol: Tolerances<T>,
) -> Result<Observation<T>> {
    let per_atom: Vec<Observation<T>> = state
        .atoms
        .par_iter()
        .map(|a| {
            let psi = WaveFunction::coherent(grid, state.hbar, a.q, a.p)?;
            observe(potential, &psi, horizon, dt, cutoffs, tol)
        })
        .collect::<Result<_>>()?;
    let weighted = |pick: &dyn Fn(&Observation<T>) -> &Vec<T>| -> Vec<T> {
        (0..cutoffs.len())
            .map(|i| compensated_sum(state.atoms.iter().zip(&per_atom).map(|(a, o)| a.weight * pick(o)[i])))
            .collect()
    };
    Ok(Observation {
        masses: weighted(&|o| &o.masses),
        nodal: weighted(&|o| &o.nodal),
        final_norm: compensated_sum(state.atoms.iter().zip(&per_atom).map(|(a, o)| a.weight * o.final_norm)),
    })
}

/// `∫₀ᵀ trace(χ R(t)) dt`.
pub fn toeplitz_observed_mass<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    state: &ToeplitzState<T, D>,
    grid: Grid<T, D>,
    horizon: T,
    chi: &Cutoff<T, D>,
    dt: T,
) -> Result<T> {
    Ok(toeplitz_observe(potential, state, grid, horizon, dt, &[chi], Tolerances::default())?.masses[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{PhaseBox, Region};
    use crate::potential::Aabb;
    use crate::quantum::observed_mass;

    fn grid() -> Grid<f64, 1> {
        Grid::new(256, 12.0).unwrap()
    }

    fn atom(q: f64, p: f64, weight: f64) -> Atom<f64, 1> {
        Atom { q: [q], p: [p], weight }
    }

    #[test]
    fn validation() {
        assert!(matches!(
            ToeplitzState::from_density(vec![atom(0.0, 0.0, 1.5), atom(1.0, 0.0, -0.5)], 0.1),
            Err(Error::NegativeWeight(_))
        ));
        assert!(ToeplitzState::from_density(vec![atom(0.0, 0.0, 0.7)], 0.1).is_err());
        let r = ToeplitzState::from_density(vec![atom(0.0, 0.0, 0.5), atom(1.0, 0.0, 0.5)], 0.1).unwrap();
        assert_eq!(r.trace(), 1.0);
        let k = CompactSet::single(
            PhaseBox::new(Aabb::new([-0.5], [0.5]).unwrap(), Aabb::new([-0.5], [0.5]).unwrap()),
            0.1,
        )
        .unwrap();
        assert!(r.check_inside(&k).is_err());
    }

    #[test]
    fn observed_mass_is_linear_in_atoms() {
        let v = Potential::harmonic(1.0, Aabb::centered(4.0));
        let chi = Cutoff::Indicator(Region::open_box([-0.3], [0.4]));
        let (t, dt) = (1.5, 0.01);
        let one = ToeplitzState::from_density(vec![atom(0.5, 0.2, 1.0)], 0.1).unwrap();
        let psi = WaveFunction::coherent(grid(), 0.1, [0.5], [0.2]).unwrap();
        let a = toeplitz_observed_mass(&v, &one, grid(), t, &chi, dt).unwrap();
        assert_eq!(a, observed_mass(&v, &psi, t, &chi, dt).unwrap());
        let b_state = ToeplitzState::from_density(vec![atom(-0.6, 0.1, 1.0)], 0.1).unwrap();
        let b = toeplitz_observed_mass(&v, &b_state, grid(), t, &chi, dt).unwrap();
        let mix = ToeplitzState::from_density(vec![atom(0.5, 0.2, 0.25), atom(-0.6, 0.1, 0.75)], 0.1).unwrap();
        let m = toeplitz_observed_mass(&v, &mix, grid(), t, &chi, dt).unwrap();
        assert!((m - (0.25 * a + 0.75 * b)).abs() < 1e-12);
        let full = toeplitz_observed_mass(&v, &mix, grid(), t, &Cutoff::One, dt).unwrap();
        assert!((full - t).abs() < 1e-10);
    }

    #[test]
    fn uniform_atomization_converges() {
        // phase-space indicator of {x < 0.3, ξ > 0.1} averaged over K = [0,1]×[−1,1]
        let k = CompactSet::single(
            PhaseBox::new(Aabb::new([0.0], [1.0]).unwrap(), Aabb::new([-1.0], [1.0]).unwrap()),
            0.1,
        )
        .unwrap();
        let chi = |p: &PhasePoint<f64, 1>| if p.x[0] < 0.3 && p.xi[0] > 0.1 { 1.0 } else { 0.0 };
        let exact = 0.3 * 0.9 / 2.0;
        let mut prev = f64::INFINITY;
        for m in [7, 14, 28, 56] {
            let r = atomize_uniform(&k, m, 0.1).unwrap();
            assert_eq!(r.atoms().len(), m * m);
            let s: f64 = r.atoms().iter().map(|a| a.weight * chi(&a.point())).sum();
            let err = (s - exact).abs();
            assert!(err <= 2.0 / m as f64, "m={m} err={err}");
            assert!(err <= prev + 1e-12);
            prev = err;
        }
    }
}
