//! Classical transport distances and computable upper bounds for the
//! classical/quantum pseudometric `E_{ħ,λ}`. The infimum defining that
//! pseudometric is never evaluated; everything here is an upper bound.

pub mod ot;

pub use ot::TransportPlan;

use crate::classical::PhasePoint;
use crate::error::{Error, Result};
use crate::num::{compensated_sum, vec, Real};
use crate::phasespace::ToeplitzState;
use crate::quantum::WaveFunction;

/// Finitely supported probability measure on phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<T, const D: usize> {
    atoms: Vec<(PhasePoint<T, D>, T)>,
}

impl<T: Real, const D: usize> AtomicMeasure<T, D> {
    pub fn new(atoms: Vec<(PhasePoint<T, D>, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("atomic measure needs at least one atom".into()));
        }
        for (p, w) in &atoms {
            if !(*w >= T::zero()) || !w.is_finite() {
                return Err(Error::NegativeWeight(w.to_f64_lossy()));
            }
            if !p.is_finite() {
                return Err(Error::NonFinite {
                    what: "atom",
                    location: format!("{:?}", vec::to_f64(&p.x)),
                });
            }
        }
        let total = compensated_sum(atoms.iter().map(|a| a.1));
        if (total - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) {
            return Err(Error::Unnormalized(total.to_f64_lossy()));
        }
        Ok(Self { atoms })
    }

    pub fn dirac(p: PhasePoint<T, D>) -> Self {
        Self {
            atoms: vec![(p, T::one())],
        }
    }

    pub fn atoms(&self) -> &[(PhasePoint<T, D>, T)] {
        &self.atoms
    }

    pub fn weights(&self) -> Vec<T> {
        self.atoms.iter().map(|a| a.1).collect()
    }

    /// `∬ (λ²|x|² + |ξ|²) dμ`.
    pub fn second_moment(&self, lambda: T) -> T {
        compensated_sum(
            self.atoms
                .iter()
                .map(|(p, w)| *w * (lambda * lambda * vec::norm2(&p.x) + vec::norm2(&p.xi))),
        )
    }

    /// Pushes every atom forward by `map`.
    pub fn push_forward<F>(&self, mut map: F) -> Result<Self>
    where
        F: FnMut(PhasePoint<T, D>) -> Result<PhasePoint<T, D>>,
    {
        let atoms = self
            .atoms
            .iter()
            .map(|(p, w)| Ok((map(*p)?, *w)))
            .collect::<Result<_>>()?;
        Ok(Self { atoms })
    }
}

impl<T: Real, const D: usize> From<&ToeplitzState<T, D>> for AtomicMeasure<T, D> {
    fn from(r: &ToeplitzState<T, D>) -> Self {
        Self {
            atoms: r.atoms().iter().map(|a| (a.point(), a.weight)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams<T> {
    pub lambda: T,
    pub hbar: T,
}

impl<T: Real> CostParams<T> {
    pub fn new(lambda: T, hbar: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("λ must be positive, got {lambda}")));
        }
        if !(hbar >= T::zero()) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("ħ must be nonnegative, got {hbar}")));
        }
        Ok(Self { lambda, hbar })
    }

    /// `½(λ² + 1) d ħ`, the cost a coherent state pays against its own centre.
    pub fn zero_point<const D: usize>(&self) -> T {
        T::half() * (self.lambda * self.lambda + T::one()) * T::from_usize_lossy(D) * self.hbar
    }
}

#[inline]
fn ground_cost<T: Real, const D: usize>(a: &PhasePoint<T, D>, b: &PhasePoint<T, D>, lambda: T) -> T {
    lambda * lambda * vec::norm2(&vec::sub(&a.x, &b.x)) + vec::norm2(&vec::sub(&a.xi, &b.xi))
}

/// Optimal plan for the ground cost `λ²|x−q|² + |ξ−p|²`.
pub fn optimal_plan<T: Real, const D: usize>(
    f: &AtomicMeasure<T, D>,
    mu: &AtomicMeasure<T, D>,
    lambda: T,
) -> Result<TransportPlan<T>> {
    ot::solve(&f.weights(), &mu.weights(), |i, j| {
        ground_cost(&f.atoms[i].0, &mu.atoms[j].0, lambda)
    })
}

/// `dist_MK,2` with the `λ`-weighted ground cost.
pub fn mk_distance<T: Real, const D: usize>(f: &AtomicMeasure<T, D>, mu: &AtomicMeasure<T, D>, lambda: T) -> Result<T> {
    Ok(optimal_plan(f, mu, lambda)?.cost.max(T::zero()).sqrt())
}

/// `⟨q,p| λ²|x−y|² + |ξ−ħD_y|² |q,p⟩ = λ²|x−q|² + |ξ−p|² + ½(λ²+1)dħ`.
pub fn coherent_cost_expectation<T: Real, const D: usize>(
    x: &[T; D],
    xi: &[T; D],
    q: &[T; D],
    p: &[T; D],
    params: &CostParams<T>,
) -> T {
    let l2 = params.lambda * params.lambda;
    l2 * vec::norm2(&vec::sub(x, q)) + vec::norm2(&vec::sub(xi, p)) + params.zero_point::<D>()
}

/// Upper bounds on `E_{ħ,λ}(f, OP^T[(2πħ)^d μ])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudometricBound<T> {
    /// `√(max(1,λ²)·dist_MK,2(f,μ)² + ½(λ²+1)dħ)` with the unweighted cost.
    pub displayed: T,
    /// `√(dist_λ(f,μ)² + ½(λ²+1)dħ)` from the optimal `λ`-weighted plan.
    pub coupling: T,
}

pub fn toeplitz_pseudometric_bound<T: Real, const D: usize>(
    f: &AtomicMeasure<T, D>,
    mu: &AtomicMeasure<T, D>,
    params: &CostParams<T>,
) -> Result<PseudometricBound<T>> {
    let zp = params.zero_point::<D>();
    let mk1 = mk_distance(f, mu, T::one())?;
    let mkl = optimal_plan(f, mu, params.lambda)?.cost.max(T::zero());
    let l2 = params.lambda * params.lambda;
    Ok(PseudometricBound {
        displayed: (l2.max(T::one()) * mk1 * mk1 + zp).sqrt(),
        coupling: (mkl + zp).sqrt(),
    })
}

/// Cost of the coupling `Σ π_ij δ_{z_i} ⊗ |q_j,p_j⟩⟨q_j,p_j|`, summed atom by
/// atom with [`coherent_cost_expectation`] over the optimal plan.
pub fn coupling_cost<T: Real, const D: usize>(
    f: &AtomicMeasure<T, D>,
    mu: &AtomicMeasure<T, D>,
    params: &CostParams<T>,
) -> Result<T> {
    let plan = optimal_plan(f, mu, params.lambda)?;
    Ok(compensated_sum(plan.entries.iter().map(|&(i, j, m)| {
        let (a, b) = (&f.atoms[i].0, &mu.atoms[j].0);
        m * coherent_cost_expectation(&a.x, &a.xi, &b.x, &b.xi, params)
    })))
}

/// `2Δ(ψ)`, bounding `E_{ħ,1}` between a pure state and its Husimi density.
pub fn pure_state_pseudometric_bound<T: Real, const D: usize>(psi: &WaveFunction<T, D>) -> T {
    T::two() * psi.spread()
}

/// `exp(½(λ + L²/λ)t)`.
pub fn growth_factor<T: Real>(lambda: T, lip: T, t: T) -> T {
    log_growth_factor(lambda, lip, t).exp()
}

pub fn log_growth_factor<T: Real>(lambda: T, lip: T, t: T) -> T {
    T::half() * (lambda + lip * lip / lambda) * t
}

/// Right-hand side of the second-moment coupling bound
/// `2∬(λ²|x|²+|ξ|²)f + 2⟨ψ, (−ħ²Δ + λ²|y|²)ψ⟩`.
pub fn moment_bound<T: Real, const D: usize>(f: &AtomicMeasure<T, D>, quantum_second_moment: T, lambda: T) -> T {
    T::two() * f.second_moment(lambda) + T::two() * quantum_second_moment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, xi: f64) -> PhasePoint<f64, 1> {
        PhasePoint::new([x], [xi])
    }

    fn random_measure(rng: &mut ChaCha8Rng, k: usize) -> AtomicMeasure<f64, 1> {
        let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let s: f64 = w.iter().sum();
        AtomicMeasure::new(
            w.iter()
                .map(|v| (pt(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), v / s))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn distance_basics() {
        let a = AtomicMeasure::dirac(pt(0.0, 0.0));
        let b = AtomicMeasure::dirac(pt(3.0, 4.0));
        assert_eq!(mk_distance(&a, &a, 1.0).unwrap(), 0.0);
        assert!((mk_distance(&a, &b, 1.0).unwrap() - 5.0).abs() < 1e-15);
        assert!((mk_distance(&a, &b, 2.0).unwrap() - (36.0f64 + 16.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        let p = CostParams::new(1.0_f64, 0.1).unwrap();
        assert!((coherent_cost_expectation(&[0.5], &[0.2], &[0.5], &[0.2], &p) - 0.1).abs() < 1e-15);
        let p0 = CostParams::new(1.0, 0.0).unwrap();
        assert_eq!(coherent_cost_expectation(&[1.0], &[0.0], &[0.0], &[0.0], &p0), 1.0);
        let f = AtomicMeasure::dirac(pt(0.3, -0.2));
        let b = toeplitz_pseudometric_bound(&f, &f, &p).unwrap();
        assert!((b.displayed - 0.1f64.sqrt()).abs() < 1e-15);
        assert!((b.coupling - 0.1f64.sqrt()).abs() < 1e-15);
        assert_eq!(growth_factor(1.0, 0.0, 0.0), 1.0);
        assert!((growth_factor(1.0, 1.0, 1.0) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn classical_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_measure(&mut rng, 4);
        let mu = random_measure(&mut rng, 3);
        for lambda in [0.5, 2.0] {
            let p = CostParams::new(lambda, 0.0).unwrap();
            let b = toeplitz_pseudometric_bound(&f, &mu, &p).unwrap();
            let want = f64::max(1.0, lambda) * mk_distance(&f, &mu, 1.0).unwrap();
            assert!((b.displayed - want).abs() < 1e-12);
            // the weighted plan can only be cheaper
            assert!(b.coupling <= b.displayed + 1e-12);
        }
    }

    #[test]
    fn coupling_cost_adds_the_zero_point_term() {
        let f = AtomicMeasure::new(vec![(pt(0.0, 0.0), 0.4), (pt(1.0, 0.5), 0.6)]).unwrap();
        let mu = AtomicMeasure::new(vec![(pt(0.2, -0.1), 0.5), (pt(0.9, 0.7), 0.5)]).unwrap();
        let p = CostParams::new(1.5, 0.05).unwrap();
        let c = coupling_cost(&f, &mu, &p).unwrap();
        let mk = mk_distance(&f, &mu, 1.5).unwrap();
        assert!((c - (mk * mk + p.zero_point::<1>())).abs() < 1e-9);
    }

    #[test]
    fn quadrature_matches_closed_form_cost() {
        let grid = Grid::<f64, 1>::new(512, 16.0).unwrap();
        let hbar = 0.07;
        let psi = WaveFunction::coherent(grid, hbar, [0.4], [-0.3]).unwrap();
        let p = CostParams::new(1.3, hbar).unwrap();
        let q = psi.cost_expectation(&[1.1], &[0.2], 1.3);
        let c = coherent_cost_expectation(&[1.1], &[0.2], &[0.4], &[-0.3], &p);
        assert!((q - c).abs() < 1e-6);
    }

    #[test]
    fn pure_state_bound_floor() {
        let grid = Grid::<f64, 1>::new(512, 16.0).unwrap();
        let hbar = 0.1;
        let c = WaveFunction::coherent(grid, hbar, [0.0], [0.3]).unwrap();
        assert!((pure_state_pseudometric_bound(&c) - 2.0 * hbar.sqrt()).abs() < 1e-8);
        let sigma: f64 = 0.6;
        let g = WaveFunction::gaussian(grid, hbar, [0.0], [0.0], sigma).unwrap();
        let want = 2.0 * (sigma * sigma / 2.0 + hbar * hbar / (2.0 * sigma * sigma)).sqrt();
        assert!((pure_state_pseudometric_bound(&g) - want).abs() < 1e-8);
        assert!(pure_state_pseudometric_bound(&g) >= 2.0 * hbar.sqrt());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn measure(k: usize) -> impl Strategy<Value = AtomicMeasure<f64, 1>> {
            prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64, 0.05..1.0f64), k).prop_map(|v| {
                let s: f64 = v.iter().map(|t| t.2).sum();
                AtomicMeasure::new(v.into_iter().map(|(x, xi, w)| (pt(x, xi), w / s)).collect()).unwrap()
            })
        }

        proptest! {
            #[test]
            fn mk_is_a_metric(a in (1usize..6).prop_flat_map(measure),
                              b in (1usize..6).prop_flat_map(measure),
                              c in (1usize..6).prop_flat_map(measure),
                              lambda in 0.3..3.0f64) {
                let ab = mk_distance(&a, &b, lambda).unwrap();
                let ba = mk_distance(&b, &a, lambda).unwrap();
                let bc = mk_distance(&b, &c, lambda).unwrap();
                let ac = mk_distance(&a, &c, lambda).unwrap();
                prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
                prop_assert!(ac <= ab + bc + 1e-9);
                prop_assert!(mk_distance(&a, &a, lambda).unwrap() <= 1e-7);
            }

            #[test]
            fn bound_never_below_zero_point(a in (1usize..5).prop_flat_map(measure),
                                            b in (1usize..5).prop_flat_map(measure),
                                            lambda in 0.2..3.0f64, hbar in 0.0..0.5f64) {
                let p = CostParams::new(lambda, hbar).unwrap();
                let bd = toeplitz_pseudometric_bound(&a, &b, &p).unwrap();
                let floor = p.zero_point::<1>().sqrt();
                prop_assert!(bd.coupling >= floor - 1e-15);
                prop_assert!(bd.displayed >= floor - 1e-15);
            }
        }
    }
}
