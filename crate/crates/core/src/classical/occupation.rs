//! Occupation times `∫₀ᵀ χ(X(t; x, ξ)) dt` and their infimum over `K`.

use rayon::prelude::*;

use crate::classical::flow::{uniform_steps, VerletStepper};
use crate::classical::{CompactSet, Cutoff, PhasePoint, Region};
use crate::error::{Error, Result};
use crate::num::{CompensatedSum, Real};
use crate::potential::Potential;

/// Per-trajectory results of [`trace_trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats<T> {
    /// One occupation time per requested cutoff.
    pub occupations: Vec<T>,
    /// First time the trajectory is inside the hit region, if it ever is.
    pub first_hit: Option<T>,
    pub left_working_box: bool,
}

/// Integrates one trajectory over `[0, horizon]` and accumulates the
/// occupation time of every cutoff. Jump cutoffs are integrated exactly up
/// to bisection of the crossing time inside each step (tolerance
/// `dt·1e−3`); continuous ones use the trapezoid rule on the steps.
pub fn trace_trajectory<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    p0: PhasePoint<T, D>,
    horizon: T,
    dt: T,
    cutoffs: &[&Cutoff<T, D>],
    hit_region: Option<&Region<T, D>>,
) -> Result<TrajectoryStats<T>> {
    if !(horizon > T::zero()) {
        return Err(Error::InvalidParameter(format!("horizon must be positive, got {horizon}")));
    }
    let (n, h) = uniform_steps(horizon, dt)?;
    let tol = dt * T::lit(1e-3);
    let mut stepper = VerletStepper::new(potential, p0, h);
    let mut acc = vec![CompensatedSum::new(); cutoffs.len()];
    let mut prev_vals: Vec<T> = cutoffs.iter().map(|c| c.value(&p0.x)).collect();
    let mut inside = hit_region.map(|r| r.contains(&p0.x)).unwrap_or(false);
    let mut first_hit = if inside { Some(T::zero()) } else { None };
    let mut left = !potential.working_box.contains(&p0.x);

    for k in 0..n {
        let t0 = T::from_usize_lossy(k) * h;
        let next = stepper.peek(h);
        if !next.is_finite() {
            return Err(Error::NonFinite {
                what: "trajectory",
                location: format!("t = {t0}"),
            });
        }
        for (j, cut) in cutoffs.iter().enumerate() {
            let v0 = prev_vals[j];
            let v1 = cut.value(&next.x);
            let contrib = if cut.is_discontinuous() {
                if v0 == v1 {
                    v0 * h
                } else {
                    let s = bisect(&stepper, h, tol, |p| cut.value(&p.x) == v0);
                    v0 * s + v1 * (h - s)
                }
            } else {
                (v0 + v1) * T::half() * h
            };
            acc[j].add(contrib);
            prev_vals[j] = v1;
        }
        if let Some(r) = hit_region {
            let now_inside = r.contains(&next.x);
            if first_hit.is_none() && now_inside && !inside {
                let s = bisect(&stepper, h, tol, |p| !r.contains(&p.x));
                first_hit = Some(t0 + s);
            }
            inside = now_inside;
        }
        stepper.step();
        left |= !potential.working_box.contains(&stepper.state().x);
    }

    Ok(TrajectoryStats {
        occupations: acc
            .iter()
            .map(|a| a.value().max(T::zero()).min(horizon))
            .collect(),
        first_hit,
        left_working_box: left,
    })
}

/// Largest `s ∈ [0, h]` (to `tol`) such that `same(Φ_s)` still holds.
fn bisect<T: Real, const D: usize>(
    stepper: &VerletStepper<'_, T, D>,
    h: T,
    tol: T,
    same: impl Fn(&PhasePoint<T, D>) -> bool,
) -> T {
    let (mut lo, mut hi) = (T::zero(), h);
    while hi - lo > tol {
        let mid = (lo + hi) * T::half();
        if same(&stepper.peek(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::half()
}

/// `∫₀ᵀ χ(X(t; p0)) dt`.
pub fn occupation_time<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    p0: PhasePoint<T, D>,
    horizon: T,
    chi: &Cutoff<T, D>,
    dt: T,
) -> Result<T> {
    Ok(trace_trajectory(potential, p0, horizon, dt, &[chi], None)?.occupations[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricConstant<T, const D: usize> {
    /// Minimum over the sample lattice of the occupation time.
    pub value: T,
    pub argmin: PhasePoint<T, D>,
    pub left_working_box: bool,
}

/// Discretised `inf_{(x,ξ)∈K} ∫₀ᵀ χ(X(t; x, ξ)) dt` as a minimum over the
/// sample lattice of `K`. The reduction is independent of thread count.
pub fn geometric_constant<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    k: &CompactSet<T, D>,
    chi: &Cutoff<T, D>,
    horizon: T,
    dt: T,
) -> Result<GeometricConstant<T, D>> {
    let stats: Vec<TrajectoryStats<T>> = k
        .sample_grid()
        .par_iter()
        .map(|p| trace_trajectory(potential, *p, horizon, dt, &[chi], None))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, s) in stats.iter().enumerate() {
        if s.occupations[0] < stats[best].occupations[0] {
            best = i;
        }
    }
    Ok(GeometricConstant {
        value: stats[best].occupations[0],
        argmin: k.sample_grid()[best],
        left_working_box: stats.iter().any(|s| s.left_working_box),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T, const D: usize> {
    pub point: PhasePoint<T, D>,
    pub occupation: T,
    pub first_hit: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcReport<T, const D: usize> {
    pub satisfied: bool,
    pub witnesses: Vec<Witness<T, D>>,
    pub left_working_box: bool,
}

/// Checks that every sampled trajectory from `K` enters `Ω` during `(0, T)`.
pub fn check_gc<T: Real, const D: usize>(
    potential: &Potential<T, D>,
    k: &CompactSet<T, D>,
    omega: &Region<T, D>,
    horizon: T,
    dt: T,
) -> Result<GcReport<T, D>> {
    let chi = Cutoff::Indicator(omega.clone());
    let witnesses: Vec<(Witness<T, D>, bool)> = k
        .sample_grid()
        .par_iter()
        .map(|p| {
            let s = trace_trajectory(potential, *p, horizon, dt, &[&chi], Some(omega))?;
            Ok((
                Witness {
                    point: *p,
                    occupation: s.occupations[0],
                    first_hit: s.first_hit,
                },
                s.left_working_box,
            ))
        })
        .collect::<Result<_>>()?;
    let satisfied = witnesses
        .iter()
        .all(|(w, _)| matches!(w.first_hit, Some(t) if t < horizon));
    let left_working_box = witnesses.iter().any(|(_, l)| *l);
    Ok(GcReport {
        satisfied,
        witnesses: witnesses.into_iter().map(|(w, _)| w).collect(),
        left_working_box,
    })
}
