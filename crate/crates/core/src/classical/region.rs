//! Observation regions `Ω ⊂ R^d` and cutoff functions built on them.

use crate::num::{vec, Real};
use crate::potential::Aabb;

/// An open subset of position space.
#[derive(Debug, Clone, PartialEq)]
pub enum Region<T, const D: usize> {
    /// Open axis-aligned box `(lo, hi)`.
    Box(Aabb<T, D>),
    /// Open ball.
    Ball { center: [T; D], radius: T },
    Union(Vec<Region<T, D>>),
}

impl<T: Real, const D: usize> Region<T, D> {
    pub fn open_box(lo: [T; D], hi: [T; D]) -> Self {
        Region::Box(Aabb { lo, hi })
    }

    /// Open-set membership; the boundary counts as outside.
    pub fn contains(&self, x: &[T; D]) -> bool {
        match self {
            Region::Box(b) => (0..D).all(|i| x[i] > b.lo[i] && x[i] < b.hi[i]),
            Region::Ball { center, radius } => vec::dist(x, center) < *radius,
            Region::Union(parts) => parts.iter().any(|r| r.contains(x)),
        }
    }

    /// Euclidean distance to the region (zero on its closure).
    pub fn distance(&self, x: &[T; D]) -> T {
        match self {
            Region::Box(b) => {
                let e: [T; D] = std::array::from_fn(|i| {
                    (b.lo[i] - x[i]).max(x[i] - b.hi[i]).max(T::zero())
                });
                vec::norm(&e)
            }
            Region::Ball { center, radius } => (vec::dist(x, center) - *radius).max(T::zero()),
            Region::Union(parts) => parts
                .iter()
                .map(|r| r.distance(x))
                .fold(T::infinity(), T::min),
        }
    }

    /// Distance to the region outside, minus depth inside. Exact for boxes
    /// and balls; for unions it is the minimum over the parts.
    pub fn signed_distance(&self, x: &[T; D]) -> T {
        match self {
            Region::Box(b) => {
                let outside = self.distance(x);
                if outside > T::zero() {
                    return outside;
                }
                -(0..D)
                    .map(|i| (x[i] - b.lo[i]).min(b.hi[i] - x[i]))
                    .fold(T::infinity(), T::min)
            }
            Region::Ball { center, radius } => vec::dist(x, center) - *radius,
            Region::Union(parts) => parts
                .iter()
                .map(|r| r.signed_distance(x))
                .fold(T::infinity(), T::min),
        }
    }

    /// Axis-aligned bounding box of the closure.
    pub fn bounds(&self) -> Aabb<T, D> {
        match self {
            Region::Box(b) => *b,
            Region::Ball { center, radius } => Aabb {
                lo: std::array::from_fn(|i| center[i] - *radius),
                hi: std::array::from_fn(|i| center[i] + *radius),
            },
            Region::Union(parts) => {
                let mut lo = [T::infinity(); D];
                let mut hi = [T::neg_infinity(); D];
                for p in parts {
                    let b = p.bounds();
                    for i in 0..D {
                        lo[i] = lo[i].min(b.lo[i]);
                        hi[i] = hi[i].max(b.hi[i]);
                    }
                }
                Aabb { lo, hi }
            }
        }
    }
}

/// Position-space weight functions `χ: R^d → [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cutoff<T, const D: usize> {
    One,
    Zero,
    /// `1_Ω`
    Indicator(Region<T, D>),
    /// `1_{Ω_δ}` with `Ω_δ = {dist(x, Ω) < δ}`
    Neighborhood { region: Region<T, D>, delta: T },
    /// `χ_δ = (1 − dist(x, Ω)/δ)_+`, Lipschitz with constant `1/δ`
    Tent { region: Region<T, D>, delta: T },
}

impl<T: Real, const D: usize> Cutoff<T, D> {
    #[inline]
    pub fn value(&self, x: &[T; D]) -> T {
        match self {
            Cutoff::One => T::one(),
            Cutoff::Zero => T::zero(),
            Cutoff::Indicator(r) => {
                if r.contains(x) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Cutoff::Neighborhood { region, delta } => {
                if region.distance(x) < *delta {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Cutoff::Tent { region, delta } => {
                (T::one() - region.distance(x) / *delta).max(T::zero())
            }
        }
    }

    /// Whether the cutoff jumps (needs event bracketing along trajectories).
    pub fn is_discontinuous(&self) -> bool {
        matches!(self, Cutoff::Indicator(_) | Cutoff::Neighborhood { .. })
    }

    pub fn lipschitz(&self) -> Option<T> {
        match self {
            Cutoff::One | Cutoff::Zero => Some(T::zero()),
            Cutoff::Tent { delta, .. } => Some(T::one() / *delta),
            _ => None,
        }
    }

    /// Approximate average over a grid cell of width `h` centred at `x`.
    /// Jump cutoffs use the signed distance to the edge, which makes the
    /// spatial quadrature second order across the discontinuity.
    pub fn cell_average(&self, x: &[T; D], h: T) -> T {
        let frac = |sd: T| (T::half() - sd / h).max(T::zero()).min(T::one());
        match self {
            Cutoff::Indicator(r) => frac(r.signed_distance(x)),
            Cutoff::Neighborhood { region, delta } => {
                let d = region.distance(x);
                let sd = if d > T::zero() {
                    d
                } else {
                    region.signed_distance(x)
                };
                frac(sd - *delta)
            }
            _ => self.value(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(a: f64, b: f64) -> Region<f64, 1> {
        Region::open_box([a], [b])
    }

    #[test]
    fn open_semantics() {
        let r = interval(0.5, 1.5);
        assert!(!r.contains(&[0.5]));
        assert!(r.contains(&[0.5000001]));
        assert_eq!(r.distance(&[0.5]), 0.0);
        assert_eq!(r.distance(&[2.0]), 0.5);
        assert_eq!(r.signed_distance(&[1.0]), -0.5);
    }

    #[test]
    fn distance_vanishes_on_region() {
        let r: Region<f64, 2> = Region::Union(vec![
            Region::open_box([0.0, 0.0], [1.0, 1.0]),
            Region::Ball {
                center: [3.0, 0.0],
                radius: 0.5,
            },
        ]);
        for x in [[0.5, 0.5], [3.1, 0.2], [0.9, 0.1]] {
            assert!(r.contains(&x));
            assert_eq!(r.distance(&x), 0.0);
        }
        assert!((r.distance(&[2.0, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn distance_is_one_lipschitz() {
        let r = Region::Union(vec![
            Region::open_box([-1.0, 0.0], [0.0, 2.0]),
            Region::Ball {
                center: [2.0, 2.0],
                radius: 0.7,
            },
        ]);
        let pts: Vec<[f64; 2]> = (0..15)
            .flat_map(|i| (0..15).map(move |j| [-3.0 + 0.45 * i as f64, -2.0 + 0.4 * j as f64]))
            .collect();
        for a in &pts {
            for b in &pts {
                let lhs = (r.distance(a) - r.distance(b)).abs();
                assert!(lhs <= vec::dist(a, b) + 1e-12);
            }
        }
    }

    #[test]
    fn tent_sits_between_indicators() {
        let r = interval(0.0, 1.0);
        let delta = 0.3;
        let tent = Cutoff::Tent {
            region: r.clone(),
            delta,
        };
        let ind = Cutoff::Indicator(r.clone());
        let nb = Cutoff::Neighborhood { region: r, delta };
        for k in 0..200 {
            let x = [-1.0 + 0.015 * k as f64];
            assert!(ind.value(&x) <= tent.value(&x) + 1e-15 || x[0] == 0.0 || x[0] == 1.0);
            assert!(tent.value(&x) <= nb.value(&x));
        }
        assert_eq!(tent.lipschitz(), Some(1.0 / delta));
    }

    #[test]
    fn cell_average_of_interval_integrates_length() {
        let cut = Cutoff::Indicator(interval(0.3141, 1.2718));
        let h = 0.01;
        let s: f64 = (0..400).map(|k| cut.cell_average(&[-1.0 + h * k as f64], h) * h).sum();
        assert!((s - (1.2718 - 0.3141)).abs() < 1e-12);
        let nb = Cutoff::Neighborhood {
            region: interval(0.3141, 1.2718),
            delta: 0.2,
        };
        let s: f64 = (0..400).map(|k| nb.cell_average(&[-1.0 + h * k as f64], h) * h).sum();
        assert!((s - (1.2718 - 0.3141 + 0.4)).abs() < 1e-12);
    }
}
