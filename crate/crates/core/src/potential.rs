//! Potentials `V ∈ C^{1,1}` with gradients and certified `Lip(∇V)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{vec, Real};

/// Closed axis-aligned box in position space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb<T, const D: usize> {
    pub lo: [T; D],
    pub hi: [T; D],
}

impl<T: Real, const D: usize> Aabb<T, D> {
    pub fn new(lo: [T; D], hi: [T; D]) -> Result<Self> {
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidParameter(format!(
                "box lower corner {:?} exceeds upper corner {:?}",
                lo, hi
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Symmetric box `[-r, r]^D`.
    pub fn centered(r: T) -> Self {
        Self {
            lo: vec::splat(-r),
            hi: vec::splat(r),
        }
    }

    pub fn contains(&self, x: &[T; D]) -> bool {
        (0..D).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        (0..D).all(|i| other.lo[i] >= self.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Euclidean distance from the origin to the box.
    pub fn min_radius(&self) -> T {
        let c: [T; D] = std::array::from_fn(|i| {
            if self.lo[i] > T::zero() {
                self.lo[i]
            } else if self.hi[i] < T::zero() {
                -self.hi[i]
            } else {
                T::zero()
            }
        });
        vec::norm(&c)
    }

    /// Distance from the origin to the farthest corner.
    pub fn max_radius(&self) -> T {
        let c: [T; D] = std::array::from_fn(|i| self.lo[i].abs().max(self.hi[i].abs()));
        vec::norm(&c)
    }

    /// `n` evenly spaced points per axis, endpoints included.
    pub fn lattice(&self, n: usize) -> Vec<[T; D]> {
        let n = n.max(1);
        let axis = |i: usize, k: usize| -> T {
            if n == 1 {
                (self.lo[i] + self.hi[i]) * T::half()
            } else {
                self.lo[i]
                    + (self.hi[i] - self.lo[i]) * T::from_usize_lossy(k)
                        / T::from_usize_lossy(n - 1)
            }
        };
        let total = n.pow(D as u32);
        (0..total)
            .map(|mut flat| {
                let mut p = [T::zero(); D];
                for (i, slot) in p.iter_mut().enumerate() {
                    *slot = axis(i, flat % n);
                    flat /= n;
                }
                p
            })
            .collect()
    }
}

/// Built-in potential families. All carry analytic gradients and analytic
/// Lipschitz constants for `∇V` on any box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind<T> {
    /// `V ≡ 0`
    Free,
    /// `V = k|x|²/2`
    Harmonic { stiffness: T },
    /// `V = s(|x|² − 1)²`
    DoubleWell { scale: T },
}

impl<T: Real> PotentialKind<T> {
    #[inline]
    pub fn value<const D: usize>(&self, x: &[T; D]) -> T {
        match *self {
            PotentialKind::Free => T::zero(),
            PotentialKind::Harmonic { stiffness } => T::half() * stiffness * vec::norm2(x),
            PotentialKind::DoubleWell { scale } => {
                let r = vec::norm2(x) - T::one();
                scale * r * r
            }
        }
    }

    #[inline]
    pub fn gradient<const D: usize>(&self, x: &[T; D]) -> [T; D] {
        match *self {
            PotentialKind::Free => vec::zero(),
            PotentialKind::Harmonic { stiffness } => vec::scale(x, stiffness),
            PotentialKind::DoubleWell { scale } => {
                let f = T::lit(4.0) * scale * (vec::norm2(x) - T::one());
                vec::scale(x, f)
            }
        }
    }

    /// Supremum of the Hessian operator norm over `b`.
    pub fn analytic_lip_grad<const D: usize>(&self, b: &Aabb<T, D>) -> Option<T> {
        match *self {
            PotentialKind::Free => Some(T::zero()),
            PotentialKind::Harmonic { stiffness } => Some(stiffness.abs()),
            PotentialKind::DoubleWell { scale } => {
                // Hessian = 4s(r²−1)I + 8s xxᵀ: eigenvalues 4s(3r²−1) and,
                // for D ≥ 2, 4s(r²−1). Both monotone in r².
                let (r0, r1) = (b.min_radius(), b.max_radius());
                let four = T::lit(4.0);
                let three = T::lit(3.0);
                let mut m = T::zero();
                for r in [r0, r1] {
                    let r2 = r * r;
                    m = m.max((four * scale * (three * r2 - T::one())).abs());
                    if D >= 2 {
                        m = m.max((four * scale * (r2 - T::one())).abs());
                    }
                }
                Some(m)
            }
        }
    }
}

/// A potential together with the working box on which `lip_grad` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential<T, const D: usize> {
    pub kind: PotentialKind<T>,
    pub working_box: Aabb<T, D>,
    pub lip_grad: T,
}

impl<T: Real, const D: usize> Potential<T, D> {
    pub fn new(kind: PotentialKind<T>, working_box: Aabb<T, D>) -> Self {
        let lip_grad = estimate_lip_grad(&kind, &working_box, 33);
        Self {
            kind,
            working_box,
            lip_grad,
        }
    }

    pub fn free(working_box: Aabb<T, D>) -> Self {
        Self::new(PotentialKind::Free, working_box)
    }

    pub fn harmonic(stiffness: T, working_box: Aabb<T, D>) -> Self {
        Self::new(PotentialKind::Harmonic { stiffness }, working_box)
    }

    pub fn double_well(scale: T, working_box: Aabb<T, D>) -> Self {
        Self::new(PotentialKind::DoubleWell { scale }, working_box)
    }

    /// Unchecked `V(x)`.
    #[inline]
    pub fn value(&self, x: &[T; D]) -> T {
        self.kind.value(x)
    }

    /// Unchecked `∇V(x)`.
    #[inline]
    pub fn gradient(&self, x: &[T; D]) -> [T; D] {
        self.kind.gradient(x)
    }

    pub fn eval(&self, x: &[T; D]) -> Result<T> {
        let v = self.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "potential",
                location: format!("{:?}", x),
            })
        }
    }

    pub fn grad(&self, x: &[T; D]) -> Result<[T; D]> {
        let g = self.gradient(x);
        if vec::is_finite(&g) {
            Ok(g)
        } else {
            Err(Error::NonFinite {
                what: "potential gradient",
                location: format!("{:?}", x),
            })
        }
    }

    /// Classical Hamiltonian `|ξ|²/2 + V(x)`.
    #[inline]
    pub fn energy(&self, x: &[T; D], xi: &[T; D]) -> T {
        T::half() * vec::norm2(xi) + self.value(x)
    }
}

/// `Lip(∇V)` on `b`: the analytic constant when the family has one,
/// otherwise the sampled estimate on an `n_samples`-per-axis lattice.
pub fn estimate_lip_grad<T: Real, const D: usize>(
    kind: &PotentialKind<T>,
    b: &Aabb<T, D>,
    n_samples: usize,
) -> T {
    kind.analytic_lip_grad(b)
        .unwrap_or_else(|| sampled_lip_grad(|x| kind.gradient(x), b, n_samples))
}

/// Max of `|g(a) − g(b)| / |a − b|` over all pairs of an `n`-per-axis lattice.
pub fn sampled_lip_grad<T: Real, const D: usize>(
    grad: impl Fn(&[T; D]) -> [T; D],
    b: &Aabb<T, D>,
    n: usize,
) -> T {
    let pts = b.lattice(n.max(2));
    let grads: Vec<[T; D]> = pts.iter().map(&grad).collect();
    let mut best = T::zero();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = vec::dist(&pts[i], &pts[j]);
            if d > T::zero() {
                best = best.max(vec::dist(&grads[i], &grads[j]) / d);
            }
        }
    }
    best
}
