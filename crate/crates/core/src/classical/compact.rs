use crate::classical::PhasePoint;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::potential::Aabb;

/// Closed box `x ∈ [x.lo, x.hi], ξ ∈ [xi.lo, xi.hi]` in phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBox<T, const D: usize> {
    pub x: Aabb<T, D>,
    pub xi: Aabb<T, D>,
}

impl<T: Real, const D: usize> PhaseBox<T, D> {
    pub fn new(x: Aabb<T, D>, xi: Aabb<T, D>) -> Self {
        Self { x, xi }
    }

    /// Box of half-widths `(rx, rxi)` around a phase point.
    pub fn around(center: &PhasePoint<T, D>, rx: T, rxi: T) -> Self {
        Self {
            x: Aabb {
                lo: std::array::from_fn(|i| center.x[i] - rx),
                hi: std::array::from_fn(|i| center.x[i] + rx),
            },
            xi: Aabb {
                lo: std::array::from_fn(|i| center.xi[i] - rxi),
                hi: std::array::from_fn(|i| center.xi[i] + rxi),
            },
        }
    }

    pub fn contains(&self, p: &PhasePoint<T, D>) -> bool {
        self.x.contains(&p.x) && self.xi.contains(&p.xi)
    }

    /// Lower and upper corner in the `2D` phase coordinates `(x, ξ)`.
    pub fn lo(&self, k: usize) -> T {
        if k < D {
            self.x.lo[k]
        } else {
            self.xi.lo[k - D]
        }
    }

    pub fn hi(&self, k: usize) -> T {
        if k < D {
            self.x.hi[k]
        } else {
            self.xi.hi[k - D]
        }
    }

    pub fn volume(&self) -> T {
        (0..2 * D).fold(T::one(), |v, k| v * (self.hi(k) - self.lo(k)))
    }

    pub fn center(&self) -> PhasePoint<T, D> {
        PhasePoint {
            x: std::array::from_fn(|i| (self.x.lo[i] + self.x.hi[i]) * T::half()),
            xi: std::array::from_fn(|i| (self.xi.lo[i] + self.xi.hi[i]) * T::half()),
        }
    }

    /// Euclidean distance from an interior point to the complement.
    pub fn inner_distance(&self, p: &PhasePoint<T, D>) -> T {
        if !self.contains(p) {
            return T::zero();
        }
        (0..2 * D)
            .map(|k| {
                let c = p.coord(k);
                (c - self.lo(k)).min(self.hi(k) - c)
            })
            .fold(T::infinity(), T::min)
    }

    fn corners(&self) -> Vec<PhasePoint<T, D>> {
        (0..(1usize << (2 * D)))
            .map(|mask| {
                let c = |k: usize| {
                    if mask >> k & 1 == 1 {
                        self.hi(k)
                    } else {
                        self.lo(k)
                    }
                };
                PhasePoint {
                    x: std::array::from_fn(c),
                    xi: std::array::from_fn(|i| c(i + D)),
                }
            })
            .collect()
    }
}

/// A compact phase-space set `K`, a finite union of closed boxes, together
/// with the sampling lattice used to approximate infima over `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet<T, const D: usize> {
    boxes: Vec<PhaseBox<T, D>>,
    spacing: T,
    samples: Vec<PhasePoint<T, D>>,
}

impl<T: Real, const D: usize> CompactSet<T, D> {
    pub fn new(boxes: Vec<PhaseBox<T, D>>, spacing: T) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::InvalidParameter("compact set has no boxes".into()));
        }
        if !(spacing > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "lattice spacing must be positive, got {spacing}"
            )));
        }
        for b in &boxes {
            for k in 0..2 * D {
                if !(b.lo(k) <= b.hi(k)) || !b.lo(k).is_finite() || !b.hi(k).is_finite() {
                    return Err(Error::InvalidParameter(format!("malformed phase box {b:?}")));
                }
            }
        }
        let samples = boxes.iter().flat_map(|b| box_lattice(b, spacing)).collect();
        Ok(Self {
            boxes,
            spacing,
            samples,
        })
    }

    pub fn single(b: PhaseBox<T, D>, spacing: T) -> Result<Self> {
        Self::new(vec![b], spacing)
    }

    pub fn boxes(&self) -> &[PhaseBox<T, D>] {
        &self.boxes
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn sample_grid(&self) -> &[PhasePoint<T, D>] {
        &self.samples
    }

    /// Same boxes with the lattice spacing divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self::new(
            self.boxes.clone(),
            self.spacing / T::from_usize_lossy(factor.max(1)),
        )
        .expect("refinement of a valid set")
    }

    pub fn contains(&self, p: &PhasePoint<T, D>) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }

    /// Diameter `d_K`. For a union of boxes the maximum is attained at a
    /// pair of corners.
    pub fn diameter(&self) -> T {
        let corners: Vec<PhasePoint<T, D>> = self.boxes.iter().flat_map(|b| b.corners()).collect();
        let mut d = T::zero();
        for a in &corners {
            for b in &corners {
                d = d.max(a.dist(b));
            }
        }
        d
    }
}

fn box_lattice<T: Real, const D: usize>(b: &PhaseBox<T, D>, h: T) -> Vec<PhasePoint<T, D>> {
    let counts: Vec<usize> = (0..2 * D)
        .map(|k| {
            let w = b.hi(k) - b.lo(k);
            if w <= T::zero() {
                1
            } else {
                (w / h - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1) + 1
            }
        })
        .collect();
    let coord = |k: usize, j: usize| -> T {
        if counts[k] == 1 {
            b.lo(k)
        } else {
            b.lo(k) + (b.hi(k) - b.lo(k)) * T::from_usize_lossy(j) / T::from_usize_lossy(counts[k] - 1)
        }
    };
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut flat| {
            let c: Vec<T> = counts
                .iter()
                .enumerate()
                .map(|(k, &n)| {
                    let v = coord(k, flat % n);
                    flat /= n;
                    v
                })
                .collect();
            PhasePoint {
                x: std::array::from_fn(|i| c[i]),
                xi: std::array::from_fn(|i| c[i + D]),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pbox(x0: f64, x1: f64, p0: f64, p1: f64) -> PhaseBox<f64, 1> {
        PhaseBox::new(Aabb::new([x0], [x1]).unwrap(), Aabb::new([p0], [p1]).unwrap())
    }

    #[test]
    fn samples_lie_in_set() {
        let k = CompactSet::new(vec![pbox(-0.1, 0.1, 0.9, 1.1), pbox(2.0, 2.5, -1.0, 0.0)], 0.05)
            .unwrap();
        assert!(!k.sample_grid().is_empty());
        assert!(k.sample_grid().iter().all(|p| k.contains(p)));
        // 5 x 5 and 11 x 21
        assert_eq!(k.sample_grid().len(), 25 + 11 * 21);
    }

    #[test]
    fn diameter_of_square_is_diagonal() {
        let k = CompactSet::single(pbox(-1.0, 1.0, -1.0, 1.0), 0.5).unwrap();
        assert!((k.diameter() - 8f64.sqrt()).abs() < 1e-14);
        let u = CompactSet::new(vec![pbox(0.0, 1.0, 0.0, 1.0), pbox(3.0, 4.0, 0.0, 1.0)], 0.5).unwrap();
        assert!((u.diameter() - 17f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn empty_and_invalid_sets_rejected() {
        assert!(CompactSet::<f64, 1>::new(vec![], 0.1).is_err());
        assert!(CompactSet::single(pbox(0.0, 1.0, 0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn degenerate_box_is_a_point() {
        let k = CompactSet::single(pbox(0.0, 0.0, 1.0, 1.0), 0.1).unwrap();
        assert_eq!(k.sample_grid().len(), 1);
        assert_eq!(k.diameter(), 0.0);
    }

    #[test]
    fn inner_distance() {
        let b = pbox(-1.0, 1.0, -2.0, 2.0);
        let p = PhasePoint::new([0.25], [0.0]);
        assert_eq!(b.inner_distance(&p), 0.75);
    }
}
