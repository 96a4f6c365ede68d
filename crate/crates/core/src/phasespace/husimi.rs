use num_complex::Complex;
use rayon::prelude::*;

use crate::classical::{CompactSet, PhasePoint};
use crate::error::{Error, Result};
use crate::num::{compensated_sum, gauss_legendre_4, vec, CompensatedSum, Real};
use crate::phasespace::{HusimiField, PhaseGrid};
use crate::quantum::WaveFunction;

/// Beyond this many `√ħ` from its centre a coherent state is below 1e−18.
const WINDOW_SIGMAS: f64 = 9.5;

/// `|⟨q,p|ψ⟩|²` summed only over grid nodes near `q`.
fn overlap2<T: Real, const D: usize>(psi: &WaveFunction<T, D>, q: &[T; D], p: &[T; D]) -> T {
    let grid = psi.grid();
    let hbar = psi.hbar();
    let n = grid.points_per_axis();
    let dx = grid.dx();
    let reach = T::lit(WINDOW_SIGMAS) * hbar.sqrt();
    let x0 = grid.coord(0);
    let mut lo = [0usize; D];
    let mut hi = [0usize; D];
    for a in 0..D {
        let l = ((q[a] - reach - x0) / dx).floor().max(T::zero());
        let h = ((q[a] + reach - x0) / dx).ceil().min(T::from_usize_lossy(n - 1));
        lo[a] = l.to_usize().unwrap_or(0);
        hi[a] = h.to_usize().unwrap_or(0);
        if h < l {
            return T::zero();
        }
    }
    let amp = (T::PI() * hbar).powf(-T::from_usize_lossy(D) / T::lit(4.0));
    let vals = psi.values();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut idx = lo;
    loop {
        let mut flat = 0;
        let mut mult = 1;
        let mut x = [T::zero(); D];
        for a in 0..D {
            flat += idx[a] * mult;
            mult *= n;
            x[a] = grid.coord(idx[a]);
        }
        let d = vec::sub(&x, q);
        let env = amp * (-vec::norm2(&d) / (T::two() * hbar)).exp();
        // conj of e^{ip·(x−q)/ħ}
        let phase = -vec::dot(p, &d) / hbar;
        let z = Complex::from_polar(env, phase) * vals[flat];
        re.add(z.re);
        im.add(z.im);
        // odometer over the window
        let mut a = 0;
        loop {
            if a == D {
                let dv = grid.cell_volume();
                return (re.value() * re.value() + im.value() * im.value()) * dv * dv;
            }
            if idx[a] < hi[a] {
                idx[a] += 1;
                break;
            }
            idx[a] = lo[a];
            a += 1;
        }
    }
}

#[inline]
fn husimi_at<T: Real, const D: usize>(psi: &WaveFunction<T, D>, q: &[T; D], p: &[T; D]) -> T {
    overlap2(psi, q, p) / (T::two() * T::PI() * psi.hbar()).powi(D as i32)
}

/// Husimi function `|⟨ψ|q,p⟩|²/(2πħ)^d` at every node of `pg`, from direct
/// coherent-state overlaps on the spatial grid.
pub fn husimi<T: Real, const D: usize>(psi: &WaveFunction<T, D>, pg: &PhaseGrid<T, D>) -> HusimiField<T, D> {
    let values = (0..pg.len())
        .into_par_iter()
        .map(|f| {
            let (x, xi) = pg.node(f);
            husimi_at(psi, &x, &xi)
        })
        .collect();
    HusimiField {
        grid: *pg,
        values,
        hbar: psi.hbar(),
    }
}

/// `∫_K |⟨ψ|q,p⟩|² dq dp/(2πħ)^d` with panels no wider than `√ħ/2`.
pub fn husimi_mass<T: Real, const D: usize>(psi: &WaveFunction<T, D>, k: &CompactSet<T, D>) -> T {
    husimi_mass_with(psi, k, psi.hbar().sqrt() * T::half())
}

/// Composite 4-point Gauss–Legendre quadrature over each box of `K` with
/// panels no wider than `panel`. Where boxes overlap, nodes already covered
/// by an earlier box are dropped.
pub fn husimi_mass_with<T: Real, const D: usize>(psi: &WaveFunction<T, D>, k: &CompactSet<T, D>, panel: T) -> T {
    let gl = gauss_legendre_4::<T>();
    let mut total = CompensatedSum::new();
    for (bi, b) in k.boxes().iter().enumerate() {
        // 1-D node/weight lists along each of the 2D phase axes
        let axes: Vec<Vec<(T, T)>> = (0..2 * D)
            .map(|a| {
                let (lo, hi) = (b.lo(a), b.hi(a));
                let w = hi - lo;
                if !(w > T::zero()) {
                    return Vec::new();
                }
                let m = (w / panel).ceil().to_usize().unwrap_or(1).max(1);
                let h = w / T::from_usize_lossy(m);
                (0..m)
                    .flat_map(|j| {
                        let mid = lo + (T::from_usize_lossy(j) + T::half()) * h;
                        gl.iter().map(move |&(u, wt)| (mid + u * h * T::half(), wt * h * T::half()))
                    })
                    .collect()
            })
            .collect();
        if axes.iter().any(|a| a.is_empty()) {
            continue;
        }
        let count: usize = axes.iter().map(|a| a.len()).product();
        let earlier = &k.boxes()[..bi];
        let part: Vec<T> = (0..count)
            .into_par_iter()
            .map(|mut f| {
                let mut pt = PhasePoint::new([T::zero(); D], [T::zero(); D]);
                let mut w = T::one();
                for (a, ax) in axes.iter().enumerate() {
                    let (node, wt) = ax[f % ax.len()];
                    f /= ax.len();
                    w = w * wt;
                    if a < D {
                        pt.x[a] = node;
                    } else {
                        pt.xi[a - D] = node;
                    }
                }
                if earlier.iter().any(|e| e.contains(&pt)) {
                    return T::zero();
                }
                w * husimi_at(psi, &pt.x, &pt.xi)
            })
            .collect();
        total.add(compensated_sum(part));
    }
    total.value().max(T::zero()).min(T::one())
}

/// Husimi mass of a coherent state in `K` compared with two lower bounds:
/// the displayed `1 − e^{−d_K²/4ħ}/(4π)^d`, and the exact Gaussian tail of a
/// ball of radius `r = dist((q,p), ∁K)`, namely
/// `1 − e^{−r²/2ħ} Σ_{k<d} (r²/2ħ)^k/k!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheck<T> {
    pub mass: T,
    pub diameter: T,
    pub inner_distance: T,
    /// Whether `dist((q,p), ∁K) ≥ d_K/2`.
    pub hypothesis_met: bool,
    pub displayed_bound: T,
    pub displayed_holds: bool,
    pub ball_bound: T,
    pub ball_holds: bool,
}

pub fn coherent_tail_check<T: Real, const D: usize>(
    psi: &WaveFunction<T, D>,
    q: &[T; D],
    p: &[T; D],
    k: &CompactSet<T, D>,
) -> Result<TailCheck<T>> {
    let pt = PhasePoint::new(*q, *p);
    if !k.contains(&pt) {
        return Err(Error::AtomOutsideSet(format!("{:?}", vec::to_f64(q))));
    }
    let hbar = psi.hbar();
    let mass = husimi_mass(psi, k);
    let dk = k.diameter();
    let r = k
        .boxes()
        .iter()
        .map(|b| b.inner_distance(&pt))
        .fold(T::zero(), T::max);
    let displayed_bound = T::one() - (-dk * dk / (T::lit(4.0) * hbar)).exp() / (T::lit(4.0) * T::PI()).powi(D as i32);
    let s = r * r / (T::two() * hbar);
    let mut term = T::one();
    let mut series = T::zero();
    for j in 0..D {
        if j > 0 {
            term = term * s / T::from_usize_lossy(j);
        }
        series = series + term;
    }
    let ball_bound = T::one() - (-s).exp() * series;
    // quadrature slack
    let slack = T::lit(1e-9);
    Ok(TailCheck {
        mass,
        diameter: dk,
        inner_distance: r,
        hypothesis_met: r >= dk * T::half(),
        displayed_bound,
        displayed_holds: mass + slack >= displayed_bound,
        ball_bound,
        ball_holds: mass + slack >= ball_bound,
    })
}
