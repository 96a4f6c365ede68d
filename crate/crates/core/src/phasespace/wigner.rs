use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{CompensatedSum, Real};
use crate::phasespace::{PhaseField, PhaseGrid};
use crate::quantum::WaveFunction;

/// Wigner transform `(πħ)^{−d} ∫ ψ(x+s) ψ̄(x−s) e^{−2iξ·s/ħ} ds`, with `s`
/// running over lattice offsets that keep both `x ± s` inside the box.
///
/// Position nodes of `pg` must sit on spatial grid nodes, and momenta must
/// stay inside the band `|ξ| < πħ/(2dx)` resolved by that lattice.
pub fn wigner<T: Real, const D: usize>(psi: &WaveFunction<T, D>, pg: &PhaseGrid<T, D>) -> Result<PhaseField<T, D>> {
    let grid = psi.grid();
    let hbar = psi.hbar();
    let n = grid.points_per_axis();
    let dx = grid.dx();
    let band = T::PI() * hbar / (T::two() * dx);
    let pmax = pg.max_abs_momentum();
    if !(pmax < band) {
        return Err(Error::BandViolation {
            momentum: pmax.to_f64_lossy(),
            band: band.to_f64_lossy(),
        });
    }
    // map each position axis onto grid indices
    let mut first = [0usize; D];
    let mut stride = [0usize; D];
    for a in 0..D {
        let off = (pg.x[a].lo - grid.coord(0)) / dx;
        let st = pg.x[a].step / dx;
        let tol = T::lit(1e-9);
        if (off - off.round()).abs() > tol || (st - st.round()).abs() > tol || off < T::zero() || st < T::half() {
            return Err(Error::Misaligned);
        }
        first[a] = off.round().to_usize().unwrap_or(0);
        stride[a] = st.round().to_usize().unwrap_or(1);
        if first[a] + stride[a] * (pg.x[a].count - 1) >= n {
            return Err(Error::Misaligned);
        }
    }

    let vals = psi.values();
    let nx = pg.x_len();
    let nk = pg.xi_len();
    let total_s = grid.len();
    let norm = (T::PI() * hbar).powi(-(D as i32)) * grid.cell_volume();
    let half_n = (n / 2) as isize;

    // one position node per task, all momenta at once
    let columns: Vec<Vec<T>> = (0..nx)
        .into_par_iter()
        .map(|ix| {
            let (xi_idx, _) = pg.multi_index(ix);
            let centre: [isize; D] = std::array::from_fn(|a| (first[a] + stride[a] * xi_idx[a]) as isize);
            // products ψ(x+s) ψ̄(x−s) and offsets s
            let mut prods: Vec<(Complex<T>, [T; D])> = Vec::with_capacity(total_s);
            for f in 0..total_s {
                let mut rem = f;
                let mut plus = 0usize;
                let mut minus = 0usize;
                let mut mult = 1usize;
                let mut s = [T::zero(); D];
                let mut inside = true;
                for a in 0..D {
                    let m = (rem % n) as isize - half_n;
                    rem /= n;
                    let (ip, im) = (centre[a] + m, centre[a] - m);
                    if ip < 0 || im < 0 || ip >= n as isize || im >= n as isize {
                        inside = false;
                        break;
                    }
                    plus += ip as usize * mult;
                    minus += im as usize * mult;
                    mult *= n;
                    s[a] = T::from_isize(m).unwrap() * dx;
                }
                if !inside {
                    continue;
                }
                let z = vals[plus] * vals[minus].conj();
                if z.norm_sqr() > T::zero() {
                    prods.push((z, s));
                }
            }
            (0..nk)
                .map(|ik| {
                    let (_, k_idx) = pg.multi_index(ix + nx * ik);
                    let xi: [T; D] = std::array::from_fn(|a| pg.xi[a].at(k_idx[a]));
                    let mut acc = CompensatedSum::new();
                    for (z, s) in &prods {
                        let mut ph = T::zero();
                        for a in 0..D {
                            ph = ph + xi[a] * s[a];
                        }
                        let arg = -T::two() * ph / hbar;
                        // real part of z·e^{i arg}
                        acc.add(z.re * arg.cos() - z.im * arg.sin());
                    }
                    acc.value() * norm
                })
                .collect()
        })
        .collect();

    let mut values = vec![T::zero(); nx * nk];
    for (ix, col) in columns.into_iter().enumerate() {
        for (ik, v) in col.into_iter().enumerate() {
            values[ix + nx * ik] = v;
        }
    }
    Ok(PhaseField {
        grid: *pg,
        values,
        hbar,
    })
}
