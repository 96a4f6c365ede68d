//! Binary state snapshots.
//!
//! Layout, all little-endian:
//!
//! | offset | type | field |
//! |---|---|---|
//! | 0 | u64 | d |
//! | 8 | u64 | n (points per axis) |
//! | 16 | f64 | L_box |
//! | 24 | f64 | ħ |
//! | 32 | f64 | t |
//! | 40 | f64 × 2nᵈ | re, im of each node, flat order with axis 0 fastest |

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::quantum::{Grid, WaveFunction};

pub const HEADER_BYTES: usize = 40;

pub fn write_snapshot<T: Real, const D: usize, W: Write>(w: &mut W, psi: &WaveFunction<T, D>, t: T) -> Result<()> {
    let g = psi.grid();
    w.write_all(&(D as u64).to_le_bytes())?;
    w.write_all(&(g.points_per_axis() as u64).to_le_bytes())?;
    for v in [g.length(), psi.hbar(), t] {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    for z in psi.values() {
        w.write_all(&z.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&z.im.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<T: Real, const D: usize, R: Read>(r: &mut R) -> Result<(WaveFunction<T, D>, T)> {
    let mut u = [0u8; 8];
    let mut next_u64 = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut u)?;
        Ok(u64::from_le_bytes(u))
    };
    let d = next_u64(r)? as usize;
    if d != D {
        return Err(Error::DimensionMismatch { expected: D, found: d });
    }
    let n = next_u64(r)? as usize;
    let f = |r: &mut R| -> Result<T> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b)?;
        Ok(T::lit(f64::from_le_bytes(b)))
    };
    let length = f(r)?;
    let hbar = f(r)?;
    let t = f(r)?;
    let grid = Grid::new(n, length)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f(r)?;
        let im = f(r)?;
        values.push(Complex::new(re, im));
    }
    Ok((WaveFunction::from_values(grid, values, hbar)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = Grid::<f64, 2>::new(32, 10.0).unwrap();
        let psi = WaveFunction::coherent(g, 0.3, [0.1, -0.2], [0.4, 0.0]).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &psi, 1.25).unwrap();
        assert_eq!(buf.len(), HEADER_BYTES + 16 * 1024);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        let (back, t) = read_snapshot::<f64, 2, _>(&mut buf.as_slice()).unwrap();
        assert_eq!(t, 1.25);
        assert_eq!(back, psi);
        assert!(read_snapshot::<f64, 1, _>(&mut buf.as_slice()).is_err());
        assert!(read_snapshot::<f64, 2, _>(&mut &buf[..100]).is_err());
    }
}
