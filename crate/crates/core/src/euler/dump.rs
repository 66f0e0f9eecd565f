//! Binary trajectory files: a header `n: u64, T: f64, count: u64`, then
//! `count` blocks of little-endian `f64` coefficients, one per checkpoint.

use std::io::{Read, Write};

use crate::error::{EddyError, Result};
use crate::fourier::{Basis, SpectralField};

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub cutoff: u32,
    pub horizon: f64,
    pub states: Vec<SpectralField>,
}

pub fn write_trajectory<W: Write>(mut w: W, horizon: f64, states: &[SpectralField]) -> Result<()> {
    let cutoff = states.first().map(|s| s.cutoff()).unwrap_or(0);
    w.write_all(&(cutoff as u64).to_le_bytes())?;
    w.write_all(&horizon.to_le_bytes())?;
    w.write_all(&(states.len() as u64).to_le_bytes())?;
    for s in states {
        if s.cutoff() != cutoff {
            return Err(EddyError::CutoffMismatch { expected: cutoff, found: s.cutoff() });
        }
        for c in s.coeffs() {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_trajectory<R: Read>(mut r: R) -> Result<Trajectory> {
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let cutoff = u64::from_le_bytes(next(&mut r)?);
    let horizon = f64::from_le_bytes(next(&mut r)?);
    let count = u64::from_le_bytes(next(&mut r)?);
    let cutoff = u32::try_from(cutoff).map_err(|_| EddyError::invalid("trajectory", "cutoff out of range"))?;
    let dim = if count > 0 { Basis::new(cutoff).len() } else { 0 };
    let mut states = Vec::with_capacity(count.min(1 << 16) as usize);
    for _ in 0..count {
        let mut coeffs = Vec::with_capacity(dim);
        for _ in 0..dim {
            coeffs.push(f64::from_le_bytes(next(&mut r)?));
        }
        states.push(SpectralField::from_coeffs(cutoff, coeffs)?);
    }
    Ok(Trajectory { cutoff, horizon, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Mode;

    #[test]
    fn round_trip() {
        let a = SpectralField::from_modes(3, &[(Mode::new(1, 0).unwrap(), 0.25), (Mode::new(-2, 1).unwrap(), -1.5)])
            .unwrap();
        let b = a.scaled(0.5);
        let mut buf = Vec::new();
        write_trajectory(&mut buf, 0.5, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(buf.len(), 24 + 2 * 8 * Basis::new(3).len());
        assert_eq!(&buf[..8], &3u64.to_le_bytes());
        let t = read_trajectory(buf.as_slice()).unwrap();
        assert_eq!(t, Trajectory { cutoff: 3, horizon: 0.5, states: vec![a, b] });
        assert!(read_trajectory(&buf[..30]).is_err());
    }
}
