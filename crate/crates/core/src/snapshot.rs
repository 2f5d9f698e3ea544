//! Binary container for coefficient fields.
//!
//! Layout, little-endian throughout:
//! - magic `"HNSF"`, version `u32`
//! - period `f64`, truncation radius `u32`, mode count `u64`
//! - per retained mode, in lexicographic `k` order: three `i32` (the integer
//!   wavevector) followed by six `f64` (re/im of the three components).
//!
//! Every retained mode is written, both halves of each conjugate pair, so a
//! file round-trips bit for bit. The grid resolution is not part of the
//! format; readers supply one or accept the smallest dealiasing grid.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::torus::TorusConfig;

pub const MAGIC: [u8; 4] = *b"HNSF";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(w: &mut W, field: &SpectralField) -> Result<()> {
    let lat = field.lattice();
    let cfg = lat.config();
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&cfg.period.to_le_bytes())?;
    w.write_all(&cfg.trunc_n.to_le_bytes())?;
    w.write_all(&(lat.len() as u64).to_le_bytes())?;
    for i in 0..lat.len() {
        let k = lat.k_at(i);
        for c in k {
            w.write_all(&c.to_le_bytes())?;
        }
        for z in &field.coeffs()[i] {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

/// Read a field back. `grid_n` selects the physical grid of the rebuilt
/// torus; `None` picks the smallest grid that dealiases products,
/// `3 * trunc_n`.
pub fn read_snapshot<R: Read>(r: &mut R, grid_n: Option<usize>) -> Result<SpectralField> {
    let magic = read_exact::<4>(r)?;
    if magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_exact::<4>(r)?);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let period = f64::from_le_bytes(read_exact::<8>(r)?);
    let trunc_n = u32::from_le_bytes(read_exact::<4>(r)?);
    let count = u64::from_le_bytes(read_exact::<8>(r)?);

    let grid = grid_n.unwrap_or(3 * trunc_n as usize);
    let torus = TorusConfig::new(period, trunc_n, grid)?;
    let lattice = torus.lattice()?;
    if count != lattice.len() as u64 {
        return Err(Error::Snapshot(format!(
            "mode count {count} does not match the {} modes of radius {trunc_n}",
            lattice.len()
        )));
    }

    let mut field = SpectralField::zero(Arc::clone(&lattice));
    let mut seen = vec![false; lattice.len()];
    for _ in 0..count {
        let k = [
            i32::from_le_bytes(read_exact::<4>(r)?),
            i32::from_le_bytes(read_exact::<4>(r)?),
            i32::from_le_bytes(read_exact::<4>(r)?),
        ];
        let idx = lattice
            .index_of(k)
            .ok_or_else(|| Error::Snapshot(format!("mode {k:?} outside the lattice")))?;
        if seen[idx] {
            return Err(Error::Snapshot(format!("duplicate mode {k:?}")));
        }
        seen[idx] = true;
        for c in 0..3 {
            let re = f64::from_le_bytes(read_exact::<8>(r)?);
            let im = f64::from_le_bytes(read_exact::<8>(r)?);
            field.coeffs_mut()[idx][c] = Complex64::new(re, im);
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn round_trip_is_bitwise() {
        let lat = TorusConfig::new(TAU, 3, 9).unwrap().lattice().unwrap();
        let u = SpectralField::random(Arc::clone(&lat), 21, 1.0);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &u).unwrap();
        let v = read_snapshot(&mut buf.as_slice(), Some(9)).unwrap();
        assert!(u.bitwise_eq(&v));
    }

    #[test]
    fn default_grid_is_dealiasing_minimum() {
        let lat = TorusConfig::new(1.0, 2, 10).unwrap().lattice().unwrap();
        let u = SpectralField::random(Arc::clone(&lat), 2, 0.0);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &u).unwrap();
        let v = read_snapshot(&mut buf.as_slice(), None).unwrap();
        assert_eq!(v.lattice().config().grid_n, 6);
        // coefficients survive even though the grid differs
        for i in 0..lat.len() {
            assert_eq!(u.coeffs()[i], v.coeff(lat.k_at(i)).unwrap());
        }
    }

    #[test]
    fn rejects_corrupt_header() {
        let mut buf = b"XXXX".to_vec();
        buf.extend_from_slice(&[0u8; 64]);
        assert!(matches!(
            read_snapshot(&mut buf.as_slice(), None),
            Err(Error::Snapshot(_))
        ));
    }

    #[test]
    fn rejects_truncated_body() {
        let lat = TorusConfig::new(TAU, 2, 6).unwrap().lattice().unwrap();
        let u = SpectralField::random(Arc::clone(&lat), 4, 0.0);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &u).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(read_snapshot(&mut buf.as_slice(), None).is_err());
    }
}
