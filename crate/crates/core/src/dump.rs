//! Binary field dump: `"WLF1"`, then little-endian `u32 n`, `u32 N`,
//! `f64 L`, then `N^n` samples as interleaved `f64` (re, im), row-major
//! with axis 1 slowest.

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledField};
use num_complex::Complex64;
use std::io::{Read, Write};

pub const MAGIC: &[u8; 4] = b"WLF1";

pub fn write_samples<W: Write>(grid: &Grid, values: &[Complex64], mut out: W) -> Result<()> {
    let mut buf = Vec::with_capacity(20 + 16 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.points() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.half_width().to_le_bytes());
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf).map_err(|e| Error::io("<dump>", e))
}

pub fn write_field<W: Write>(field: &SampledField, out: W) -> Result<()> {
    write_samples(field.grid(), field.values(), out)
}

pub fn read_samples<R: Read>(mut input: R) -> Result<(Grid, Vec<Complex64>)> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<dump>", e))?;
    if bytes.len() < 20 {
        return Err(Error::Dump(format!("header truncated ({} bytes)", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Dump("bad magic".into()));
    }
    let dim = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let points = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let half_width = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let grid = Grid::new(dim, half_width, points)?;
    let payload = &bytes[20..];
    let expected = grid.len() * 16;
    if payload.len() != expected {
        return Err(Error::Dump(format!(
            "payload has {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((grid, values))
}

pub fn read_field<R: Read>(input: R) -> Result<SampledField> {
    let (grid, values) = read_samples(input)?;
    SampledField::new(grid, values, "dump")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = Grid::new(1, 2.5, 8).unwrap();
        let mut v = vec![Complex64::default(); 8];
        v[0] = Complex64::new(1.0, -2.0);
        let mut buf = Vec::new();
        write_samples(&g, &v, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"WLF1");
        assert_eq!(&buf[4..8], &[1, 0, 0, 0]);
        assert_eq!(&buf[8..12], &[8, 0, 0, 0]);
        assert_eq!(&buf[12..20], &2.5f64.to_le_bytes());
        assert_eq!(&buf[20..28], &1.0f64.to_le_bytes());
        assert_eq!(&buf[28..36], &(-2.0f64).to_le_bytes());
        assert_eq!(buf.len(), 20 + 8 * 16);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        let mut buf = Vec::new();
        write_samples(&g, &[Complex64::new(1.0, 0.0); 8], &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_samples(&bad[..]), Err(Error::Dump(_))));
        assert!(matches!(read_samples(&buf[..buf.len() - 1]), Err(Error::Dump(_))));
        assert!(matches!(read_samples(&buf[..10]), Err(Error::Dump(_))));
    }

    proptest! {
        #[test]
        fn round_trip(seed in proptest::collection::vec(-1e3f64..1e3, 32), half in 0.1f64..100.0) {
            let g = Grid::new(1, half, 16).unwrap();
            let v: Vec<Complex64> = seed.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            let mut buf = Vec::new();
            write_samples(&g, &v, &mut buf).unwrap();
            let (g2, v2) = read_samples(&buf[..]).unwrap();
            prop_assert_eq!(g, g2);
            prop_assert_eq!(v, v2);
        }
    }
}
