//! Binary state dumps.
//!
//! Layout, all little-endian: `nx: u64`, `ny: u64`, `n_branch: u64`,
//! `tau: f64`, then for each branch in order the amplitudes row-major
//! `[ix][iy]` as `(re: f32, im: f32)` pairs.

use num_complex::Complex64;
use std::io::{Read, Write};

use super::GridWavefunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub tau: f64,
    pub branches: Vec<Vec<Complex64>>,
}

pub fn write_snapshot<W: Write>(state: &GridWavefunction, mut w: W) -> Result<()> {
    let mut bytes = Vec::with_capacity(32 + state.fields.len() * state.spec.nx * state.spec.ny * 8);
    for v in [state.spec.nx as u64, state.spec.ny as u64, state.fields.len() as u64] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes.extend_from_slice(&state.tau.to_le_bytes());
    for f in &state.fields {
        for z in &f.psi {
            bytes.extend_from_slice(&(z.re as f32).to_le_bytes());
            bytes.extend_from_slice(&(z.im as f32).to_le_bytes());
        }
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 32 {
        return Err(Error::Io("snapshot shorter than its header".into()));
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().unwrap() };
    let nx = u64::from_le_bytes(word(0)) as usize;
    let ny = u64::from_le_bytes(word(1)) as usize;
    let nb = u64::from_le_bytes(word(2)) as usize;
    let tau = f64::from_le_bytes(word(3));
    let per = nx * ny;
    if bytes.len() != 32 + nb * per * 8 {
        return Err(Error::Io(format!(
            "snapshot body has {} bytes, header implies {}",
            bytes.len() - 32,
            nb * per * 8
        )));
    }
    let vals: Vec<Complex64> = bytes[32..]
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[..4].try_into().unwrap());
            let im = f32::from_le_bytes(c[4..].try_into().unwrap());
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    Ok(Snapshot {
        nx,
        ny,
        tau,
        branches: vals.chunks(per).map(<[Complex64]>::to_vec).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{initial_state, GridSpec};
    use super::*;
    use crate::model::Model;

    #[test]
    fn round_trip() {
        let m = Model::dimensionless(1e-3, 0.8, 1.2, Complex64::new(0.5, 0.1)).unwrap();
        let spec = GridSpec {
            x_max: 30.0,
            nx: 64,
            ny: 16,
            y_max: 10.0,
            ..GridSpec::default()
        };
        let s = initial_state(&m, &spec).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 2 * 64 * 16 * 8);
        assert_eq!(&buf[..8], &64u64.to_le_bytes());
        let r = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!((r.nx, r.ny, r.tau, r.branches.len()), (64, 16, 0.0, 2));
        for (a, b) in r.branches[1].iter().zip(&s.fields[1].psi) {
            assert!((a - b).norm() < 1e-6);
        }
        assert!(read_snapshot(&buf[..40]).is_err());
    }
}
